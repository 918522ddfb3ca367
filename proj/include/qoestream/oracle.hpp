#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "qoestream/rng.hpp"
#include "qoestream/slotsolver.hpp"

namespace qoe {

struct GridSearchResult {
  Eigen::VectorXd rates;
  double objective = 0.0;
  bool feasible = false;
};

/// Brute force for small problems: every user but the last walks `levels`
/// log-spaced rates on its box and the last user takes whatever budget is
/// left (capped at r_max; φ is nonincreasing, so that is its best reply).
/// Each refinement round re-grids ±2 cells around the incumbent.
GridSearchResult grid_search(const SlotProblem& problem, int levels = 200, int refinements = 0);

/// Random 2–3 user style instance: hinge weights on the 30..70 grid (some
/// zero), synthetic rate–quality draws, γ-scaled peaks and a random HP load.
SlotProblem random_slot_problem(Stream& rng, int users, double gamma = 6.0);

/// Optimality residuals of an allocation for the shared-budget problem.
struct KktResidual {
  /// Largest distance of 0 from ∂(φ_u + λ r/P_u) at r_u, relative to the size
  /// of the terms, over users (one-sided at box faces).
  double stationarity = 0.0;
  /// |λ · (budget − Σ r/P)|.
  double slackness = 0.0;
  /// max{Σ r/P − budget, 0}.
  double excess = 0.0;
  bool in_box = true;
};

KktResidual kkt_residual(const SlotProblem& problem, const Allocation& allocation);

struct OracleReport {
  int instances = 0;
  int failures = 0;
  /// (solver − oracle) / |oracle|: positive means the solver lost to brute force.
  double max_relative_gap = 0.0;
  double min_relative_gap = 0.0;
  double seconds = 0.0;
};

/// Compares solve_slot with refined grid search on random instances.
/// An instance fails when the solver's objective exceeds the oracle's by more
/// than `tolerance` relative (denominator floored at 1e-9 so round-off at a
/// zero optimum does not count), or the solver's rates are infeasible. The grid is
/// only an upper bound on the optimum, so beating it is not a failure.
OracleReport run_oracle_suite(int instances, std::uint64_t seed, int levels = 200,
                              double tolerance = 1e-4);

}  // namespace qoe
