#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qoestream/ratequality.hpp"

namespace qoe {

/// Hinge term w * max{level − q(r), 0} in a user's per-slot penalty.
struct Breakpoint {
  double level;   ///< quality level x_i (Case I) or g_j (Case II)
  double weight;  ///< v / T_u, nonnegative
};

/// One user's entry in the per-slot convex program.
struct SolverUser {
  std::vector<Breakpoint> penalties;
  RateQualityParams params;
  double r_min = kRateMinKbps;
  double r_max = kRateMaxKbps;
  /// 1 / P_u for the realized slot, or E[1 / P_u] for the averaged problem.
  double inverse_peak = 1.0;
  /// 1 / T_u. Scales the user's quality in the flat-region tie-break.
  double share = 1.0;
};

/// minimize Σ_u φ_u(r_u)  s.t.  Σ_u r_u · inverse_peak_u ≤ budget,
/// r_u ∈ [r_min_u, r_max_u], where φ_u(r) = Σ_i w_i max{x_i − α ln r − β, 0}.
struct SlotProblem {
  std::vector<SolverUser> users;
  double budget = 1.0;

  /// Throws std::invalid_argument on malformed entries.
  void validate() const;
};

struct Allocation {
  Eigen::VectorXd rates;
  /// Multiplier of the shared time-budget constraint (0 when it is slack or
  /// when the allocation came from the flat-region tie-break).
  double dual = 0.0;
  /// Even minimum rates did not fit; rates were scaled down proportionally.
  bool overloaded = false;
};

/// φ_u(rate).
double penalty(const SolverUser& user, double rate);
double slot_objective(const SlotProblem& problem, const Eigen::Ref<const Eigen::VectorXd>& rates);

/// argmin over the box of φ(r) + λ·r/P. λ = 0 returns r_max.
double user_rate_given_dual(const SolverUser& user, double lambda);

/// Per-slot solve via bisection on the budget multiplier. When the penalty is
/// satisfied with budget to spare, the leftover is split to maximize
/// Σ share·q_u, so all-zero weights reproduce solve_log_utility exactly.
Allocation solve_slot(const SlotProblem& problem);

/// Same algorithm on an averaged (expected-budget, expected-inverse-peak) problem.
Allocation solve_static(const SlotProblem& problem);

/// maximize Σ_u share_u·α_u·ln r_u over the same feasible set; ignores penalties.
Allocation solve_log_utility(const SlotProblem& problem);

}  // namespace qoe
