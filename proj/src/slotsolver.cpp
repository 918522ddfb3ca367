#include "qoestream/slotsolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qoe {

namespace {

constexpr int kMaxBisection = 200;
constexpr int kMaxBracketSteps = 2100;

/// φ restricted to pieces [lo, hi] on which the active weight is constant.
struct Piece {
  double lo;
  double hi;
  double weight;  // Σ w_i over hinges active on (lo, hi)
};

struct PreparedUser {
  std::vector<Piece> pieces;
  double alpha;
  double inverse_peak;

  double rate(double lambda) const {
    if (lambda <= 0.0) return pieces.back().hi;
    for (const Piece& p : pieces) {
      if (p.weight <= 0.0) return p.lo;
      const double candidate = alpha * p.weight / (lambda * inverse_peak);
      if (candidate < p.hi) return std::max(candidate, p.lo);
    }
    return pieces.back().hi;
  }

  /// lim λ→0+ of rate(λ): the lowest rate past which φ is flat.
  double flat_start() const {
    for (const Piece& p : pieces)
      if (p.weight <= 0.0) return p.lo;
    return pieces.back().hi;
  }
};

PreparedUser prepare(const SolverUser& user) {
  std::vector<std::pair<double, double>> cuts;  // (breakpoint rate, weight)
  for (const Breakpoint& b : user.penalties) {
    if (b.weight <= 0.0) continue;
    const double rate = rate_for_quality(user.params, b.level);
    if (rate <= user.r_min) continue;  // hinge inactive on the whole box
    cuts.emplace_back(rate, b.weight);
  }
  std::sort(cuts.begin(), cuts.end());
  // Suffix sums, so the weight past the last cut is exactly zero.
  std::vector<double> above(cuts.size() + 1, 0.0);
  for (std::size_t i = cuts.size(); i-- > 0;) above[i] = above[i + 1] + cuts[i].second;

  PreparedUser prepared{{}, user.params.alpha, user.inverse_peak};
  double lo = user.r_min;
  std::size_t i = 0;
  for (; i < cuts.size() && cuts[i].first < user.r_max; ++i) {
    if (cuts[i].first > lo) {
      prepared.pieces.push_back({lo, cuts[i].first, above[i]});
      lo = cuts[i].first;
    }
  }
  prepared.pieces.push_back({lo, user.r_max, above[i]});
  return prepared;
}

double usage(const std::vector<PreparedUser>& users, double lambda, Eigen::VectorXd& rates) {
  double sum = 0.0;
  for (std::size_t k = 0; k < users.size(); ++k) {
    const double r = users[k].rate(lambda);
    rates[static_cast<Eigen::Index>(k)] = r;
    sum += r * users[k].inverse_peak;
  }
  return sum;
}

/// Finds the smallest-usage-feasible multiplier of a nonincreasing usage(λ)
/// by geometric bracketing followed by bisection. Returns rates at the
/// feasible end of the bracket.
template <typename Usage>
double bisect_multiplier(Usage&& usage_at, double budget, Eigen::VectorXd& rates) {
  double hi = 1.0;
  double lo = 0.0;
  if (usage_at(hi, rates) > budget) {
    for (int k = 0; k < kMaxBracketSteps && usage_at(hi, rates) > budget; ++k) {
      lo = hi;
      hi *= 2.0;
    }
  } else {
    lo = 0.5;
    for (int k = 0; k < kMaxBracketSteps && usage_at(lo, rates) <= budget; ++k) {
      hi = lo;
      lo *= 0.5;
    }
  }
  for (int k = 0; k < kMaxBisection; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (usage_at(mid, rates) > budget)
      lo = mid;
    else
      hi = mid;
  }
  usage_at(hi, rates);
  return hi;
}

Allocation overload_allocation(const SlotProblem& problem, double min_usage) {
  Allocation a;
  a.overloaded = true;
  const double scale = std::max(problem.budget, 0.0) / min_usage;
  a.rates.resize(static_cast<Eigen::Index>(problem.users.size()));
  for (std::size_t k = 0; k < problem.users.size(); ++k)
    a.rates[static_cast<Eigen::Index>(k)] = problem.users[k].r_min * scale;
  return a;
}

double min_usage(const SlotProblem& problem) {
  double sum = 0.0;
  for (const SolverUser& u : problem.users) sum += u.r_min * u.inverse_peak;
  return sum;
}

/// Log-utility split of the budget with per-user lower bounds `lower`.
Allocation log_utility_split(const SlotProblem& problem, const Eigen::VectorXd& lower) {
  const auto n = static_cast<Eigen::Index>(problem.users.size());
  Allocation a;
  a.rates.resize(n);
  double top = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const SolverUser& u = problem.users[static_cast<std::size_t>(k)];
    a.rates[k] = u.r_max;
    top += u.r_max * u.inverse_peak;
  }
  if (top <= problem.budget) return a;

  auto usage_at = [&](double mu, Eigen::VectorXd& rates) {
    double sum = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const SolverUser& u = problem.users[static_cast<std::size_t>(k)];
      const double free = u.share * u.params.alpha / (mu * u.inverse_peak);
      rates[k] = std::clamp(free, lower[k], u.r_max);
      sum += rates[k] * u.inverse_peak;
    }
    return sum;
  };
  a.dual = bisect_multiplier(usage_at, problem.budget, a.rates);
  return a;
}

}  // namespace

void SlotProblem::validate() const {
  for (std::size_t k = 0; k < users.size(); ++k) {
    const SolverUser& u = users[k];
    const std::string who = "solver user " + std::to_string(k);
    if (!(u.r_min > 0.0) || !(u.r_min <= u.r_max) || !std::isfinite(u.r_max))
      throw std::invalid_argument(who + ": need 0 < r_min <= r_max");
    if (!(u.inverse_peak > 0.0) || !std::isfinite(u.inverse_peak))
      throw std::invalid_argument(who + ": peak rate must be positive");
    if (!(u.params.alpha > 0.0) || !std::isfinite(u.params.beta))
      throw std::invalid_argument(who + ": alpha must be positive");
    if (!(u.share > 0.0)) throw std::invalid_argument(who + ": share must be positive");
    for (const Breakpoint& b : u.penalties)
      if (!std::isfinite(b.weight) || b.weight < 0.0 || !std::isfinite(b.level))
        throw std::invalid_argument(who + ": weights must be finite and nonnegative");
  }
  if (!std::isfinite(budget)) throw std::invalid_argument("budget must be finite");
}

double penalty(const SolverUser& user, double rate) {
  const double q = quality(user.params, rate);
  double sum = 0.0;
  for (const Breakpoint& b : user.penalties) sum += b.weight * std::max(b.level - q, 0.0);
  return sum;
}

double slot_objective(const SlotProblem& problem, const Eigen::Ref<const Eigen::VectorXd>& rates) {
  double sum = 0.0;
  for (std::size_t k = 0; k < problem.users.size(); ++k)
    sum += penalty(problem.users[k], rates[static_cast<Eigen::Index>(k)]);
  return sum;
}

double user_rate_given_dual(const SolverUser& user, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("dual multiplier must be >= 0");
  return prepare(user).rate(lambda);
}

Allocation solve_slot(const SlotProblem& problem) {
  problem.validate();
  const auto n = static_cast<Eigen::Index>(problem.users.size());
  if (n == 0) return {};

  const double floor_usage = min_usage(problem);
  if (floor_usage > problem.budget) return overload_allocation(problem, floor_usage);

  std::vector<PreparedUser> prepared;
  prepared.reserve(problem.users.size());
  for (const SolverUser& u : problem.users) prepared.push_back(prepare(u));

  Eigen::VectorXd flat(n);
  double flat_usage = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    flat[k] = prepared[static_cast<std::size_t>(k)].flat_start();
    flat_usage += flat[k] * prepared[static_cast<std::size_t>(k)].inverse_peak;
  }
  if (flat_usage <= problem.budget) {
    // Every penalty is at its minimum; spend the rest on quality.
    Allocation a = log_utility_split(problem, flat);
    a.dual = 0.0;
    return a;
  }

  Allocation a;
  a.rates.resize(n);
  auto usage_at = [&](double lambda, Eigen::VectorXd& rates) {
    return usage(prepared, lambda, rates);
  };
  a.dual = bisect_multiplier(usage_at, problem.budget, a.rates);
  return a;
}

Allocation solve_static(const SlotProblem& problem) { return solve_slot(problem); }

Allocation solve_log_utility(const SlotProblem& problem) {
  problem.validate();
  const auto n = static_cast<Eigen::Index>(problem.users.size());
  if (n == 0) return {};
  const double floor_usage = min_usage(problem);
  if (floor_usage > problem.budget) return overload_allocation(problem, floor_usage);
  Eigen::VectorXd lower(n);
  for (Eigen::Index k = 0; k < n; ++k) lower[k] = problem.users[static_cast<std::size_t>(k)].r_min;
  return log_utility_split(problem, lower);
}

}  // namespace qoe
