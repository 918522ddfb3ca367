#include "qoestream/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "qoestream/channel.hpp"
#include "qoestream/metrics.hpp"

namespace qoe {

namespace {

struct Box {
  double lo;
  double hi;
};

// Last user's best reply to the others' rates; NaN when the others overrun.
double remainder_rate(const SlotProblem& p, const Eigen::VectorXd& rates) {
  const std::size_t last = p.users.size() - 1;
  double used = 0.0;
  for (std::size_t k = 0; k < last; ++k) used += rates[static_cast<Eigen::Index>(k)] * p.users[k].inverse_peak;
  const SolverUser& u = p.users[last];
  const double r = (p.budget - used) / u.inverse_peak;
  if (r < u.r_min * (1.0 - 1e-12)) return std::numeric_limits<double>::quiet_NaN();
  return std::min(std::max(r, u.r_min), u.r_max);
}

void search(const SlotProblem& p, const std::vector<Box>& boxes, int levels, std::size_t k,
            Eigen::VectorXd& rates, GridSearchResult& best) {
  const std::size_t last = p.users.size() - 1;
  if (k == last) {
    const double r = remainder_rate(p, rates);
    if (std::isnan(r)) return;
    rates[static_cast<Eigen::Index>(last)] = r;
    const double obj = slot_objective(p, rates);
    if (!best.feasible || obj < best.objective) {
      best.feasible = true;
      best.objective = obj;
      best.rates = rates;
    }
    return;
  }
  const Box& b = boxes[k];
  const double ratio = std::log(b.hi / b.lo);
  for (int i = 0; i < levels; ++i) {
    const double r = levels == 1 ? b.lo : b.lo * std::exp(ratio * i / (levels - 1));
    rates[static_cast<Eigen::Index>(k)] = r;
    search(p, boxes, levels, k + 1, rates, best);
  }
}

}  // namespace

GridSearchResult grid_search(const SlotProblem& problem, int levels, int refinements) {
  problem.validate();
  const std::size_t n = problem.users.size();
  GridSearchResult best;
  if (n == 0) return best;
  std::vector<Box> boxes;
  for (const SolverUser& u : problem.users) boxes.push_back({u.r_min, u.r_max});
  Eigen::VectorXd rates = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  search(problem, boxes, levels, 0, rates, best);

  for (int round = 0; round < refinements && best.feasible; ++round) {
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const SolverUser& u = problem.users[k];
      const double cell = std::pow(boxes[k].hi / boxes[k].lo, 2.0 / std::max(levels - 1, 1));
      const double r = best.rates[static_cast<Eigen::Index>(k)];
      boxes[k] = {std::max(u.r_min, r / cell), std::min(u.r_max, r * cell)};
    }
    rates = best.rates;
    search(problem, boxes, levels, 0, rates, best);
  }
  return best;
}

SlotProblem random_slot_problem(Stream& rng, int users, double gamma) {
  const PeakRateLaw law{gamma};
  const SyntheticSpec spec;
  const ConstraintSet constraints = default_case_one_constraints();
  const auto grid = constraints.grid();
  SlotProblem p;
  p.budget = 1.0 - rng.uniform(0.0, 0.6);
  for (int k = 0; k < users; ++k) {
    SolverUser u;
    const double q_low = rng.uniform(spec.q_low_min, spec.q_low_max);
    const double q_high = rng.uniform(spec.q_high_min, spec.q_high_max);
    u.params.alpha = (q_high - q_low) / std::log(spec.rate_high / spec.rate_low);
    u.params.beta = q_low - u.params.alpha * std::log(spec.rate_low);
    const double sojourn = std::ceil(rng.uniform(40.0, 600.0));
    u.share = 1.0 / sojourn;
    for (const GridPoint& g : grid) {
      const double w = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.0, 5.0) / sojourn;
      u.penalties.push_back({g.x, w});
    }
    u.inverse_peak = 1.0 / (law.draw_average(rng) * law.draw_multiplier(rng));
    p.users.push_back(std::move(u));
  }
  return p;
}

KktResidual kkt_residual(const SlotProblem& problem, const Allocation& allocation) {
  KktResidual res;
  const double lambda = allocation.dual;
  double used = 0.0;
  for (std::size_t k = 0; k < problem.users.size(); ++k) {
    const SolverUser& u = problem.users[k];
    const double r = allocation.rates[static_cast<Eigen::Index>(k)];
    used += r * u.inverse_peak;
    res.in_box = res.in_box && r >= u.r_min && r <= u.r_max;

    // Hinge weight active just left and just right of r.
    double w_left = 0.0, w_right = 0.0;
    for (const Breakpoint& b : u.penalties) {
      if (b.weight <= 0.0) continue;
      const double kink = rate_for_quality(u.params, b.level);
      const bool at_kink = std::abs(kink - r) <= 1e-12 * r;
      if (kink > r || at_kink) w_left += b.weight;
      if (kink > r && !at_kink) w_right += b.weight;
    }
    const double price = lambda * u.inverse_peak;
    const double left = price - u.params.alpha * w_left / r;
    const double right = price - u.params.alpha * w_right / r;
    const double scale = price + u.params.alpha * w_left / r;
    double gap = 0.0;
    if (r > u.r_min) gap = std::max(gap, left);    // lowering the rate must not help
    if (r < u.r_max) gap = std::max(gap, -right);  // raising it must not help
    if (gap > 0.0) res.stationarity = std::max(res.stationarity, gap / scale);
  }
  res.slackness = std::abs(lambda * (problem.budget - used));
  res.excess = std::max(used - problem.budget, 0.0);
  return res;
}

OracleReport run_oracle_suite(int instances, std::uint64_t seed, int levels, double tolerance) {
  const auto start = std::chrono::steady_clock::now();
  OracleReport report;
  for (int i = 0; i < instances; ++i) {
    Stream rng(seed, StreamTag::Test, static_cast<std::uint64_t>(i));
    const int users = 2 + static_cast<int>(rng() % 2);
    const SlotProblem p = random_slot_problem(rng, users);
    const Allocation a = solve_slot(p);
    const GridSearchResult g = grid_search(p, levels, 6);
    ++report.instances;

    double used = 0.0;
    bool in_box = true;
    for (std::size_t k = 0; k < p.users.size(); ++k) {
      const double r = a.rates[static_cast<Eigen::Index>(k)];
      used += r * p.users[k].inverse_peak;
      in_box = in_box && r >= p.users[k].r_min * (1 - 1e-12) && r <= p.users[k].r_max * (1 + 1e-12);
    }
    const bool feasible = a.overloaded || (in_box && used <= p.budget * (1 + 1e-9));
    double gap = 0.0;
    if (g.feasible) {
      const double obj = slot_objective(p, a.rates);
      gap = (obj - g.objective) / std::max(std::abs(g.objective), 1e-9);
      report.min_relative_gap = std::min(report.min_relative_gap, gap);
    }
    report.max_relative_gap = std::max(report.max_relative_gap, gap);
    if (!feasible || gap > tolerance || g.feasible == a.overloaded) ++report.failures;
  }
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace qoe
