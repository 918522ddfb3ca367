#include "qoestream/adaptation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qoe {

std::string_view to_string(PolicyKind policy) {
  switch (policy) {
    case PolicyKind::QueueDrivenCaseI: return "queue-case1";
    case PolicyKind::QueueDrivenCaseII: return "queue-case2";
    case PolicyKind::AvgQualityMax: return "avg-quality";
  }
  return "unknown";
}

PolicyKind parse_policy(std::string_view name) {
  if (name == "queue-case1") return PolicyKind::QueueDrivenCaseI;
  if (name == "queue-case2") return PolicyKind::QueueDrivenCaseII;
  if (name == "avg-quality") return PolicyKind::AvgQualityMax;
  throw std::invalid_argument("unknown policy '" + std::string(name) +
                              "' (expected queue-case1, queue-case2 or avg-quality)");
}

Eigen::VectorXd violation_terms(double q_hat, const ConstraintSet& constraints,
                                std::optional<std::size_t> type, int sojourn, bool active) {
  const auto points = constraints.applicable(type);
  Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(points.size()));
  if (!active) return s;
  const double inv_t = 1.0 / static_cast<double>(sojourn);
  for (std::size_t i = 0; i < points.size(); ++i)
    s[static_cast<Eigen::Index>(i)] =
        inv_t * (std::max(points[i].x - q_hat, 0.0) - points[i].h);
  return s;
}

void update_queues(Eigen::VectorXd& queue, const Eigen::Ref<const Eigen::VectorXd>& s) {
  if (queue.size() != s.size()) throw std::invalid_argument("queue/violation size mismatch");
  queue = (queue + s).cwiseMax(0.0);
}

std::vector<Breakpoint> queue_penalties(const Eigen::Ref<const Eigen::VectorXd>& queue,
                                        const ConstraintSet& constraints,
                                        std::optional<std::size_t> type, int sojourn) {
  const auto points = constraints.applicable(type);
  if (static_cast<std::size_t>(queue.size()) != points.size())
    throw std::invalid_argument("queue length does not match the constraint set");
  std::vector<Breakpoint> out;
  out.reserve(points.size());
  const double inv_t = 1.0 / static_cast<double>(sojourn);
  for (std::size_t i = 0; i < points.size(); ++i)
    out.push_back({points[i].x, queue[static_cast<Eigen::Index>(i)] * inv_t});
  return out;
}

double round_up_to_ladder(double rate, double r_min, double r_max, int levels) {
  if (levels < 2 || r_max <= r_min) return std::min(std::max(rate, r_min), r_max);
  const double log_lo = std::log(r_min);
  const double step = (std::log(r_max) - log_lo) / static_cast<double>(levels - 1);
  for (int k = 0; k < levels; ++k) {
    const double level = k == levels - 1 ? r_max : std::exp(log_lo + step * k);
    if (level >= rate * (1.0 - 1e-12)) return level;
  }
  return r_max;
}

SlotOutcome adapt_slot(PolicyKind policy, std::span<const AdaptUser> users,
                       std::span<Eigen::VectorXd> queues, const ConstraintSet& constraints,
                       const SlotChannel& channel, const AdaptOptions& options) {
  const auto n = static_cast<Eigen::Index>(users.size());
  if (channel.video_peaks.size() != n)
    throw std::invalid_argument("adapt_slot: missing peak rate for some user");
  const bool queue_driven = policy != PolicyKind::AvgQualityMax;
  if (queue_driven && queues.size() != users.size())
    throw std::invalid_argument("adapt_slot: one queue per user required");
  if (policy == PolicyKind::QueueDrivenCaseI && !constraints.is_case_one())
    throw std::invalid_argument("Case-I policy needs Case-I constraints");
  if (policy == PolicyKind::QueueDrivenCaseII && constraints.is_case_one())
    throw std::invalid_argument("Case-II policy needs Case-II constraints");

  SlotProblem problem;
  problem.budget = channel.budget();
  problem.users.reserve(users.size());
  for (Eigen::Index k = 0; k < n; ++k) {
    const AdaptUser& u = users[static_cast<std::size_t>(k)];
    SolverUser entry;
    entry.params = u.params;
    entry.r_min = u.r_min;
    entry.r_max = u.r_max;
    entry.inverse_peak = 1.0 / channel.video_peaks[k];
    entry.share = 1.0 / static_cast<double>(u.sojourn);
    if (queue_driven)
      entry.penalties =
          queue_penalties(queues[static_cast<std::size_t>(k)], constraints, u.type, u.sojourn);
    problem.users.push_back(std::move(entry));
  }

  SlotOutcome out;
  out.allocation = queue_driven ? solve_slot(problem) : solve_log_utility(problem);
  out.rates = out.allocation.rates;
  // Overloaded slots already sit below the ladder floor; leave them unrounded.
  if (options.ladder_rounding && !out.allocation.overloaded)
    for (Eigen::Index k = 0; k < n; ++k) {
      const AdaptUser& u = users[static_cast<std::size_t>(k)];
      out.rates[k] = round_up_to_ladder(out.rates[k], u.r_min, u.r_max, options.ladder_levels);
    }

  out.qualities.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const AdaptUser& u = users[static_cast<std::size_t>(k)];
    const double q = out.rates[k] > 0.0 ? quality(u.params, out.rates[k]) : kQualityFloor;
    out.qualities[k] = std::clamp(q, kQualityFloor, kQualityCeiling);
    if (queue_driven)
      update_queues(queues[static_cast<std::size_t>(k)],
                    violation_terms(out.qualities[k], constraints, u.type, u.sojourn));
  }
  return out;
}

}  // namespace qoe
