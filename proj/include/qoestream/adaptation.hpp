#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qoestream/channel.hpp"
#include "qoestream/metrics.hpp"
#include "qoestream/ratequality.hpp"
#include "qoestream/slotsolver.hpp"

namespace qoe {

enum class PolicyKind { QueueDrivenCaseI, QueueDrivenCaseII, AvgQualityMax };

std::string_view to_string(PolicyKind policy);
/// Accepts "queue-case1", "queue-case2", "avg-quality". Throws on anything else.
PolicyKind parse_policy(std::string_view name);

/// Per-slot constraint-violation terms
///   s_i = (max{x_i − q̂, 0} − h_i) / T_u
/// for each applicable constraint; all zero when the user is not active.
Eigen::VectorXd violation_terms(double q_hat, const ConstraintSet& constraints,
                                std::optional<std::size_t> type, int sojourn,
                                bool active = true);

/// v ← max{v + s, 0} componentwise.
void update_queues(Eigen::VectorXd& queue, const Eigen::Ref<const Eigen::VectorXd>& s);

/// Hinge weights v_i / T_u at each applicable constraint level.
std::vector<Breakpoint> queue_penalties(const Eigen::Ref<const Eigen::VectorXd>& queue,
                                        const ConstraintSet& constraints,
                                        std::optional<std::size_t> type, int sojourn);

/// What the policy needs to know about one admitted user this slot.
struct AdaptUser {
  RateQualityParams params;
  double r_min = kRateMinKbps;
  double r_max = kRateMaxKbps;
  int sojourn = 1;
  std::optional<std::size_t> type;
};

struct AdaptOptions {
  /// Round allocated rates up to a 50-level log-spaced ladder on [r_min, r_max].
  bool ladder_rounding = false;
  int ladder_levels = 50;
};

struct SlotOutcome {
  Allocation allocation;      ///< solver output (continuous rates)
  Eigen::VectorXd rates;      ///< delivered rates (after optional rounding)
  Eigen::VectorXd qualities;  ///< delivered quality, clamped to [0, 100]
};

/// Smallest ladder level >= rate; rates above r_max map to r_max.
double round_up_to_ladder(double rate, double r_min, double r_max, int levels);

/// One slot of rate adaptation. Queue-driven policies read `queues` (aligned
/// with `users`) to weight the per-slot problem and then update them with the
/// delivered quality. The average-quality policy never touches `queues`.
SlotOutcome adapt_slot(PolicyKind policy, std::span<const AdaptUser> users,
                       std::span<Eigen::VectorXd> queues, const ConstraintSet& constraints,
                       const SlotChannel& channel, const AdaptOptions& options = {});

}  // namespace qoe
