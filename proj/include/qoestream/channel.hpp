#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>

#include "qoestream/rng.hpp"

namespace qoe {

inline constexpr double kMultiplierLow = 0.5;
inline constexpr double kMultiplierHigh = 1.5;
/// E[1/M] for M ~ Uniform[0.5, 1.5], i.e. ln(1.5 / 0.5).
inline const double kMeanInverseMultiplier = std::log(kMultiplierHigh / kMultiplierLow);

/// Per-user peak-rate law: P(t) = p_avg * M(t), p_avg ~ U[1250γ, 3750γ] kbps
/// drawn once per user, M(t) ~ U[0.5, 1.5] i.i.d. per slot.
struct PeakRateLaw {
  double gamma = 6.0;

  double avg_low() const noexcept { return 1250.0 * gamma; }
  double avg_high() const noexcept { return 3750.0 * gamma; }

  double draw_average(Stream& rng) const { return rng.uniform(avg_low(), avg_high()); }
  static double draw_multiplier(Stream& rng) {
    return rng.uniform(kMultiplierLow, kMultiplierHigh);
  }
  /// E[1/P] for a user with known average peak.
  static double expected_inverse_peak(double p_avg) { return kMeanInverseMultiplier / p_avg; }
  /// E[1/P] over both factors.
  double population_inverse_peak() const {
    return kMeanInverseMultiplier * std::log(avg_high() / avg_low()) / (avg_high() - avg_low());
  }
};

/// Realized channel for one slot. `video_peaks` is aligned with the engine's
/// active admitted video users. The budget may be <= 0 under HP overload.
struct SlotChannel {
  Eigen::VectorXd video_peaks;
  double hp_load = 0.0;

  double budget() const noexcept { return 1.0 - hp_load; }
};

/// Σ R / P over active high-priority users.
double hp_load(std::span<const double> hp_rates, std::span<const double> hp_peaks);

/// Σ r_u / P_u + hp_load. Throws std::invalid_argument on size mismatch.
double utilization(const Eigen::Ref<const Eigen::VectorXd>& rates, const SlotChannel& slot);

/// Draws one multiplier per user from that user's per-slot stream.
/// `peak_averages[k]` and `user_ids[k]` describe the k-th active user.
Eigen::VectorXd sample_peaks(std::uint64_t seed, std::span<const std::uint64_t> user_ids,
                             std::span<const double> peak_averages, std::int64_t slot);

}  // namespace qoe
