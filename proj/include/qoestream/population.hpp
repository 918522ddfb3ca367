#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qoestream/metrics.hpp"
#include "qoestream/rng.hpp"

namespace qoe {

/// Arrival and holding-time law for one class of users (ΔT = 1 s).
struct SojournSpec {
  double arrival_rate = 1.0 / 20.0;  ///< users per second
  double mean_holding = 200.0;       ///< seconds
  int floor_slots = 1;               ///< minimum sojourn

  void validate() const;
};

inline SojournSpec default_video_sojourn() { return {1.0 / 20.0, 200.0, 40}; }
inline SojournSpec default_hp_sojourn() { return {1.0 / 20.0, 200.0, 1}; }

/// Poisson(λ·ΔT) arrivals in one slot.
int sample_arrivals(const SojournSpec& spec, Stream& rng);

/// max{ceil(Exp(mean)), floor} slots, at least one.
int sample_sojourn(const SojournSpec& spec, Stream& rng);

/// Draws a type index from a categorical law given by `probabilities`.
std::size_t sample_type(std::span<const double> probabilities, Stream& rng);

enum class UserKind { Video, HighPriority };

/// Lifecycle of one user. Ids are assigned in arrival order.
struct UserRecord {
  std::uint64_t id = 0;
  UserKind kind = UserKind::Video;
  std::optional<std::size_t> type;
  std::int64_t arrival_slot = 0;
  int sojourn = 1;
  bool admitted = false;
  double admission_estimate = 0.0;  ///< q̄ at arrival (0 when admission is off)
  QualityTrace trace;               ///< empty for blocked users
  bool satisfied = false;
  double mean_quality = 0.0;

  std::int64_t departure_slot() const noexcept { return arrival_slot + sojourn - 1; }
  bool active_at(std::int64_t slot) const noexcept {
    return slot >= arrival_slot && slot <= departure_slot();
  }
};

}  // namespace qoe
