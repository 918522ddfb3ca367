#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <variant>
#include <vector>

namespace qoe {

inline constexpr double kRateMinKbps = 302.0;
inline constexpr double kRateMaxKbps = 6412.0;

/// Log rate–quality model q = alpha * ln(rate) + beta (rate in kbps).
struct RateQualityParams {
  double alpha = 1.0;
  double beta = 0.0;
};

/// Throws std::invalid_argument if rate <= 0.
double quality(const RateQualityParams& params, double rate_kbps);
double rate_for_quality(const RateQualityParams& params, double q);

/// Synthetic per-slot law: the quality at the two anchor rates is drawn
/// uniformly and the log model is fitted through both anchors.
struct SyntheticSpec {
  double q_low_min = 25.0;
  double q_low_max = 55.0;
  double q_high_min = 65.0;
  double q_high_max = 95.0;
  double rate_low = kRateMinKbps;
  double rate_high = kRateMaxKbps;
  /// Probability that the high-rate anchor reuses the low-rate uniform draw
  /// (shared content difficulty). Both marginals stay uniform for any value.
  double coupling = 0.0;

  /// Throws std::invalid_argument when the spec could yield alpha <= 0.
  void validate() const;
};

/// Per-video (alpha, beta) sequences indexed by slot.
struct TraceTable {
  std::map<std::int64_t, std::vector<RateQualityParams>> videos;
};

/// Reads `video_id,slot,alpha,beta` CSV. Rows of a video must list slots
/// 0, 1, 2, ... in order. Errors carry the offending line number.
TraceTable read_trace_csv(const std::filesystem::path& path);
void write_trace_csv(const TraceTable& table, const std::filesystem::path& path);

class RQSource {
 public:
  RQSource() : source_(SyntheticSpec{}) {}
  explicit RQSource(SyntheticSpec spec);
  explicit RQSource(TraceTable table);

  bool is_synthetic() const noexcept {
    return std::holds_alternative<SyntheticSpec>(source_);
  }
  const SyntheticSpec& synthetic() const { return std::get<SyntheticSpec>(source_); }
  const TraceTable& table() const { return std::get<TraceTable>(source_); }

  /// Number of distinct videos a user can be assigned; 0 for synthetic.
  std::size_t video_count() const noexcept;
  /// Video id for the k-th video in id order (trace sources only).
  std::int64_t video_id_at(std::size_t k) const;

  /// Deterministic in (seed, video_id, slot). For synthetic sources
  /// `video_id` is the user's own stream id; for trace sources it selects the
  /// stored video and `slot` cycles through its rows.
  RateQualityParams sample(std::uint64_t seed, std::int64_t video_id,
                           std::int64_t slot) const;

 private:
  std::variant<SyntheticSpec, TraceTable> source_;
};

}  // namespace qoe
