#pragma once

#include <cstdint>
#include <limits>

namespace qoe {

/// Named substreams derived from the master seed. Adding a new tag never
/// perturbs the draws of existing ones.
enum class StreamTag : std::uint64_t {
  VideoArrivals = 1,
  HpArrivals = 2,
  Sojourn = 3,
  PeakAverage = 4,
  PeakMultiplier = 5,
  RateQuality = 6,
  UserType = 7,
  HpRate = 8,
  VideoAssignment = 9,
  Test = 100,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based random stream keyed by (seed, tag, entity, sub). Two streams
/// with different keys are statistically independent; a stream's output
/// depends only on its key and how many values were drawn from it.
///
/// Satisfies UniformRandomBitGenerator so it can drive <random> distributions.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t seed, StreamTag tag, std::uint64_t entity = 0,
         std::uint64_t sub = 0) noexcept
      : key_(splitmix64(splitmix64(splitmix64(seed ^ 0x5851F42D4C957F2DULL) ^
                                   static_cast<std::uint64_t>(tag)) ^
                        entity) ^
             splitmix64(sub + 0x2545F4914F6CDD1DULL)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    return splitmix64(key_ + 0x9E3779B97F4A7C15ULL * (++counter_));
  }

  /// Uniform on [0, 1).
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform();
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace qoe
