#include "qoestream/channel.hpp"

#include <stdexcept>

namespace qoe {

double hp_load(std::span<const double> hp_rates, std::span<const double> hp_peaks) {
  if (hp_rates.size() != hp_peaks.size())
    throw std::invalid_argument("hp_load: rates and peaks differ in length");
  double load = 0.0;
  for (std::size_t k = 0; k < hp_rates.size(); ++k) load += hp_rates[k] / hp_peaks[k];
  return load;
}

double utilization(const Eigen::Ref<const Eigen::VectorXd>& rates, const SlotChannel& slot) {
  if (rates.size() != slot.video_peaks.size())
    throw std::invalid_argument("utilization: missing peak rate for some user");
  return rates.cwiseQuotient(slot.video_peaks).sum() + slot.hp_load;
}

Eigen::VectorXd sample_peaks(std::uint64_t seed, std::span<const std::uint64_t> user_ids,
                             std::span<const double> peak_averages, std::int64_t slot) {
  if (user_ids.size() != peak_averages.size())
    throw std::invalid_argument("sample_peaks: ids and averages differ in length");
  Eigen::VectorXd peaks(static_cast<Eigen::Index>(user_ids.size()));
  for (std::size_t k = 0; k < user_ids.size(); ++k) {
    Stream rng(seed, StreamTag::PeakMultiplier, user_ids[k], static_cast<std::uint64_t>(slot));
    peaks[static_cast<Eigen::Index>(k)] = peak_averages[k] * PeakRateLaw::draw_multiplier(rng);
  }
  return peaks;
}

}  // namespace qoe
