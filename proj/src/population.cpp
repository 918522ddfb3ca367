#include "qoestream/population.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace qoe {

void SojournSpec::validate() const {
  if (!(arrival_rate > 0.0) || !std::isfinite(arrival_rate))
    throw std::invalid_argument("arrival rate must be positive");
  if (!(mean_holding > 0.0) || !std::isfinite(mean_holding))
    throw std::invalid_argument("mean holding time must be positive");
  if (floor_slots < 0) throw std::invalid_argument("sojourn floor must be >= 0");
}

int sample_arrivals(const SojournSpec& spec, Stream& rng) {
  std::poisson_distribution<int> arrivals(spec.arrival_rate);
  return arrivals(rng);
}

int sample_sojourn(const SojournSpec& spec, Stream& rng) {
  std::exponential_distribution<double> holding(1.0 / spec.mean_holding);
  const double t = std::ceil(holding(rng));
  return std::max({static_cast<int>(std::min(t, 1e9)), spec.floor_slots, 1});
}

std::size_t sample_type(std::span<const double> probabilities, Stream& rng) {
  if (probabilities.empty()) throw std::invalid_argument("type law is empty");
  std::discrete_distribution<std::size_t> law(probabilities.begin(), probabilities.end());
  return law(rng);
}

}  // namespace qoe
