#include "qoestream/thresholdopt.hpp"

#include <algorithm>
#include <stdexcept>

namespace qoe {

ThresholdTuner::ThresholdTuner(std::size_t components, std::size_t batch, double theta0,
                               double step0)
    : ThresholdTuner(std::vector<double>(components, theta0), batch, step0) {}

ThresholdTuner::ThresholdTuner(std::vector<double> theta0, std::size_t batch, double step0)
    : batch_(batch), step0_(step0) {
  if (theta0.empty()) throw std::invalid_argument("threshold tuner needs a component");
  if (batch_ == 0) throw std::invalid_argument("batch size must be positive");
  if (!(step0_ > 0.0)) throw std::invalid_argument("initial step must be positive");
  for (double t : theta0) {
    Component c;
    c.theta = std::max(t, 0.0);
    state_.push_back(c);
  }
}

std::optional<ThresholdStep> ThresholdTuner::observe(bool satisfied, std::size_t component) {
  Component& c = state_.at(component);
  ++c.seen;
  c.violated = c.violated || !satisfied;
  if (c.seen < batch_) return std::nullopt;
  const int y = c.violated ? 1 : -1;
  c.seen = 0;
  c.violated = false;
  return update(component, y);
}

ThresholdStep ThresholdTuner::update(std::size_t component, int y) {
  if (y != 1 && y != -1) throw std::invalid_argument("direction must be +1 or -1");
  Component& c = state_.at(component);
  if (c.last_y != 0 && y != c.last_y) ++c.m;
  c.last_y = y;
  ++c.n;

  ThresholdStep s;
  s.component = component;
  s.n = c.n;
  s.theta = c.theta;
  s.y = y;
  s.m = c.m;
  s.step = step0_ / c.m;
  c.theta = std::max(c.theta + s.step * y, 0.0);
  s.theta_next = c.theta;
  return s;
}

std::vector<double> ThresholdTuner::thetas() const {
  std::vector<double> out;
  out.reserve(state_.size());
  for (const Component& c : state_) out.push_back(c.theta);
  return out;
}

}  // namespace qoe
