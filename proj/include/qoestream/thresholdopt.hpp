#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace qoe {

/// One threshold iteration of one component.
struct ThresholdStep {
  std::size_t component = 0;
  std::int64_t n = 0;        ///< iteration index of this component, from 1
  double theta = 0.0;        ///< θⁿ used during the iteration
  int y = 0;                 ///< +1 raise, −1 lower
  int m = 1;                 ///< sign-change counter after this step
  double step = 0.0;         ///< εⁿ = ε⁰ / m
  double theta_next = 0.0;   ///< θⁿ⁺¹ = max{θⁿ + εⁿ yⁿ, 0}
};

/// Sign-driven stochastic approximation of admission thresholds. Each
/// component batches `batch` verdicts of its own admitted users; a batch with
/// any violation raises the threshold, an all-satisfied batch lowers it.
/// The step is ε⁰ / m where m counts direction changes.
class ThresholdTuner {
 public:
  explicit ThresholdTuner(std::size_t components = 1, std::size_t batch = 100,
                          double theta0 = 0.0, double step0 = 10.0);
  ThresholdTuner(std::vector<double> theta0, std::size_t batch, double step0);

  /// Records the verdict of an admitted user at departure. Returns the step
  /// taken if this verdict completed the component's batch.
  std::optional<ThresholdStep> observe(bool satisfied, std::size_t component = 0);

  /// Applies one update with direction y ∈ {−1, +1}.
  ThresholdStep update(std::size_t component, int y);

  std::size_t components() const noexcept { return state_.size(); }
  double theta(std::size_t component = 0) const { return state_.at(component).theta; }
  std::vector<double> thetas() const;
  int sign_changes(std::size_t component = 0) const { return state_.at(component).m; }
  std::int64_t iterations(std::size_t component = 0) const { return state_.at(component).n; }
  std::size_t pending(std::size_t component = 0) const { return state_.at(component).seen; }

 private:
  struct Component {
    double theta = 0.0;
    int m = 1;
    int last_y = 0;  // 0 before the first update
    std::int64_t n = 0;
    std::size_t seen = 0;
    bool violated = false;
  };

  std::size_t batch_;
  double step0_;
  std::vector<Component> state_;
};

}  // namespace qoe
