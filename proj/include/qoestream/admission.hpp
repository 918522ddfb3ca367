#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <deque>
#include <optional>
#include <span>

#include "qoestream/metrics.hpp"
#include "qoestream/ratequality.hpp"
#include "qoestream/slotsolver.hpp"

namespace qoe {

/// Long-run view of a user for the static admission problem.
struct AveragedView {
  RateQualityParams mean_params;
  double r_min = kRateMinKbps;
  double r_max = kRateMaxKbps;
  double expected_inverse_peak = 1.0;
};

/// Sojourn means of (alpha, beta) and of the rate box; E[1/P] is supplied by
/// the caller (analytic from p_avg, or a trailing mean of observations).
AveragedView averaged_user_view(std::span<const RateQualityParams> sojourn_params,
                                double r_min, double r_max, double expected_inverse_peak);

/// A user taking part in the static problem.
struct AdmissionUser {
  AveragedView view;
  int sojourn = 1;
  std::optional<std::size_t> type;
  Eigen::VectorXd queue;  ///< ignored for the candidate; it is seeded
};

struct AdmissionEstimate {
  double estimated_quality = 0.0;  ///< q̄
  Eigen::VectorXd static_rates;    ///< r*; the candidate is the last entry
  Eigen::VectorXd seeded_queue;    ///< the candidate's assumed queue
  bool admitted = false;
  double threshold = 0.0;
};

/// Mean of the existing users' queues, or zeros when there are none.
Eigen::VectorXd seed_queue(std::span<const AdmissionUser> existing, std::size_t queue_size);

/// Solves the averaged problem with the candidate appended and admits iff
/// q̄ > threshold. Pure: nothing in `existing` is modified.
AdmissionEstimate estimate_and_decide(const AdmissionUser& candidate,
                                      std::span<const AdmissionUser> existing,
                                      const ConstraintSet& constraints,
                                      double expected_budget, double threshold);

/// Trailing-window estimate of E[hp_load], with a prior used until the first
/// observation arrives.
class BudgetEstimator {
 public:
  explicit BudgetEstimator(std::size_t window = 1000, double prior_hp_load = 0.0);

  void observe(double hp_load);
  double expected_hp_load() const;
  double expected_budget() const { return 1.0 - expected_hp_load(); }

 private:
  std::size_t window_;
  double prior_;
  std::deque<double> recent_;
};

}  // namespace qoe
