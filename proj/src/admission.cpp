#include "qoestream/admission.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>

#include "qoestream/adaptation.hpp"

namespace qoe {

AveragedView averaged_user_view(std::span<const RateQualityParams> sojourn_params,
                                double r_min, double r_max, double expected_inverse_peak) {
  if (sojourn_params.empty()) throw std::invalid_argument("averaged view needs parameters");
  AveragedView view;
  double a = 0.0;
  double b = 0.0;
  for (const RateQualityParams& p : sojourn_params) {
    a += p.alpha;
    b += p.beta;
  }
  const double n = static_cast<double>(sojourn_params.size());
  view.mean_params = {a / n, b / n};
  view.r_min = r_min;
  view.r_max = r_max;
  view.expected_inverse_peak = expected_inverse_peak;
  return view;
}

Eigen::VectorXd seed_queue(std::span<const AdmissionUser> existing, std::size_t queue_size) {
  Eigen::VectorXd seed = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(queue_size));
  if (existing.empty()) return seed;
  for (const AdmissionUser& u : existing) {
    if (static_cast<std::size_t>(u.queue.size()) != queue_size)
      throw std::invalid_argument("existing user queue has the wrong length");
    seed += u.queue;
  }
  return seed / static_cast<double>(existing.size());
}

namespace {

SolverUser static_entry(const AdmissionUser& u, const Eigen::VectorXd& queue,
                        const ConstraintSet& constraints) {
  SolverUser entry;
  entry.params = u.view.mean_params;
  entry.r_min = u.view.r_min;
  entry.r_max = u.view.r_max;
  entry.inverse_peak = u.view.expected_inverse_peak;
  entry.share = 1.0 / static_cast<double>(u.sojourn);
  entry.penalties = queue_penalties(queue, constraints, u.type, u.sojourn);
  return entry;
}

}  // namespace

AdmissionEstimate estimate_and_decide(const AdmissionUser& candidate,
                                      std::span<const AdmissionUser> existing,
                                      const ConstraintSet& constraints,
                                      double expected_budget, double threshold) {
  AdmissionEstimate est;
  est.threshold = threshold;
  est.seeded_queue = seed_queue(existing, constraints.queue_size());

  SlotProblem problem;
  problem.budget = expected_budget;
  problem.users.reserve(existing.size() + 1);
  for (const AdmissionUser& u : existing) problem.users.push_back(static_entry(u, u.queue, constraints));
  problem.users.push_back(static_entry(candidate, est.seeded_queue, constraints));

  const Allocation alloc = solve_static(problem);
  est.static_rates = alloc.rates;
  const double r_candidate = alloc.rates[alloc.rates.size() - 1];
  // No expected budget at all: the candidate would get nothing.
  est.estimated_quality = r_candidate > 0.0
                              ? quality(candidate.view.mean_params, r_candidate)
                              : -std::numeric_limits<double>::infinity();
  est.admitted = est.estimated_quality > threshold;
  return est;
}

BudgetEstimator::BudgetEstimator(std::size_t window, double prior_hp_load)
    : window_(window == 0 ? 1 : window), prior_(prior_hp_load) {}

void BudgetEstimator::observe(double hp_load) {
  recent_.push_back(hp_load);
  if (recent_.size() > window_) recent_.pop_front();
}

double BudgetEstimator::expected_hp_load() const {
  if (recent_.empty()) return prior_;
  return std::accumulate(recent_.begin(), recent_.end(), 0.0) /
         static_cast<double>(recent_.size());
}

}  // namespace qoe
