#include "qoestream/admission.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "qoestream/channel.hpp"
#include "qoestream/rng.hpp"

using namespace qoe;

namespace {

AdmissionUser make_user(const RateQualityParams& p, double inverse_peak, int sojourn,
                        Eigen::VectorXd queue = Eigen::VectorXd::Zero(5)) {
  AdmissionUser u;
  u.view = averaged_user_view(std::vector<RateQualityParams>{p}, kRateMinKbps, kRateMaxKbps, inverse_peak);
  u.sojourn = sojourn;
  u.queue = std::move(queue);
  return u;
}

std::vector<AdmissionUser> random_network(Stream& rng, int n) {
  const RQSource src;
  std::vector<AdmissionUser> users;
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd q(5);
    for (int i = 0; i < 5; ++i) q[i] = rng.uniform() < 0.5 ? 0.0 : rng.uniform(0.0, 3.0);
    users.push_back(make_user(src.sample(rng(), k, 0), std::log(3.0) / rng.uniform(7500.0, 22500.0),
                              40 + static_cast<int>(rng() % 400), q));
  }
  return users;
}

}  // namespace

TEST(AveragedView, MeansOfParameters) {
  const std::vector<RateQualityParams> same(7, {9.0, -12.0});
  const AveragedView v = averaged_user_view(same, 302.0, 6412.0, 1e-4);
  EXPECT_EQ(v.mean_params.alpha, 9.0);
  EXPECT_EQ(v.mean_params.beta, -12.0);
  EXPECT_EQ(v.expected_inverse_peak, 1e-4);

  const std::vector<RateQualityParams> two = {{8.0, 1.0}, {12.0, 3.0}};
  const AveragedView w = averaged_user_view(two, 302.0, 6412.0, 1e-4);
  EXPECT_DOUBLE_EQ(w.mean_params.alpha, 10.0);
  EXPECT_DOUBLE_EQ(w.mean_params.beta, 2.0);
  EXPECT_THROW(averaged_user_view({}, 302.0, 6412.0, 1e-4), std::invalid_argument);
}

TEST(AveragedView, InversePeakMatchesMonteCarlo) {
  const double p_avg = 15000.0;
  Stream rng(71, StreamTag::Test);
  double sum = 0.0;
  const int n = 1000000;
  for (int k = 0; k < n; ++k) sum += 1.0 / PeakRateLaw::draw_multiplier(rng);
  EXPECT_NEAR(sum / n, std::log(3.0), 1e-3);
  EXPECT_DOUBLE_EQ(PeakRateLaw::expected_inverse_peak(p_avg), std::log(3.0) / p_avg);
}

TEST(Admission, EmptyNetworkGetsMaximumRate) {
  const RateQualityParams p{10.0, -20.0};
  const AdmissionUser cand = make_user(p, std::log(3.0) / 15000.0, 100);
  const AdmissionEstimate e = estimate_and_decide(cand, {}, default_case_one_constraints(), 1.0, 0.0);
  EXPECT_DOUBLE_EQ(e.estimated_quality, 10.0 * std::log(6412.0) - 20.0);
  EXPECT_TRUE(e.admitted);
  EXPECT_EQ(e.seeded_queue, Eigen::VectorXd::Zero(5));
  EXPECT_FALSE(estimate_and_decide(cand, {}, default_case_one_constraints(), 1.0, 100.0).admitted);
  // Ties reject.
  EXPECT_FALSE(estimate_and_decide(cand, {}, default_case_one_constraints(), 1.0, e.estimated_quality).admitted);
}

TEST(Admission, ThresholdHundredAlwaysRejects) {
  const RQSource src;
  for (std::int64_t k = 0; k < 10000; ++k) {
    const AdmissionUser cand = make_user(src.sample(72, k, 0), 1e-5, 100);
    const AdmissionEstimate e = estimate_and_decide(cand, {}, default_case_one_constraints(), 1.0, 100.0);
    ASSERT_FALSE(e.admitted);
    ASSERT_LE(e.estimated_quality, 95.0 + 1e-9);
    ASSERT_TRUE(estimate_and_decide(cand, {}, default_case_one_constraints(), 1.0, 0.0).admitted);
  }
}

TEST(Admission, SoloRateIsBudgetOverInversePeak) {
  const RateQualityParams p{10.0, -20.0};
  for (double b : {0.05, 0.1, 0.3, 0.7, 1.0}) {
    const double inv = std::log(3.0) / 7500.0;
    const AdmissionEstimate e =
        estimate_and_decide(make_user(p, inv, 100), {}, default_case_one_constraints(), b, 0.0);
    const double expect = std::max(std::min(kRateMaxKbps, b / inv), kRateMinKbps);
    EXPECT_NEAR(e.static_rates[0], expect, 1e-9 * expect) << "budget " << b;
    EXPECT_DOUBLE_EQ(e.estimated_quality, quality(p, e.static_rates[0]));
  }
  double previous = -std::numeric_limits<double>::infinity();
  for (double p_avg = 2000.0; p_avg <= 30000.0; p_avg += 1000.0) {
    // Larger peaks mean smaller E[1/P] and a higher estimate.
    const double q = estimate_and_decide(make_user(p, std::log(3.0) / p_avg, 100), {},
                                         default_case_one_constraints(), 0.4, 0.0)
                         .estimated_quality;
    EXPECT_GE(q, previous);
    previous = q;
  }
}

TEST(Admission, EstimateFallsAsExpectedInversePeakRises) {
  const RateQualityParams p{10.0, -20.0};
  Stream rng(73, StreamTag::Test);
  const std::vector<AdmissionUser> net = random_network(rng, 4);
  double previous = std::numeric_limits<double>::infinity();
  for (double inv = 1e-5; inv < 1e-3; inv *= 1.3) {
    const double q =
        estimate_and_decide(make_user(p, inv, 120), net, default_case_one_constraints(), 0.6, 0.0).estimated_quality;
    EXPECT_LE(q, previous + 1e-9);
    previous = q;
  }
}

TEST(Admission, MonotoneInThresholdAndPure) {
  for (std::uint64_t i = 0; i < 200; ++i) {
    Stream rng(74, StreamTag::Test, i);
    const std::vector<AdmissionUser> net = random_network(rng, 1 + static_cast<int>(rng() % 6));
    const AdmissionUser cand =
        make_user(RQSource{}.sample(rng(), 99, 0), std::log(3.0) / rng.uniform(7500.0, 22500.0), 100);
    std::vector<Eigen::VectorXd> before;
    for (const AdmissionUser& u : net) before.push_back(u.queue);
    const double b = rng.uniform(0.4, 1.0);
    const double q = estimate_and_decide(cand, net, default_case_one_constraints(), b, 0.0).estimated_quality;
    bool was_admitted = true;
    for (double theta = 0.0; theta <= 100.0; theta += 2.5) {
      const AdmissionEstimate e = estimate_and_decide(cand, net, default_case_one_constraints(), b, theta);
      EXPECT_EQ(e.estimated_quality, q);
      EXPECT_EQ(e.admitted, q > theta);
      EXPECT_TRUE(was_admitted || !e.admitted);
      was_admitted = e.admitted;
    }
    for (std::size_t k = 0; k < net.size(); ++k) EXPECT_EQ(net[k].queue, before[k]);
  }
}

TEST(Admission, SeedsCandidateWithMeanQueue) {
  std::vector<AdmissionUser> net;
  Eigen::VectorXd a(5), b(5);
  a << 1, 0, 2, 0, 4;
  b << 3, 0, 0, 2, 0;
  net.push_back(make_user({10, -20}, 1e-4, 100, a));
  net.push_back(make_user({10, -20}, 1e-4, 100, b));
  const AdmissionEstimate e =
      estimate_and_decide(make_user({10, -20}, 1e-4, 100), net, default_case_one_constraints(), 0.5, 0.0);
  Eigen::VectorXd mean(5);
  mean << 2, 0, 1, 1, 2;
  EXPECT_EQ(e.seeded_queue, mean);
  EXPECT_EQ(e.static_rates.size(), 3);
  EXPECT_EQ(seed_queue({}, 1), Eigen::VectorXd::Zero(1));
}

TEST(Admission, NoBudgetGivesNoQuality) {
  const AdmissionEstimate e = estimate_and_decide(make_user({10, -20}, 1e-4, 100), {},
                                                  default_case_one_constraints(), -0.1, 0.0);
  EXPECT_FALSE(e.admitted);
  EXPECT_TRUE(std::isinf(e.estimated_quality));
}

TEST(BudgetEstimatorTest, PriorThenTrailingMean) {
  BudgetEstimator est(3, 0.2);
  EXPECT_DOUBLE_EQ(est.expected_hp_load(), 0.2);
  EXPECT_DOUBLE_EQ(est.expected_budget(), 0.8);
  est.observe(0.1);
  EXPECT_DOUBLE_EQ(est.expected_hp_load(), 0.1);
  est.observe(0.2);
  est.observe(0.3);
  EXPECT_DOUBLE_EQ(est.expected_hp_load(), 0.2);
  est.observe(0.7);
  EXPECT_DOUBLE_EQ(est.expected_hp_load(), 0.4);
}
