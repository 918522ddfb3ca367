#include "qoestream/adaptation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "qoestream/rng.hpp"

using namespace qoe;

namespace {

// Two long-lived users on a fixed-average channel. A constant allocation
// with quality 55 for both (enough for every default grid point) costs
// 0.7987 of the slot at the nominal peak and 0.887 at the lowest multiplier,
// so it fits every slot. The zero-pressure split starves user 1.
struct TwoUserScene {
  std::vector<AdaptUser> users;
  std::vector<Eigen::VectorXd> queues;
  ConstraintSet constraints = default_case_one_constraints();

  TwoUserScene() {
    users.resize(2);
    users[0].params = {20.0, -110.0};
    users[1].params = {6.0, 5.0};
    for (AdaptUser& u : users) u.sojourn = 200;
    queues.assign(2, Eigen::VectorXd::Zero(5));
  }

  SlotChannel channel(std::int64_t slot) const {
    Stream rng(61, StreamTag::Test, static_cast<std::uint64_t>(slot));
    return {Eigen::Vector2d(10000.0 * rng.uniform(0.9, 1.1), 10000.0 * rng.uniform(0.9, 1.1)), 0.0};
  }

  SlotOutcome step(std::int64_t slot) {
    return adapt_slot(PolicyKind::QueueDrivenCaseI, users, queues, constraints, channel(slot));
  }
};

}  // namespace

TEST(ViolationTerms, Examples) {
  const ConstraintSet one = ConstraintSet::case_one({{40.0, 1.0}});
  EXPECT_NEAR(violation_terms(30.0, one, std::nullopt, 100)[0], 0.09, 1e-15);
  EXPECT_DOUBLE_EQ(violation_terms(45.0, one, std::nullopt, 100)[0], -0.01);
  EXPECT_EQ(violation_terms(10.0, one, std::nullopt, 100, false)[0], 0.0);

  const Eigen::VectorXd s = violation_terms(45.0, default_case_one_constraints(), std::nullopt, 10);
  ASSERT_EQ(s.size(), 5);
  EXPECT_DOUBLE_EQ(s[0], -0.07);
  EXPECT_DOUBLE_EQ(s[4], (25.0 - 15.0) / 10.0);

  const ConstraintSet two = ConstraintSet::case_two({{40.0, 1.0}, {60.0, 1.0}});
  const Eigen::VectorXd t = violation_terms(50.0, two, 1, 20);
  ASSERT_EQ(t.size(), 1);
  EXPECT_DOUBLE_EQ(t[0], 9.0 / 20.0);
}

TEST(UpdateQueues, Examples) {
  Eigen::VectorXd v = Eigen::VectorXd::Constant(1, 0.5);
  update_queues(v, Eigen::VectorXd::Constant(1, 0.09));
  EXPECT_NEAR(v[0], 0.59, 1e-15);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(1);
  update_queues(z, Eigen::VectorXd::Constant(1, -0.01));
  EXPECT_EQ(z[0], 0.0);
  EXPECT_THROW(update_queues(z, Eigen::VectorXd::Zero(2)), std::invalid_argument);
}

TEST(UpdateQueues, NeverNegative) {
  Stream rng(62, StreamTag::Test);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(5);
  for (int k = 0; k < 10000; ++k) {
    Eigen::VectorXd s(5);
    for (int i = 0; i < 5; ++i) s[i] = rng.uniform(-1.0, 0.8);
    update_queues(v, s);
    ASSERT_GE(v.minCoeff(), 0.0);
  }
}

TEST(QueuePenalties, WeightsAreQueueOverSojourn) {
  Eigen::VectorXd v(5);
  v << 1, 2, 3, 4, 5;
  const auto p = queue_penalties(v, default_case_one_constraints(), std::nullopt, 50);
  ASSERT_EQ(p.size(), 5u);
  EXPECT_EQ(p[2].level, 50.0);
  EXPECT_DOUBLE_EQ(p[2].weight, 3.0 / 50.0);
  EXPECT_THROW(queue_penalties(Eigen::VectorXd::Zero(2), default_case_one_constraints(), std::nullopt, 5),
               std::invalid_argument);
}

TEST(Policy, NamesRoundTrip) {
  for (PolicyKind p : {PolicyKind::QueueDrivenCaseI, PolicyKind::QueueDrivenCaseII, PolicyKind::AvgQualityMax})
    EXPECT_EQ(parse_policy(to_string(p)), p);
  EXPECT_THROW(parse_policy("greedy"), std::invalid_argument);
}

TEST(AdaptSlot, SoloUserWithAmpleBudgetGetsMaximum) {
  std::vector<AdaptUser> users(1);
  users[0].params = {8.0, 10.0};
  users[0].sojourn = 60;
  std::vector<Eigen::VectorXd> queues = {Eigen::VectorXd::Zero(5)};
  const SlotChannel ch{Eigen::VectorXd::Constant(1, 20000.0), 0.1};
  for (PolicyKind p : {PolicyKind::QueueDrivenCaseI, PolicyKind::AvgQualityMax}) {
    const SlotOutcome o = adapt_slot(p, users, queues, default_case_one_constraints(), ch);
    EXPECT_EQ(o.rates[0], kRateMaxKbps);
    EXPECT_DOUBLE_EQ(o.qualities[0], quality(users[0].params, kRateMaxKbps));
  }
}

TEST(AdaptSlot, BaselineFavoursSteeperUser) {
  std::vector<AdaptUser> users(2);
  users[0].params = {12.0, -30.0};
  users[1].params = {6.0, 10.0};
  for (AdaptUser& u : users) u.sojourn = 100;
  const SlotChannel ch{Eigen::Vector2d(8000.0, 8000.0), 0.4};
  const SlotOutcome o = adapt_slot(PolicyKind::AvgQualityMax, users, {}, default_case_one_constraints(), ch);
  EXPECT_GT(o.rates[0], o.rates[1]);
  EXPECT_NEAR(o.rates[0] / o.rates[1], 2.0, 1e-9);
}

TEST(AdaptSlot, BaselineLeavesQueuesAlone) {
  TwoUserScene scene;
  scene.queues[0] << 1, 2, 3, 4, 5;
  scene.queues[1] << 0.5, 0, 0, 7, 0;
  const auto before = scene.queues;
  adapt_slot(PolicyKind::AvgQualityMax, scene.users, scene.queues, scene.constraints, scene.channel(0));
  EXPECT_EQ(scene.queues, before);
}

TEST(AdaptSlot, ZeroQueuesMatchBaselineExactly) {
  for (std::uint64_t i = 0; i < 300; ++i) {
    Stream rng(63, StreamTag::Test, i);
    const int n = 1 + static_cast<int>(rng() % 6);
    std::vector<AdaptUser> users(static_cast<std::size_t>(n));
    SlotChannel ch{Eigen::VectorXd(n), rng.uniform(0.0, 0.6)};
    for (int k = 0; k < n; ++k) {
      users[static_cast<std::size_t>(k)].params = {rng.uniform(3.0, 15.0), rng.uniform(-60.0, 20.0)};
      users[static_cast<std::size_t>(k)].sojourn = 40 + static_cast<int>(rng() % 400);
      ch.video_peaks[k] = rng.uniform(3750.0, 22500.0);
    }
    std::vector<Eigen::VectorXd> queues(static_cast<std::size_t>(n), Eigen::VectorXd::Zero(5));
    const SlotOutcome q = adapt_slot(PolicyKind::QueueDrivenCaseI, users, queues, default_case_one_constraints(), ch);
    const SlotOutcome b = adapt_slot(PolicyKind::AvgQualityMax, users, {}, default_case_one_constraints(), ch);
    EXPECT_EQ(q.rates, b.rates) << "instance " << i;
  }
}

TEST(AdaptSlot, RejectsMismatchedInputs) {
  TwoUserScene scene;
  const SlotChannel one{Eigen::VectorXd::Constant(1, 1000.0), 0.0};
  EXPECT_THROW(adapt_slot(PolicyKind::QueueDrivenCaseI, scene.users, scene.queues, scene.constraints, one),
               std::invalid_argument);
  const ConstraintSet two = ConstraintSet::case_two({{40.0, 1.0}});
  EXPECT_THROW(adapt_slot(PolicyKind::QueueDrivenCaseI, scene.users, scene.queues, two, scene.channel(0)),
               std::invalid_argument);
  EXPECT_THROW(adapt_slot(PolicyKind::QueueDrivenCaseII, scene.users, scene.queues, scene.constraints,
                          scene.channel(0)),
               std::invalid_argument);
}

TEST(AdaptSlot, PressureRaisesTheViolatingUsersRate) {
  TwoUserScene scene;
  double first = 0.0, last = 0.0;
  for (std::int64_t t = 0; t < 500; ++t) {
    const SlotOutcome o = scene.step(t);
    if (t < 100) first += o.rates[1];
    if (t >= 400) last += o.rates[1];
  }
  EXPECT_GT(last, first);
  EXPECT_GT(last / 100.0, rate_for_quality(scene.users[1].params, 55.0) * 0.97);
}

TEST(AdaptSlot, QueuesStayBoundedWhenFeasible) {
  TwoUserScene scene;
  double at_1000 = 0.0, peak = 0.0;
  for (std::int64_t t = 0; t < 100000; ++t) {
    scene.step(t);
    const double m = std::max(scene.queues[0].maxCoeff(), scene.queues[1].maxCoeff());
    peak = std::max(peak, m);
    if (t == 999) at_1000 = peak;
  }
  ASSERT_GT(at_1000, 0.0);
  EXPECT_LT(peak, 10.0 * at_1000);
}

TEST(Ladder, RoundsUpOntoLogGrid) {
  const double lo = kRateMinKbps, hi = kRateMaxKbps;
  EXPECT_EQ(round_up_to_ladder(lo, lo, hi, 50), lo);
  EXPECT_EQ(round_up_to_ladder(hi, lo, hi, 50), hi);
  EXPECT_EQ(round_up_to_ladder(1e6, lo, hi, 50), hi);
  const double step = std::log(hi / lo) / 49.0;
  const double second = lo * std::exp(step);
  EXPECT_NEAR(round_up_to_ladder(lo * 1.001, lo, hi, 50), second, 1e-9);
  for (std::uint64_t i = 0; i < 1000; ++i) {
    Stream rng(64, StreamTag::Test, i);
    const double r = rng.uniform(lo, hi);
    const double up = round_up_to_ladder(r, lo, hi, 50);
    EXPECT_GE(up, r * (1 - 1e-12));
    EXPECT_LE(up, r * std::exp(step) * (1 + 1e-12));
  }
}

TEST(Ladder, AppliedToDeliveredRatesAndQueues) {
  TwoUserScene scene;
  AdaptOptions opt;
  opt.ladder_rounding = true;
  const SlotOutcome o =
      adapt_slot(PolicyKind::QueueDrivenCaseI, scene.users, scene.queues, scene.constraints, scene.channel(0), opt);
  for (int k = 0; k < 2; ++k) {
    EXPECT_GE(o.rates[k], o.allocation.rates[k]);
    EXPECT_EQ(o.rates[k], round_up_to_ladder(o.allocation.rates[k], kRateMinKbps, kRateMaxKbps, 50));
    EXPECT_DOUBLE_EQ(o.qualities[k], quality(scene.users[static_cast<std::size_t>(k)].params, o.rates[k]));
  }
}
