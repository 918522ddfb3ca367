#include "qoestream/thresholdopt.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qoestream/rng.hpp"

using namespace qoe;

TEST(Tuner, NoUpdateBeforeBatchCompletes) {
  ThresholdTuner t(1, 100, 0.0, 10.0);
  for (int k = 0; k < 99; ++k) EXPECT_FALSE(t.observe(true).has_value());
  EXPECT_EQ(t.pending(), 99u);
  const auto s = t.observe(true);
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(s->y, -1);
  EXPECT_EQ(t.pending(), 0u);
  EXPECT_EQ(t.theta(), 0.0);
}

TEST(Tuner, AnyViolationRaises) {
  ThresholdTuner t(1, 100, 0.0, 10.0);
  for (int k = 0; k < 100; ++k) {
    const auto s = t.observe(k != 37);
    if (k < 99) EXPECT_FALSE(s);
    else {
      ASSERT_TRUE(s);
      EXPECT_EQ(s->y, 1);
      EXPECT_EQ(s->n, 1);
      EXPECT_EQ(s->m, 1);
      EXPECT_EQ(s->theta, 0.0);
      EXPECT_EQ(s->theta_next, 10.0);
    }
  }
  // The violation does not leak into the next batch.
  std::optional<ThresholdStep> s;
  for (int k = 0; k < 100; ++k) s = t.observe(true);
  ASSERT_TRUE(s);
  EXPECT_EQ(s->y, -1);
}

TEST(Tuner, SignChangeSequence) {
  ThresholdTuner t(1, 100, 0.0, 10.0);
  const ThresholdStep a = t.update(0, 1), b = t.update(0, 1), c = t.update(0, -1);
  EXPECT_EQ(a.m, 1);
  EXPECT_EQ(b.m, 1);
  EXPECT_EQ(c.m, 2);
  EXPECT_EQ(a.theta_next, 10.0);
  EXPECT_EQ(b.theta_next, 20.0);
  EXPECT_EQ(c.theta_next, 15.0);
  EXPECT_EQ(c.step, 5.0);
  EXPECT_EQ(t.iterations(), 3);
  EXPECT_THROW(t.update(0, 0), std::invalid_argument);
}

TEST(Tuner, ClampedAtZero) {
  ThresholdTuner t(1, 1, 0.0, 10.0);
  for (int k = 0; k < 50; ++k) {
    t.observe(true);
    ASSERT_EQ(t.theta(), 0.0);
  }
  EXPECT_EQ(t.sign_changes(), 1);
  ThresholdTuner neg(std::vector<double>{-5.0}, 10, 10.0);
  EXPECT_EQ(neg.theta(), 0.0);
}

TEST(Tuner, StepNonincreasingAndExact) {
  for (std::uint64_t i = 0; i < 100; ++i) {
    Stream rng(81, StreamTag::Test, i);
    ThresholdTuner t(1, 100, rng.uniform(0.0, 50.0), 10.0);
    double last_step = 1e300;
    for (int k = 0; k < 300; ++k) {
      const ThresholdStep s = t.update(0, rng.uniform() < 0.5 ? 1 : -1);
      EXPECT_LE(s.step, last_step);
      EXPECT_DOUBLE_EQ(s.step, 10.0 / s.m);
      if (s.theta + s.step * s.y >= 0.0) {
        EXPECT_NEAR(s.theta_next - s.theta, s.step * s.y, 1e-12);
      } else {
        EXPECT_EQ(s.theta_next, 0.0);
      }
      last_step = s.step;
    }
  }
}

TEST(Tuner, ComponentsAreIndependent) {
  ThresholdTuner t(std::vector<double>{0.0, 0.0}, 3, 10.0);
  EXPECT_FALSE(t.observe(false, 0));
  EXPECT_FALSE(t.observe(true, 1));
  EXPECT_FALSE(t.observe(true, 1));
  const auto s1 = t.observe(true, 1);
  ASSERT_TRUE(s1);
  EXPECT_EQ(s1->component, 1u);
  EXPECT_EQ(s1->y, -1);
  EXPECT_EQ(t.pending(0), 1u);
  EXPECT_EQ(t.thetas(), (std::vector<double>{0.0, 0.0}));
  EXPECT_THROW(t.observe(true, 2), std::out_of_range);
}

TEST(Tuner, PermutingTypesPermutesTrajectory) {
  Stream rng(82, StreamTag::Test);
  std::vector<std::pair<bool, std::size_t>> verdicts;
  for (int k = 0; k < 5000; ++k) {
    const std::size_t type = rng() % 2;
    verdicts.emplace_back(rng.uniform() < (type == 0 ? 0.995 : 0.98), type);
  }
  ThresholdTuner a(std::vector<double>{0.0, 0.0}, 50, 10.0), b(std::vector<double>{0.0, 0.0}, 50, 10.0);
  std::vector<ThresholdStep> sa, sb;
  for (const auto& [ok, type] : verdicts) {
    if (auto s = a.observe(ok, type)) sa.push_back(*s);
    if (auto s = b.observe(ok, 1 - type)) sb.push_back(*s);
  }
  ASSERT_EQ(sa.size(), sb.size());
  ASSERT_GT(sa.size(), 50u);
  for (std::size_t k = 0; k < sa.size(); ++k) {
    EXPECT_EQ(sa[k].component, 1 - sb[k].component);
    EXPECT_EQ(sa[k].theta_next, sb[k].theta_next);
    EXPECT_EQ(sa[k].m, sb[k].m);
  }
  EXPECT_EQ(a.theta(0), b.theta(1));
  EXPECT_EQ(a.theta(1), b.theta(0));
}

TEST(Tuner, RejectsBadConstruction) {
  EXPECT_THROW(ThresholdTuner(0, 100), std::invalid_argument);
  EXPECT_THROW(ThresholdTuner(1, 0), std::invalid_argument);
  EXPECT_THROW(ThresholdTuner(1, 100, 0.0, 0.0), std::invalid_argument);
}
