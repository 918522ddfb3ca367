#include "qoestream/metrics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "qoestream/rng.hpp"

using namespace qoe;

namespace {

// The definition evaluated slot by slot.
double ecdf2_oracle(const std::vector<double>& q, double x) {
  double sum = 0.0;
  for (std::size_t t = 0; t < q.size(); ++t) sum += x > q[t] ? x - q[t] : 0.0;
  return sum / static_cast<double>(q.size());
}

std::vector<double> random_trace(Stream& rng, std::size_t min_len = 1, std::size_t max_len = 300) {
  const std::size_t n = min_len + rng() % (max_len - min_len + 1);
  std::vector<double> q(n);
  for (double& v : q) v = rng.uniform(0.0, 100.0);
  return q;
}

// Piecewise-linear interpolant of the lower convex hull of (x_i, h_i).
double hull_bound(const std::vector<GridPoint>& grid, double x) {
  std::vector<GridPoint> hull;
  for (const GridPoint& p : grid) {
    while (hull.size() >= 2) {
      const GridPoint& a = hull[hull.size() - 2];
      const GridPoint& b = hull.back();
      if ((b.h - a.h) * (p.x - a.x) >= (p.h - a.h) * (b.x - a.x)) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(p);
  }
  for (std::size_t k = 0; k + 1 < hull.size(); ++k)
    if (x <= hull[k + 1].x) {
      const double t = (x - hull[k].x) / (hull[k + 1].x - hull[k].x);
      return hull[k].h + t * (hull[k + 1].h - hull[k].h);
    }
  return hull.back().h;
}

}  // namespace

TEST(Ecdf2, AboveLevelEverywhereIsZero) {
  EXPECT_EQ(ecdf2(QualityTrace({50, 50, 50, 50}), 45.0), 0.0);
}

TEST(Ecdf2, TwoSlotExample) {
  EXPECT_DOUBLE_EQ(ecdf2(QualityTrace({30, 50}), 40.0), 5.0);
}

TEST(Ecdf2, ConstantTrace) {
  for (double c : {0.0, 12.5, 40.0, 99.0})
    for (double x : {0.0, 20.0, 40.0, 70.0, 100.0})
      EXPECT_DOUBLE_EQ(ecdf2(QualityTrace(std::vector<double>(7, c)), x), std::max(x - c, 0.0));
}

TEST(Ecdf2, EmptyTraceIsAnError) {
  EXPECT_THROW(QualityTrace(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(ecdf2(std::span<const double>{}, 10.0), std::invalid_argument);
}

TEST(QualityTraceTest, ClampsAndRejectsNonFinite) {
  QualityTrace t({-5.0, 50.0, 140.0});
  EXPECT_EQ(t.values()[0], 0.0);
  EXPECT_EQ(t.values()[2], 100.0);
  EXPECT_THROW(QualityTrace({1.0, std::nan("")}), std::invalid_argument);
  EXPECT_THROW(QualityTrace({INFINITY}), std::invalid_argument);
}

TEST(Ecdf2, MatchesDoubleLoopExactly) {
  for (std::uint64_t i = 0; i < 1000; ++i) {
    Stream rng(11, StreamTag::Test, i);
    const std::vector<double> q = random_trace(rng);
    const QualityTrace trace(q);
    const double x = rng.uniform(0.0, 100.0);
    EXPECT_EQ(ecdf2(trace, x), ecdf2_oracle(q, x)) << "trace " << i;
  }
}

TEST(Ecdf2, ConvexAndNondecreasingInLevel) {
  for (std::uint64_t i = 0; i < 1000; ++i) {
    Stream rng(12, StreamTag::Test, i);
    const QualityTrace trace(random_trace(rng));
    double a = rng.uniform(0.0, 100.0), b = rng.uniform(0.0, 100.0);
    if (a > b) std::swap(a, b);
    const double lambda = rng.uniform();
    const double mid = lambda * a + (1.0 - lambda) * b;
    EXPECT_LE(ecdf2(trace, mid), lambda * ecdf2(trace, a) + (1.0 - lambda) * ecdf2(trace, b) + 1e-12);
    EXPECT_LE(ecdf2(trace, a), ecdf2(trace, mid) + 1e-12);
    EXPECT_LE(ecdf2(trace, mid), ecdf2(trace, b) + 1e-12);
  }
}

TEST(Ecdf2, BoundedByLevelAndZeroAtZero) {
  for (std::uint64_t i = 0; i < 200; ++i) {
    Stream rng(13, StreamTag::Test, i);
    const QualityTrace trace(random_trace(rng));
    EXPECT_EQ(ecdf2(trace, 0.0), 0.0);
    const double x = rng.uniform(0.0, 100.0);
    EXPECT_LE(ecdf2(trace, x), x);
  }
}

TEST(Ecdf2, PermutationInvariant) {
  Stream rng(14, StreamTag::Test);
  std::vector<double> q = random_trace(rng, 50, 50);
  const double before = ecdf2(QualityTrace(q), 55.0);
  std::reverse(q.begin(), q.end());
  std::rotate(q.begin(), q.begin() + 17, q.end());
  EXPECT_NEAR(ecdf2(QualityTrace(q), 55.0), before, 1e-12);
}

// Grid satisfaction is equivalent to satisfying the hull interpolant at
// every level between the first and last grid point.
TEST(Ecdf2, GridEquivalentToInterpolatedBound) {
  int satisfied_cases = 0, violated_cases = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    Stream rng(15, StreamTag::Test, i);
    std::vector<GridPoint> grid;
    double x = rng.uniform(10.0, 30.0), h = rng.uniform(0.0, 2.0);
    const int points = 2 + static_cast<int>(rng() % 5);
    for (int k = 0; k < points; ++k) {
      grid.push_back({x, h});
      x += rng.uniform(5.0, 15.0);
      h += rng.uniform(0.0, 6.0);
    }
    // Traces around the grid so both outcomes occur.
    std::vector<double> q(static_cast<std::size_t>(20 + rng() % 200));
    const double centre = rng.uniform(grid.front().x, grid.back().x + 20.0);
    for (double& v : q) v = std::clamp(centre + rng.uniform(-15.0, 15.0), 0.0, 100.0);
    const QualityTrace trace(q);

    bool at_grid = true;
    for (const GridPoint& p : grid) at_grid = at_grid && ecdf2(trace, p.x) <= hull_bound(grid, p.x);
    bool everywhere = true;
    for (int k = 0; k < 1000; ++k) {
      const double level = rng.uniform(grid.front().x, grid.back().x);
      everywhere = everywhere && ecdf2(trace, level) <= hull_bound(grid, level) + 1e-12;
    }
    if (at_grid) {
      EXPECT_TRUE(everywhere) << "case " << i;
      ++satisfied_cases;
    } else {
      ++violated_cases;
      // A grid violation is itself a violating level.
      bool found = false;
      for (const GridPoint& p : grid) found = found || ecdf2(trace, p.x) > hull_bound(grid, p.x);
      EXPECT_TRUE(found);
    }
  }
  EXPECT_GT(satisfied_cases, 50);
  EXPECT_GT(violated_cases, 50);
}

TEST(Constraints, CaseOneValidation) {
  EXPECT_THROW(ConstraintSet::case_one({{40, 1}, {30, 2}}), std::invalid_argument);
  EXPECT_THROW(ConstraintSet::case_one({{30, 2}, {40, 1}}), std::invalid_argument);
  EXPECT_THROW(ConstraintSet::case_one({{30, -1}}), std::invalid_argument);
  EXPECT_THROW(ConstraintSet::case_one({}), std::invalid_argument);
  EXPECT_NO_THROW(ConstraintSet::case_one({{30, 1}, {40, 1}}));
}

TEST(Satisfies, ConstantSeventyMeetsDefaultGrid) {
  const Verdict v = satisfies(QualityTrace(std::vector<double>(100, 70.0)), default_case_one_constraints());
  EXPECT_TRUE(v.satisfied);
  const std::vector<double> h = {0.7, 1.0, 3.0, 7.0, 15.0};
  ASSERT_EQ(v.margins.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(v.margins[i], h[i]);
}

TEST(Satisfies, ConstantTwentyNineFailsAtThirty) {
  const Verdict v = satisfies(QualityTrace(std::vector<double>(100, 29.0)), default_case_one_constraints());
  EXPECT_FALSE(v.satisfied);
  EXPECT_NEAR(v.margins[0], 0.7 - 1.0, 1e-12);
}

TEST(Satisfies, CaseTwoChecksOwnTypeOnly) {
  const ConstraintSet cs = ConstraintSet::case_two({{40, 1}, {60, 1}});
  const QualityTrace trace(std::vector<double>(50, 60.0));
  const Verdict v = satisfies(trace, cs, 1);
  EXPECT_TRUE(v.satisfied);
  ASSERT_EQ(v.margins.size(), 1u);
  EXPECT_DOUBLE_EQ(v.margins[0], 1.0);
  EXPECT_TRUE(satisfies(QualityTrace(std::vector<double>(50, 45.0)), cs, 0).satisfied);
  EXPECT_FALSE(satisfies(QualityTrace(std::vector<double>(50, 45.0)), cs, 1).satisfied);
}

TEST(Satisfies, CaseTwoNeedsKnownType) {
  const ConstraintSet cs = ConstraintSet::case_two({{40, 1}, {60, 1}});
  const QualityTrace trace(std::vector<double>(5, 50.0));
  EXPECT_THROW(satisfies(trace, cs), std::invalid_argument);
  EXPECT_THROW(satisfies(trace, cs, 2), std::invalid_argument);
}

TEST(PooledStats, Examples) {
  const PooledStats s = pooled_stats(QualityTrace({40, 60}));
  EXPECT_DOUBLE_EQ(s.mean, 50.0);
  EXPECT_DOUBLE_EQ(s.min, 40.0);
  EXPECT_DOUBLE_EQ(s.variance, 100.0);
  EXPECT_DOUBLE_EQ(pooled_stats(QualityTrace(std::vector<double>(9, 33.0))).variance, 0.0);
  const PooledStats one = pooled_stats(QualityTrace({17.0}));
  EXPECT_DOUBLE_EQ(one.mean, 17.0);
  EXPECT_DOUBLE_EQ(one.min, 17.0);
}
