#include <gtest/gtest.h>

#include <set>

#include "ipdb/continuous.hpp"
#include "support.hpp"

namespace ipdb {
namespace {

PiecewiseIntensity uniform(double density = 1.0) {
  return PiecewiseIntensity("X", {{{0.0, 1.0}, density}});
}

std::vector<BagInstance> draw(const PiecewiseIntensity& intensity, std::uint64_t n, std::uint64_t seed) {
  std::vector<BagInstance> out;
  out.reserve(n);
  const Rng root(seed);
  for (std::uint64_t i = 0; i < n; ++i) {
    Rng rng = root.substream(i);
    out.push_back(sample_poisson_process(intensity, rng));
  }
  return out;
}

TEST(MeasureOf, Examples) {
  EXPECT_DOUBLE_EQ(measure_of(uniform(), {{0.0, 0.5}}), 0.5);
  EXPECT_DOUBLE_EQ(measure_of(uniform(), {}), 0.0);
  PiecewiseIntensity two("X", {{{0.0, 1.0}, 2.0}, {{2.0, 3.0}, 1.0}});
  EXPECT_DOUBLE_EQ(measure_of(two, {{0.0, 3.0}}), 3.0);
  EXPECT_DOUBLE_EQ(two.total(), 3.0);
  // Overlapping targets are merged, not double counted.
  EXPECT_DOUBLE_EQ(measure_of(two, {{0.0, 0.5}, {0.25, 0.75}}), 1.5);
  // Additivity over disjoint targets.
  EXPECT_DOUBLE_EQ(measure_of(two, {{0.0, 0.5}, {2.5, 3.0}}),
                   measure_of(two, {{0.0, 0.5}}) + measure_of(two, {{2.5, 3.0}}));
}

TEST(PiecewiseIntensity, RejectsBadPieces) {
  EXPECT_THROW(PiecewiseIntensity("X", {{{1.0, 0.0}, 1.0}}), Error);
  EXPECT_THROW(PiecewiseIntensity("X", {{{0.0, 1.0}, -1.0}}), Error);
  EXPECT_THROW(PiecewiseIntensity("X", {{{0.0, 1.0}, 1.0}, {{0.5, 2.0}, 1.0}}), Error);
}

TEST(SamplePoissonProcess, EmptyProbabilityAndZeroIntensity) {
  auto samples = draw(uniform(), 100000, 1);
  double empty = 0;
  for (const auto& d : samples) empty += d.empty();
  EXPECT_NEAR(empty / 100000, std::exp(-1.0), 0.01);
  PiecewiseIntensity zero("X", {{{0.0, 1.0}, 0.0}});
  for (const auto& d : draw(zero, 1000, 2)) EXPECT_TRUE(d.empty());
}

TEST(SamplePoissonProcess, PointsLieInTheSupport) {
  PiecewiseIntensity gap("X", {{{0.0, 1.0}, 1.0}, {{1.0, 2.0}, 0.0}, {{5.0, 6.0}, 3.0}});
  double in_last = 0, total = 0;
  for (const auto& d : draw(gap, 20000, 3))
    for (const auto& [fact, m] : d.entries()) {
      double x = fact.args[0].as_real();
      EXPECT_TRUE((x >= 0 && x < 1) || (x >= 5 && x < 6)) << x;
      in_last += static_cast<double>(m) * (x >= 5);
      total += static_cast<double>(m);
    }
  EXPECT_NEAR(in_last / total, 0.75, 0.01);
}

TEST(CountStatistics, TwoHalfWindows) {
  auto samples = draw(uniform(), 100000, 4);
  CountReport report = count_statistics(samples, uniform(), {{0.0, 0.5}, {0.5, 1.0}});
  ASSERT_EQ(report.windows.size(), 2u);
  for (const auto& w : report.windows) {
    EXPECT_DOUBLE_EQ(w.expected_rate, 0.5);
    EXPECT_NEAR(w.mean_count, 0.5, 0.02);
    EXPECT_TRUE(w.fit.pass) << "p-value " << w.fit.p_value;
  }
  ASSERT_EQ(report.covariances.size(), 2u);
  ASSERT_EQ(report.covariances[0].size(), 1u);
  EXPECT_LT(std::abs(report.covariances[0][0].z), 3.0);
}

TEST(CountStatistics, FullSupportAndEmptyInput) {
  PiecewiseIntensity two("X", {{{0.0, 1.0}, 2.0}, {{2.0, 3.0}, 1.0}});
  auto samples = draw(two, 50000, 5);
  CountReport full = count_statistics(samples, two, {{0.0, 3.0}});
  EXPECT_TRUE(full.windows[0].fit.pass);
  EXPECT_DOUBLE_EQ(full.windows[0].expected_rate, 3.0);
  EXPECT_TRUE(count_statistics({}, two, {{0.0, 1.0}}).windows.empty());
  EXPECT_THROW(count_statistics(samples, two, {{0.0, 1.0}, {0.5, 2.0}}), Error);
}

TEST(CountStatistics, SuperpositionAndRestrictionClosure) {
  PiecewiseIntensity a("X", {{{0.0, 1.0}, 1.0}});
  PiecewiseIntensity b("X", {{{0.5, 2.0}, 2.0}});
  PiecewiseIntensity sum("X", {{{0.0, 0.5}, 1.0}, {{0.5, 1.0}, 3.0}, {{1.0, 2.0}, 2.0}});
  auto sa = draw(a, 50000, 6), sb = draw(b, 50000, 7);
  std::vector<BagInstance> merged;
  for (std::size_t i = 0; i < sa.size(); ++i) merged.push_back(bag_union(sa[i], sb[i]));
  std::vector<Interval> windows = {{0.0, 0.5}, {0.5, 1.0}, {1.0, 2.0}};
  CountReport report = count_statistics(merged, sum, windows);
  for (const auto& w : report.windows) EXPECT_TRUE(w.fit.pass) << w.window.lo << " p " << w.fit.p_value;
  // Restriction to [0.25, 0.75) of the merged process.
  CountReport restricted = count_statistics(merged, sum, {{0.25, 0.75}});
  EXPECT_DOUBLE_EQ(restricted.windows[0].expected_rate, 0.25 + 0.75);
  EXPECT_TRUE(restricted.windows[0].fit.pass);
}

TEST(SamplePoissonProcess, NoDuplicatePoints) {
  PiecewiseIntensity intensity = uniform();
  const Rng root(8);
  std::uint64_t duplicates = 0;
  for (std::uint64_t i = 0; i < 1000000; ++i) {
    Rng rng = root.substream(i);
    BagInstance d = sample_poisson_process(intensity, rng);
    for (const auto& [fact, m] : d.entries()) duplicates += m - 1;
  }
  EXPECT_EQ(duplicates, 0u);
}

TEST(SamplePoissonProcess, DeterministicUnderSeed) {
  EXPECT_EQ(draw(uniform(2.0), 100, 9), draw(uniform(2.0), 100, 9));
}

}  // namespace
}  // namespace ipdb
