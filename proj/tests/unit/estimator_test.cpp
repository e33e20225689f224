#include <sstream>

#include <gtest/gtest.h>

#include "foodwise/error.hpp"
#include "foodwise/estimator.hpp"
#include "oracles/oracles.hpp"
#include "support/gen.hpp"

namespace {

using namespace foodwise;

std::vector<WeightSample> samples(std::initializer_list<std::pair<std::int64_t, double>> xy) {
  std::vector<WeightSample> out;
  for (auto [x, y] : xy) out.push_back({x, y});
  return out;
}

Errc fit_error(const std::vector<WeightSample>& s) {
  try {
    fit(s);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "fit succeeded";
  return Errc::InvalidArgument;
}

TEST(Fit, ExactLine) {
  const LinearModel m = fit(samples({{0, 0}, {1, 2}, {2, 4}}));
  EXPECT_DOUBLE_EQ(m.slope, 2.0);
  EXPECT_DOUBLE_EQ(m.intercept, 0.0);
  EXPECT_DOUBLE_EQ(m.r_squared, 1.0);
  EXPECT_EQ(m.n_samples, 3);
}

// Normal equations evaluated in exact rationals: slope 27/20, intercept
// -3/20, r^2 = 729/772.
TEST(Fit, FiveOddPointsPinned) {
  const LinearModel m = fit(samples({{1, 2}, {3, 3}, {5, 7}, {7, 8}, {9, 13}}));
  EXPECT_NEAR(m.slope, 1.35, 1e-12);
  EXPECT_NEAR(m.intercept, -0.15, 1e-12);
  EXPECT_NEAR(m.r_squared, 729.0 / 772.0, 1e-12);

  const std::vector<std::pair<std::int64_t, std::int64_t>> xy{{1, 2}, {3, 3}, {5, 7}, {7, 8}, {9, 13}};
  const oracle::ExactFit o = oracle::fit(xy);
  EXPECT_NEAR(static_cast<double>(o.slope), 1.35, 1e-15);
  EXPECT_NEAR(static_cast<double>(o.intercept), -0.15, 1e-15);
}

TEST(Fit, Errors) {
  EXPECT_EQ(fit_error(samples({{5, 10}, {5, 12}})), Errc::DegenerateX);
  EXPECT_EQ(fit_error(samples({{5, 10}})), Errc::InsufficientSamples);
  EXPECT_EQ(fit_error({}), Errc::InsufficientSamples);
}

TEST(Fit, ConstantWeightsHaveUnitRSquared) {
  const LinearModel m = fit(samples({{1, 7}, {2, 7}, {9, 7}}));
  EXPECT_NEAR(m.slope, 0.0, 1e-15);
  EXPECT_NEAR(m.intercept, 7.0, 1e-12);
  EXPECT_EQ(m.r_squared, 1.0);
}

TEST(Fit, ShiftingWeightsShiftsIntercept) {
  fwtest::Gen g(21);
  for (int i = 0; i < 300; ++i) {
    std::vector<WeightSample> s;
    const int n = g.small(2, 30);
    for (int k = 0; k < n; ++k) s.push_back({g.range(0, 100000), g.real(0, 5000)});
    s[1].area_px = s[0].area_px + 1;
    const double c = g.real(0, 1000);
    std::vector<WeightSample> shifted = s;
    for (auto& w : shifted) w.weight_g += c;
    const LinearModel a = fit(s), b = fit(shifted);
    EXPECT_NEAR(b.slope, a.slope, 1e-9 * std::max(1.0, std::abs(a.slope)));
    EXPECT_NEAR(b.intercept, a.intercept + c, 1e-9 * std::max(1.0, std::abs(a.intercept + c)));
  }
}

TEST(Fit, RSquaredWithinUnitInterval) {
  fwtest::Gen g(22);
  for (int i = 0; i < 500; ++i) {
    std::vector<WeightSample> s;
    const int n = g.small(2, 20);
    for (int k = 0; k < n; ++k) s.push_back({g.range(0, 1000), g.real(0, 100)});
    s[0].area_px = 0;
    s[1].area_px = 1001;
    const LinearModel m = fit(s);
    EXPECT_GE(m.r_squared, 0.0);
    EXPECT_LE(m.r_squared, 1.0);
  }
}

TEST(Predict, ClampsAndScales) {
  EXPECT_EQ(predict({2.0, 0.0, 1.0, 2}, 500), 1000.0);
  EXPECT_EQ(predict({2.0, -5.0, 1.0, 2}, 1), 0.0);
  EXPECT_EQ(predict({0.0, 7.0, 1.0, 2}, 0), 7.0);
  EXPECT_EQ(predict({0.0, 7.0, 1.0, 2}, 123456), 7.0);
}

TEST(Predict, MonotoneForNonNegativeSlope) {
  fwtest::Gen g(23);
  for (int i = 0; i < 2000; ++i) {
    const LinearModel m{g.real(0, 3), g.real(-500, 500), 1.0, 2};
    const std::int64_t a = g.range(0, 1'000'000), b = g.range(0, 1'000'000);
    EXPECT_LE(predict(m, std::min(a, b)), predict(m, std::max(a, b)));
    EXPECT_GE(predict(m, a), 0.0);
  }
}

TEST(Apportion, SplitsByAreaShare) {
  const LinearModel m{0.1, 0.0, 1.0, 2};
  PerCategory<std::int64_t> areas{};
  areas[FoodCategory::rice] = 300;
  areas[FoodCategory::meat] = 100;
  const PerCategory<double> g = apportion_weight(m, areas);
  EXPECT_DOUBLE_EQ(g[FoodCategory::rice], 30.0);
  EXPECT_DOUBLE_EQ(g[FoodCategory::meat], 10.0);
  EXPECT_DOUBLE_EQ(g[FoodCategory::vegetables], 0.0);
  EXPECT_EQ(apportion_weight(m, PerCategory<std::int64_t>{}).sum(), 0.0);
}

TEST(CalibrationCsv, ReadsAndRejects) {
  std::istringstream ok("area_px,weight_g\n10,1.5\n\n20, 3\n");
  const auto s = read_weight_samples(ok);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1].area_px, 20);
  EXPECT_EQ(s[1].weight_g, 3.0);

  for (const char* bad : {"x,y\n1,2\n", "area_px,weight_g\n-1,2\n", "area_px,weight_g\n1\n",
                          "area_px,weight_g\n1,abc\n", "area_px,weight_g\n1,-2\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(read_weight_samples(in), Error) << bad;
  }
  EXPECT_THROW(read_weight_samples(std::filesystem::path("/no/such/file.csv")), Error);
}

}  // namespace
