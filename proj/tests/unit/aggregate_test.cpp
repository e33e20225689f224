#include <algorithm>

#include <gtest/gtest.h>

#include "foodwise/aggregate.hpp"
#include "foodwise/error.hpp"
#include "oracles/oracles.hpp"
#include "support/gen.hpp"

namespace {

using namespace foodwise;
using fwtest::day;

const SeverityThresholds kDefaults{};
const LinearModel kTenthGram{0.1, 0.0, 1.0, 2};

PerSeverity<std::int64_t> counts(std::int64_t severe, std::int64_t medium, std::int64_t light) {
  PerSeverity<std::int64_t> c{};
  c[SeverityLevel::severe] = severe;
  c[SeverityLevel::medium] = medium;
  c[SeverityLevel::light] = light;
  return c;
}

PerSeverity<std::int64_t> tally(const std::vector<SeverityLevel>& bowls) {
  PerSeverity<std::int64_t> c{};
  for (SeverityLevel l : bowls) ++c[l];
  return c;
}

PerCategory<std::int64_t> cats(std::int64_t r, std::int64_t m, std::int64_t v) {
  PerCategory<std::int64_t> c{};
  c[FoodCategory::rice] = r;
  c[FoodCategory::meat] = m;
  c[FoodCategory::vegetables] = v;
  return c;
}

TrayObservation tray(Date d, int seq, std::int64_t r, std::int64_t m, std::int64_t v) {
  TrayObservation t;
  t.tray_id = "t" + std::to_string(seq);
  t.local_date = d;
  t.observed_at = fwtest::at(d, 4, 0, seq);
  t.areas_px = cats(r, m, v);
  return t;
}

TEST(Classify, Boundaries) {
  EXPECT_EQ(classify_severity(0.0, kDefaults), SeverityLevel::light);
  EXPECT_EQ(classify_severity(49.999, kDefaults), SeverityLevel::light);
  EXPECT_EQ(classify_severity(50.0, kDefaults), SeverityLevel::medium);
  EXPECT_EQ(classify_severity(149.999, kDefaults), SeverityLevel::medium);
  EXPECT_EQ(classify_severity(150.0, kDefaults), SeverityLevel::severe);
}

TEST(Classify, Monotone) {
  fwtest::Gen g(31);
  for (int i = 0; i < 5000; ++i) {
    const double a = g.real(0, 400), b = g.real(0, 400);
    EXPECT_LE(classify_severity(std::min(a, b), kDefaults), classify_severity(std::max(a, b), kDefaults));
  }
}

TEST(Thresholds, Validate) {
  EXPECT_NO_THROW(kDefaults.validate());
  EXPECT_THROW((SeverityThresholds{0.0, 10.0}.validate()), Error);
  EXPECT_THROW((SeverityThresholds{10.0, 10.0}.validate()), Error);
}

TEST(Bowls, SingleLevel) {
  const auto b = allocate_bowls(counts(0, 0, 42), 42);
  ASSERT_EQ(b.size(), 100u);
  EXPECT_TRUE(std::all_of(b.begin(), b.end(), [](SeverityLevel l) { return l == SeverityLevel::light; }));
}

TEST(Bowls, ThirdsBreakTowardSevere) {
  const auto b = allocate_bowls(counts(1, 1, 1), 3);
  EXPECT_EQ(tally(b), counts(34, 33, 33));
  EXPECT_EQ(b.front(), SeverityLevel::severe);
  EXPECT_EQ(b[34], SeverityLevel::medium);
  EXPECT_EQ(b.back(), SeverityLevel::light);
  EXPECT_EQ(tally(b), oracle::bowls(counts(1, 1, 1)));
}

TEST(Bowls, ExactQuarters) { EXPECT_EQ(tally(allocate_bowls(counts(1, 0, 3), 4)), counts(25, 0, 75)); }

TEST(Bowls, CellsOrderedSevereFirst) {
  fwtest::Gen g(32);
  for (int i = 0; i < 500; ++i) {
    const auto c = counts(g.range(0, 50), g.range(0, 50), g.range(1, 50));
    const auto b = allocate_bowls(c, c.sum());
    EXPECT_TRUE(std::is_sorted(b.begin(), b.end(), std::greater<>()));
  }
}

TEST(Bowls, RejectsBadInput) {
  EXPECT_THROW(allocate_bowls(counts(1, 1, 1), 4), Error);
  EXPECT_THROW(allocate_bowls(counts(0, 0, 0), 0), Error);
  EXPECT_THROW(allocate_bowls(counts(-1, 1, 1), 1), Error);
}

TEST(Bowls, MatchesOracleWithinOneCell) {
  fwtest::Gen g(33);
  for (int i = 0; i < 3000; ++i) {
    const std::int64_t hi = g.coin() ? 10 : 1'000'000;
    const auto c = counts(g.range(0, hi), g.range(0, hi), g.range(0, hi));
    if (c.sum() == 0) continue;
    const auto got = tally(allocate_bowls(c, c.sum()));
    EXPECT_EQ(got, oracle::bowls(c));
    for (SeverityLevel l : kSeverityLevels) {
      const double exact = 100.0 * static_cast<double>(c[l]) / static_cast<double>(c.sum());
      EXPECT_LT(std::abs(static_cast<double>(got[l]) - exact), 1.0);
    }
  }
}

TEST(IntegerPercent, Examples) {
  EXPECT_EQ(integer_percent(cats(1000, 0, 0)), (PerCategory<int>{100, 0, 0}));
  EXPECT_EQ(integer_percent(cats(1, 1, 1)), (PerCategory<int>{34, 33, 33}));
  EXPECT_EQ(integer_percent(PerCategory<double>{1.0, 1.0, 1.0}), (PerCategory<int>{34, 33, 33}));
  try {
    integer_percent(cats(0, 0, 0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::AllZero);
  }
  EXPECT_THROW(integer_percent(PerCategory<double>{0.0, 0.0, 0.0}), Error);
  EXPECT_THROW(integer_percent(PerCategory<double>{-1.0, 2.0, 0.0}), Error);
}

// 1*100/35 and 8*100/35 leave the same remainder; floating quotients do not
// agree on that, the exact path does.
TEST(IntegerPercent, ExactTiesFollowCategoryOrder) {
  const auto p = integer_percent(PerCategory<double>{1.0, 8.0, 26.0});
  const auto o = oracle::largest_remainder<3>({1, 8, 26}, 100);
  EXPECT_EQ(p, (PerCategory<int>{static_cast<int>(o[0]), static_cast<int>(o[1]), static_cast<int>(o[2])}));
}

TEST(IntegerPercent, SumsToHundredForReals) {
  fwtest::Gen g(34);
  for (int i = 0; i < 3000; ++i) {
    PerCategory<double> v{g.real(0, 1e4), g.coin(0.3) ? 0.0 : g.real(0, 1e4), g.real(0, 1e-3)};
    const auto p = integer_percent(v);
    EXPECT_EQ(p.sum(), 100);
    const double total = v.sum();
    for (FoodCategory c : kFoodCategories) EXPECT_LT(std::abs(p[c] - 100.0 * v[c] / total), 1.0);
  }
}

TEST(Daily, EmptyDay) {
  const DailyAggregate a = daily_aggregate(day(2023, 3, 20), {}, kTenthGram, kDefaults);
  EXPECT_EQ(a.total_trays, 0);
  EXPECT_TRUE(a.bowls.empty());
  EXPECT_EQ(a.type_percent, (PerCategory<int>{0, 0, 0}));
  EXPECT_EQ(a.total_waste_g, 0.0);
  EXPECT_EQ(a.severity_counts, counts(0, 0, 0));
}

TEST(Daily, ThreeTraysOnePerLevel) {
  const Date d = day(2023, 3, 20);
  const std::vector<TrayObservation> trays{tray(d, 1, 400, 0, 0), tray(d, 2, 500, 300, 200),
                                           tray(d, 3, 1000, 500, 500)};
  const DailyAggregate a = daily_aggregate(d, trays, kTenthGram, kDefaults);
  EXPECT_EQ(a.severity_counts, counts(1, 1, 1));
  EXPECT_EQ(tally(a.bowls), counts(34, 33, 33));
  EXPECT_DOUBLE_EQ(a.total_waste_g, 340.0);
  EXPECT_EQ(a.type_percent.sum(), 100);
}

TEST(Daily, SingleRiceTray) {
  const Date d = day(2023, 3, 20);
  const std::vector<TrayObservation> trays{tray(d, 1, 1000, 0, 0)};
  EXPECT_EQ(daily_aggregate(d, trays, kTenthGram, kDefaults).type_percent, (PerCategory<int>{100, 0, 0}));
}

TEST(Daily, CleanTraysCountButHaveNoTypeShare) {
  const Date d = day(2023, 3, 20);
  const std::vector<TrayObservation> trays{tray(d, 1, 0, 0, 0), tray(d, 2, 0, 0, 0)};
  const DailyAggregate a = daily_aggregate(d, trays, kTenthGram, kDefaults);
  EXPECT_EQ(a.total_trays, 2);
  EXPECT_EQ(tally(a.bowls), counts(0, 0, 100));
  EXPECT_EQ(a.type_percent, (PerCategory<int>{0, 0, 0}));
}

TEST(Daily, RejectsMisdatedObservation) {
  const std::vector<TrayObservation> trays{tray(day(2023, 3, 21), 1, 1, 1, 1)};
  EXPECT_THROW(daily_aggregate(day(2023, 3, 20), trays, kTenthGram, kDefaults), Error);
}

TEST(Daily, MatchesBruteForceOnSmallInstances) {
  fwtest::Gen g(35);
  const Date d = day(2023, 3, 22);
  for (int i = 0; i < 1000; ++i) {
    std::vector<TrayObservation> trays;
    const int n = g.small(0, 20);
    for (int k = 0; k < n; ++k) {
      trays.push_back(g.coin(0.15) ? tray(d, k, 0, 0, 0)
                                   : tray(d, k, g.range(0, 1500), g.range(0, 800), g.range(0, 900)));
    }
    const LinearModel m{g.real(0, 0.3), g.real(-40, 40), 1.0, 2};
    const SeverityThresholds t{g.real(1, 100), 0};
    const SeverityThresholds th{t.medium_min_g, t.medium_min_g + g.real(1, 200)};
    const DailyAggregate a = daily_aggregate(d, trays, m, th);
    const oracle::DailyExpectation e = oracle::daily(trays, m.slope, m.intercept, th.medium_min_g, th.severe_min_g);
    EXPECT_EQ(a.total_trays, e.total_trays);
    EXPECT_EQ(a.severity_counts, e.severity);
    EXPECT_EQ(a.severity_counts.sum(), a.total_trays);
    EXPECT_EQ(tally(a.bowls), e.bowl_cells);
    EXPECT_EQ(a.bowls.size(), n == 0 ? 0u : 100u);
    EXPECT_EQ(a.type_percent[FoodCategory::rice], e.type_percent[0]);
    EXPECT_EQ(a.type_percent[FoodCategory::meat], e.type_percent[1]);
    EXPECT_EQ(a.type_percent[FoodCategory::vegetables], e.type_percent[2]);
    EXPECT_NEAR(a.total_waste_g, e.total_waste_g, 1e-9 * std::max(1.0, e.total_waste_g));
  }
}

DailyAggregate with_counts(Date d, std::int64_t s, std::int64_t m, std::int64_t l) {
  DailyAggregate a;
  a.date = d;
  a.severity_counts = counts(s, m, l);
  a.total_trays = s + m + l;
  return a;
}

TEST(Monthly, PassesCountsThrough) {
  using std::chrono::year;
  const auto march = year{2023} / std::chrono::March;
  EXPECT_TRUE(monthly_aggregate(march, {}).entries.empty());

  const std::vector<DailyAggregate> dailies{with_counts(day(2023, 3, 22), 0, 0, 5),
                                            with_counts(day(2023, 3, 20), 1, 1, 1)};
  const MonthlyAggregate m = monthly_aggregate(march, dailies);
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_EQ(m.entries[0].date, day(2023, 3, 20));
  EXPECT_EQ(m.entries[0].severity_counts, counts(1, 1, 1));
  EXPECT_EQ(m.entries[1].severity_counts, counts(0, 0, 5));
}

TEST(Monthly, RejectsMixedMonthsAndDuplicates) {
  const auto march = std::chrono::year{2023} / std::chrono::March;
  const std::vector<DailyAggregate> mixed{with_counts(day(2023, 3, 31), 1, 0, 0),
                                          with_counts(day(2023, 4, 1), 1, 0, 0)};
  try {
    monthly_aggregate(march, mixed);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MixedMonths);
  }
  const std::vector<DailyAggregate> dup{with_counts(day(2023, 3, 20), 1, 0, 0),
                                        with_counts(day(2023, 3, 20), 0, 1, 0)};
  EXPECT_THROW(monthly_aggregate(march, dup), Error);
}

}  // namespace
