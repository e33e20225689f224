#include "foodwise/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "foodwise/error.hpp"

namespace foodwise {

std::string_view to_string(SeverityLevel level) noexcept {
  switch (level) {
    case SeverityLevel::light: return "light";
    case SeverityLevel::medium: return "medium";
    case SeverityLevel::severe: return "severe";
  }
  return "?";
}

std::optional<SeverityLevel> parse_severity(std::string_view name) noexcept {
  for (SeverityLevel l : kSeverityLevels) {
    if (to_string(l) == name) return l;
  }
  return std::nullopt;
}

void SeverityThresholds::validate() const {
  if (!(medium_min_g > 0.0 && medium_min_g < severe_min_g && std::isfinite(severe_min_g))) {
    throw Error(Errc::BadConfig, "severity thresholds need 0 < medium_min_g < severe_min_g");
  }
}

SeverityLevel classify_severity(double waste_g, const SeverityThresholds& t) noexcept {
  if (waste_g >= t.severe_min_g) return SeverityLevel::severe;
  if (waste_g >= t.medium_min_g) return SeverityLevel::medium;
  return SeverityLevel::light;
}

namespace {

// Bowls hand out leftover seats severe first.
constexpr std::array<SeverityLevel, 3> kBowlOrder{SeverityLevel::severe, SeverityLevel::medium,
                                                  SeverityLevel::light};

// Largest remainder on integer weights listed in tie-break priority order.
// Quotas are exact: weight * seats = floor * total + remainder.
std::array<std::int64_t, 3> apportion(const std::array<std::int64_t, 3>& weights, std::int64_t seats) {
  __int128 total = 0;
  for (std::int64_t w : weights) total += w;
  std::array<std::int64_t, 3> out{};
  std::array<__int128, 3> remainder{};
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const __int128 scaled = static_cast<__int128>(weights[i]) * seats;
    out[i] = static_cast<std::int64_t>(scaled / total);
    remainder[i] = scaled % total;
    assigned += out[i];
  }
  std::array<std::size_t, 3> by_remainder{0, 1, 2};
  std::stable_sort(by_remainder.begin(), by_remainder.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::int64_t left = seats - assigned, k = 0; left > 0; --left, ++k) {
    ++out[by_remainder[static_cast<std::size_t>(k % 3)]];
  }
  return out;
}

}  // namespace

std::vector<SeverityLevel> allocate_bowls(const PerSeverity<std::int64_t>& counts,
                                          std::int64_t total) {
  if (total <= 0) throw Error(Errc::InvalidArgument, "allocate_bowls needs a positive total");
  for (SeverityLevel l : kSeverityLevels) {
    if (counts[l] < 0) throw Error(Errc::InvalidArgument, "negative severity count");
  }
  if (counts.sum() != total) {
    throw Error(Errc::InvalidArgument, "severity counts do not sum to the total");
  }

  const auto seats = apportion({counts[kBowlOrder[0]], counts[kBowlOrder[1]], counts[kBowlOrder[2]]},
                               kBowlCount);
  std::vector<SeverityLevel> bowls;
  bowls.reserve(kBowlCount);
  for (std::size_t i = 0; i < 3; ++i) {
    bowls.insert(bowls.end(), static_cast<std::size_t>(seats[i]), kBowlOrder[i]);
  }
  return bowls;
}

PerCategory<int> integer_percent(const PerCategory<std::int64_t>& values) {
  for (FoodCategory c : kFoodCategories) {
    if (values[c] < 0) throw Error(Errc::InvalidArgument, "integer_percent needs non-negative values");
  }
  if (values.sum() == 0) throw Error(Errc::AllZero, "no positive value to apportion");
  const auto seats = apportion({values[FoodCategory::rice], values[FoodCategory::meat],
                                values[FoodCategory::vegetables]},
                               100);
  PerCategory<int> percent{};
  for (std::size_t i = 0; i < 3; ++i) percent[kFoodCategories[i]] = static_cast<int>(seats[i]);
  return percent;
}

PerCategory<int> integer_percent(const PerCategory<double>& values) {
  double total = 0.0;
  bool integral = true;
  for (FoodCategory c : kFoodCategories) {
    if (!(values[c] >= 0.0) || !std::isfinite(values[c])) {
      throw Error(Errc::InvalidArgument, "integer_percent needs finite non-negative values");
    }
    total += values[c];
    integral = integral && values[c] == std::floor(values[c]) && values[c] <= 0x1.0p53;
  }
  if (total <= 0.0) throw Error(Errc::AllZero, "no positive value to apportion");
  // Whole numbers take the exact path so ties in the remainders are real ties.
  if (integral) {
    PerCategory<std::int64_t> whole{};
    for (FoodCategory c : kFoodCategories) whole[c] = static_cast<std::int64_t>(values[c]);
    return integer_percent(whole);
  }

  PerCategory<int> percent{};
  PerCategory<double> remainder{};
  int assigned = 0;
  for (FoodCategory c : kFoodCategories) {
    const double quota = values[c] / total * 100.0;
    const double whole = std::floor(quota);
    percent[c] = static_cast<int>(whole);
    remainder[c] = quota - whole;
    assigned += percent[c];
  }

  std::array<FoodCategory, 3> order = kFoodCategories;
  std::stable_sort(order.begin(), order.end(),
                   [&](FoodCategory a, FoodCategory b) { return remainder[a] > remainder[b]; });
  for (int left = 100 - assigned, k = 0; left > 0; --left, ++k) ++percent[order[k % 3]];
  return percent;
}

bool same_content(const DailyAggregate& a, const DailyAggregate& b) noexcept {
  return a.date == b.date && a.total_trays == b.total_trays &&
         a.severity_counts == b.severity_counts && a.bowls == b.bowls &&
         a.type_percent == b.type_percent && a.total_waste_g == b.total_waste_g;
}

DailyAggregate daily_aggregate(Date date, std::span<const TrayObservation> observations,
                               const LinearModel& model, const SeverityThresholds& t,
                               Timestamp computed_at) {
  DailyAggregate out;
  out.date = date;
  out.computed_at = computed_at;

  PerCategory<std::int64_t> area_sums{};
  for (const TrayObservation& obs : observations) {
    if (obs.local_date != date) {
      throw Error(Errc::InvalidArgument,
                  "observation " + obs.tray_id + " is dated " + format_date(obs.local_date) +
                      ", not " + format_date(date));
    }
    const double grams = predict(model, obs.total_area_px());
    ++out.severity_counts[classify_severity(grams, t)];
    out.total_waste_g += grams;
    for (FoodCategory c : kFoodCategories) area_sums[c] += obs.areas_px[c];
  }
  out.total_trays = static_cast<std::int64_t>(observations.size());

  if (out.total_trays > 0) out.bowls = allocate_bowls(out.severity_counts, out.total_trays);
  if (area_sums.sum() > 0) out.type_percent = integer_percent(area_sums);
  return out;
}

bool same_content(const MonthlyAggregate& a, const MonthlyAggregate& b) noexcept {
  return a.month == b.month && a.entries == b.entries;
}

MonthlyAggregate monthly_aggregate(std::chrono::year_month month,
                                   std::span<const DailyAggregate> dailies,
                                   Timestamp computed_at) {
  MonthlyAggregate out;
  out.month = month;
  out.computed_at = computed_at;
  for (const DailyAggregate& d : dailies) {
    if (d.date.year() != month.year() || d.date.month() != month.month()) {
      throw Error(Errc::MixedMonths,
                  format_date(d.date) + " is not in " + format_month(month));
    }
    out.entries.push_back({d.date, d.severity_counts});
  }
  std::sort(out.entries.begin(), out.entries.end(),
            [](const MonthlyEntry& a, const MonthlyEntry& b) { return a.date < b.date; });
  const auto dup = std::adjacent_find(out.entries.begin(), out.entries.end(),
                                      [](const MonthlyEntry& a, const MonthlyEntry& b) {
                                        return a.date == b.date;
                                      });
  if (dup != out.entries.end()) {
    throw Error(Errc::InvalidArgument, "two daily aggregates for " + format_date(dup->date));
  }
  return out;
}

}  // namespace foodwise
