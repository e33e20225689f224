#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "foodwise/domain.hpp"
#include "foodwise/estimator.hpp"
#include "foodwise/ingest.hpp"

namespace foodwise {

// Underlying values give the order light < medium < severe.
enum class SeverityLevel : std::uint8_t { light, medium, severe };

inline constexpr std::array<SeverityLevel, 3> kSeverityLevels{
    SeverityLevel::light, SeverityLevel::medium, SeverityLevel::severe};

std::string_view to_string(SeverityLevel level) noexcept;
std::optional<SeverityLevel> parse_severity(std::string_view name) noexcept;

template <typename T>
using PerSeverity = EnumArray<SeverityLevel, T, 3>;

struct SeverityThresholds {
  double medium_min_g = 50.0;
  double severe_min_g = 150.0;

  /// Throws Error(BadConfig) unless 0 < medium_min_g < severe_min_g.
  void validate() const;

  friend bool operator==(const SeverityThresholds&, const SeverityThresholds&) = default;
};

/// Lower bounds are inclusive: exactly medium_min_g is medium.
SeverityLevel classify_severity(double waste_g, const SeverityThresholds& t) noexcept;

inline constexpr int kBowlCount = 100;

/// 100 cells, severe first, then medium, then light. Per-level cell counts
/// are the largest-remainder apportionment of count/total*100; equal
/// remainders go to severe, then medium, then light.
/// Throws Error(InvalidArgument) if total <= 0 or the counts do not sum to it.
std::vector<SeverityLevel> allocate_bowls(const PerSeverity<std::int64_t>& counts,
                                          std::int64_t total);

/// Largest-remainder integer percentages summing to 100; equal remainders go
/// to rice, then meat, then vegetables. Throws Error(AllZero) when nothing
/// is positive and Error(InvalidArgument) on negative input.
PerCategory<int> integer_percent(const PerCategory<std::int64_t>& values);
PerCategory<int> integer_percent(const PerCategory<double>& values);

struct DailyAggregate {
  Date date{};
  std::int64_t total_trays = 0;
  PerSeverity<std::int64_t> severity_counts{};
  std::vector<SeverityLevel> bowls;
  PerCategory<int> type_percent{};
  double total_waste_g = 0.0;
  Timestamp computed_at{};
};

/// Equality on everything except computed_at.
bool same_content(const DailyAggregate& a, const DailyAggregate& b) noexcept;

/// All observations must be dated `date` (Error(InvalidArgument) otherwise).
DailyAggregate daily_aggregate(Date date, std::span<const TrayObservation> observations,
                               const LinearModel& model, const SeverityThresholds& t,
                               Timestamp computed_at = {});

struct MonthlyEntry {
  Date date{};
  PerSeverity<std::int64_t> severity_counts{};

  friend bool operator==(const MonthlyEntry&, const MonthlyEntry&) = default;
};

struct MonthlyAggregate {
  std::chrono::year_month month{};
  std::vector<MonthlyEntry> entries;  // ascending by date
  Timestamp computed_at{};
};

bool same_content(const MonthlyAggregate& a, const MonthlyAggregate& b) noexcept;

/// One entry per daily aggregate, ordered by date.
/// Errors: MixedMonths, InvalidArgument (two dailies for one date).
MonthlyAggregate monthly_aggregate(std::chrono::year_month month,
                                   std::span<const DailyAggregate> dailies,
                                   Timestamp computed_at = {});

}  // namespace foodwise
