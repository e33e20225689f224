#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "foodwise/domain.hpp"

namespace foodwise {

enum class BadgeKind : std::uint8_t { attempt, persistence, quantity, quality };

inline constexpr std::array<BadgeKind, 4> kBadgeKinds{
    BadgeKind::attempt, BadgeKind::persistence, BadgeKind::quantity, BadgeKind::quality};

std::string_view to_string(BadgeKind kind) noexcept;
std::optional<BadgeKind> parse_badge_kind(std::string_view name) noexcept;

template <typename T>
using PerBadge = EnumArray<BadgeKind, T, 4>;

struct BadgeRuleConfig {
  int persistence_days = 5;
  int quantity_records = 10;
  double quality_min_avg = 90.0;
  int quality_min_records = 5;

  /// Throws Error(BadConfig).
  void validate() const;

  friend bool operator==(const BadgeRuleConfig&, const BadgeRuleConfig&) = default;
};

struct BadgeStatus {
  bool earned = false;
  std::optional<Timestamp> earned_at;
  double progress = 0.0;

  friend bool operator==(const BadgeStatus&, const BadgeStatus&) = default;
};

struct BadgeState {
  PerBadge<BadgeStatus> badges{};
  bool reward_eligible = false;

  const BadgeStatus& operator[](BadgeKind k) const { return badges[k]; }
  BadgeStatus& operator[](BadgeKind k) { return badges[k]; }

  friend bool operator==(const BadgeState&, const BadgeState&) = default;
};

/// Length of the run of consecutive dates ending at the latest date <= as_of.
/// Duplicates are ignored.
int current_streak(std::span<const Date> record_dates, Date as_of);

/// Longest run of consecutive dates anywhere in the set.
int best_streak(std::span<const Date> record_dates);

/// Badges for one user's records. Records dated after `as_of` are ignored.
///
/// A badge is earned once its rule holds for some prefix of the records in
/// submission order; earned_at is the submission time that completed it.
/// Evaluating that way makes earning monotone under appends without any
/// stored state. Progress reflects the live situation:
///   attempt      min(1, n)
///   persistence  min(1, current_streak / persistence_days)
///   quantity     min(1, n / quantity_records)
///   quality      min(1, n / quality_min_records * min(1, mean / quality_min_avg))
/// and is pinned to 1 once the badge is earned.
BadgeState evaluate_badges(std::span<const MealRecord> records, const BadgeRuleConfig& rules,
                           Date as_of);

/// Keeps every badge `previous` had earned, with its original earned_at.
BadgeState merge_monotone(const BadgeState& previous, const BadgeState& current);

PerBadge<std::int64_t> badge_earner_counts(std::span<const BadgeState> states);

struct CommunityAverages {
  PerCategory<double> category{};
  double overall = 0.0;
  std::int64_t record_count = 0;
  bool no_data = true;
};

/// Unweighted mean per category over all records; zeros with no_data set
/// when there are none.
CommunityAverages community_averages(std::span<const MealRecord> records);

}  // namespace foodwise
