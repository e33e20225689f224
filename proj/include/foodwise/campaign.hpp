#pragma once

#include <string>
#include <vector>

#include "foodwise/aggregate.hpp"
#include "foodwise/gamify.hpp"
#include "foodwise/time.hpp"

namespace foodwise {

struct CampaignConfig {
  Date prereg_start{};
  Date start_date{};
  Date end_date{};  // inclusive
  std::string timezone = "UTC";
  std::vector<std::string> tips;
  BadgeRuleConfig badge_rules{};
  SeverityThresholds severity_thresholds{};

  /// Throws Error(BadConfig) unless prereg_start <= start_date < end_date,
  /// tips is non-empty, and the nested rule sets are valid.
  void validate() const;

  bool in_window(Date d) const noexcept { return start_date <= d && d <= end_date; }
  int window_days() const { return days_between(start_date, end_date) + 1; }
};

/// The spring 2023 campus campaign: pre-registration from March 13, records
/// counted March 20 to April 3, Hong Kong time.
CampaignConfig default_campaign();

}  // namespace foodwise
