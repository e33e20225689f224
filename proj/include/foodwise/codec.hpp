#pragma once

// JSON wire and storage representation of the domain types. Timestamps are
// RFC 3339 UTC strings and dates are "YYYY-MM-DD".

#include <nlohmann/json.hpp>

#include "foodwise/aggregate.hpp"
#include "foodwise/campaign.hpp"
#include "foodwise/domain.hpp"
#include "foodwise/estimator.hpp"
#include "foodwise/gamify.hpp"

namespace foodwise {

using nlohmann::json;

json scores_to_json(const CompletionScores& s);
CompletionScores scores_from_json(const json& j);

json to_json(const User& u);
User user_from_json(const json& j);

json to_json(const MealRecord& r);
MealRecord record_from_json(const json& j);

json to_json(const LinearModel& m);
LinearModel model_from_json(const json& j);

json to_json(const DailyAggregate& d);
DailyAggregate daily_from_json(const json& j);

json to_json(const MonthlyAggregate& m);
MonthlyAggregate monthly_from_json(const json& j);

json to_json(const BadgeState& s);
BadgeState badge_state_from_json(const json& j);

json to_json(const PerBadge<std::int64_t>& counts);

json to_json(const CommunityAverages& c);

json to_json(const BadgeRuleConfig& r);
BadgeRuleConfig badge_rules_from_json(const json& j);

}  // namespace foodwise
