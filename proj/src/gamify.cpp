#include "foodwise/gamify.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "foodwise/error.hpp"

namespace foodwise {

std::string_view to_string(BadgeKind kind) noexcept {
  switch (kind) {
    case BadgeKind::attempt: return "attempt";
    case BadgeKind::persistence: return "persistence";
    case BadgeKind::quantity: return "quantity";
    case BadgeKind::quality: return "quality";
  }
  return "?";
}

std::optional<BadgeKind> parse_badge_kind(std::string_view name) noexcept {
  for (BadgeKind k : kBadgeKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

void BadgeRuleConfig::validate() const {
  if (persistence_days < 1 || quantity_records < 1 || quality_min_records < 1) {
    throw Error(Errc::BadConfig, "badge day and record thresholds must be >= 1");
  }
  if (!(quality_min_avg > 0.0 && quality_min_avg <= 100.0)) {
    throw Error(Errc::BadConfig, "quality_min_avg must be in (0, 100]");
  }
}

namespace {

std::vector<Date> sorted_unique(std::span<const Date> dates) {
  std::vector<Date> out(dates.begin(), dates.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool consecutive(Date earlier, Date later) { return days_between(earlier, later) == 1; }

double ratio(double num, double den) { return std::min(1.0, num / den); }

}  // namespace

int current_streak(std::span<const Date> record_dates, Date as_of) {
  const std::vector<Date> dates = sorted_unique(record_dates);
  auto end = std::upper_bound(dates.begin(), dates.end(), as_of);
  if (end == dates.begin()) return 0;
  int run = 1;
  for (auto it = std::prev(end); it != dates.begin() && consecutive(*std::prev(it), *it); --it) ++run;
  return run;
}

int best_streak(std::span<const Date> record_dates) {
  const std::vector<Date> dates = sorted_unique(record_dates);
  int best = 0;
  int run = 0;
  for (std::size_t i = 0; i < dates.size(); ++i) {
    run = (i > 0 && consecutive(dates[i - 1], dates[i])) ? run + 1 : 1;
    best = std::max(best, run);
  }
  return best;
}

BadgeState evaluate_badges(std::span<const MealRecord> records, const BadgeRuleConfig& rules,
                           Date as_of) {
  std::vector<const MealRecord*> counted;
  for (const MealRecord& r : records) {
    if (r.local_date <= as_of) counted.push_back(&r);
  }
  std::sort(counted.begin(), counted.end(), [](const MealRecord* a, const MealRecord* b) {
    if (a->submitted_at != b->submitted_at) return a->submitted_at < b->submitted_at;
    return a->record_id < b->record_id;
  });

  BadgeState state;
  auto earn = [&](BadgeKind k, Timestamp at) {
    if (!state[k].earned) {
      state[k].earned = true;
      state[k].earned_at = at;
    }
  };

  // Replay in submission order so earning is decided on prefixes.
  std::set<Date> days;
  std::int64_t count = 0;
  std::int64_t points = 0;  // sum of the three category scores over records
  int best_run = 0;
  for (const MealRecord* r : counted) {
    ++count;
    points += r->scores.total();
    if (days.insert(r->local_date).second) {
      int run = 1;
      for (Date d = add_days(r->local_date, -1); days.contains(d); d = add_days(d, -1)) ++run;
      for (Date d = add_days(r->local_date, 1); days.contains(d); d = add_days(d, 1)) ++run;
      best_run = std::max(best_run, run);
    }
    const double mean = static_cast<double>(points) / static_cast<double>(3 * count);

    earn(BadgeKind::attempt, r->submitted_at);
    if (best_run >= rules.persistence_days) earn(BadgeKind::persistence, r->submitted_at);
    if (count >= rules.quantity_records) earn(BadgeKind::quantity, r->submitted_at);
    if (count >= rules.quality_min_records && mean >= rules.quality_min_avg) {
      earn(BadgeKind::quality, r->submitted_at);
    }
  }

  const std::vector<Date> day_list(days.begin(), days.end());
  const auto n = static_cast<double>(count);
  state[BadgeKind::attempt].progress = ratio(n, 1.0);
  state[BadgeKind::persistence].progress =
      ratio(current_streak(day_list, as_of), rules.persistence_days);
  state[BadgeKind::quantity].progress = ratio(n, rules.quantity_records);
  if (count > 0) {
    const double mean = static_cast<double>(points) / static_cast<double>(3 * count);
    state[BadgeKind::quality].progress = std::clamp(
        (n / rules.quality_min_records) * ratio(mean, rules.quality_min_avg), 0.0, 1.0);
  }

  bool all = true;
  for (BadgeKind k : kBadgeKinds) {
    if (state[k].earned) state[k].progress = 1.0;
    all = all && state[k].earned;
  }
  state.reward_eligible = all;
  return state;
}

BadgeState merge_monotone(const BadgeState& previous, const BadgeState& current) {
  BadgeState out = current;
  bool all = true;
  for (BadgeKind k : kBadgeKinds) {
    if (previous[k].earned) {
      out[k].earned = true;
      out[k].earned_at = previous[k].earned_at ? previous[k].earned_at : current[k].earned_at;
      out[k].progress = 1.0;
    }
    all = all && out[k].earned;
  }
  out.reward_eligible = all;
  return out;
}

PerBadge<std::int64_t> badge_earner_counts(std::span<const BadgeState> states) {
  PerBadge<std::int64_t> counts{};
  for (const BadgeState& s : states) {
    for (BadgeKind k : kBadgeKinds) {
      if (s[k].earned) ++counts[k];
    }
  }
  return counts;
}

CommunityAverages community_averages(std::span<const MealRecord> records) {
  CommunityAverages out;
  if (records.empty()) return out;
  PerCategory<std::int64_t> sums{};
  for (const MealRecord& r : records) {
    for (FoodCategory c : kFoodCategories) sums[c] += r.scores[c];
  }
  const auto n = static_cast<double>(records.size());
  for (FoodCategory c : kFoodCategories) out.category[c] = static_cast<double>(sums[c]) / n;
  out.overall = static_cast<double>(sums.sum()) / (3.0 * n);
  out.record_count = static_cast<std::int64_t>(records.size());
  out.no_data = false;
  return out;
}

}  // namespace foodwise
