#include "foodwise/codec.hpp"

#include "foodwise/error.hpp"

namespace foodwise {

namespace {

template <typename T>
json per_category(const PerCategory<T>& v) {
  json out = json::object();
  for (FoodCategory c : kFoodCategories) out[std::string(to_string(c))] = v[c];
  return out;
}

template <typename T>
PerCategory<T> per_category_from(const json& j) {
  PerCategory<T> out{};
  for (FoodCategory c : kFoodCategories) out[c] = j.at(std::string(to_string(c))).get<T>();
  return out;
}

json per_severity(const PerSeverity<std::int64_t>& v) {
  json out = json::object();
  for (SeverityLevel l : kSeverityLevels) out[std::string(to_string(l))] = v[l];
  return out;
}

PerSeverity<std::int64_t> per_severity_from(const json& j) {
  PerSeverity<std::int64_t> out{};
  for (SeverityLevel l : kSeverityLevels) out[l] = j.at(std::string(to_string(l))).get<std::int64_t>();
  return out;
}

// Decoding failures from stored or received JSON all surface the same way.
template <typename F>
auto decoding(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedDocument, std::string("bad ") + what + " document: " + e.what());
  }
}

}  // namespace

json scores_to_json(const CompletionScores& s) { return per_category(s.percent()); }

CompletionScores scores_from_json(const json& j) {
  return decoding("scores", [&] {
    RawScores raw;
    for (const auto& [key, value] : j.items()) raw[key] = value.get<std::int64_t>();
    return validate_scores(raw);
  });
}

json to_json(const User& u) {
  return {{"user_id", u.user_id},
          {"email", u.email},
          {"display_name", u.display_name},
          {"password_hash", u.password_hash},
          {"registered_at", format_rfc3339(u.registered_at)}};
}

User user_from_json(const json& j) {
  return decoding("user", [&] {
    User u;
    u.user_id = j.at("user_id").get<std::string>();
    u.email = j.at("email").get<std::string>();
    u.display_name = j.at("display_name").get<std::string>();
    u.password_hash = j.at("password_hash").get<std::string>();
    u.registered_at = parse_rfc3339(j.at("registered_at").get<std::string>());
    return u;
  });
}

json to_json(const MealRecord& r) {
  return {{"record_id", r.record_id},
          {"user_id", r.user_id},
          {"submitted_at", format_rfc3339(r.submitted_at)},
          {"local_date", format_date(r.local_date)},
          {"scores", scores_to_json(r.scores)},
          {"overall", r.overall()},
          {"photo_ref", r.photo_ref}};
}

MealRecord record_from_json(const json& j) {
  return decoding("record", [&] {
    MealRecord r;
    r.record_id = j.at("record_id").get<std::string>();
    r.user_id = j.at("user_id").get<std::string>();
    r.submitted_at = parse_rfc3339(j.at("submitted_at").get<std::string>());
    r.local_date = parse_date(j.at("local_date").get<std::string>());
    r.scores = scores_from_json(j.at("scores"));
    r.photo_ref = j.at("photo_ref").get<std::string>();
    return r;
  });
}

json to_json(const LinearModel& m) {
  return {{"slope", m.slope},
          {"intercept", m.intercept},
          {"r_squared", m.r_squared},
          {"n_samples", m.n_samples}};
}

LinearModel model_from_json(const json& j) {
  return decoding("model", [&] {
    return LinearModel{j.at("slope").get<double>(), j.at("intercept").get<double>(),
                       j.at("r_squared").get<double>(), j.at("n_samples").get<std::int64_t>()};
  });
}

json to_json(const DailyAggregate& d) {
  json bowls = json::array();
  for (SeverityLevel l : d.bowls) bowls.push_back(to_string(l));
  return {{"date", format_date(d.date)},
          {"total_trays", d.total_trays},
          {"severity_counts", per_severity(d.severity_counts)},
          {"bowls", std::move(bowls)},
          {"type_percent", per_category(d.type_percent)},
          {"total_waste_g", d.total_waste_g},
          {"computed_at", format_rfc3339(d.computed_at)}};
}

DailyAggregate daily_from_json(const json& j) {
  return decoding("daily aggregate", [&] {
    DailyAggregate d;
    d.date = parse_date(j.at("date").get<std::string>());
    d.total_trays = j.at("total_trays").get<std::int64_t>();
    d.severity_counts = per_severity_from(j.at("severity_counts"));
    for (const json& b : j.at("bowls")) {
      const auto level = parse_severity(b.get<std::string>());
      if (!level) throw Error(Errc::MalformedDocument, "unknown severity in bowls");
      d.bowls.push_back(*level);
    }
    d.type_percent = per_category_from<int>(j.at("type_percent"));
    d.total_waste_g = j.at("total_waste_g").get<double>();
    d.computed_at = parse_rfc3339(j.at("computed_at").get<std::string>());
    return d;
  });
}

json to_json(const MonthlyAggregate& m) {
  json entries = json::array();
  for (const MonthlyEntry& e : m.entries) {
    entries.push_back({{"date", format_date(e.date)}, {"severity_counts", per_severity(e.severity_counts)}});
  }
  return {{"month", format_month(m.month)},
          {"entries", std::move(entries)},
          {"computed_at", format_rfc3339(m.computed_at)}};
}

MonthlyAggregate monthly_from_json(const json& j) {
  return decoding("monthly aggregate", [&] {
    MonthlyAggregate m;
    m.month = parse_month(j.at("month").get<std::string>());
    for (const json& e : j.at("entries")) {
      m.entries.push_back({parse_date(e.at("date").get<std::string>()),
                           per_severity_from(e.at("severity_counts"))});
    }
    m.computed_at = parse_rfc3339(j.at("computed_at").get<std::string>());
    return m;
  });
}

json to_json(const BadgeState& s) {
  json badges = json::object();
  for (BadgeKind k : kBadgeKinds) {
    const BadgeStatus& b = s[k];
    badges[std::string(to_string(k))] = {
        {"earned", b.earned},
        {"earned_at", b.earned_at ? json(format_rfc3339(*b.earned_at)) : json(nullptr)},
        {"progress", b.progress}};
  }
  return {{"badges", std::move(badges)}, {"reward_eligible", s.reward_eligible}};
}

BadgeState badge_state_from_json(const json& j) {
  return decoding("badge state", [&] {
    BadgeState s;
    const json& badges = j.at("badges");
    for (BadgeKind k : kBadgeKinds) {
      const json& b = badges.at(std::string(to_string(k)));
      s[k].earned = b.at("earned").get<bool>();
      if (!b.at("earned_at").is_null()) s[k].earned_at = parse_rfc3339(b.at("earned_at").get<std::string>());
      s[k].progress = b.at("progress").get<double>();
    }
    s.reward_eligible = j.at("reward_eligible").get<bool>();
    return s;
  });
}

json to_json(const PerBadge<std::int64_t>& counts) {
  json out = json::object();
  for (BadgeKind k : kBadgeKinds) out[std::string(to_string(k))] = counts[k];
  return out;
}

json to_json(const CommunityAverages& c) {
  json out = per_category(c.category);
  out["overall"] = c.overall;
  out["record_count"] = c.record_count;
  out["no_data"] = c.no_data;
  return out;
}

json to_json(const BadgeRuleConfig& r) {
  return {{"persistence_days", r.persistence_days},
          {"quantity_records", r.quantity_records},
          {"quality_min_avg", r.quality_min_avg},
          {"quality_min_records", r.quality_min_records}};
}

BadgeRuleConfig badge_rules_from_json(const json& j) {
  return decoding("badge rules", [&] {
    BadgeRuleConfig r;
    r.persistence_days = j.value("persistence_days", r.persistence_days);
    r.quantity_records = j.value("quantity_records", r.quantity_records);
    r.quality_min_avg = j.value("quality_min_avg", r.quality_min_avg);
    r.quality_min_records = j.value("quality_min_records", r.quality_min_records);
    return r;
  });
}

}  // namespace foodwise
