#include "foodwise/ingest.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace foodwise {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) {
    throw Error(Errc::MissingField, "missing field '" + path + "'", path);
  }
  return *it;
}

}  // namespace

TrayObservation parse_tray_observation(const json& doc, const CampaignZone& zone) {
  if (!doc.is_object()) throw Error(Errc::MalformedDocument, "tray document must be a JSON object");

  TrayObservation obs;
  const json& id = require(doc, "tray_id", "tray_id");
  if (!id.is_string() || id.get_ref<const std::string&>().empty()) {
    throw Error(Errc::MalformedDocument, "tray_id must be a non-empty string", "tray_id");
  }
  obs.tray_id = id.get<std::string>();

  const json& ts = require(doc, "timestamp", "timestamp");
  if (!ts.is_string()) throw Error(Errc::MalformedDocument, "timestamp must be a string", "timestamp");
  obs.observed_at = parse_rfc3339(ts.get_ref<const std::string&>());
  obs.local_date = zone.local_date(obs.observed_at);

  const json& areas = require(doc, "areas_px", "areas_px");
  if (!areas.is_object()) throw Error(Errc::MalformedDocument, "areas_px must be an object", "areas_px");
  for (const auto& [key, _] : areas.items()) {
    if (!parse_food_category(key)) {
      throw Error(Errc::MalformedDocument, "unknown category in areas_px: '" + key + "'", key);
    }
  }
  for (FoodCategory c : kFoodCategories) {
    const std::string name(to_string(c));
    const json& v = require(areas, name.c_str(), "areas_px." + name);
    if (!v.is_number_integer()) {
      throw Error(Errc::MalformedDocument, "areas_px." + name + " must be an integer", name);
    }
    if (v.is_number_unsigned()) {
      const auto u = v.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(INT64_MAX)) {
        throw Error(Errc::MalformedDocument, "areas_px." + name + " is too large", name);
      }
      obs.areas_px[c] = static_cast<std::int64_t>(u);
    } else {
      obs.areas_px[c] = v.get<std::int64_t>();
    }
    if (obs.areas_px[c] < 0) {
      throw Error(Errc::NegativeArea, "areas_px." + name + " is negative", name);
    }
  }
  return obs;
}

TrayObservation parse_tray_observation(std::string_view document, const CampaignZone& zone) {
  json doc = json::parse(document, nullptr, false);
  if (doc.is_discarded()) throw Error(Errc::MalformedDocument, "tray document is not valid JSON");
  return parse_tray_observation(doc, zone);
}

json serialize_tray_observation(const TrayObservation& obs) {
  json areas = json::object();
  for (FoodCategory c : kFoodCategories) areas[std::string(to_string(c))] = obs.areas_px[c];
  return json{{"tray_id", obs.tray_id},
              {"timestamp", format_rfc3339(obs.observed_at)},
              {"areas_px", std::move(areas)}};
}

BatchParseResult parse_tray_batch(const json& doc, const CampaignZone& zone) {
  if (!doc.is_array()) throw Error(Errc::MalformedDocument, "tray batch must be a JSON array");
  BatchParseResult result;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    try {
      result.accepted.push_back(parse_tray_observation(doc[i], zone));
    } catch (const Error& e) {
      result.rejected.push_back({i, e.code(), e.what()});
    }
  }
  return result;
}

BatchParseResult parse_tray_batch(std::string_view document, const CampaignZone& zone) {
  json doc = json::parse(document, nullptr, false);
  if (doc.is_discarded()) throw Error(Errc::MalformedDocument, "tray batch is not valid JSON");
  return parse_tray_batch(doc, zone);
}

void SyntheticProfile::validate() const {
  if (trays_per_day < 0) throw Error(Errc::InvalidProfile, "trays_per_day must be >= 0");
  if (!(clean_tray_probability >= 0.0 && clean_tray_probability <= 1.0)) {
    throw Error(Errc::InvalidProfile, "clean_tray_probability must be in [0, 1]");
  }
  for (FoodCategory c : kFoodCategories) {
    const auto& d = areas[c];
    if (!(d.mean_px >= 0.0) || !std::isfinite(d.mean_px) || !(d.stddev_px >= 0.0) ||
        !std::isfinite(d.stddev_px)) {
      throw Error(Errc::InvalidProfile,
                  "area distribution for " + std::string(to_string(c)) + " needs mean, stddev >= 0",
                  std::string(to_string(c)));
    }
  }
  const int first = first_tray.hour * 60 + first_tray.minute;
  const int last = last_tray.hour * 60 + last_tray.minute;
  if (last < first) throw Error(Errc::InvalidProfile, "last_tray is before first_tray");
}

SyntheticProfile default_synthetic_profile() {
  SyntheticProfile p;
  p.trays_per_day = 200;
  p.areas[FoodCategory::rice] = {900.0, 600.0};
  p.areas[FoodCategory::meat] = {300.0, 250.0};
  p.areas[FoodCategory::vegetables] = {450.0, 350.0};
  p.clean_tray_probability = 0.2;
  return p;
}

SyntheticProfile parse_synthetic_profile(const json& doc) {
  if (!doc.is_object()) throw Error(Errc::InvalidProfile, "profile must be a JSON object");
  SyntheticProfile p = default_synthetic_profile();
  try {
    if (doc.contains("trays_per_day")) p.trays_per_day = doc.at("trays_per_day").get<int>();
    if (doc.contains("clean_tray_probability")) {
      p.clean_tray_probability = doc.at("clean_tray_probability").get<double>();
    }
    if (doc.contains("areas_px")) {
      const json& areas = doc.at("areas_px");
      for (FoodCategory c : kFoodCategories) {
        const std::string name(to_string(c));
        if (!areas.contains(name)) continue;
        const json& d = areas.at(name);
        if (d.contains("mean_px")) p.areas[c].mean_px = d.at("mean_px").get<double>();
        if (d.contains("stddev_px")) p.areas[c].stddev_px = d.at("stddev_px").get<double>();
      }
    }
    if (doc.contains("first_tray")) p.first_tray = parse_local_time(doc.at("first_tray").get<std::string>());
    if (doc.contains("last_tray")) p.last_tray = parse_local_time(doc.at("last_tray").get<std::string>());
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidProfile, std::string("bad profile: ") + e.what());
  } catch (const Error& e) {
    throw Error(Errc::InvalidProfile, e.what());
  }
  p.validate();
  return p;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform in [0, 1) from the top 53 bits.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform01(rng);  // (0, 1]
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

std::vector<TrayObservation> generate_synthetic_day(std::uint64_t seed, Date date,
                                                    const SyntheticProfile& profile,
                                                    const CampaignZone& zone) {
  profile.validate();
  const auto day_index =
      static_cast<std::uint64_t>(std::chrono::sys_days{date}.time_since_epoch().count());
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(day_index)));

  const Timestamp first = zone.at_local(date, profile.first_tray);
  const Timestamp last = zone.at_local(date, profile.last_tray);
  const auto span = (last - first).count();
  const int n = profile.trays_per_day;

  char date_tag[16];
  std::snprintf(date_tag, sizeof date_tag, "%04d%02u%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));

  std::vector<TrayObservation> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    TrayObservation obs;
    char id[32];
    std::snprintf(id, sizeof id, "%s-%05d", date_tag, i + 1);
    obs.tray_id = id;
    obs.observed_at = first + std::chrono::milliseconds{span * i / n};
    obs.local_date = zone.local_date(obs.observed_at);

    // Fixed number of draws per tray keeps the stream aligned whatever the
    // clean-tray outcome.
    const bool clean = uniform01(rng) < profile.clean_tray_probability;
    for (FoodCategory c : kFoodCategories) {
      const double z = standard_normal(rng);
      const auto& dist = profile.areas[c];
      const double sample = std::max(0.0, dist.mean_px + dist.stddev_px * z);
      obs.areas_px[c] = clean ? 0 : std::llround(sample);
    }
    out.push_back(std::move(obs));
  }
  return out;
}

}  // namespace foodwise
