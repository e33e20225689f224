#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "foodwise/domain.hpp"
#include "foodwise/error.hpp"

namespace foodwise {

// One tray at the return station, as produced by the vision pipeline.
struct TrayObservation {
  std::string tray_id;
  Timestamp observed_at{};
  Date local_date{};
  PerCategory<std::int64_t> areas_px{};

  std::int64_t total_area_px() const noexcept { return areas_px.sum(); }

  friend bool operator==(const TrayObservation&, const TrayObservation&) = default;
};

/// Parses one tray document:
///   {"tray_id": str, "timestamp": RFC 3339, "areas_px": {"rice": int, "meat": int, "vegetables": int}}
/// `local_date` is derived from the timestamp in `zone`.
/// Errors: MalformedDocument, MissingField (subject is the dotted path), NegativeArea.
TrayObservation parse_tray_observation(std::string_view document, const CampaignZone& zone);
TrayObservation parse_tray_observation(const nlohmann::json& document, const CampaignZone& zone);

nlohmann::json serialize_tray_observation(const TrayObservation& obs);

struct BatchRejection {
  std::size_t index = 0;
  Errc code = Errc::MalformedDocument;
  std::string message;
};

struct BatchParseResult {
  std::vector<TrayObservation> accepted;
  std::vector<BatchRejection> rejected;
};

/// A JSON array of tray documents. A bad element rejects only itself; a
/// non-array top level throws MalformedDocument.
BatchParseResult parse_tray_batch(std::string_view document, const CampaignZone& zone);
BatchParseResult parse_tray_batch(const nlohmann::json& document, const CampaignZone& zone);

struct AreaDistribution {
  double mean_px = 0.0;
  double stddev_px = 0.0;
};

struct SyntheticProfile {
  int trays_per_day = 0;
  PerCategory<AreaDistribution> areas{};
  double clean_tray_probability = 0.0;
  // Local service hours over which trays are spread evenly.
  LocalTime first_tray{11, 0};
  LocalTime last_tray{20, 0};

  /// Throws Error(InvalidProfile).
  void validate() const;
};

SyntheticProfile parse_synthetic_profile(const nlohmann::json& document);
SyntheticProfile default_synthetic_profile();

/// Deterministic for (seed, date, profile, zone) on every platform: the RNG
/// stream is mt19937_64 and the normal deviates come from our own
/// Box-Muller, not std::normal_distribution.
std::vector<TrayObservation> generate_synthetic_day(std::uint64_t seed, Date date,
                                                    const SyntheticProfile& profile,
                                                    const CampaignZone& zone);

}  // namespace foodwise
