#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "foodwise/domain.hpp"
#include "foodwise/gamify.hpp"
#include "foodwise/ingest.hpp"

namespace foodwise {

struct BehaviorMix {
  double dedicated = 0.23;  // aims at every badge threshold
  double casual = 0.77;     // random days and scores
};

struct SimulationSpec {
  std::uint64_t seed = 1;
  int n_users = 220;
  int total_actions = 811;
  BehaviorMix mix{};
  Date prereg_start = std::chrono::year{2023} / 3 / 13;
  Date start_date = std::chrono::year{2023} / 3 / 20;
  Date end_date = std::chrono::year{2023} / 4 / 3;
  std::string timezone = "Asia/Hong_Kong";
  BadgeRuleConfig badge_rules{};
  int parallelism = 4;
  SyntheticProfile trays = default_synthetic_profile();

  /// Throws Error(BadSpec).
  void validate() const;
};

/// Every field is optional; missing ones keep the defaults above.
SimulationSpec parse_simulation_spec(const nlohmann::json& document);

struct SimulatedUser {
  std::string email;
  std::string user_id;
  bool dedicated = false;
  std::vector<MealRecord> records;  // as returned by GET /api/records
  BadgeState badge_state;           // as returned by GET /api/badges
};

struct SimulationResult {
  nlohmann::json report;
  std::vector<SimulatedUser> users;
};

/// Replays a campaign against an in-process server over real HTTP with an
/// in-memory store and a simulated clock. The report is a pure function of
/// the simulation spec except for its "runtime_ms" field.
SimulationResult run_simulation(const SimulationSpec& spec);

}  // namespace foodwise
