#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "foodwise/campaign.hpp"
#include "foodwise/estimator.hpp"

namespace foodwise {

enum class PasswordHashCost { min, interactive, moderate };

struct ServerSettings {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::chrono::hours session_ttl{24};
  std::string admin_token;
  std::vector<std::string> admin_emails;
  int recent_records = 10;
  PasswordHashCost password_cost = PasswordHashCost::interactive;
};

struct ServiceConfig {
  CampaignConfig campaign = default_campaign();
  ServerSettings server{};
  std::int64_t max_photo_bytes = 5 * 1024 * 1024;
  std::filesystem::path storage_path = "data";
  bool in_memory_storage = false;
  LocalTime scheduler_time{0, 10};
  bool scheduler_enabled = true;
  LinearModel model{0.1, 0.0, 1.0, 2};

  void validate() const;
};

/// Builds a config from the parsed TOML tree. Relative paths resolve against
/// `base_dir`. Throws Error(BadConfig).
ServiceConfig config_from_toml(const nlohmann::json& tree,
                               const std::filesystem::path& base_dir = {});

/// Reads the file, then applies FOODWISE_PORT and FOODWISE_STORAGE overrides.
ServiceConfig load_config(const std::filesystem::path& path);

}  // namespace foodwise
