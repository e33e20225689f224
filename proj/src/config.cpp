#include "foodwise/config.hpp"

#include <cstdlib>

#include "foodwise/error.hpp"
#include "foodwise/toml.hpp"

namespace foodwise {

using nlohmann::json;

namespace {

const json* section(const json& tree, const char* name) {
  const auto it = tree.find(name);
  if (it == tree.end()) return nullptr;
  if (!it->is_object()) throw Error(Errc::BadConfig, std::string("[") + name + "] must be a table");
  return &*it;
}

template <typename T>
void read(const json* table, const char* section_name, const char* key, T& out) {
  if (!table) return;
  const auto it = table->find(key);
  if (it == table->end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw Error(Errc::BadConfig, std::string("[") + section_name + "] " + key + " has the wrong type", key);
  }
}

void read_date(const json* table, const char* section_name, const char* key, Date& out) {
  std::string text;
  read(table, section_name, key, text);
  if (text.empty()) return;
  try {
    out = parse_date(text);
  } catch (const Error& e) {
    throw Error(Errc::BadConfig, std::string("[") + section_name + "] " + key + ": " + e.what(), key);
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

}  // namespace

void ServiceConfig::validate() const {
  campaign.validate();
  if (max_photo_bytes <= 0) throw Error(Errc::BadConfig, "max_photo_bytes must be positive");
  if (server.port < 0 || server.port > 65535) throw Error(Errc::BadConfig, "port must be in [0, 65535]");
  if (server.session_ttl.count() <= 0) throw Error(Errc::BadConfig, "session_ttl_hours must be positive");
  if (server.recent_records < 0) throw Error(Errc::BadConfig, "recent_records must be >= 0");
  if (!in_memory_storage && storage_path.empty()) throw Error(Errc::BadConfig, "storage path is empty");
}

ServiceConfig config_from_toml(const json& tree, const std::filesystem::path& base_dir) {
  ServiceConfig cfg;
  CampaignConfig& c = cfg.campaign;

  if (const json* t = section(tree, "campaign")) {
    read_date(t, "campaign", "prereg_start", c.prereg_start);
    read_date(t, "campaign", "start_date", c.start_date);
    read_date(t, "campaign", "end_date", c.end_date);
    read(t, "campaign", "timezone", c.timezone);
    read(t, "campaign", "tips", c.tips);
  }
  if (const json* t = section(tree, "severity")) {
    read(t, "severity", "medium_min_g", c.severity_thresholds.medium_min_g);
    read(t, "severity", "severe_min_g", c.severity_thresholds.severe_min_g);
  }
  if (const json* t = section(tree, "badges")) {
    read(t, "badges", "persistence_days", c.badge_rules.persistence_days);
    read(t, "badges", "quantity_records", c.badge_rules.quantity_records);
    read(t, "badges", "quality_min_avg", c.badge_rules.quality_min_avg);
    read(t, "badges", "quality_min_records", c.badge_rules.quality_min_records);
  }
  if (const json* t = section(tree, "storage")) {
    std::string path;
    read(t, "storage", "path", path);
    if (!path.empty()) cfg.storage_path = resolve(base_dir, path);
    read(t, "storage", "in_memory", cfg.in_memory_storage);
    read(t, "storage", "max_photo_bytes", cfg.max_photo_bytes);
  } else if (!base_dir.empty()) {
    cfg.storage_path = base_dir / cfg.storage_path;
  }
  if (const json* t = section(tree, "scheduler")) {
    std::string at;
    read(t, "scheduler", "time", at);
    if (!at.empty()) {
      try {
        cfg.scheduler_time = parse_local_time(at);
      } catch (const Error& e) {
        throw Error(Errc::BadConfig, std::string("[scheduler] time: ") + e.what(), "time");
      }
    }
    read(t, "scheduler", "enabled", cfg.scheduler_enabled);
  }
  if (const json* t = section(tree, "estimator")) {
    std::string csv;
    read(t, "estimator", "calibration_csv", csv);
    if (!csv.empty()) {
      try {
        cfg.model = fit(read_weight_samples(resolve(base_dir, csv)));
      } catch (const Error& e) {
        throw Error(Errc::BadConfig, std::string("[estimator] calibration_csv: ") + e.what(), "calibration_csv");
      }
    } else {
      read(t, "estimator", "slope", cfg.model.slope);
      read(t, "estimator", "intercept", cfg.model.intercept);
    }
  }
  if (const json* t = section(tree, "server")) {
    ServerSettings& s = cfg.server;
    read(t, "server", "host", s.host);
    read(t, "server", "port", s.port);
    long long ttl = s.session_ttl.count();
    read(t, "server", "session_ttl_hours", ttl);
    s.session_ttl = std::chrono::hours{ttl};
    read(t, "server", "admin_token", s.admin_token);
    read(t, "server", "admin_emails", s.admin_emails);
    for (auto& e : s.admin_emails) e = normalize_email(e);
    read(t, "server", "recent_records", s.recent_records);
    std::string cost;
    read(t, "server", "password_cost", cost);
    if (cost == "min") s.password_cost = PasswordHashCost::min;
    else if (cost == "moderate") s.password_cost = PasswordHashCost::moderate;
    else if (cost.empty() || cost == "interactive") s.password_cost = PasswordHashCost::interactive;
    else throw Error(Errc::BadConfig, "[server] password_cost must be min, interactive or moderate");
  }

  cfg.validate();
  return cfg;
}

ServiceConfig load_config(const std::filesystem::path& path) {
  ServiceConfig cfg = config_from_toml(toml::parse_file(path), path.parent_path());
  if (const char* port = std::getenv("FOODWISE_PORT"); port && *port) {
    try {
      std::size_t used = 0;
      cfg.server.port = std::stoi(port, &used);
      if (port[used] != '\0') throw std::invalid_argument(port);
    } catch (const std::exception&) {
      throw Error(Errc::BadConfig, std::string("FOODWISE_PORT is not a port number: ") + port);
    }
  }
  if (const char* storage = std::getenv("FOODWISE_STORAGE"); storage && *storage) {
    cfg.storage_path = storage;
  }
  cfg.validate();
  return cfg;
}

}  // namespace foodwise
