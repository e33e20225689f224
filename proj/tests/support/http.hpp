#pragma once

// In-process service fixture: in-memory repository, ephemeral port, a clock
// the test controls.

#include <atomic>
#include <memory>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "foodwise/repository.hpp"
#include "foodwise/service.hpp"

namespace fwtest {

struct TestClock {
  std::shared_ptr<std::atomic<std::int64_t>> ms = std::make_shared<std::atomic<std::int64_t>>(0);
  void set(foodwise::Timestamp t) { *ms = t.time_since_epoch().count(); }
  void advance(std::chrono::milliseconds d) { *ms += d.count(); }
  foodwise::Clock clock() const {
    auto p = ms;
    return [p] { return foodwise::Timestamp{std::chrono::milliseconds{p->load()}}; };
  }
};

inline foodwise::ServiceConfig test_config() {
  foodwise::ServiceConfig cfg;
  cfg.in_memory_storage = true;
  cfg.server.password_cost = foodwise::PasswordHashCost::min;
  cfg.server.admin_token = "admin-secret";
  cfg.max_photo_bytes = 64 * 1024;
  cfg.scheduler_enabled = false;
  return cfg;
}

class ServiceHarness {
 public:
  explicit ServiceHarness(foodwise::ServiceConfig cfg = test_config())
      : repo(foodwise::Repository::in_memory(cfg.max_photo_bytes)), service(std::move(cfg), repo, clock.clock()) {
    service.bind("127.0.0.1", 0);
    service.start();
    client = std::make_unique<httplib::Client>("127.0.0.1", service.port());
    client->set_tcp_nodelay(true);
  }

  TestClock clock;
  foodwise::Repository repo;
  foodwise::Service service;
  std::unique_ptr<httplib::Client> client;

  static httplib::Headers auth(const std::string& token) { return {{"Authorization", "Bearer " + token}}; }

  httplib::Result post_json(const std::string& path, const nlohmann::json& body, const httplib::Headers& h = {}) {
    return client->Post(path, h, body.dump(), "application/json");
  }

  std::string register_and_login(const std::string& email, const std::string& password = "correct horse") {
    auto r = post_json("/api/register", {{"email", email}, {"display_name", email}, {"password", password}});
    if (!r || r->status != 201) throw std::runtime_error("register failed");
    return login(email, password);
  }

  // Sessions last a day; tests that span the campaign log in again.
  std::string login(const std::string& email, const std::string& password = "correct horse") {
    auto r = post_json("/api/login", {{"email", email}, {"password", password}});
    if (!r || r->status != 200) throw std::runtime_error("login failed");
    return nlohmann::json::parse(r->body).at("token").get<std::string>();
  }

  httplib::Result submit(const std::string& token, int rice, int meat, int veg, const std::string& photo,
                         const std::string& type = "image/jpeg") {
    httplib::MultipartFormDataItems items{{"rice", std::to_string(rice), "", ""},
                                          {"meat", std::to_string(meat), "", ""},
                                          {"vegetables", std::to_string(veg), "", ""},
                                          {"photo", photo, "meal.jpg", type}};
    return client->Post("/api/records", auth(token), items);
  }
};

inline std::string jpeg(std::size_t size, char fill = 'x') {
  std::string s = "\xFF\xD8\xFF\xE0";
  s.resize(std::max<std::size_t>(size, 4), fill);
  return s;
}

}  // namespace fwtest
