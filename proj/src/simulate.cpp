#include "foodwise/simulate.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include <httplib.h>

#include "foodwise/codec.hpp"
#include "foodwise/error.hpp"
#include "foodwise/service.hpp"

namespace foodwise {

namespace {

// Platform-independent draws; std distributions are implementation-defined.
std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
  const auto u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return std::min(n - 1, static_cast<std::uint64_t>(u * static_cast<double>(n)));
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

struct PlannedAction {
  int user = 0;
  int day = 0;
  CompletionScores scores = CompletionScores::of(0, 0, 0);
};

struct Plan {
  std::vector<bool> dedicated;
  std::vector<std::vector<PlannedAction>> by_day;
};

int dedicated_record_count(const BadgeRuleConfig& r) {
  return std::max({r.quantity_records, r.quality_min_records, r.persistence_days});
}

int dedicated_user_count(const SimulationSpec& spec) {
  return static_cast<int>(std::llround(spec.mix.dedicated * spec.n_users));
}

Plan make_plan(const SimulationSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  const int days = days_between(spec.start_date, spec.end_date) + 1;
  const BadgeRuleConfig& rules = spec.badge_rules;
  const int good_floor = std::min(100, static_cast<int>(std::ceil(rules.quality_min_avg)));

  Plan plan;
  plan.by_day.resize(static_cast<std::size_t>(days));
  plan.dedicated.assign(static_cast<std::size_t>(spec.n_users), false);

  std::vector<int> order(static_cast<std::size_t>(spec.n_users));
  for (int i = 0; i < spec.n_users; ++i) order[static_cast<std::size_t>(i)] = i;
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[uniform_index(rng, i)]);
  }
  const int n_dedicated = dedicated_user_count(spec);
  std::vector<int> dedicated_users(order.begin(), order.begin() + n_dedicated);
  std::vector<int> casual_users(order.begin() + n_dedicated, order.end());
  for (int u : dedicated_users) plan.dedicated[static_cast<std::size_t>(u)] = true;

  auto good_scores = [&] {
    return CompletionScores::of(uniform_int(rng, good_floor, 100), uniform_int(rng, good_floor, 100),
                                uniform_int(rng, good_floor, 100));
  };
  auto add = [&](int user, int day, CompletionScores s) {
    plan.by_day[static_cast<std::size_t>(day)].push_back({user, day, s});
  };

  // Dedicated users cover a run of persistence_days consecutive days, then
  // pile the rest of their records onto days inside that run.
  std::map<int, int> streak_start;
  const int per_dedicated = dedicated_record_count(rules);
  for (int u : dedicated_users) {
    const int start = uniform_int(rng, 0, days - rules.persistence_days);
    streak_start[u] = start;
    for (int d = 0; d < rules.persistence_days; ++d) add(u, start + d, good_scores());
    for (int k = rules.persistence_days; k < per_dedicated; ++k) {
      add(u, start + uniform_int(rng, 0, rules.persistence_days - 1), good_scores());
    }
  }

  const int remaining = spec.total_actions - n_dedicated * per_dedicated;
  for (int k = 0; k < remaining; ++k) {
    if (!casual_users.empty()) {
      const int u = casual_users[uniform_index(rng, casual_users.size())];
      const int day = uniform_int(rng, 0, days - 1);
      add(u, day, CompletionScores::of(uniform_int(rng, 20, 100), uniform_int(rng, 20, 100),
                                       uniform_int(rng, 20, 100)));
    } else {
      const int u = dedicated_users[uniform_index(rng, dedicated_users.size())];
      add(u, streak_start[u] + uniform_int(rng, 0, rules.persistence_days - 1), good_scores());
    }
  }
  return plan;
}

// Runs fn(index, client) for every index on `workers` threads.
template <typename F>
void parallel_for(std::size_t count, int workers, int port, F&& fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(std::max<std::size_t>(count, 1))));
  for (int w = 0; w < n; ++w) {
    threads.emplace_back([&] {
      httplib::Client client("127.0.0.1", port);
      client.set_keep_alive(true);
      client.set_tcp_nodelay(true);
      client.set_read_timeout(30, 0);
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i, client);
        } catch (...) {
          std::lock_guard guard(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

json expect(const httplib::Result& result, int status, const std::string& what) {
  if (!result) throw std::runtime_error(what + ": " + httplib::to_string(result.error()));
  if (result->status != status) {
    throw std::runtime_error(what + ": HTTP " + std::to_string(result->status) + " " + result->body);
  }
  return result->body.empty() ? json() : json::parse(result->body);
}

httplib::Headers bearer(const std::string& token) { return {{"Authorization", "Bearer " + token}}; }

std::string fake_jpeg(std::uint64_t tag) {
  std::string bytes = "\xFF\xD8\xFF\xE0";
  std::mt19937_64 rng(tag);
  for (int i = 0; i < 128; ++i) bytes += static_cast<char>(rng() & 0xFF);
  bytes += "\xFF\xD9";
  return bytes;
}

}  // namespace

void SimulationSpec::validate() const {
  auto bad = [](const std::string& msg) { throw Error(Errc::BadSpec, msg); };
  if (n_users <= 0) bad("n_users must be positive");
  if (total_actions <= 0) bad("total_actions must be positive");
  if (!(mix.dedicated >= 0.0 && mix.casual >= 0.0) || std::abs(mix.dedicated + mix.casual - 1.0) > 1e-9) {
    bad("behavior_mix fractions must be non-negative and sum to 1");
  }
  if (parallelism < 1) bad("parallelism must be >= 1");
  if (!(prereg_start <= start_date && start_date < end_date)) {
    bad("campaign needs prereg_start <= start_date < end_date");
  }
  try {
    badge_rules.validate();
    trays.validate();
    CampaignZone::load(timezone);
  } catch (const Error& e) {
    bad(e.what());
  }
  const int days = days_between(start_date, end_date) + 1;
  const int n_dedicated = dedicated_user_count(*this);
  if (n_dedicated > 0 && badge_rules.persistence_days > days) {
    bad("persistence_days does not fit in the campaign window");
  }
  if (static_cast<std::int64_t>(n_dedicated) * dedicated_record_count(badge_rules) > total_actions) {
    bad("total_actions cannot cover the dedicated users' badge thresholds");
  }
}

SimulationSpec parse_simulation_spec(const json& doc) {
  if (!doc.is_object()) throw Error(Errc::BadSpec, "simulation spec must be a JSON object");
  SimulationSpec spec;
  try {
    spec.seed = doc.value("seed", spec.seed);
    spec.n_users = doc.value("n_users", spec.n_users);
    spec.total_actions = doc.value("total_actions", spec.total_actions);
    spec.parallelism = doc.value("parallelism", spec.parallelism);
    if (doc.contains("behavior_mix")) {
      const json& mix = doc.at("behavior_mix");
      spec.mix.dedicated = mix.value("dedicated", spec.mix.dedicated);
      spec.mix.casual = mix.value("casual", 1.0 - spec.mix.dedicated);
    }
    if (doc.contains("campaign")) {
      const json& c = doc.at("campaign");
      if (c.contains("prereg_start")) spec.prereg_start = parse_date(c.at("prereg_start").get<std::string>());
      if (c.contains("start_date")) spec.start_date = parse_date(c.at("start_date").get<std::string>());
      if (c.contains("end_date")) spec.end_date = parse_date(c.at("end_date").get<std::string>());
      if (!c.contains("prereg_start") && spec.prereg_start > spec.start_date) spec.prereg_start = spec.start_date;
      spec.timezone = c.value("timezone", spec.timezone);
    }
    if (doc.contains("badge_rules")) spec.badge_rules = badge_rules_from_json(doc.at("badge_rules"));
    if (doc.contains("trays")) spec.trays = parse_synthetic_profile(doc.at("trays"));
  } catch (const json::exception& e) {
    throw Error(Errc::BadSpec, std::string("bad simulation spec: ") + e.what());
  } catch (const Error& e) {
    throw Error(Errc::BadSpec, e.what());
  }
  spec.validate();
  return spec;
}

SimulationResult run_simulation(const SimulationSpec& spec) {
  spec.validate();
  const auto started = std::chrono::steady_clock::now();
  const CampaignZone zone = CampaignZone::load(spec.timezone);

  ServiceConfig cfg;
  cfg.campaign.prereg_start = spec.prereg_start;
  cfg.campaign.start_date = spec.start_date;
  cfg.campaign.end_date = spec.end_date;
  cfg.campaign.timezone = spec.timezone;
  cfg.campaign.badge_rules = spec.badge_rules;
  cfg.in_memory_storage = true;
  cfg.scheduler_enabled = false;
  cfg.server.password_cost = PasswordHashCost::min;
  cfg.server.session_ttl = std::chrono::hours{24 * 366};
  cfg.server.admin_token = "simulation-admin-" + std::to_string(spec.seed);

  // Each reading advances the simulated clock by 1 ms so timestamps stay unique.
  std::atomic<std::int64_t> now_ms{0};
  auto set_clock = [&](Date d, LocalTime t) {
    now_ms = zone.at_local(d, t).time_since_epoch().count();
  };
  Clock clock = [&now_ms] { return Timestamp{std::chrono::milliseconds{now_ms++}}; };

  Repository repo = Repository::in_memory(cfg.max_photo_bytes);
  Service service(cfg, repo, clock);
  const int port = service.bind("127.0.0.1", 0);
  service.start();

  const Plan plan = make_plan(spec);
  const auto n_users = static_cast<std::size_t>(spec.n_users);
  std::vector<SimulatedUser> users(n_users);
  std::vector<std::string> tokens(n_users);

  set_clock(spec.prereg_start, {9, 0});
  parallel_for(n_users, spec.parallelism, port, [&](std::size_t i, httplib::Client& client) {
    SimulatedUser& u = users[i];
    u.email = "user" + std::to_string(i) + "@campus.example";
    u.dedicated = plan.dedicated[i];
    const std::string password = "save-food-" + std::to_string(i);
    const json reg = expect(client.Post("/api/register",
                                        json{{"email", u.email}, {"display_name", "User " + std::to_string(i)},
                                             {"password", password}}.dump(),
                                        "application/json"),
                            201, "register");
    u.user_id = reg.at("user_id").get<std::string>();
    const json login = expect(client.Post("/api/login", json{{"email", u.email}, {"password", password}}.dump(),
                                          "application/json"),
                              200, "login");
    tokens[i] = login.at("token").get<std::string>();
  });

  const httplib::Headers admin = bearer(cfg.server.admin_token);
  httplib::Client admin_client("127.0.0.1", port);
  admin_client.set_read_timeout(30, 0);
  admin_client.set_tcp_nodelay(true);
  json daily_trays = json::object();
  for (std::size_t day = 0; day < plan.by_day.size(); ++day) {
    const Date date = add_days(spec.start_date, static_cast<int>(day));
    set_clock(date, {12, 0});
    // One worker per user keeps each user's submissions in plan order; badge
    // replay depends on that order.
    std::map<int, std::vector<std::size_t>> by_user;
    const auto& actions = plan.by_day[day];
    for (std::size_t k = 0; k < actions.size(); ++k) by_user[actions[k].user].push_back(k);
    const std::vector<std::pair<int, std::vector<std::size_t>>> queues(by_user.begin(), by_user.end());
    parallel_for(queues.size(), spec.parallelism, port, [&](std::size_t q, httplib::Client& client) {
      for (const std::size_t k : queues[q].second) {
        const PlannedAction& a = actions[k];
        const std::uint64_t tag = spec.seed * 1000003ULL + day * 10007ULL + k;
        httplib::MultipartFormDataItems items = {
            {"rice", std::to_string(a.scores[FoodCategory::rice]), "", ""},
            {"meat", std::to_string(a.scores[FoodCategory::meat]), "", ""},
            {"vegetables", std::to_string(a.scores[FoodCategory::vegetables]), "", ""},
            {"photo", fake_jpeg(tag), "meal.jpg", "image/jpeg"},
        };
        expect(client.Post("/api/records", bearer(tokens[static_cast<std::size_t>(a.user)]), items), 201,
               "submit record");
      }
    });

    set_clock(date, {21, 0});
    json batch = json::array();
    for (const TrayObservation& obs : generate_synthetic_day(spec.seed, date, spec.trays, zone)) {
      batch.push_back(serialize_tray_observation(obs));
    }
    const json ingest = expect(admin_client.Post("/api/admin/trays", admin, batch.dump(), "application/json"),
                               200, "ingest trays");
    if (!ingest.at("rejected").empty()) throw std::runtime_error("synthetic trays rejected: " + ingest.dump());
    const json daily = expect(admin_client.Post("/api/admin/aggregate", admin,
                                                json{{"date", format_date(date)}}.dump(), "application/json"),
                              200, "aggregate");
    daily_trays[format_date(date)] = daily.at("total_trays");
  }

  set_clock(spec.end_date, {23, 0});
  std::vector<json> earner_counts(n_users);
  parallel_for(n_users, spec.parallelism, port, [&](std::size_t i, httplib::Client& client) {
    const auto auth = bearer(tokens[i]);
    const json badges = expect(client.Get("/api/badges", auth), 200, "badges");
    users[i].badge_state = badge_state_from_json(badges.at("badge_state"));
    earner_counts[i] = badges.at("earner_counts");
    const json records = expect(client.Get("/api/records", auth), 200, "records");
    for (const json& r : records) {
      MealRecord m;
      m.record_id = r.at("record_id").get<std::string>();
      m.user_id = users[i].user_id;
      m.submitted_at = parse_rfc3339(r.at("submitted_at").get<std::string>());
      m.local_date = parse_date(r.at("local_date").get<std::string>());
      m.scores = scores_from_json(r.at("scores"));
      m.photo_ref = r.at("photo_ref").get<std::string>();
      users[i].records.push_back(std::move(m));
    }
  });
  service.stop();

  std::map<std::string, std::int64_t> per_day;
  for (int d = 0; d < static_cast<int>(plan.by_day.size()); ++d) per_day[format_date(add_days(spec.start_date, d))] = 0;
  std::int64_t total_records = 0;
  std::int64_t eligible = 0;
  std::int64_t dedicated = 0;
  for (const SimulatedUser& u : users) {
    for (const MealRecord& r : u.records) ++per_day[format_date(r.local_date)];
    total_records += static_cast<std::int64_t>(u.records.size());
    eligible += u.badge_state.reward_eligible ? 1 : 0;
    dedicated += u.dedicated ? 1 : 0;
  }

  json report;
  report["seed"] = spec.seed;
  report["n_users"] = spec.n_users;
  report["registered_users"] = repo.user_count();
  report["dedicated_users"] = dedicated;
  report["total_actions"] = spec.total_actions;
  report["total_records"] = total_records;
  report["campaign"] = {{"start_date", format_date(spec.start_date)},
                        {"end_date", format_date(spec.end_date)},
                        {"timezone", spec.timezone}};
  report["badge_rules"] = to_json(spec.badge_rules);
  report["records_per_day"] = per_day;
  report["badge_earners"] = n_users > 0 ? earner_counts.front() : json::object();
  report["reward_eligible"] = eligible;
  report["daily_trays"] = std::move(daily_trays);
  report["runtime_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - started).count();
  return {std::move(report), std::move(users)};
}

}  // namespace foodwise
