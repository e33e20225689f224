// Operator entry point for the food-waste campaign backend.
//
//   foodwise serve      --config foodwise.toml [--port N]
//   foodwise gen-trays  --seed 7 --date 2023-03-20 [--profile p.json] [--timezone Z] --out trays.json|-
//   foodwise aggregate  --config foodwise.toml --date 2023-03-20
//   foodwise seed-demo  --config foodwise.toml [--seed N]
//   foodwise simulate   --spec sim.json --out report.json
//
// Exit codes: 0 success, 1 usage or input error, 2 runtime failure.

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "foodwise/codec.hpp"
#include "foodwise/config.hpp"
#include "foodwise/daily_job.hpp"
#include "foodwise/error.hpp"
#include "foodwise/ingest.hpp"
#include "foodwise/repository.hpp"
#include "foodwise/service.hpp"
#include "foodwise/simulate.hpp"

namespace {

using namespace foodwise;
using nlohmann::json;

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::BadConfig:
    case Errc::BadSpec:
    case Errc::InvalidProfile:
    case Errc::MalformedDocument:
    case Errc::InvalidTimezone:
    case Errc::NotFound:
      return kUsageError;
    default:
      return kRuntimeError;
  }
}

json read_json_file(const std::string& path, Errc on_error) {
  std::ifstream in(path);
  if (!in) throw Error(on_error, "cannot read " + path);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw Error(on_error, path + " is not valid JSON");
  return doc;
}

void write_output(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path, std::ios::trunc);
  out << text << '\n';
  if (!out) throw Error(Errc::StorageUnavailable, "cannot write " + path);
}

Repository open_repository(const ServiceConfig& cfg) {
  return cfg.in_memory_storage ? Repository::in_memory(cfg.max_photo_bytes)
                               : Repository::on_disk(cfg.storage_path, cfg.max_photo_bytes);
}

int serve(const std::string& config_path, std::optional<int> port) {
  ServiceConfig cfg = load_config(config_path);
  if (port) cfg.server.port = *port;

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  Repository repo = open_repository(cfg);
  Service service(cfg, repo);
  const int bound = service.bind(cfg.server.host, cfg.server.port);

  std::optional<DailyScheduler> scheduler;
  if (cfg.scheduler_enabled) {
    scheduler.emplace(CampaignZone::load(cfg.campaign.timezone), cfg.scheduler_time,
                      [&service](Date d) { service.daily_job().run(d); });
    scheduler->start();
  }
  service.start();
  spdlog::info("listening on {}:{}", cfg.server.host, bound);

  int sig = 0;
  sigwait(&signals, &sig);
  spdlog::info("shutting down");
  if (scheduler) scheduler->stop();
  service.stop();
  return 0;
}

int gen_trays(std::uint64_t seed, const std::string& date, const std::string& profile_path,
              const std::string& timezone, const std::string& out) {
  const SyntheticProfile profile = profile_path.empty()
                                       ? default_synthetic_profile()
                                       : parse_synthetic_profile(read_json_file(profile_path, Errc::InvalidProfile));
  json batch = json::array();
  for (const TrayObservation& obs :
       generate_synthetic_day(seed, parse_date(date), profile, CampaignZone::load(timezone))) {
    batch.push_back(serialize_tray_observation(obs));
  }
  write_output(out, batch.dump());
  return 0;
}

int aggregate(const std::string& config_path, const std::string& date) {
  const ServiceConfig cfg = load_config(config_path);
  Repository repo = open_repository(cfg);
  DailyJob job(repo, cfg.model, cfg.campaign.severity_thresholds);
  write_output("-", to_json(job.run(parse_date(date))).dump(2));
  return 0;
}

int seed_demo(const std::string& config_path, std::uint64_t seed) {
  const ServiceConfig cfg = load_config(config_path);
  Repository repo = open_repository(cfg);
  const CampaignZone zone = CampaignZone::load(cfg.campaign.timezone);
  DailyJob job(repo, cfg.model, cfg.campaign.severity_thresholds);
  const SyntheticProfile profile = default_synthetic_profile();
  std::int64_t trays = 0;
  for (Date d = cfg.campaign.start_date; d <= cfg.campaign.end_date; d = add_days(d, 1)) {
    for (const TrayObservation& obs : generate_synthetic_day(seed, d, profile, zone)) {
      trays += repo.insert_observation(obs) ? 1 : 0;
    }
    job.run(d);
  }
  spdlog::info("seeded {} trays and aggregated {} days", trays, cfg.campaign.window_days());
  return 0;
}

int simulate(const std::string& spec_path, const std::string& out) {
  const SimulationSpec spec = parse_simulation_spec(read_json_file(spec_path, Errc::BadSpec));
  const SimulationResult result = run_simulation(spec);
  write_output(out, result.report.dump(2));
  spdlog::info("simulated {} users, {} records, {} reward-eligible in {} ms",
               result.report["registered_users"].get<std::int64_t>(),
               result.report["total_records"].get<std::int64_t>(),
               result.report["reward_eligible"].get<std::int64_t>(),
               result.report["runtime_ms"].get<std::int64_t>());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Food-waste campaign backend"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<int> port;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API and the daily scheduler");
  serve_cmd->add_option("--config", config_path, "TOML config file")->required()->check(CLI::ExistingFile);
  serve_cmd->add_option("--port", port, "Listen port (overrides config and FOODWISE_PORT)");

  std::uint64_t seed = 0;
  std::string date;
  std::string profile_path;
  std::string timezone = "UTC";
  std::string out = "-";
  auto* gen_cmd = app.add_subcommand("gen-trays", "Write one day of synthetic tray observations");
  gen_cmd->add_option("--seed", seed, "Generator seed")->required();
  gen_cmd->add_option("--date", date, "YYYY-MM-DD")->required();
  gen_cmd->add_option("--profile", profile_path, "JSON synthetic profile")->check(CLI::ExistingFile);
  gen_cmd->add_option("--timezone", timezone, "IANA zone of the canteen");
  gen_cmd->add_option("--out", out, "Output path, '-' for stdout");

  auto* agg_cmd = app.add_subcommand("aggregate", "Recompute and cache one day's dashboard aggregates");
  agg_cmd->add_option("--config", config_path, "TOML config file")->required()->check(CLI::ExistingFile);
  agg_cmd->add_option("--date", date, "YYYY-MM-DD")->required();

  std::uint64_t demo_seed = 1;
  auto* demo_cmd = app.add_subcommand("seed-demo", "Fill the configured store with synthetic trays and aggregates");
  demo_cmd->add_option("--config", config_path, "TOML config file")->required()->check(CLI::ExistingFile);
  demo_cmd->add_option("--seed", demo_seed, "Generator seed");

  std::string spec_path;
  std::string report_path = "-";
  auto* sim_cmd = app.add_subcommand("simulate", "Replay a campaign against an in-process server");
  sim_cmd->add_option("--spec", spec_path, "JSON simulation spec")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--out", report_path, "Report path, '-' for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  try {
    if (*serve_cmd) return serve(config_path, port);
    if (*gen_cmd) return gen_trays(seed, date, profile_path, timezone, out);
    if (*agg_cmd) return aggregate(config_path, date);
    if (*demo_cmd) return seed_demo(config_path, demo_seed);
    if (*sim_cmd) return simulate(spec_path, report_path);
  } catch (const Error& e) {
    std::cerr << "foodwise: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "foodwise: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}
