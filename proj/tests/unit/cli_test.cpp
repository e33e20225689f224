#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Run {
  int exit_code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(FOODWISE_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class CliTest : public ::testing::Test {
 protected:
  fs::path dir = fs::temp_directory_path() / ("fw_cli_" + std::to_string(::getpid()));
  void SetUp() override { fs::create_directories(dir); }
  void TearDown() override { fs::remove_all(dir); }
  fs::path write(const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return dir / name;
  }
};

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run("").exit_code, 1);
  EXPECT_EQ(run("frobnicate").exit_code, 1);
  EXPECT_EQ(run("serve --config " + (dir / "missing.toml").string()).exit_code, 1);
  EXPECT_EQ(run("gen-trays --seed 1").exit_code, 1);
  EXPECT_EQ(run("gen-trays --seed 1 --date 2023-02-30").exit_code, 1);
  EXPECT_EQ(run("serve --config " + write("bad.toml", "[server]\nport = \"x\"\n").string()).exit_code, 1);
  EXPECT_EQ(run("--help").exit_code, 0);
}

TEST_F(CliTest, GenTraysDeterministic) {
  const auto a = run("gen-trays --seed 7 --date 2023-03-20 --timezone Asia/Hong_Kong --out -");
  const auto b = run("gen-trays --seed 7 --date 2023-03-20 --timezone Asia/Hong_Kong --out -");
  ASSERT_EQ(a.exit_code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(json::parse(a.out).size(), 200u);

  const auto file = dir / "trays.json";
  ASSERT_EQ(run("gen-trays --seed 7 --date 2023-03-20 --timezone Asia/Hong_Kong --out " + file.string()).exit_code, 0);
  std::ifstream in(file);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), a.out);
}

TEST_F(CliTest, GenTraysEmptyProfile) {
  const auto profile = write("p.json", R"({"trays_per_day": 0})");
  const auto r = run("gen-trays --seed 1 --date 2023-03-20 --profile " + profile.string());
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(json::parse(r.out), json::array());
  EXPECT_EQ(run("gen-trays --seed 1 --date 2023-03-20 --profile " + write("q.json", "{\"trays_per_day\": -3}").string())
                .exit_code,
            1);
}

TEST_F(CliTest, AggregateAndSeedDemoUseStorage) {
  const auto cfg = write("fw.toml", "[storage]\npath = \"store\"\n[server]\npassword_cost = \"min\"\n");
  ASSERT_EQ(run("seed-demo --config " + cfg.string() + " --seed 3").exit_code, 0);
  const auto r = run("aggregate --config " + cfg.string() + " --date 2023-03-25");
  ASSERT_EQ(r.exit_code, 0);
  const json daily = json::parse(r.out);
  EXPECT_EQ(daily["total_trays"], 200);
  EXPECT_EQ(daily["bowls"].size(), 100u);
  EXPECT_TRUE(fs::exists(dir / "store" / "foodwise.db"));
  EXPECT_EQ(json::parse(run("aggregate --config " + cfg.string() + " --date 2023-05-01").out)["total_trays"], 0);
}

TEST_F(CliTest, SimulateOneDedicatedUser) {
  const auto spec = write("sim.json", R"({"seed": 3, "n_users": 1, "total_actions": 10,
    "behavior_mix": {"dedicated": 1.0, "casual": 0.0}, "trays": {"trays_per_day": 2}})");
  const auto out = dir / "report.json";
  ASSERT_EQ(run("simulate --spec " + spec.string() + " --out " + out.string()).exit_code, 0);
  const json report = json::parse(std::ifstream(out));
  EXPECT_EQ(report["reward_eligible"], 1);
  EXPECT_EQ(report["total_records"], 10);

  const auto bad = write("bad.json", R"({"n_users": 0})");
  EXPECT_EQ(run("simulate --spec " + bad.string() + " --out -").exit_code, 1);
}

// Binds port 0, reads the number back, closes the socket.
int free_port() {
  const int fd = socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  socklen_t len = sizeof addr;
  bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  close(fd);
  return ntohs(addr.sin_port);
}

TEST_F(CliTest, ServeAnswersHealthAndStopsOnSignal) {
  const int port = free_port();
  const auto cfg = write("serve.toml", "[storage]\nin_memory = true\n[scheduler]\nenabled = true\n[server]\nhost = \"127.0.0.1\"\n");
  const pid_t pid = fork();
  ASSERT_GE(pid, 0);
  if (pid == 0) {
    std::freopen("/dev/null", "w", stderr);
    execl(FOODWISE_CLI, FOODWISE_CLI, "serve", "--config", cfg.c_str(), "--port", std::to_string(port).c_str(), nullptr);
    _exit(127);
  }
  httplib::Client c("127.0.0.1", port);
  c.set_connection_timeout(std::chrono::seconds(1));
  c.set_read_timeout(std::chrono::seconds(5));
  httplib::Result r;
  for (int i = 0; i < 100 && !(r = c.Get("/healthz")); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 200);
  EXPECT_EQ(r->body, "ok");

  // A second server on the same port fails with a runtime exit code.
  EXPECT_EQ(run("serve --config " + cfg.string() + " --port " + std::to_string(port)).exit_code, 2);

  kill(pid, SIGTERM);
  int status = 0;
  waitpid(pid, &status, 0);
  EXPECT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);
}

}  // namespace
