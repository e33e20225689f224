#include "foodwise/service.hpp"

#include <algorithm>
#include <charconv>
#include <mutex>
#include <thread>
#include <unordered_map>

#include <httplib.h>
#include <sodium.h>
#include <spdlog/spdlog.h>

#include "foodwise/codec.hpp"
#include "foodwise/error.hpp"

namespace foodwise {

namespace {

constexpr const char* kJson = "application/json";
constexpr std::size_t kMinPasswordChars = 8;

struct HttpError {
  int status;
  std::string error;
  std::string message;
};

[[noreturn]] void fail(int status, std::string error, std::string message) {
  throw HttpError{status, std::move(error), std::move(message)};
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, const HttpError& e) {
  send_json(res, e.status, json{{"error", e.error}, {"message", e.message}});
}

std::string random_hex(std::size_t bytes) {
  std::string raw(bytes, '\0');
  randombytes_buf(raw.data(), raw.size());
  std::string hex(bytes * 2 + 1, '\0');
  sodium_bin2hex(hex.data(), hex.size(), reinterpret_cast<const unsigned char*>(raw.data()), raw.size());
  hex.pop_back();
  return hex;
}

std::size_t utf8_length(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

bool plausible_email(std::string_view email) {
  const auto at = email.find('@');
  return at != std::string_view::npos && at > 0 && at + 1 < email.size() &&
         email.find('@', at + 1) == std::string_view::npos &&
         email.find_first_of(" \t\r\n") == std::string_view::npos;
}

bool equal_secret(std::string_view a, std::string_view b) {
  return a.size() == b.size() && sodium_memcmp(a.data(), b.data(), a.size()) == 0;
}

std::pair<unsigned long long, std::size_t> hash_limits(PasswordHashCost cost) {
  switch (cost) {
    case PasswordHashCost::min:
      return {crypto_pwhash_OPSLIMIT_MIN, crypto_pwhash_MEMLIMIT_MIN};
    case PasswordHashCost::moderate:
      return {crypto_pwhash_OPSLIMIT_MODERATE, crypto_pwhash_MEMLIMIT_MODERATE};
    case PasswordHashCost::interactive:
      break;
  }
  return {crypto_pwhash_OPSLIMIT_INTERACTIVE, crypto_pwhash_MEMLIMIT_INTERACTIVE};
}

// Accepted photo types, recognized by their leading bytes.
std::optional<std::string> sniff_image(std::string_view bytes) {
  auto starts = [&](std::string_view magic, std::size_t at = 0) {
    return bytes.size() >= at + magic.size() && bytes.substr(at, magic.size()) == magic;
  };
  if (starts("\xFF\xD8\xFF")) return "image/jpeg";
  if (starts("\x89PNG\r\n\x1A\n")) return "image/png";
  if (starts("RIFF") && starts("WEBP", 8)) return "image/webp";
  if (starts("ftyp", 4) && (starts("heic", 8) || starts("heix", 8) || starts("mif1", 8) ||
                            starts("heif", 8) || starts("msf1", 8))) {
    return "image/heic";
  }
  return std::nullopt;
}

bool compatible_type(std::string_view declared, std::string_view sniffed) {
  if (declared == sniffed) return true;
  if (sniffed == "image/jpeg") return declared == "image/jpg" || declared == "image/pjpeg";
  if (sniffed == "image/heic") return declared == "image/heif";
  return false;
}

json parse_body(const httplib::Request& req) {
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) fail(400, "BadRequest", "request body must be a JSON object");
  return body;
}

std::string string_field(const json& body, const char* name) {
  const auto it = body.find(name);
  if (it == body.end() || !it->is_string()) {
    fail(400, "BadRequest", std::string("'") + name + "' must be a string");
  }
  return it->get<std::string>();
}

Date date_param(const httplib::Request& req, const char* name, Date fallback) {
  if (!req.has_param(name)) return fallback;
  try {
    return parse_date(req.get_param_value(name));
  } catch (const Error& e) {
    fail(400, "BadDate", e.what());
  }
}

std::int64_t parse_score(const std::string& text, std::string_view category) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    fail(400, "BadScores", std::string(category) + " score must be an integer");
  }
  return value;
}

// httplib only closes its socket in stop() when listen() ran, so a server
// that was bound but never started would keep the port.
class OwnedServer : public httplib::Server {
 public:
  ~OwnedServer() override {
    const socket_t sock = svr_sock_.exchange(INVALID_SOCKET);
    if (sock != INVALID_SOCKET) httplib::detail::close_socket(sock);
  }
};

}  // namespace

struct Service::Impl {
  Impl(ServiceConfig cfg, Repository& r, Clock c)
      : config(std::move(cfg)),
        repo(r),
        clock(std::move(c)),
        zone(CampaignZone::load(config.campaign.timezone)),
        job(repo, config.model, config.campaign.severity_thresholds, clock) {
    if (sodium_init() < 0) throw Error(Errc::StorageUnavailable, "libsodium failed to initialize");
    dummy_hash = hash_password(random_hex(16));
    routes();
  }

  ServiceConfig config;
  Repository& repo;
  Clock clock;
  CampaignZone zone;
  DailyJob job;
  OwnedServer server;
  int port = -1;
  std::thread thread;
  std::string dummy_hash;

  std::mutex user_locks_mutex;
  std::unordered_map<std::string, std::unique_ptr<std::mutex>> user_locks;

  std::mutex& user_lock(const std::string& user_id) {
    std::lock_guard guard(user_locks_mutex);
    auto& slot = user_locks[user_id];
    if (!slot) slot = std::make_unique<std::mutex>();
    return *slot;
  }

  std::string hash_password(const std::string& password) const {
    const auto [ops, mem] = hash_limits(config.server.password_cost);
    char out[crypto_pwhash_STRBYTES];
    if (crypto_pwhash_str(out, password.data(), password.size(), ops, mem) != 0) {
      throw Error(Errc::StorageUnavailable, "password hashing ran out of memory");
    }
    return out;
  }

  static bool verify_password(const std::string& hash, const std::string& password) {
    return crypto_pwhash_str_verify(hash.c_str(), password.data(), password.size()) == 0;
  }

  static std::optional<std::string> bearer(const httplib::Request& req) {
    const std::string header = req.get_header_value("Authorization");
    constexpr std::string_view prefix = "Bearer ";
    if (header.size() <= prefix.size() || header.compare(0, prefix.size(), prefix) != 0) return std::nullopt;
    return header.substr(prefix.size());
  }

  std::optional<User> session_user(const httplib::Request& req) {
    const auto token = bearer(req);
    if (!token) return std::nullopt;
    const auto session = repo.find_session(sha256_hex(*token));
    if (!session || session->expires_at <= clock()) return std::nullopt;
    return repo.find_user(session->user_id);
  }

  User require_user(const httplib::Request& req) {
    auto user = session_user(req);
    if (!user) fail(401, "Unauthorized", "missing, invalid or expired session token");
    return *std::move(user);
  }

  void require_admin(const httplib::Request& req) {
    const auto token = bearer(req);
    if (token && !config.server.admin_token.empty() && equal_secret(*token, config.server.admin_token)) return;
    const User user = require_user(req);
    const auto& admins = config.server.admin_emails;
    if (std::none_of(admins.begin(), admins.end(),
                     [&](const std::string& a) { return normalize_email(a) == user.email; })) {
      fail(403, "Forbidden", "admin access required");
    }
  }

  json record_view(const MealRecord& r) const {
    return {{"record_id", r.record_id},
            {"submitted_at", format_rfc3339(r.submitted_at)},
            {"local_date", format_date(r.local_date)},
            {"scores", scores_to_json(r.scores)},
            {"overall", r.overall()},
            {"photo_ref", r.photo_ref},
            {"photo_url", "/api/media/" + r.photo_ref}};
  }

  // Badge state from the user's in-window records, never losing a badge the
  // stored state already holds. Caller holds the user's lock.
  BadgeState current_badges(const std::string& user_id, Date as_of) {
    std::vector<MealRecord> records = repo.records_for_user(user_id);
    std::erase_if(records, [&](const MealRecord& r) { return !config.campaign.in_window(r.local_date); });
    BadgeState state = evaluate_badges(records, config.campaign.badge_rules, as_of);
    if (auto stored = repo.find_badge_state(user_id)) state = merge_monotone(*stored, state);
    return state;
  }

  void routes() {
    server.set_tcp_nodelay(true);
    // httplib defaults to SO_REUSEPORT, which lets a second server share a busy port.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    server.set_payload_max_length(static_cast<std::size_t>(config.max_photo_bytes) * 2 + (1 << 20));
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Authorization, Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    server.set_exception_handler([](const httplib::Request& req, httplib::Response& res, std::exception_ptr ep) {
      try {
        std::rethrow_exception(ep);
      } catch (const HttpError& e) {
        send_error(res, e);
      } catch (const Error& e) {
        const int status = e.code() == Errc::StorageUnavailable ? 503 : 500;
        spdlog::error("{} {}: {}", req.method, req.path, e.what());
        send_error(res, {status, std::string(to_string(e.code())), e.what()});
      } catch (const std::exception& e) {
        spdlog::error("{} {}: {}", req.method, req.path, e.what());
        send_error(res, {500, "InternalError", e.what()});
      }
    });

    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("ok", "text/plain");
    });

    server.Post("/api/register", [this](const httplib::Request& req, httplib::Response& res) { do_register(req, res); });
    server.Post("/api/login", [this](const httplib::Request& req, httplib::Response& res) { do_login(req, res); });
    server.Post("/api/records", [this](const httplib::Request& req, httplib::Response& res) { submit_record(req, res); });
    server.Get("/api/records", [this](const httplib::Request& req, httplib::Response& res) { list_records(req, res); });
    server.Get(R"(/api/media/([0-9a-f]{64}))", [this](const httplib::Request& req, httplib::Response& res) { media(req, res); });
    server.Get("/api/overview", [this](const httplib::Request& req, httplib::Response& res) { overview(req, res); });
    server.Get("/api/badges", [this](const httplib::Request& req, httplib::Response& res) { badges(req, res); });
    server.Get("/api/dashboard/daily", [this](const httplib::Request& req, httplib::Response& res) { dashboard_daily(req, res); });
    server.Get("/api/dashboard/monthly", [this](const httplib::Request& req, httplib::Response& res) { dashboard_monthly(req, res); });
    server.Get("/api/dashboard/tips", [this](const httplib::Request&, httplib::Response& res) {
      send_json(res, 200, config.campaign.tips);
    });
    server.Post("/api/admin/trays", [this](const httplib::Request& req, httplib::Response& res) { ingest_trays(req, res); });
    server.Post("/api/admin/aggregate", [this](const httplib::Request& req, httplib::Response& res) { aggregate(req, res); });
  }

  void do_register(const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    const std::string email = normalize_email(string_field(body, "email"));
    const std::string display_name = string_field(body, "display_name");
    const std::string password = string_field(body, "password");
    if (!plausible_email(email)) fail(400, "InvalidEmail", "email address is not valid");
    if (display_name.empty()) fail(400, "BadRequest", "display_name must not be empty");
    if (utf8_length(password) < kMinPasswordChars) {
      fail(400, "WeakPassword", "password must be at least 8 characters");
    }
    if (repo.find_user_by_email(email)) fail(409, "EmailTaken", "email is already registered");

    User user{random_hex(16), email, display_name, hash_password(password), clock()};
    if (!repo.create_user(user)) fail(409, "EmailTaken", "email is already registered");
    send_json(res, 201, json{{"user_id", user.user_id}});
  }

  void do_login(const httplib::Request& req, httplib::Response& res) {
    const json body = parse_body(req);
    const std::string email = normalize_email(string_field(body, "email"));
    const std::string password = string_field(body, "password");

    const auto user = repo.find_user_by_email(email);
    // Unknown accounts still pay for a hash check so timing does not reveal them.
    const bool ok = verify_password(user ? user->password_hash : dummy_hash, password) && user;
    if (!ok) fail(401, "InvalidCredentials", "email or password is incorrect");

    const std::string token = random_hex(16);
    const Timestamp expires_at = clock() + std::chrono::duration_cast<std::chrono::milliseconds>(config.server.session_ttl);
    repo.put_session({sha256_hex(token), user->user_id, expires_at});
    send_json(res, 200, json{{"token", token}, {"user_id", user->user_id}, {"expires_at", format_rfc3339(expires_at)}});
  }

  void submit_record(const httplib::Request& req, httplib::Response& res) {
    const User user = require_user(req);
    if (!req.is_multipart_form_data()) fail(400, "BadRequest", "expected multipart/form-data");

    RawScores raw;
    for (FoodCategory c : kFoodCategories) {
      const std::string name(to_string(c));
      if (req.has_file(name)) raw[name] = parse_score(req.get_file_value(name).content, name);
    }
    CompletionScores scores = CompletionScores::of(0, 0, 0);
    try {
      scores = validate_scores(raw);
    } catch (const Error& e) {
      fail(400, "BadScores", e.what());
    }

    if (!req.has_file("photo")) fail(400, "MissingPhoto", "a photo is required");
    const httplib::MultipartFormData photo = req.get_file_value("photo");
    const auto limit = repo.blobs().max_bytes();
    if (static_cast<std::int64_t>(photo.content.size()) > limit) {
      fail(413, "PhotoTooLarge",
           "photo is " + std::to_string(photo.content.size()) + " bytes; the limit is " +
               std::to_string(limit) + " bytes. Resize or compress the photo (under 1 MB works well) and retry.");
    }
    const auto sniffed = sniff_image(photo.content);
    if (!sniffed || !compatible_type(photo.content_type, *sniffed)) {
      fail(422, "UnsupportedMediaType", "photo must be a JPEG, PNG, WebP or HEIC image");
    }

    const BlobRef blob = repo.blobs().put(photo.content, *sniffed);
    MealRecord record;
    record.record_id = random_hex(16);
    record.user_id = user.user_id;
    record.submitted_at = clock();
    record.local_date = zone.local_date(record.submitted_at);
    record.scores = scores;
    record.photo_ref = blob.key;

    BadgeState state;
    {
      std::lock_guard guard(user_lock(user.user_id));
      repo.put_record(record);
      state = current_badges(user.user_id, record.local_date);
      repo.put_badge_state(user.user_id, state);
    }
    send_json(res, 201, json{{"record_id", record.record_id},
                             {"record", record_view(record)},
                             {"badge_state", to_json(state)}});
  }

  void list_records(const httplib::Request& req, httplib::Response& res) {
    const User user = require_user(req);
    const DateRange all = DateRange::everything();
    const Date from = date_param(req, "from", all.from);
    const Date to = date_param(req, "to", all.to);
    if (to < from) fail(400, "InvalidRange", "'from' is after 'to'");
    json out = json::array();
    for (const MealRecord& r : repo.query_records(user.user_id, DateRange::of(from, to))) {
      out.push_back(record_view(r));
    }
    send_json(res, 200, out);
  }

  void media(const httplib::Request& req, httplib::Response& res) {
    const User user = require_user(req);
    const std::string key = req.matches[1];
    const auto records = repo.records_for_user(user.user_id);
    const bool owns = std::any_of(records.begin(), records.end(),
                                  [&](const MealRecord& r) { return r.photo_ref == key; });
    if (!owns || !repo.blobs().contains(key)) fail(404, "NotFound", "no such photo");
    Blob blob = repo.blobs().get(key);
    res.set_content(std::move(blob.bytes), blob.ref.content_type);
  }

  Date today() const { return zone.local_date(clock()); }

  void overview(const httplib::Request& req, httplib::Response& res) {
    const User user = require_user(req);
    std::vector<MealRecord> mine = repo.query_records(user.user_id, DateRange::everything());
    const std::vector<MealRecord> everyone = repo.all_records();

    BadgeState state;
    {
      std::lock_guard guard(user_lock(user.user_id));
      state = current_badges(user.user_id, today());
    }
    json recent = json::array();
    const auto n = std::min<std::size_t>(mine.size(), static_cast<std::size_t>(config.server.recent_records));
    for (std::size_t i = 0; i < n; ++i) recent.push_back(record_view(mine[i]));

    send_json(res, 200, json{{"user", to_json(community_averages(mine))},
                             {"community", to_json(community_averages(everyone))},
                             {"badge_state", to_json(state)},
                             {"recent_records", std::move(recent)}});
  }

  void badges(const httplib::Request& req, httplib::Response& res) {
    const User user = require_user(req);
    BadgeState state;
    {
      std::lock_guard guard(user_lock(user.user_id));
      state = current_badges(user.user_id, today());
    }
    const std::vector<BadgeState> all = repo.all_badge_states();
    send_json(res, 200, json{{"badge_state", to_json(state)}, {"earner_counts", to_json(badge_earner_counts(all))}});
  }

  void dashboard_daily(const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("date")) fail(400, "BadDate", "'date' is required");
    const Date date = date_param(req, "date", {});
    const auto daily = repo.find_daily(date);
    if (!daily) fail(404, "NotComputed", "no aggregate for " + format_date(date));
    send_json(res, 200, to_json(*daily));
  }

  void dashboard_monthly(const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("month")) fail(400, "BadDate", "'month' is required");
    std::chrono::year_month month;
    try {
      month = parse_month(req.get_param_value("month"));
    } catch (const Error& e) {
      fail(400, "BadDate", e.what());
    }
    const auto monthly = repo.find_monthly(month);
    if (!monthly) fail(404, "NotComputed", "no aggregate for " + format_month(month));
    send_json(res, 200, to_json(*monthly));
  }

  void ingest_trays(const httplib::Request& req, httplib::Response& res) {
    require_admin(req);
    const json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_array()) fail(400, "MalformedDocument", "expected a JSON array of trays");

    std::int64_t accepted = 0;
    json rejected = json::array();
    for (std::size_t i = 0; i < body.size(); ++i) {
      try {
        const TrayObservation obs = parse_tray_observation(body[i], zone);
        if (repo.insert_observation(obs)) {
          ++accepted;
        } else {
          rejected.push_back({{"index", i}, {"error", "DuplicateTray"},
                              {"message", "tray " + obs.tray_id + " already recorded for " + format_date(obs.local_date)}});
        }
      } catch (const Error& e) {
        if (e.code() == Errc::StorageUnavailable) throw;
        rejected.push_back({{"index", i}, {"error", to_string(e.code())}, {"message", e.what()}});
      }
    }
    send_json(res, 200, json{{"accepted", accepted}, {"rejected", std::move(rejected)}});
  }

  void aggregate(const httplib::Request& req, httplib::Response& res) {
    require_admin(req);
    const json body = parse_body(req);
    Date date;
    try {
      date = parse_date(string_field(body, "date"));
    } catch (const Error& e) {
      fail(400, "BadDate", e.what());
    }
    send_json(res, 200, to_json(job.run(date)));
  }
};

Service::Service(ServiceConfig config, Repository& repo, Clock clock)
    : impl_(std::make_unique<Impl>(std::move(config), repo, std::move(clock))) {}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
  } else {
    impl_->port = impl_->server.bind_to_port(host, port) ? port : -1;
  }
  if (impl_->port < 0) {
    throw Error(Errc::PortInUse, "cannot bind " + host + ":" + std::to_string(port));
  }
  return impl_->port;
}

void Service::listen() {
  if (impl_->port < 0) bind(impl_->config.server.host, impl_->config.server.port);
  impl_->server.listen_after_bind();
}

void Service::start() {
  if (impl_->port < 0) bind(impl_->config.server.host, impl_->config.server.port);
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int Service::port() const noexcept { return impl_->port; }
DailyJob& Service::daily_job() noexcept { return impl_->job; }
const ServiceConfig& Service::config() const noexcept { return impl_->config; }

}  // namespace foodwise
