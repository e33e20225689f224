#include "foodwise/repository.hpp"

#include <algorithm>
#include <system_error>

#include "foodwise/codec.hpp"
#include "foodwise/error.hpp"

namespace foodwise {

namespace {

constexpr std::string_view kUsers = "users";
constexpr std::string_view kUserEmails = "user_emails";
constexpr std::string_view kSessions = "sessions";
constexpr std::string_view kRecords = "records";
constexpr std::string_view kObservations = "observations";
constexpr std::string_view kDailies = "daily_aggregates";
constexpr std::string_view kMonthlies = "monthly_aggregates";
constexpr std::string_view kBadgeStates = "badge_states";

std::string observation_key(const TrayObservation& obs) {
  return format_date(obs.local_date) + "/" + obs.tray_id;
}

std::string month_of(Date d) { return format_month(d.year() / d.month()); }

}  // namespace

DateRange DateRange::of(Date from, Date to) {
  if (to < from) {
    throw Error(Errc::InvalidRange, "range starts " + format_date(from) + " after it ends " + format_date(to));
  }
  return {from, to};
}

DateRange DateRange::everything() {
  using namespace std::chrono;
  return {year{1} / January / 1, year{9999} / December / 31};
}

Repository::Repository(std::unique_ptr<DocumentStore> documents, std::unique_ptr<BlobStore> blobs)
    : documents_(std::move(documents)), blobs_(std::move(blobs)) {}

Repository Repository::in_memory(std::int64_t max_blob_bytes) {
  return Repository(make_memory_document_store(), make_memory_blob_store(max_blob_bytes));
}

Repository Repository::on_disk(const std::filesystem::path& dir, std::int64_t max_blob_bytes) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::StorageUnavailable, "cannot create " + dir.string() + ": " + ec.message());
  return Repository(open_sqlite_document_store(dir / "foodwise.db"),
                    open_file_blob_store(dir / "blobs", max_blob_bytes));
}

bool Repository::create_user(const User& user) {
  if (!documents_->insert(kUserEmails, user.email, json{{"user_id", user.user_id}})) return false;
  documents_->put(kUsers, user.user_id, to_json(user));
  return true;
}

std::optional<User> Repository::find_user(const std::string& user_id) const {
  auto doc = documents_->find(kUsers, user_id);
  if (!doc) return std::nullopt;
  return user_from_json(doc->value);
}

std::optional<User> Repository::find_user_by_email(const std::string& email) const {
  auto doc = documents_->find(kUserEmails, normalize_email(email));
  if (!doc) return std::nullopt;
  return find_user(doc->value.at("user_id").get<std::string>());
}

std::int64_t Repository::user_count() const {
  return static_cast<std::int64_t>(documents_->list(kUsers).size());
}

void Repository::put_session(const Session& s) {
  documents_->put(kSessions, s.token_digest,
                  json{{"user_id", s.user_id}, {"expires_at", format_rfc3339(s.expires_at)}},
                  s.user_id);
}

std::optional<Session> Repository::find_session(const std::string& token_digest) const {
  auto doc = documents_->find(kSessions, token_digest);
  if (!doc) return std::nullopt;
  return Session{token_digest, doc->value.at("user_id").get<std::string>(),
                 parse_rfc3339(doc->value.at("expires_at").get<std::string>())};
}

void Repository::put_record(const MealRecord& r) {
  documents_->put(kRecords, r.record_id, to_json(r), r.user_id);
}

std::vector<MealRecord> Repository::records_for_user(const std::string& user_id) const {
  std::vector<MealRecord> out;
  for (const auto& doc : documents_->list_owned(kRecords, user_id)) out.push_back(record_from_json(doc.value));
  return out;
}

std::vector<MealRecord> Repository::query_records(const std::string& user_id,
                                                  const DateRange& range) const {
  if (range.to < range.from) throw Error(Errc::InvalidRange, "inverted date range");
  std::vector<MealRecord> out = records_for_user(user_id);
  std::erase_if(out, [&](const MealRecord& r) { return !range.contains(r.local_date); });
  std::sort(out.begin(), out.end(), [](const MealRecord& a, const MealRecord& b) {
    if (a.submitted_at != b.submitted_at) return a.submitted_at > b.submitted_at;
    return a.record_id > b.record_id;
  });
  return out;
}

std::vector<MealRecord> Repository::all_records() const {
  std::vector<MealRecord> out;
  for (const auto& doc : documents_->list(kRecords)) out.push_back(record_from_json(doc.value));
  return out;
}

bool Repository::insert_observation(const TrayObservation& obs) {
  json doc = serialize_tray_observation(obs);
  doc["local_date"] = format_date(obs.local_date);
  return documents_->insert(kObservations, observation_key(obs), doc, format_date(obs.local_date));
}

std::vector<TrayObservation> Repository::observations_on(Date d) const {
  std::vector<TrayObservation> out;
  for (const auto& doc : documents_->list_owned(kObservations, format_date(d))) {
    TrayObservation obs = parse_tray_observation(doc.value, CampaignZone::utc());
    obs.local_date = parse_date(doc.value.at("local_date").get<std::string>());
    out.push_back(std::move(obs));
  }
  return out;
}

void Repository::put_daily(const DailyAggregate& d) {
  documents_->put(kDailies, format_date(d.date), to_json(d), month_of(d.date));
}

std::optional<DailyAggregate> Repository::find_daily(Date d) const {
  auto doc = documents_->find(kDailies, format_date(d));
  if (!doc) return std::nullopt;
  return daily_from_json(doc->value);
}

std::vector<DailyAggregate> Repository::dailies_in(std::chrono::year_month month) const {
  std::vector<DailyAggregate> out;
  for (const auto& doc : documents_->list_owned(kDailies, format_month(month))) {
    out.push_back(daily_from_json(doc.value));
  }
  return out;
}

void Repository::put_monthly(const MonthlyAggregate& m) {
  documents_->put(kMonthlies, format_month(m.month), to_json(m));
}

std::optional<MonthlyAggregate> Repository::find_monthly(std::chrono::year_month month) const {
  auto doc = documents_->find(kMonthlies, format_month(month));
  if (!doc) return std::nullopt;
  return monthly_from_json(doc->value);
}

void Repository::put_badge_state(const std::string& user_id, const BadgeState& s) {
  documents_->put(kBadgeStates, user_id, to_json(s), user_id);
}

std::optional<BadgeState> Repository::find_badge_state(const std::string& user_id) const {
  auto doc = documents_->find(kBadgeStates, user_id);
  if (!doc) return std::nullopt;
  return badge_state_from_json(doc->value);
}

std::vector<BadgeState> Repository::all_badge_states() const {
  std::vector<BadgeState> out;
  for (const auto& doc : documents_->list(kBadgeStates)) out.push_back(badge_state_from_json(doc.value));
  return out;
}

}  // namespace foodwise
