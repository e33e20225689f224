#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "foodwise/aggregate.hpp"
#include "foodwise/domain.hpp"
#include "foodwise/gamify.hpp"
#include "foodwise/ingest.hpp"
#include "foodwise/store.hpp"

namespace foodwise {

struct DateRange {
  Date from{};
  Date to{};  // inclusive

  /// Throws Error(InvalidRange) when from > to.
  static DateRange of(Date from, Date to);
  static DateRange everything();

  bool contains(Date d) const noexcept { return from <= d && d <= to; }
};

struct Session {
  std::string token_digest;
  std::string user_id;
  Timestamp expires_at{};
};

// Typed access to the collections the service uses, over a document store
// and a blob store.
class Repository {
 public:
  Repository(std::unique_ptr<DocumentStore> documents, std::unique_ptr<BlobStore> blobs);

  static Repository in_memory(std::int64_t max_blob_bytes = kDefaultMaxBlobBytes);
  /// `dir/foodwise.db` plus `dir/blobs/`.
  static Repository on_disk(const std::filesystem::path& dir,
                            std::int64_t max_blob_bytes = kDefaultMaxBlobBytes);

  DocumentStore& documents() noexcept { return *documents_; }
  BlobStore& blobs() noexcept { return *blobs_; }
  const BlobStore& blobs() const noexcept { return *blobs_; }

  /// False when the (normalized) email is already registered.
  bool create_user(const User& user);
  std::optional<User> find_user(const std::string& user_id) const;
  std::optional<User> find_user_by_email(const std::string& email) const;
  std::int64_t user_count() const;

  void put_session(const Session& s);
  std::optional<Session> find_session(const std::string& token_digest) const;

  void put_record(const MealRecord& r);
  std::vector<MealRecord> records_for_user(const std::string& user_id) const;
  /// The user's records dated within `range`, newest submission first.
  std::vector<MealRecord> query_records(const std::string& user_id, const DateRange& range) const;
  std::vector<MealRecord> all_records() const;

  /// False for a duplicate tray_id on the same local date.
  bool insert_observation(const TrayObservation& obs);
  std::vector<TrayObservation> observations_on(Date d) const;

  void put_daily(const DailyAggregate& d);
  std::optional<DailyAggregate> find_daily(Date d) const;
  std::vector<DailyAggregate> dailies_in(std::chrono::year_month month) const;

  void put_monthly(const MonthlyAggregate& m);
  std::optional<MonthlyAggregate> find_monthly(std::chrono::year_month month) const;

  void put_badge_state(const std::string& user_id, const BadgeState& s);
  std::optional<BadgeState> find_badge_state(const std::string& user_id) const;
  std::vector<BadgeState> all_badge_states() const;

 private:
  std::unique_ptr<DocumentStore> documents_;
  std::unique_ptr<BlobStore> blobs_;
};

}  // namespace foodwise
