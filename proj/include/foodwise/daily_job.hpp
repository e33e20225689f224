#pragma once

#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "foodwise/aggregate.hpp"
#include "foodwise/repository.hpp"

namespace foodwise {

using Clock = std::function<Timestamp()>;

// Recomputes and caches the dashboard aggregates for one date. Runs for
// dates in the same month are serialized so the monthly rollup written last
// always reflects every daily already stored.
class DailyJob {
 public:
  DailyJob(Repository& repo, LinearModel model, SeverityThresholds thresholds,
           Clock clock = now_utc);

  /// Stores the date's DailyAggregate, refreshes its month, and returns the
  /// stored daily. Throws Error(StorageUnavailable).
  DailyAggregate run(Date date);

  const LinearModel& model() const noexcept { return model_; }

 private:
  std::mutex& month_lock(std::chrono::year_month month);

  Repository& repo_;
  LinearModel model_;
  SeverityThresholds thresholds_;
  Clock clock_;
  std::mutex locks_mutex_;
  std::map<std::chrono::year_month, std::unique_ptr<std::mutex>> month_locks_;
};

/// First instant strictly after `now` whose local wall time in `zone` is `at`.
Timestamp next_fire_time(Timestamp now, LocalTime at, const CampaignZone& zone);

// Fires once a day at a local wall time and hands the job the previous
// local date.
class DailyScheduler {
 public:
  DailyScheduler(CampaignZone zone, LocalTime at, std::function<void(Date)> job);
  ~DailyScheduler();

  DailyScheduler(const DailyScheduler&) = delete;
  DailyScheduler& operator=(const DailyScheduler&) = delete;

  void start();
  void stop();
  bool running() const;

 private:
  void loop();

  CampaignZone zone_;
  LocalTime at_;
  std::function<void(Date)> job_;
  mutable std::mutex mutex_;
  std::condition_variable wake_;
  bool stopping_ = false;
  std::thread thread_;
};

}  // namespace foodwise
