#include "foodwise/daily_job.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

namespace foodwise {

DailyJob::DailyJob(Repository& repo, LinearModel model, SeverityThresholds thresholds, Clock clock)
    : repo_(repo), model_(model), thresholds_(thresholds), clock_(std::move(clock)) {}

std::mutex& DailyJob::month_lock(std::chrono::year_month month) {
  std::lock_guard guard(locks_mutex_);
  auto& slot = month_locks_[month];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

DailyAggregate DailyJob::run(Date date) {
  const std::chrono::year_month month = date.year() / date.month();
  std::lock_guard guard(month_lock(month));

  std::vector<TrayObservation> observations = repo_.observations_on(date);
  std::sort(observations.begin(), observations.end(),
            [](const TrayObservation& a, const TrayObservation& b) { return a.tray_id < b.tray_id; });

  const Timestamp computed_at = clock_();
  DailyAggregate daily = daily_aggregate(date, observations, model_, thresholds_, computed_at);
  repo_.put_daily(daily);

  const std::vector<DailyAggregate> dailies = repo_.dailies_in(month);
  repo_.put_monthly(monthly_aggregate(month, dailies, computed_at));
  return daily;
}

Timestamp next_fire_time(Timestamp now, LocalTime at, const CampaignZone& zone) {
  const Date today = zone.local_date(now);
  for (int offset = -1; offset <= 2; ++offset) {
    const Timestamp candidate = zone.at_local(add_days(today, offset), at);
    if (candidate > now) return candidate;
  }
  return zone.at_local(add_days(today, 3), at);
}

DailyScheduler::DailyScheduler(CampaignZone zone, LocalTime at, std::function<void(Date)> job)
    : zone_(std::move(zone)), at_(at), job_(std::move(job)) {}

DailyScheduler::~DailyScheduler() { stop(); }

void DailyScheduler::start() {
  std::lock_guard guard(mutex_);
  if (thread_.joinable()) return;
  stopping_ = false;
  thread_ = std::thread([this] { loop(); });
}

void DailyScheduler::stop() {
  {
    std::lock_guard guard(mutex_);
    stopping_ = true;
  }
  wake_.notify_all();
  if (thread_.joinable()) thread_.join();
}

bool DailyScheduler::running() const {
  std::lock_guard guard(mutex_);
  return thread_.joinable() && !stopping_;
}

void DailyScheduler::loop() {
  std::unique_lock lock(mutex_);
  while (!stopping_) {
    const Timestamp fire = next_fire_time(now_utc(), at_, zone_);
    if (wake_.wait_until(lock, std::chrono::system_clock::time_point{fire.time_since_epoch()},
                         [this] { return stopping_; })) {
      break;
    }
    const Date target = add_days(zone_.local_date(fire), -1);
    lock.unlock();
    try {
      spdlog::info("scheduler: aggregating {}", format_date(target));
      job_(target);
    } catch (const std::exception& e) {
      spdlog::error("scheduler: aggregation for {} failed: {}", format_date(target), e.what());
    }
    lock.lock();
  }
}

}  // namespace foodwise
