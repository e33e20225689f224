#pragma once

#include <memory>
#include <string>

#include "foodwise/config.hpp"
#include "foodwise/daily_job.hpp"
#include "foodwise/repository.hpp"

namespace foodwise {

// The HTTP/1.1 JSON API.
//
//   POST /api/register            {email, display_name, password}
//   POST /api/login               {email, password} -> {token}
//   POST /api/records             multipart: photo + rice/meat/vegetables
//   GET  /api/records?from=&to=
//   GET  /api/media/{key}
//   GET  /api/overview
//   GET  /api/badges
//   GET  /api/dashboard/daily?date=YYYY-MM-DD
//   GET  /api/dashboard/monthly?month=YYYY-MM
//   GET  /api/dashboard/tips
//   POST /api/admin/trays         JSON array of tray documents
//   POST /api/admin/aggregate     {date}
//   GET  /healthz
//
// Authenticated routes take "Authorization: Bearer <token>". Admin routes
// accept the configured admin token or a session of an admin email.
class Service {
 public:
  Service(ServiceConfig config, Repository& repo, Clock clock = now_utc);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Port 0 picks a free port. Returns the bound port; throws Error(PortInUse).
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void listen();
  /// listen() on a background thread; returns once the server accepts.
  void start();
  void stop();

  int port() const noexcept;
  DailyJob& daily_job() noexcept;
  const ServiceConfig& config() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace foodwise
