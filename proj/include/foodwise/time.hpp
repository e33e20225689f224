#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

namespace foodwise {

using Date = std::chrono::year_month_day;
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// Calendar arithmetic on dates.
Date add_days(Date d, int days);
int days_between(Date from, Date to);

/// "YYYY-MM-DD"; throws Error(MalformedDocument) on anything else.
Date parse_date(std::string_view text);
std::string format_date(Date d);

/// "YYYY-MM"
std::chrono::year_month parse_month(std::string_view text);
std::string format_month(std::chrono::year_month ym);

/// RFC 3339. Any offset is accepted on input; output is always UTC with a
/// trailing "Z" and fractional seconds only when non-zero.
Timestamp parse_rfc3339(std::string_view text);
std::string format_rfc3339(Timestamp t);

Timestamp now_utc();

struct LocalTime {
  int hour = 0;
  int minute = 0;
  friend bool operator==(const LocalTime&, const LocalTime&) = default;
};

/// "HH:MM"
LocalTime parse_local_time(std::string_view text);

// An IANA zone. The campaign runs in exactly one of these; all calendar
// dates in the system are dates in this zone.
class CampaignZone {
 public:
  static CampaignZone load(const std::string& name);
  static CampaignZone utc();

  const std::string& name() const noexcept { return name_; }

  Date local_date(Timestamp t) const;
  Timestamp at_local(Date d, LocalTime time) const;

 private:
  struct Impl;
  CampaignZone(std::string name, std::shared_ptr<const Impl> impl);

  std::string name_;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace foodwise
