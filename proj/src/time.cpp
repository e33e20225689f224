#include "foodwise/time.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include <absl/time/civil_time.h>
#include <absl/time/time.h>

#include "foodwise/error.hpp"

namespace foodwise {

namespace chr = std::chrono;

namespace {

bool parse_fixed_int(std::string_view text, int& out) {
  if (text.empty()) return false;
  for (char c : text) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

absl::Time to_absl(Timestamp t) {
  return absl::FromUnixMillis(t.time_since_epoch().count());
}

Timestamp from_absl(absl::Time t) {
  return Timestamp{chr::milliseconds{absl::ToUnixMillis(t)}};
}

absl::CivilDay to_civil(Date d) {
  return absl::CivilDay(static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                        static_cast<unsigned>(d.day()));
}

Date from_civil(absl::CivilDay d) {
  return Date{chr::year{static_cast<int>(d.year())}, chr::month{static_cast<unsigned>(d.month())},
              chr::day{static_cast<unsigned>(d.day())}};
}

}  // namespace

Date add_days(Date d, int days) { return Date{chr::sys_days{d} + chr::days{days}}; }

int days_between(Date from, Date to) {
  return static_cast<int>((chr::sys_days{to} - chr::sys_days{from}).count());
}

Date parse_date(std::string_view text) {
  int y = 0, m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
      !parse_fixed_int(text.substr(0, 4), y) || !parse_fixed_int(text.substr(5, 2), m) ||
      !parse_fixed_int(text.substr(8, 2), d)) {
    throw Error(Errc::MalformedDocument, "expected a YYYY-MM-DD date, got '" + std::string(text) + "'");
  }
  Date date{chr::year{y}, chr::month{static_cast<unsigned>(m)}, chr::day{static_cast<unsigned>(d)}};
  if (!date.ok()) {
    throw Error(Errc::MalformedDocument, "no such calendar date '" + std::string(text) + "'");
  }
  return date;
}

std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

chr::year_month parse_month(std::string_view text) {
  int y = 0, m = 0;
  if (text.size() != 7 || text[4] != '-' || !parse_fixed_int(text.substr(0, 4), y) ||
      !parse_fixed_int(text.substr(5, 2), m)) {
    throw Error(Errc::MalformedDocument, "expected a YYYY-MM month, got '" + std::string(text) + "'");
  }
  chr::year_month ym{chr::year{y}, chr::month{static_cast<unsigned>(m)}};
  if (!ym.ok()) throw Error(Errc::MalformedDocument, "no such month '" + std::string(text) + "'");
  return ym;
}

std::string format_month(chr::year_month ym) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(ym.year()),
                static_cast<unsigned>(ym.month()));
  return buf;
}

Timestamp parse_rfc3339(std::string_view text) {
  absl::Time t;
  std::string err;
  // absl accepts a few things RFC 3339 does not; require the date-time shape.
  if (text.size() < 20 || (text[10] != 'T' && text[10] != 't') ||
      !absl::ParseTime(absl::RFC3339_full, std::string(text), &t, &err)) {
    throw Error(Errc::MalformedDocument, "bad RFC 3339 timestamp '" + std::string(text) + "'");
  }
  return from_absl(t);
}

std::string format_rfc3339(Timestamp t) {
  return absl::FormatTime("%Y-%m-%dT%H:%M:%E*SZ", to_absl(t), absl::UTCTimeZone());
}

Timestamp now_utc() { return chr::time_point_cast<chr::milliseconds>(chr::system_clock::now()); }

LocalTime parse_local_time(std::string_view text) {
  int h = 0, m = 0;
  if (text.size() != 5 || text[2] != ':' || !parse_fixed_int(text.substr(0, 2), h) ||
      !parse_fixed_int(text.substr(3, 2), m) || h > 23 || m > 59) {
    throw Error(Errc::MalformedDocument, "expected HH:MM, got '" + std::string(text) + "'");
  }
  return {h, m};
}

struct CampaignZone::Impl {
  absl::TimeZone tz;
};

CampaignZone::CampaignZone(std::string name, std::shared_ptr<const Impl> impl)
    : name_(std::move(name)), impl_(std::move(impl)) {}

CampaignZone CampaignZone::load(const std::string& name) {
  absl::TimeZone tz;
  if (!absl::LoadTimeZone(name, &tz)) {
    throw Error(Errc::InvalidTimezone, "unknown time zone '" + name + "'", name);
  }
  return CampaignZone(name, std::make_shared<const Impl>(Impl{tz}));
}

CampaignZone CampaignZone::utc() {
  return CampaignZone("UTC", std::make_shared<const Impl>(Impl{absl::UTCTimeZone()}));
}

Date CampaignZone::local_date(Timestamp t) const {
  return from_civil(absl::ToCivilDay(to_absl(t), impl_->tz));
}

Timestamp CampaignZone::at_local(Date d, LocalTime time) const {
  const absl::CivilDay day = to_civil(d);
  const absl::CivilMinute minute(day.year(), day.month(), day.day(), time.hour, time.minute);
  return from_absl(absl::FromCivil(minute, impl_->tz));
}

}  // namespace foodwise
