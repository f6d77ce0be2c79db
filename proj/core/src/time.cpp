#include "helio/time.hpp"

#include <charconv>
#include <cstdio>

#include "helio/error.hpp"

namespace helio {

namespace {

using namespace std::chrono;

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (text[i] < '0' || text[i] > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
  return ec == std::errc{} && ptr == text.data() + pos + len;
}

Date checked_date(int y, int m, int d, std::string_view original, ErrorCode code) {
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) raise(code, "invalid calendar date in '" + std::string(original) + "'");
  return sys_days{ymd};
}

}  // namespace

UtcHour::UtcHour(Date day, int hour)
    : hours_(static_cast<std::int64_t>(day.time_since_epoch().count()) * 24 + hour) {}

Date UtcHour::day() const {
  std::int64_t d = hours_ / 24;
  if (hours_ % 24 < 0) --d;
  return Date{days{d}};
}

int UtcHour::hour_of_day() const {
  const auto h = static_cast<int>(hours_ % 24);
  return h < 0 ? h + 24 : h;
}

Month UtcHour::month() const { return month_of(day()); }

UtcHour parse_timestamp(std::string_view text) {
  // YYYY-MM-DDTHH:00:00Z
  int y = 0, mo = 0, d = 0, h = 0;
  const bool shape = text.size() == 20 && text[4] == '-' && text[7] == '-' && text[10] == 'T' &&
                     text.substr(13) == ":00:00Z";
  if (!shape || !read_int(text, 0, 4, y) || !read_int(text, 5, 2, mo) || !read_int(text, 8, 2, d) ||
      !read_int(text, 11, 2, h) || h > 23) {
    raise(ErrorCode::BadTimestamp, "expected YYYY-MM-DDTHH:00:00Z, got '" + std::string(text) + "'");
  }
  return UtcHour(checked_date(y, mo, d, text, ErrorCode::BadTimestamp), h);
}

UtcHour parse_compact_timestamp(std::string_view text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0;
  const bool shape = text.size() == 14 && text[8] == ' ' && text[11] == ':';
  if (!shape || !read_int(text, 0, 4, y) || !read_int(text, 4, 2, mo) || !read_int(text, 6, 2, d) ||
      !read_int(text, 9, 2, h) || !read_int(text, 12, 2, mi) || mi != 0 || h > 24) {
    raise(ErrorCode::BadTimestamp, "expected YYYYMMDD HH:00, got '" + std::string(text) + "'");
  }
  return UtcHour(checked_date(y, mo, d, text, ErrorCode::BadTimestamp), 0) + h;
}

std::string format_timestamp(UtcHour t) {
  const year_month_day ymd{t.day()};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:00:00Z", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), t.hour_of_day());
  return buf;
}

Date parse_date(std::string_view text) {
  int y = 0, mo = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !read_int(text, 0, 4, y) ||
      !read_int(text, 5, 2, mo) || !read_int(text, 8, 2, d)) {
    raise(ErrorCode::BadConfig, "expected YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  return checked_date(y, mo, d, text, ErrorCode::BadConfig);
}

std::string format_date(Date d) {
  const year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

Month parse_month(std::string_view text) {
  int y = 0, mo = 0;
  if (text.size() != 7 || text[4] != '-' || !read_int(text, 0, 4, y) || !read_int(text, 5, 2, mo) ||
      mo < 1 || mo > 12) {
    raise(ErrorCode::BadConfig, "expected YYYY-MM, got '" + std::string(text) + "'");
  }
  return Month{year{y}, month{static_cast<unsigned>(mo)}};
}

std::string format_month(Month m) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(m.year()), static_cast<unsigned>(m.month()));
  return buf;
}

Month month_of(Date d) {
  const year_month_day ymd{d};
  return Month{ymd.year(), ymd.month()};
}

Date first_day(Month m) { return sys_days{m / day{1}}; }

Date last_day(Month m) { return sys_days{m / last}; }

int day_of_year(Date d) {
  const year_month_day ymd{d};
  const Date jan1 = sys_days{ymd.year() / January / day{1}};
  return static_cast<int>((d - jan1).count()) + 1;
}

}  // namespace helio
