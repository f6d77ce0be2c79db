#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace helio {

using Date = std::chrono::sys_days;
using Month = std::chrono::year_month;

/// A whole UTC hour, stored as hours since the Unix epoch.
class UtcHour {
 public:
  constexpr UtcHour() = default;
  constexpr explicit UtcHour(std::int64_t hours_since_epoch) : hours_(hours_since_epoch) {}
  UtcHour(Date day, int hour);

  constexpr std::int64_t hours_since_epoch() const { return hours_; }
  std::int64_t seconds_since_epoch() const { return hours_ * 3600; }

  Date day() const;
  int hour_of_day() const;
  Month month() const;

  constexpr UtcHour operator+(std::int64_t hours) const { return UtcHour(hours_ + hours); }
  constexpr UtcHour operator-(std::int64_t hours) const { return UtcHour(hours_ - hours); }
  constexpr std::int64_t operator-(UtcHour other) const { return hours_ - other.hours_; }

  constexpr auto operator<=>(const UtcHour&) const = default;

 private:
  std::int64_t hours_ = 0;
};

/// Parses `YYYY-MM-DDTHH:00:00Z`; anything else throws BadTimestamp.
UtcHour parse_timestamp(std::string_view text);
/// Parses `YYYYMMDD HH:MM` (minutes must be zero). Hour 24 rolls into the next day.
UtcHour parse_compact_timestamp(std::string_view text);
std::string format_timestamp(UtcHour t);

Date parse_date(std::string_view text);
std::string format_date(Date d);

Month parse_month(std::string_view text);
std::string format_month(Month m);
Month month_of(Date d);
Date first_day(Month m);
Date last_day(Month m);

/// 1-based day of the year.
int day_of_year(Date d);

}  // namespace helio
