#pragma once

#include <charconv>
#include <compare>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace qtypology {

// Proleptic Gregorian calendar date. Ordering and day arithmetic go through
// a serial day number (days since 1970-01-01).
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  friend auto operator<=>(const Date&, const Date&) = default;

  long serial() const {
    const int y = year - (month <= 2 ? 1 : 0);
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned mp = static_cast<unsigned>(month + (month > 2 ? -3 : 9));
    const unsigned doy = (153 * mp + 2) / 5 + static_cast<unsigned>(day) - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
  }

  static Date from_serial(long z) {
    z += 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    Date d;
    d.day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    d.month = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    d.year = static_cast<int>(static_cast<long>(yoe) + era * 400 + (d.month <= 2 ? 1 : 0));
    return d;
  }

  Date plus_days(long n) const { return from_serial(serial() + n); }

  std::string iso() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
    return buf;
  }

  // Accepts YYYY-MM-DD, optionally followed by a time part ("T..." or " ...").
  static std::optional<Date> parse(std::string_view s) {
    if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (s.size() > 10 && s[10] != 'T' && s[10] != ' ') return std::nullopt;
    Date d;
    auto num = [&](std::size_t pos, std::size_t len, int& out) {
      auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
      return ec == std::errc{} && p == s.data() + pos + len;
    };
    if (!num(0, 4, d.year) || !num(5, 2, d.month) || !num(8, 2, d.day)) return std::nullopt;
    if (d.month < 1 || d.month > 12 || d.day < 1) return std::nullopt;
    if (from_serial(d.serial()) != d) return std::nullopt;  // e.g. 2001-02-30
    return d;
  }
};

// Whole years elapsed from `from` to `to` (floor); negative if `to` < `from`.
inline int whole_years_between(const Date& from, const Date& to) {
  int years = to.year - from.year;
  if (std::pair(to.month, to.day) < std::pair(from.month, from.day)) --years;
  return years;
}

}  // namespace qtypology
