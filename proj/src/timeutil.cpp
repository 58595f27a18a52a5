#include "infodemic/timeutil.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace infodemic {
namespace {

using namespace std::chrono;

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return ec == std::errc{} && ptr == s.data() + pos + len;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

std::optional<sys_days> make_days(int y, int m, int d) {
  year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  return sys_days{ymd};
}

bool valid_clock(int hh, int mm, int ss) {
  return hh >= 0 && hh <= 23 && mm >= 0 && mm <= 59 && ss >= 0 && ss <= 60;
}

// Parses "+HHMM", "+HH:MM", "Z"; returns the offset east of UTC in seconds.
std::optional<int> parse_offset(std::string_view s) {
  if (s.empty()) return 0;
  if (s == "Z" || s == "z") return 0;
  if (s[0] != '+' && s[0] != '-') return std::nullopt;
  int sign = s[0] == '-' ? -1 : 1;
  s.remove_prefix(1);
  int hh = 0, mm = 0;
  if (s.size() == 4) {
    if (!read_int(s, 0, 2, hh) || !read_int(s, 2, 2, mm)) return std::nullopt;
  } else if (s.size() == 5 && s[2] == ':') {
    if (!read_int(s, 0, 2, hh) || !read_int(s, 3, 2, mm)) return std::nullopt;
  } else if (s.size() == 2) {
    if (!read_int(s, 0, 2, hh)) return std::nullopt;
  } else {
    return std::nullopt;
  }
  if (hh > 23 || mm > 59) return std::nullopt;
  return sign * (hh * 3600 + mm * 60);
}

std::optional<Timestamp> parse_iso(std::string_view s) {
  int y, mo, d;
  if (!read_int(s, 0, 4, y) || s.size() < 10 || s[4] != '-' || !read_int(s, 5, 2, mo) || s[7] != '-' ||
      !read_int(s, 8, 2, d))
    return std::nullopt;
  auto days = make_days(y, mo, d);
  if (!days) return std::nullopt;
  if (s.size() == 10) return Timestamp{*days};
  if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
  int hh, mi, ss = 0;
  if (!read_int(s, 11, 2, hh) || s.size() < 16 || s[13] != ':' || !read_int(s, 14, 2, mi))
    return std::nullopt;
  std::size_t pos = 16;
  if (pos < s.size() && s[pos] == ':') {
    if (!read_int(s, 17, 2, ss)) return std::nullopt;
    pos = 19;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      std::size_t start = pos;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
      if (pos == start) return std::nullopt;
    }
  }
  if (!valid_clock(hh, mi, ss)) return std::nullopt;
  auto offset = parse_offset(s.substr(pos));
  if (!offset) return std::nullopt;
  return Timestamp{*days} + hours{hh} + minutes{mi} + seconds{ss} - seconds{*offset};
}

// "Wed Oct 10 20:19:24 +0000 2018"
std::optional<Timestamp> parse_twitter(std::string_view s) {
  static constexpr std::array<std::string_view, 12> kMonths = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                               "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  if (s.size() != 30 || s[3] != ' ' || s[7] != ' ' || s[10] != ' ' || s[19] != ' ' || s[25] != ' ')
    return std::nullopt;
  int mo = 0;
  for (std::size_t i = 0; i < kMonths.size(); ++i) {
    if (s.substr(4, 3) == kMonths[i]) mo = static_cast<int>(i) + 1;
  }
  int d, hh, mi, ss, y;
  if (mo == 0 || !read_int(s, 8, 2, d) || !read_int(s, 11, 2, hh) || s[13] != ':' || !read_int(s, 14, 2, mi) ||
      s[16] != ':' || !read_int(s, 17, 2, ss) || !read_int(s, 26, 4, y))
    return std::nullopt;
  auto days = make_days(y, mo, d);
  auto offset = parse_offset(s.substr(20, 5));
  if (!days || !offset || !valid_clock(hh, mi, ss)) return std::nullopt;
  return Timestamp{*days} + hours{hh} + minutes{mi} + seconds{ss} - seconds{*offset};
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text[0] >= '0' && text[0] <= '9') return parse_iso(text);
  return parse_twitter(text);
}

std::optional<Date> parse_date(std::string_view text) {
  text = trim(text);
  int y, m, d = 1;
  if (!read_int(text, 0, 4, y) || text.size() < 7 || text[4] != '-' || !read_int(text, 5, 2, m))
    return std::nullopt;
  if (text.size() == 10) {
    if (text[7] != '-' || !read_int(text, 8, 2, d)) return std::nullopt;
  } else if (text.size() != 7) {
    return std::nullopt;
  }
  auto days = make_days(y, m, d);
  if (!days) return std::nullopt;
  return Date{*days};
}

std::string format_timestamp(Timestamp ts) {
  auto days = floor<std::chrono::days>(ts);
  year_month_day ymd{days};
  hh_mm_ss hms{ts - days};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

std::string format_date(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

std::string format_month(Date d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()));
  return buf;
}

}  // namespace infodemic
