#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace infodemic {

using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::year_month_day;

// Accepts ISO-8601 ("2020-03-15", "2020-03-15T10:00:00Z",
// "2020-03-15 10:00:00+05:30", fractional seconds allowed) and the classic
// Twitter format ("Wed Oct 10 20:19:24 +0000 2018"). Offsets are applied so
// the result is always UTC.
std::optional<Timestamp> parse_timestamp(std::string_view text);

// "YYYY-MM-DD" or "YYYY-MM" (taken as the first of the month).
std::optional<Date> parse_date(std::string_view text);

std::string format_timestamp(Timestamp ts);  // YYYY-MM-DDTHH:MM:SSZ
std::string format_date(Date d);             // YYYY-MM-DD
std::string format_month(Date d);            // YYYY-MM

inline Date to_date(Timestamp ts) { return Date{std::chrono::floor<std::chrono::days>(ts)}; }

inline Date first_of_month(Date d) { return d.year() / d.month() / std::chrono::day{1}; }

}  // namespace infodemic
