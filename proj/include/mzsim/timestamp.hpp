#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace mzsim {

/// Local standard time of the site, second resolution. No daylight saving.
using Timestamp = std::chrono::sys_seconds;

/// Accepts "YYYY-MM-DDTHH:MM[:SS]" or the same with a space separator.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

/// 1-based day of year.
int day_of_year(Timestamp t);
double hours_of_day(Timestamp t);
int month_index(Timestamp t);  // 0..11

}  // namespace mzsim
