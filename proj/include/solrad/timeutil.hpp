#pragma once

// UTC instants and ISO-8601 text handling.

#include <chrono>
#include <string>
#include <string_view>

namespace solrad {

using UtcInstant = std::chrono::sys_seconds;

/// Parses `YYYY-MM-DDTHH:MM:SS` followed by `Z` or `+HH:MM` / `-HH:MM`.
/// A missing offset is a parse error; local times are never guessed.
UtcInstant parse_iso8601(std::string_view text);

/// `YYYY-MM-DDTHH:MM:SSZ`
std::string format_iso8601_utc(UtcInstant t);

/// Renders the instant as local clock time at the given offset, with the
/// offset spelled out (`-05:00`). Offsets must be whole minutes.
std::string format_iso8601_offset(UtcInstant t, double utc_offset_hours);

/// Parses `YYYY-MM-DD`.
std::chrono::year_month_day parse_date(std::string_view text);
std::string format_date(std::chrono::year_month_day date);

/// Local clock time (timestamp shifted by the offset) expressed as a
/// sys_seconds value whose calendar fields are the local ones.
std::chrono::sys_seconds to_local_clock(UtcInstant t, double utc_offset_hours);

/// 1-based day of year.
int day_of_year(std::chrono::year_month_day date);

/// Hours since local midnight in [0, 24).
double clock_hour(std::chrono::sys_seconds local_clock);

}  // namespace solrad
