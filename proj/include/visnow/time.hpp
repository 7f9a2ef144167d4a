#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace visnow {

/// UTC instant at minute precision.
using Utc = std::chrono::sys_time<std::chrono::minutes>;
/// UTC instant truncated to the hour; the grid unit of an hourly series.
using Hour = std::chrono::sys_time<std::chrono::hours>;

/// Build a UTC instant from calendar fields. No validation beyond what
/// std::chrono performs; callers check ranges.
Utc make_utc(int year, unsigned month, unsigned day, int hour = 0, int minute = 0);

/// "2024-06-21T06:00Z"
std::string format_utc(Utc t);
std::string format_hour(Hour h);
/// "2024-06-21"
std::string format_date(std::chrono::sys_days d);

/// Accepts "YYYY-MM-DD HH:MM", "YYYY-MM-DDTHH:MM[:SS][Z]" and "YYYY-MM-DD".
std::optional<Utc> parse_utc(std::string_view text);
std::optional<std::chrono::sys_days> parse_date(std::string_view text);

/// Nearest grid hour to t; exact half hours round down.
Hour nearest_hour(Utc t);

/// Resolve a day-of-month plus time of day (as found in METAR/TAF groups)
/// to the latest matching instant not later than `reference + slack`.
/// Returns nullopt for impossible day/hour/minute values.
std::optional<Utc> resolve_day_time(unsigned day, int hour, int minute, Utc reference,
                                    std::chrono::minutes slack = std::chrono::hours{24});

} // namespace visnow
