#pragma once

#include "visnow/time.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace visnow {

inline constexpr double kMetersPerStatuteMile = 1609.344;
inline constexpr double kHpaPerInHg = 33.8639;
/// "9999", "CAVOK" and "P6SM" all decode to 10 km expressed in statute miles.
inline constexpr double kUnlimitedVisibilitySm = 10000.0 / kMetersPerStatuteMile;
inline constexpr double kMinPlausiblePressureHpa = 850.0;
inline constexpr double kMaxPlausiblePressureHpa = 1100.0;

/// One decoded surface report. Absent groups stay nullopt.
struct Observation {
    std::string station;
    Utc time{};
    std::optional<double> wind_dir_deg;   // [0, 360); missing for VRB and calm
    std::optional<double> wind_speed_kt;
    std::optional<double> wind_gust_kt;
    std::optional<double> visibility_sm;
    std::optional<double> temp_c;
    std::optional<double> dewpoint_c;
    std::optional<double> pressure_hpa;
    std::vector<std::string> wx_codes;
    std::string raw;
    /// Groups that were recognised but not used (sky, RVR, variable wind
    /// sector) and groups that were not recognised at all.
    std::vector<std::string> diagnostics;
    /// The wind token exactly as it appeared in the report, if any.
    std::string wind_token;
};

enum class VisibilityConvention { meters, statute };

/// Convert a single visibility group to statute miles. `token` may contain
/// the whole-plus-fraction form "1 1/2SM". Throws UnparseableVisibility.
double normalize_visibility(std::string_view token, VisibilityConvention convention);

/// Decode one METAR/SPECI report. The day-of-month in the report is resolved
/// against `reference` (normally the archive timestamp). Throws
/// MalformedReport if the station or time group is missing.
Observation parse_metar(std::string_view raw, Utc reference);

/// Same, resolving the report day against the current system clock.
Observation parse_metar(std::string_view raw);

/// Re-encode the decoded wind as a METAR wind group ("31015KT", "VRB03KT",
/// "00000KT"). Returns empty if no wind was decoded.
std::string encode_wind(const Observation& obs);

} // namespace visnow
