#include "visnow/solar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace visnow {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double wrap360(double x) {
    x = std::fmod(x, 360.0);
    return x < 0 ? x + 360.0 : x;
}

} // namespace

double solar_elevation_deg(double lat_deg, double lon_deg, Utc t) {
    using namespace std::chrono;
    const double unix_minutes = double(t.time_since_epoch().count());
    const double jd = unix_minutes / 1440.0 + 2440587.5;
    const double jc = (jd - 2451545.0) / 36525.0;

    const double mean_long = wrap360(280.46646 + jc * (36000.76983 + jc * 0.0003032));
    const double mean_anom = 357.52911 + jc * (35999.05029 - 0.0001537 * jc);
    const double ecc = 0.016708634 - jc * (0.000042037 + 0.0000001267 * jc);
    const double center = std::sin(mean_anom * kDeg) * (1.914602 - jc * (0.004817 + 0.000014 * jc)) +
                          std::sin(2 * mean_anom * kDeg) * (0.019993 - 0.000101 * jc) +
                          std::sin(3 * mean_anom * kDeg) * 0.000289;
    const double true_long = mean_long + center;
    const double omega = 125.04 - 1934.136 * jc;
    const double app_long = true_long - 0.00569 - 0.00478 * std::sin(omega * kDeg);
    const double obliq0 = 23.0 + (26.0 + (21.448 - jc * (46.815 + jc * (0.00059 - jc * 0.001813))) / 60.0) / 60.0;
    const double obliq = obliq0 + 0.00256 * std::cos(omega * kDeg);
    const double decl = std::asin(std::sin(obliq * kDeg) * std::sin(app_long * kDeg));

    const double y = std::pow(std::tan(obliq * kDeg / 2), 2);
    const double l0 = mean_long * kDeg, m = mean_anom * kDeg;
    const double eot_min = 4.0 / kDeg *
                           (y * std::sin(2 * l0) - 2 * ecc * std::sin(m) + 4 * ecc * y * std::sin(m) * std::cos(2 * l0) -
                            0.5 * y * y * std::sin(4 * l0) - 1.25 * ecc * ecc * std::sin(2 * m));

    const double minute_of_day = std::fmod(unix_minutes, 1440.0);
    const double true_solar = std::fmod(minute_of_day + eot_min + 4.0 * lon_deg + 2880.0, 1440.0);
    const double hour_angle = true_solar / 4.0 - 180.0;

    const double lat = lat_deg * kDeg;
    double cos_zen = std::sin(lat) * std::sin(decl) + std::cos(lat) * std::cos(decl) * std::cos(hour_angle * kDeg);
    cos_zen = std::clamp(cos_zen, -1.0, 1.0);
    return 90.0 - std::acos(cos_zen) / kDeg;
}

int is_night(double lat_deg, double lon_deg, Utc t) {
    return solar_elevation_deg(lat_deg, lon_deg, t) < kNightElevationDeg ? 1 : 0;
}

} // namespace visnow
