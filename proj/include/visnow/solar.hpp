#pragma once

#include "visnow/time.hpp"

namespace visnow {

/// Sun elevation below which it counts as night: geometric horizon plus
/// refraction and solar semi-diameter.
inline constexpr double kNightElevationDeg = -0.833;

/// Geometric solar elevation angle in degrees (no refraction), from the
/// declination / equation-of-time series used in the NOAA solar calculator
/// (accurate to about 0.01 deg between 1900 and 2100).
double solar_elevation_deg(double lat_deg, double lon_deg, Utc t);

/// 1 iff the solar elevation is below kNightElevationDeg.
int is_night(double lat_deg, double lon_deg, Utc t);

} // namespace visnow
