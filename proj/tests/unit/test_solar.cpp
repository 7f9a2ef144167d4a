#include "visnow/solar.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace visnow;
using namespace std::chrono;

TEST_CASE("elevation agrees with the almanac algorithm") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> lat(-89.0, 89.0), lon(-180.0, 180.0);
    const auto first = sys_days{2000y / 1 / 1}, last = sys_days{2040y / 12 / 31};
    for (int i = 0; i < 5000; ++i) {
        auto day = first + days{long(rng() % std::uint64_t((last - first).count()))};
        Utc t = Utc{day} + minutes{long(rng() % 1440)};
        double la = lat(rng), lo = lon(rng);
        CAPTURE(format_utc(t));
        CAPTURE(la);
        CAPTURE(lo);
        CHECK(std::abs(solar_elevation_deg(la, lo, t) - oracle::almanac_elevation_deg(la, lo, t)) < 0.1);
    }
}

TEST_CASE("equator at the equinox") {
    CHECK(is_night(0.0, 0.0, make_utc(2024, 3, 20, 12)) == 0);
    CHECK(is_night(0.0, 0.0, make_utc(2024, 3, 20, 0)) == 1);
    CHECK(solar_elevation_deg(0.0, 0.0, make_utc(2024, 3, 20, 12)) > 85.0);
    // Local solar noon moves with longitude.
    CHECK(is_night(0.0, 90.0, make_utc(2024, 3, 20, 6)) == 0);
    CHECK(is_night(0.0, 90.0, make_utc(2024, 3, 20, 18)) == 1);
}

TEST_CASE("Santiago on the June solstice") {
    // Sunrise about 11:46Z, sunset about 21:53Z.
    const double lat = -33.45, lon = -70.67;
    CHECK(is_night(lat, lon, make_utc(2024, 6, 21, 6)) == 1);
    CHECK(is_night(lat, lon, make_utc(2024, 6, 21, 11, 20)) == 1);
    CHECK(is_night(lat, lon, make_utc(2024, 6, 21, 12, 10)) == 0);
    CHECK(is_night(lat, lon, make_utc(2024, 6, 21, 16)) == 0);
    CHECK(is_night(lat, lon, make_utc(2024, 6, 21, 21, 30)) == 0);
    CHECK(is_night(lat, lon, make_utc(2024, 6, 21, 22, 15)) == 1);
}

TEST_CASE("polar day and night") {
    CHECK(is_night(78.2, 15.6, make_utc(2024, 6, 21, 0)) == 0);
    CHECK(is_night(78.2, 15.6, make_utc(2024, 12, 21, 12)) == 1);
}

TEST_CASE("night threshold sits below the geometric horizon") {
    // Find a moment with elevation just below zero but above the threshold.
    const double lat = 40.64, lon = -73.78;
    Utc t = make_utc(2024, 1, 10, 21);
    while (solar_elevation_deg(lat, lon, t) > -0.4) t += minutes{1};
    CHECK(solar_elevation_deg(lat, lon, t) > kNightElevationDeg);
    CHECK(is_night(lat, lon, t) == 0);
}
