#pragma once

// Synthetic station climate with a known fog rule, for end-to-end checks.
//
// Hourly temperature follows a seasonal plus diurnal cycle with red noise.
// Dewpoint depression is an independent AR(1) process whose mean is
// calibrated so that the fog trigger (RH > rh_threshold at night) fires in
// `target_prevalence` of hours. Fog appears `formation_lag_h` hours after a
// trigger hour. Label noise removes a fraction of fog hours and adds the same
// number of spurious fog hours elsewhere, so prevalence is unchanged.

#include "visnow/features.hpp"
#include "visnow/metar.hpp"
#include "visnow/time.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace visnow {

struct SyntheticConfig {
    std::string station = "SYNT";
    StationLocation location{40.64, -73.78};
    Utc start = make_utc(2019, 1, 1);
    std::size_t hours = 30000;
    int formation_lag_h = 3;
    double rh_threshold = 95.0;
    double target_prevalence = 0.08;
    double label_noise = 0.02;
    /// Chance that an hourly routine report is absent.
    double report_gap_prob = 0.01;
    /// Chance of an extra special report 20 minutes past the hour.
    double speci_prob = 0.05;
    std::uint64_t seed = 42;
};

struct SyntheticData {
    std::vector<Observation> reports;
    Hour first_hour{};
    /// Per grid hour: trigger condition and fog after noise.
    std::vector<std::uint8_t> trigger;
    std::vector<std::uint8_t> fog;
    double depression_mean = 0.0;
    double trigger_rate = 0.0;
    double fog_rate = 0.0;
    std::size_t suppressed = 0;
    std::size_t spurious = 0;
};

SyntheticData generate_synthetic(const SyntheticConfig& config = {});

} // namespace visnow
