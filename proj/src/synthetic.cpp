#include "visnow/synthetic.hpp"

#include "visnow/solar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>

namespace visnow {

using namespace std::chrono;

namespace {

constexpr double kDepressionPhi = 0.7;
constexpr double kDepressionSigma = 2.5;
constexpr double kTempPhi = 0.95;
constexpr double kTempSigma = 0.8;
constexpr double kPressurePhi = 0.99;
constexpr double kPressureSigma = 0.8;

double round1(double v) { return std::round(v * 10.0) / 10.0; }

std::string temp_group(double t) {
    long v = std::lround(t);
    char buf[24];
    std::snprintf(buf, sizeof buf, "%s%02ld", v < 0 ? "M" : "", std::labs(v));
    return buf;
}

std::string format_vis(double sm) {
    static constexpr std::pair<double, const char*> kForms[] = {
        {0.125, "1/8SM"}, {0.25, "1/4SM"}, {0.5, "1/2SM"}, {0.75, "3/4SM"}, {1.5, "1 1/2SM"}, {2.5, "2 1/2SM"}};
    for (auto [v, s] : kForms)
        if (v == sm) return s;
    return std::to_string(std::lround(sm)) + "SM";
}

struct Hourly {
    double temp, depression_noise, pressure, wind_dir, wind_speed;
    bool pressure_missing;
    int night;
};

} // namespace

SyntheticData generate_synthetic(const SyntheticConfig& cfg) {
    if (cfg.hours == 0) throw std::invalid_argument("synthetic series needs at least one hour");
    if (!(cfg.target_prevalence > 0 && cfg.target_prevalence < 0.5))
        throw std::invalid_argument("target prevalence must be in (0, 0.5)");
    if (!(cfg.label_noise >= 0 && cfg.label_noise < 0.5)) throw std::invalid_argument("label noise must be in [0, 0.5)");
    if (cfg.formation_lag_h < 0) throw std::invalid_argument("formation lag must be >= 0");

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = cfg.hours;
    const Hour h0 = floor<hours>(cfg.start);
    const double lat = cfg.location.lat_deg, lon = cfg.location.lon_deg;

    std::vector<Hourly> hv(n);
    double t_anom = 0.0, z = 0.0, p_anom = 0.0;
    const double z_sd = kDepressionSigma / std::sqrt(1 - kDepressionPhi * kDepressionPhi);
    z = z_sd * normal(rng);
    for (std::size_t i = 0; i < n; ++i) {
        Hour h = h0 + hours{i};
        auto day = floor<days>(h);
        double doy = double((day - floor<days>(sys_days{year_month_day{day}.year() / January / 1})).count());
        double season_phase = lat >= 0 ? doy - 200.0 : doy - 17.0;
        double seasonal = 10.0 + 12.0 * std::cos(2 * std::numbers::pi * season_phase / 365.25);
        double local_hour = std::fmod(double((h - day).count()) + lon / 15.0 + 48.0, 24.0);
        double diurnal = 5.0 * std::cos(2 * std::numbers::pi * (local_hour - 15.0) / 24.0);
        t_anom = kTempPhi * t_anom + kTempSigma * normal(rng);
        z = kDepressionPhi * z + kDepressionSigma * normal(rng);
        p_anom = kPressurePhi * p_anom + kPressureSigma * normal(rng);
        Hourly& x = hv[i];
        x.temp = round1(seasonal + diurnal + t_anom);
        x.depression_noise = z;
        x.pressure = round1(1013.0 + p_anom);
        x.pressure_missing = unit(rng) < 0.02;
        x.wind_speed = double(std::uniform_int_distribution<int>(0, 20)(rng));
        x.wind_dir = double(std::uniform_int_distribution<int>(0, 35)(rng) * 10);
        x.night = is_night(lat, lon, Utc{h});
    }

    auto triggers_for = [&](double mean, std::vector<std::uint8_t>* out) {
        std::size_t count = 0;
        if (out) out->assign(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            double dep = round1(std::max(0.0, mean + hv[i].depression_noise));
            auto rh = relative_humidity(hv[i].temp, hv[i].temp - dep);
            bool on = hv[i].night && rh && *rh > cfg.rh_threshold;
            count += on;
            if (out) (*out)[i] = on;
        }
        return double(count) / double(n);
    };
    // Trigger rate falls monotonically as the mean depression grows.
    double lo = -10.0, hi = 30.0;
    for (int it = 0; it < 60; ++it) {
        double mid = (lo + hi) / 2;
        (triggers_for(mid, nullptr) > cfg.target_prevalence ? lo : hi) = mid;
    }
    SyntheticData out;
    out.first_hour = h0;
    out.depression_mean = (lo + hi) / 2;
    out.trigger_rate = triggers_for(out.depression_mean, &out.trigger);

    out.fog.assign(n, 0);
    for (std::size_t i = std::size_t(cfg.formation_lag_h); i < n; ++i)
        out.fog[i] = out.trigger[i - std::size_t(cfg.formation_lag_h)];
    std::vector<std::size_t> events, quiet;
    for (std::size_t i = 0; i < n; ++i) (out.fog[i] ? events : quiet).push_back(i);
    std::size_t flips = std::size_t(std::lround(cfg.label_noise * double(events.size())));
    flips = std::min({flips, events.size(), quiet.size()});
    std::shuffle(events.begin(), events.end(), rng);
    std::shuffle(quiet.begin(), quiet.end(), rng);
    for (std::size_t k = 0; k < flips; ++k) {
        out.fog[events[k]] = 0;
        out.fog[quiet[k]] = 1;
    }
    out.suppressed = out.spurious = flips;
    std::size_t fog_hours = 0;
    for (auto f : out.fog) fog_hours += f;
    out.fog_rate = double(fog_hours) / double(n);

    static constexpr double kFogVis[] = {0.125, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5};
    static constexpr double kHazeVis[] = {3.0, 4.0, 5.0, 6.0, 7.0};
    for (std::size_t i = 0; i < n; ++i) {
        const Hourly& x = hv[i];
        Hour h = h0 + hours{i};
        double dep = round1(std::max(0.0, out.depression_mean + x.depression_noise));
        Observation obs;
        obs.station = cfg.station;
        obs.temp_c = x.temp;
        obs.dewpoint_c = round1(x.temp - dep);
        if (x.wind_speed > 0) obs.wind_dir_deg = x.wind_dir;
        obs.wind_speed_kt = x.wind_speed;
        if (!x.pressure_missing) obs.pressure_hpa = x.pressure;
        if (out.fog[i]) {
            double v = kFogVis[std::uniform_int_distribution<int>(0, 7)(rng)];
            obs.visibility_sm = v;
            obs.wx_codes = {v < 0.625 ? "FG" : "BR"};
        } else if (unit(rng) < 0.2) {
            obs.visibility_sm = kHazeVis[std::uniform_int_distribution<int>(0, 4)(rng)];
            obs.wx_codes = {"HZ"};
        } else {
            obs.visibility_sm = 10.0;
        }
        char wind[16];
        if (!obs.wind_dir_deg)
            std::snprintf(wind, sizeof wind, "00000KT");
        else
            std::snprintf(wind, sizeof wind, "%03d%02dKT", x.wind_dir == 0 ? 360 : int(x.wind_dir), int(x.wind_speed));
        auto make_raw = [&](Utc t) {
            year_month_day ymd{floor<days>(t)};
            hh_mm_ss hms{t - floor<days>(t)};
            char stamp[16];
            std::snprintf(stamp, sizeof stamp, "%02u%02d%02dZ", unsigned(ymd.day()), int(hms.hours().count()),
                          int(hms.minutes().count()));
            std::string raw = cfg.station + " " + stamp + " " + wind + " " + format_vis(*obs.visibility_sm);
            for (const auto& w : obs.wx_codes) raw += " " + w;
            raw += " " + temp_group(*obs.temp_c) + "/" + temp_group(*obs.dewpoint_c);
            if (obs.pressure_hpa) raw += " Q" + std::to_string(std::lround(*obs.pressure_hpa));
            return raw;
        };
        bool gap = unit(rng) < cfg.report_gap_prob;
        bool speci = unit(rng) < cfg.speci_prob;
        if (!gap) {
            obs.time = Utc{h} - minutes{9};
            obs.raw = make_raw(obs.time);
            out.reports.push_back(obs);
        }
        if (speci) {
            obs.time = Utc{h} + minutes{20};
            obs.raw = "SPECI " + make_raw(obs.time);
            out.reports.push_back(obs);
        }
    }
    return out;
}

} // namespace visnow
