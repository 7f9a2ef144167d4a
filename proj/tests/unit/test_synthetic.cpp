#include "visnow/metar.hpp"
#include "visnow/series.hpp"
#include "visnow/solar.hpp"
#include "visnow/synthetic.hpp"

#include <doctest.h>

#include <cmath>

using namespace visnow;
using namespace std::chrono;

namespace {

SyntheticConfig small(std::uint64_t seed = 42) {
    SyntheticConfig c;
    c.hours = 8000;
    c.seed = seed;
    return c;
}

} // namespace

TEST_CASE("trigger prevalence is calibrated and noise preserves it") {
    auto c = small();
    auto d = generate_synthetic(c);
    CHECK(d.trigger.size() == c.hours);
    CHECK(std::abs(d.trigger_rate - 0.08) < 0.005);
    std::size_t events = 0;
    for (auto f : d.fog) events += f;
    CHECK(d.fog_rate == doctest::Approx(double(events) / double(c.hours)));
    CHECK(std::abs(d.fog_rate - d.trigger_rate) < 0.002);
    CHECK(d.suppressed == d.spurious);
    CHECK(double(d.suppressed) == doctest::Approx(0.02 * double(events)).epsilon(0.05));
}

TEST_CASE("triggers follow the rule exactly") {
    auto c = small();
    auto d = generate_synthetic(c);
    auto series = downsample_hourly(d.reports);
    std::size_t checked = 0;
    for (std::size_t i = 0; i < c.hours; ++i) {
        Hour h = d.first_hour + hours{i};
        const HourRow* row = series.at(h);
        if (!row || !row->report_time) continue;
        auto rh = relative_humidity(row->get(Field::temp), row->get(Field::dewpoint));
        REQUIRE(rh);
        bool expect = *rh > c.rh_threshold && is_night(c.location.lat_deg, c.location.lon_deg, Utc{h});
        // The hourly row is the report at H-9 min, which carries hour H's values.
        CHECK(bool(d.trigger[i]) == expect);
        ++checked;
    }
    CHECK(checked > c.hours * 9 / 10);
}

TEST_CASE("fog follows triggers after the formation lag, apart from noise") {
    auto c = small();
    auto d = generate_synthetic(c);
    std::size_t differ = 0;
    for (std::size_t i = std::size_t(c.formation_lag_h); i < c.hours; ++i)
        differ += d.fog[i] != d.trigger[i - std::size_t(c.formation_lag_h)];
    CHECK(differ == d.suppressed + d.spurious);
    // Fog hours report IFR, others do not.
    for (const auto& r : d.reports) {
        auto idx = std::size_t((nearest_hour(r.time) - d.first_hour).count());
        if (idx >= c.hours || r.raw.starts_with("SPECI")) continue;
        CHECK((*r.visibility_sm < 3.0) == bool(d.fog[idx]));
    }
}

TEST_CASE("raw text decodes to the stored fields") {
    auto d = generate_synthetic(small());
    for (std::size_t i = 0; i < d.reports.size(); i += 7) {
        const auto& r = d.reports[i];
        CAPTURE(r.raw);
        auto o = parse_metar(r.raw, r.time + hours{1});
        CHECK(o.time == r.time);
        CHECK(o.visibility_sm == r.visibility_sm);
        CHECK(o.wind_speed_kt == r.wind_speed_kt);
        CHECK(o.wind_dir_deg == r.wind_dir_deg);
        CHECK(std::abs(*o.temp_c - *r.temp_c) <= 0.5);
        if (r.pressure_hpa) CHECK(std::abs(*o.pressure_hpa - *r.pressure_hpa) <= 0.5);
    }
}

TEST_CASE("generation is deterministic per seed") {
    auto a = generate_synthetic(small(1)), b = generate_synthetic(small(1)), c = generate_synthetic(small(2));
    REQUIRE(a.reports.size() == b.reports.size());
    for (std::size_t i = 0; i < a.reports.size(); ++i) CHECK(a.reports[i].raw == b.reports[i].raw);
    CHECK(a.fog == b.fog);
    CHECK(a.fog != c.fog);
}

TEST_CASE("configuration checks") {
    auto c = small();
    c.hours = 0;
    CHECK_THROWS_AS(generate_synthetic(c), std::invalid_argument);
    c = small();
    c.target_prevalence = 0.7;
    CHECK_THROWS_AS(generate_synthetic(c), std::invalid_argument);
    c = small();
    c.label_noise = -0.1;
    CHECK_THROWS_AS(generate_synthetic(c), std::invalid_argument);
}
