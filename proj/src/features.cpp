#include "visnow/features.hpp"

#include "visnow/csv.hpp"
#include "visnow/errors.hpp"
#include "visnow/solar.hpp"

#include <algorithm>
#include <charconv>
#include <numbers>

namespace visnow {

using namespace std::chrono;

namespace {

constexpr std::array<std::string_view, kFeatureCount> kNames{
    "dew_point_depression", "relative_humidity", "surface_pressure",  "cooling_rate",
    "current_visibility",   "wind_speed",        "wind_sin",          "wind_cos",
    "visibility_lag_1h",    "visibility_lag_3h", "visibility_lag_6h", "is_night",
};

} // namespace

std::string_view feature_name(Feature f) { return kNames[std::size_t(f)]; }
std::span<const std::string_view> feature_names() { return kNames; }

std::optional<double> relative_humidity(std::optional<double> temp_c, std::optional<double> dewpoint_c) {
    if (!temp_c || !dewpoint_c) return std::nullopt;
    double t = *temp_c, td = *dewpoint_c;
    if (td > t + kSupersaturationTolerance) return std::nullopt;
    if (td > t) td = t;
    return 100.0 * std::exp(kMagnusA * td / (kMagnusB + td) - kMagnusA * t / (kMagnusB + t));
}

FeatureVector derive_instant_features(const Observation& obs, StationLocation loc) {
    FeatureVector fv;
    if (obs.temp_c && obs.dewpoint_c) {
        double dpd = *obs.temp_c - *obs.dewpoint_c;
        if (dpd >= -kSupersaturationTolerance) fv.set(Feature::dew_point_depression, dpd);
    }
    fv.set(Feature::relative_humidity, relative_humidity(obs.temp_c, obs.dewpoint_c));
    fv.set(Feature::surface_pressure, obs.pressure_hpa);
    fv.set(Feature::current_visibility, obs.visibility_sm);
    fv.set(Feature::wind_speed, obs.wind_speed_kt);
    if (obs.wind_dir_deg) {
        double rad = *obs.wind_dir_deg * std::numbers::pi / 180.0;
        fv.set(Feature::wind_sin, std::sin(rad));
        fv.set(Feature::wind_cos, std::cos(rad));
    }
    fv.set(Feature::is_night, double(is_night(loc.lat_deg, loc.lon_deg, obs.time)));
    return fv;
}

std::optional<double> cooling_rate(const HourlySeries& series, Hour t) {
    const HourRow* now = series.at(t);
    const HourRow* before = series.at(t - hours{3});
    if (!now || !before || !now->observed(Field::temp) || !before->observed(Field::temp)) return std::nullopt;
    return *now->get(Field::temp) - *before->get(Field::temp);
}

namespace {

Observation row_observation(const HourlySeries& series, const HourRow& row) {
    Observation obs;
    obs.station = series.station;
    obs.time = Utc{row.hour};
    obs.temp_c = row.get(Field::temp);
    obs.dewpoint_c = row.get(Field::dewpoint);
    obs.wind_dir_deg = row.get(Field::wind_dir);
    obs.wind_speed_kt = row.get(Field::wind_speed);
    obs.visibility_sm = row.get(Field::visibility);
    obs.pressure_hpa = row.get(Field::pressure);
    return obs;
}

std::optional<double> visibility_at(const HourlySeries& series, Hour h) {
    const HourRow* r = series.at(h);
    return r ? r->get(Field::visibility) : std::nullopt;
}

} // namespace

FeatureVector features_at(const HourlySeries& series, Hour t, StationLocation loc) {
    const HourRow* row = series.at(t);
    if (!row) throw DataError("hour " + format_hour(t) + " outside series grid");
    FeatureVector fv = derive_instant_features(row_observation(series, *row), loc);
    fv.set(Feature::cooling_rate, cooling_rate(series, t));
    fv.set(Feature::visibility_lag_1h, visibility_at(series, t - hours{1}));
    fv.set(Feature::visibility_lag_3h, visibility_at(series, t - hours{3}));
    fv.set(Feature::visibility_lag_6h, visibility_at(series, t - hours{6}));
    return fv;
}

bool valid_horizon(int h) { return h == 2 || h == 3 || h == 6; }

std::vector<LabeledExample> build_matrix(const HourlySeries& series, StationLocation loc, int horizon_h,
                                         const LabelOptions& options) {
    if (!valid_horizon(horizon_h)) throw std::invalid_argument("horizon must be 2, 3 or 6 hours");
    if (options.label_window_h < 0 || options.label_window_h >= horizon_h)
        throw std::invalid_argument("label window must be in [0, horizon)");
    if (series.empty()) throw EmptySeries("no hourly rows for " + series.station);

    std::vector<LabeledExample> out;
    for (const auto& row : series.rows) {
        if (!row.observed(Field::temp)) continue;
        const HourRow* target = series.at(row.hour + hours{horizon_h});
        if (!target || !target->observed(Field::visibility)) continue;
        bool ifr = *target->get(Field::visibility) < kIfrVisibilitySm;
        for (int k = 1; k <= options.label_window_h && !ifr; ++k) {
            const HourRow* r = series.at(row.hour + hours{horizon_h - k});
            if (r && r->observed(Field::visibility) && *r->get(Field::visibility) < kIfrVisibilitySm) ifr = true;
        }
        out.push_back({row.hour, features_at(series, row.hour, loc), ifr ? 1 : 0, horizon_h});
    }
    return out;
}

Split temporal_split(std::vector<LabeledExample> examples, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("train fraction must be in (0, 1)");
    if (examples.size() < kMinExamples)
        throw TooFewExamples(std::to_string(examples.size()) + " examples, need " + std::to_string(kMinExamples));
    std::stable_sort(examples.begin(), examples.end(),
                     [](const LabeledExample& a, const LabeledExample& b) { return a.t < b.t; });
    auto n_train = std::size_t(std::floor(double(examples.size()) * train_fraction));
    Split s;
    s.test.assign(examples.begin() + std::ptrdiff_t(n_train), examples.end());
    s.train.reserve(n_train);
    const Hour first_test = s.test.empty() ? Hour::max() : s.test.front().t;
    for (std::size_t i = 0; i < n_train; ++i) {
        const auto& e = examples[i];
        if (e.t + hours{e.horizon_h} > first_test) {
            ++s.purged;
            continue;
        }
        s.train.push_back(e);
    }
    return s;
}

void FeatureMatrix::push_back(std::span<const double> row, int label) {
    if (row.size() != cols) throw DimensionMismatch("row width " + std::to_string(row.size()));
    values.insert(values.end(), row.begin(), row.end());
    labels.push_back(label);
}

FeatureMatrix to_matrix(std::span<const LabeledExample> examples) {
    FeatureMatrix m;
    m.values.reserve(examples.size() * kFeatureCount);
    m.labels.reserve(examples.size());
    for (const auto& e : examples) m.push_back(e.features.values(), e.label);
    return m;
}

void write_feature_csv(std::ostream& out, std::span<const LabeledExample> examples) {
    csv::Row header{"valid_utc"};
    for (auto n : kNames) header.emplace_back(n);
    header.emplace_back("label");
    header.emplace_back("horizon");
    csv::write_row(out, header);
    char buf[32];
    for (const auto& e : examples) {
        csv::Row r{format_hour(e.t)};
        for (double v : e.features.values()) {
            if (is_missing(v)) {
                r.emplace_back();
            } else {
                auto res = std::to_chars(buf, buf + sizeof buf, v);
                r.emplace_back(buf, res.ptr);
            }
        }
        r.push_back(std::to_string(e.label));
        r.push_back(std::to_string(e.horizon_h));
        csv::write_row(out, r);
    }
}

std::vector<LabeledExample> read_feature_csv(std::istream& in) {
    csv::Reader reader(in);
    if (reader.header().size() != kFeatureCount + 3) throw DataError("feature CSV has wrong column count");
    for (std::size_t k = 0; k < kFeatureCount; ++k)
        if (reader.header()[k + 1] != kNames[k])
            throw DataError("feature CSV column " + std::to_string(k + 1) + " is " + reader.header()[k + 1]);
    std::vector<LabeledExample> out;
    csv::Row row;
    while (reader.next(row)) {
        if (row.size() != kFeatureCount + 3) throw DataError("short feature row");
        LabeledExample e;
        auto t = parse_utc(row[0]);
        if (!t) throw DataError("bad time " + row[0]);
        e.t = floor<hours>(*t);
        for (std::size_t k = 0; k < kFeatureCount; ++k) {
            const auto& s = row[k + 1];
            if (s.empty()) continue;
            double v;
            auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc{}) throw DataError("bad feature value " + s);
            e.features.set(Feature(k), v);
        }
        e.label = std::stoi(row[kFeatureCount + 1]);
        e.horizon_h = std::stoi(row[kFeatureCount + 2]);
        out.push_back(std::move(e));
    }
    return out;
}

} // namespace visnow
