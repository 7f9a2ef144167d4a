#pragma once

#include "visnow/metar.hpp"
#include "visnow/series.hpp"
#include "visnow/time.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace visnow {

/// Feature order is part of the model file format. Append only.
enum class Feature : std::size_t {
    dew_point_depression,
    relative_humidity,
    surface_pressure,
    cooling_rate,
    current_visibility,
    wind_speed,
    wind_sin,
    wind_cos,
    visibility_lag_1h,
    visibility_lag_3h,
    visibility_lag_6h,
    is_night,
};
inline constexpr std::size_t kFeatureCount = 12;
/// Bumped whenever the feature list changes; stored in model files.
inline constexpr std::uint32_t kFeatureSetVersion = 1;

std::string_view feature_name(Feature f);
std::span<const std::string_view> feature_names();

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

/// Missing-aware feature vector; missing entries are NaN.
class FeatureVector {
public:
    FeatureVector() { values_.fill(kMissing); }

    std::optional<double> get(Feature f) const {
        double v = values_[std::size_t(f)];
        return is_missing(v) ? std::nullopt : std::optional<double>(v);
    }
    void set(Feature f, std::optional<double> v) { values_[std::size_t(f)] = v ? *v : kMissing; }
    double operator[](Feature f) const { return values_[std::size_t(f)]; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

private:
    std::array<double, kFeatureCount> values_;
};

inline constexpr double kMagnusA = 17.625;
inline constexpr double kMagnusB = 243.04;
/// Dewpoint may exceed temperature by this much (sensor rounding) before the
/// pair is treated as inconsistent.
inline constexpr double kSupersaturationTolerance = 0.5;

/// August-Roche-Magnus relative humidity in percent. A dewpoint above the
/// temperature but within kSupersaturationTolerance is clamped to saturation;
/// larger excesses give nullopt.
std::optional<double> relative_humidity(std::optional<double> temp_c, std::optional<double> dewpoint_c);

struct StationLocation {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
};

/// Features that depend on a single report: depression, RH, pressure,
/// visibility, wind, is_night. The history-dependent entries stay missing.
FeatureVector derive_instant_features(const Observation& obs, StationLocation loc);

/// T(t) - T(t-3h) from observed temperatures only.
std::optional<double> cooling_rate(const HourlySeries& series, Hour t);

/// Full feature vector for grid hour `t`, which must be in the grid.
FeatureVector features_at(const HourlySeries& series, Hour t, StationLocation loc);

inline constexpr double kIfrVisibilitySm = 3.0;

struct LabeledExample {
    Hour t{};
    FeatureVector features;
    int label = 0;
    int horizon_h = 0;
};

struct LabelOptions {
    /// Extra hours before t+h whose observed visibility also counts toward
    /// the label; 0 uses exactly hour t+h.
    int label_window_h = 0;
};

bool valid_horizon(int horizon_h);

/// One example per grid hour with an observed current temperature and an
/// observed visibility at t+h. Throws EmptySeries.
std::vector<LabeledExample> build_matrix(const HourlySeries& series, StationLocation loc, int horizon_h,
                                         const LabelOptions& options = {});

struct Split {
    std::vector<LabeledExample> train;
    std::vector<LabeledExample> test;
    /// Training examples dropped because their label hour reached past the
    /// first test hour.
    std::size_t purged = 0;
};

inline constexpr std::size_t kMinExamples = 100;

/// Chronological split: the first floor(n * train_fraction) examples train,
/// the rest test. Throws TooFewExamples.
Split temporal_split(std::vector<LabeledExample> examples, double train_fraction);

/// Row-major matrix view helpers for the model.
struct FeatureMatrix {
    std::size_t cols = kFeatureCount;
    std::vector<double> values;
    std::vector<int> labels;

    std::size_t rows() const { return cols ? values.size() / cols : 0; }
    std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
    void push_back(std::span<const double> row, int label);
};

FeatureMatrix to_matrix(std::span<const LabeledExample> examples);

/// CSV: valid_utc, the 12 features (empty = missing), label, horizon.
void write_feature_csv(std::ostream& out, std::span<const LabeledExample> examples);
std::vector<LabeledExample> read_feature_csv(std::istream& in);

} // namespace visnow
