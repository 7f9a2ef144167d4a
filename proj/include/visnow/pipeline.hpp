#pragma once

// The build -> train -> evaluate chain shared by the CLI and the tests.

#include "visnow/bench.hpp"
#include "visnow/features.hpp"
#include "visnow/gbdt.hpp"
#include "visnow/series.hpp"
#include "visnow/shap.hpp"

#include <array>
#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace visnow {

inline constexpr std::array<int, 3> kHorizons{2, 3, 6};

struct BuildOptions {
    FillPolicy fill;
    /// Reports outside [start, end) are dropped.
    std::optional<Utc> start, end;
};

/// Downsample and gap-fill. Throws EmptySeries when nothing survives.
HourlySeries build_series(std::span<const Observation> reports, const BuildOptions& options = {});

struct HorizonData {
    int horizon_h = 0;
    Split split;
};

HorizonData prepare_horizon(const HourlySeries& series, StationLocation loc, int horizon_h, double train_fraction,
                            const LabelOptions& labels = {});

/// Trains on the split's training part, tracking AUC on its test part, and
/// stamps station, horizon and training window into the metadata.
TrainResult train_horizon(const HorizonData& data, const TrainConfig& config, const std::string& station);

struct Evaluation {
    int horizon_h = 0;
    std::size_t n_train = 0, n_test = 0, n_purged = 0;
    double test_prevalence = 0.0;
    std::optional<double> auc;
    ConfusionMatrix cm;
    Metrics m;
    ThresholdSweep sweep;
    std::vector<Importance> importance;
};

/// Scores the test part at `threshold` and ranks features by mean |SHAP| over
/// the test rows with a seeded background sample of the training rows.
Evaluation evaluate_model(const Model& model, const HorizonData& data, double threshold = kDecisionThreshold,
                          std::uint64_t seed = 42);

std::string evaluation_json(const Evaluation& e, const std::string& station);
void write_evaluation_text(std::ostream& out, const Evaluation& e, const std::string& station);
/// Columns: feature, mean_abs_shap, rank.
void write_importance_csv(std::ostream& out, std::span<const Importance> importance);

} // namespace visnow
