#pragma once

// Verification of the ML model against TAF bulletins, metric helpers and
// feature-group ablation.

#include "visnow/features.hpp"
#include "visnow/gbdt.hpp"
#include "visnow/series.hpp"
#include "visnow/taf.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace visnow {

struct ConfusionMatrix {
    std::uint64_t tn = 0, fp = 0, fn = 0, tp = 0;

    std::uint64_t total() const { return tn + fp + fn + tp; }
    bool operator==(const ConfusionMatrix&) const = default;
};

/// Throws LengthMismatch, EmptyInput.
ConfusionMatrix confusion(std::span<const int> pred, std::span<const int> truth);

/// Throws NoPositiveTruth.
double recall(const ConfusionMatrix& cm);
/// Throws NoPositivePred.
double precision(const ConfusionMatrix& cm);
/// Harmonic mean; 0 when tp = 0. Throws NoPositiveTruth or NoPositivePred.
double f1(const ConfusionMatrix& cm);
/// Harmonic mean of two rates; 0 when both are 0.
double f1_score(double precision, double recall);

/// Undefined ratios are nullopt.
struct Metrics {
    std::optional<double> recall;
    std::optional<double> precision;
    std::optional<double> f1;
};
Metrics metrics(const ConfusionMatrix& cm);

inline constexpr double kDecisionThreshold = 0.5;

/// 1 iff probability >= threshold.
inline int classify(double probability, double threshold = kDecisionThreshold) {
    return probability >= threshold ? 1 : 0;
}

struct SweepPoint {
    double threshold = 0.0;
    ConfusionMatrix cm;
    Metrics m;
    /// F1 minus F1 at the reference threshold, when both are defined.
    std::optional<double> delta_f1;
};

struct ThresholdSweep {
    double reference = kDecisionThreshold;
    std::vector<SweepPoint> points;
    std::optional<double> max_abs_delta_f1;
};

/// Scores `probs` at thresholds lo, lo + step, ..., hi.
ThresholdSweep threshold_sweep(std::span<const double> probs, std::span<const int> truth, double lo = 0.4,
                               double hi = 0.6, double step = 0.05, double reference = kDecisionThreshold);

/// One decision hour scored by both agents.
struct BenchRow {
    Hour t0{};
    int truth = 0;
    double ml_probability = 0.0;
    int taf_pred = 0;
};

struct AgentScore {
    ConfusionMatrix cm;
    Metrics m;
    std::optional<double> auc;
};

struct Exclusions {
    /// No observed temperature at t0 or no observed visibility at t0 + h.
    std::uint64_t no_ground_truth = 0;
    /// No bulletin issued at or before t0.
    std::uint64_t no_bulletin = 0;
    /// Latest bulletin does not cover t0 + h or gives no visibility there.
    std::uint64_t not_covered = 0;

    std::uint64_t total() const { return no_ground_truth + no_bulletin + not_covered; }
};

struct VerificationReport {
    std::string station;
    int horizon_h = 0;
    double threshold = kDecisionThreshold;
    std::optional<Hour> test_start, test_end;
    AgentScore ml, taf;
    std::size_t n_scored = 0;
    std::uint64_t n_excluded = 0;
    Exclusions excluded;
    ThresholdSweep sweep;
    std::vector<BenchRow> rows;
};

/// Scores pre-resolved rows. Both agents see exactly these rows.
VerificationReport score_rows(std::vector<BenchRow> rows, double threshold = kDecisionThreshold);

struct BenchmarkOptions {
    double threshold = kDecisionThreshold;
    /// Decision hours outside [from, to] are ignored (not counted as excluded).
    std::optional<Hour> from, to;
    LabelOptions labels;
};

/// ML: classify(predict_proba(model, features at t0)); TAF: latest bulletin
/// issued <= t0 resolved at t0 + h. Rows lacking either are excluded for both.
/// Throws HorizonMismatch, NoOverlap.
VerificationReport run_benchmark(const Model& model, const HourlySeries& series, std::span<const TafBulletin> bulletins,
                                 int horizon_h, StationLocation loc, const BenchmarkOptions& options = {});

void write_report_text(std::ostream& out, const VerificationReport& report);
std::string report_json(const VerificationReport& report);

enum class AblationGroup { none, lags, thermodynamic, kinematic };

std::string_view to_string(AblationGroup g);
/// Throws UnknownGroup.
AblationGroup parse_ablation_group(std::string_view name);
std::span<const Feature> group_features(AblationGroup g);

struct AblationRow {
    AblationGroup group = AblationGroup::none;
    double auc = 0.0;
    std::optional<double> recall;
    double delta_auc = 0.0;
    std::optional<double> delta_recall;
};

struct AblationReport {
    std::string station;
    int horizon_h = 0;
    std::vector<AblationRow> rows;
};

struct AblationOptions {
    double train_fraction = 0.8;
    double threshold = kDecisionThreshold;
    TrainConfig config;
    LabelOptions labels;
};

/// Retrains with each group's columns forced missing; deltas are relative to
/// the full model on the same split and seed.
AblationReport run_ablation(const Split& split, int horizon_h, std::span<const AblationGroup> groups,
                            const AblationOptions& options = {});
AblationReport run_ablation(const HourlySeries& series, StationLocation loc, int horizon_h,
                            std::span<const AblationGroup> groups, const AblationOptions& options = {});
/// Throws UnknownGroup.
AblationReport run_ablation(const HourlySeries& series, StationLocation loc, int horizon_h,
                            std::span<const std::string> groups, const AblationOptions& options = {});

/// Columns: station, horizon_h, group, auc, recall, delta_auc, delta_recall.
void write_ablation_csv(std::ostream& out, const AblationReport& report);

} // namespace visnow
