#include "visnow/bench.hpp"

#include "visnow/csv.hpp"
#include "visnow/errors.hpp"
#include "visnow/simd/kernels.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>

namespace visnow {

ConfusionMatrix confusion(std::span<const int> pred, std::span<const int> truth) {
    if (pred.size() != truth.size())
        throw LengthMismatch(std::to_string(pred.size()) + " predictions vs " + std::to_string(truth.size()) +
                             " truths");
    if (pred.empty()) throw EmptyInput("no rows to score");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        bool p = pred[i] != 0, t = truth[i] != 0;
        if (p) (t ? cm.tp : cm.fp)++;
        else (t ? cm.fn : cm.tn)++;
    }
    return cm;
}

double recall(const ConfusionMatrix& cm) {
    if (cm.tp + cm.fn == 0) throw NoPositiveTruth("recall undefined without positive truth");
    return double(cm.tp) / double(cm.tp + cm.fn);
}

double precision(const ConfusionMatrix& cm) {
    if (cm.tp + cm.fp == 0) throw NoPositivePred("precision undefined without positive predictions");
    return double(cm.tp) / double(cm.tp + cm.fp);
}

double f1_score(double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; }

double f1(const ConfusionMatrix& cm) { return f1_score(precision(cm), recall(cm)); }

Metrics metrics(const ConfusionMatrix& cm) {
    Metrics m;
    if (cm.tp + cm.fn > 0) m.recall = recall(cm);
    if (cm.tp + cm.fp > 0) m.precision = precision(cm);
    if (m.recall && m.precision) m.f1 = f1_score(*m.precision, *m.recall);
    return m;
}

namespace {

ConfusionMatrix from_kernel(simd::ConfusionCounts c) { return {c.tn, c.fp, c.fn, c.tp}; }

std::vector<std::uint8_t> to_bytes(std::span<const int> truth) {
    std::vector<std::uint8_t> out(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) out[i] = truth[i] ? 1 : 0;
    return out;
}

} // namespace

ThresholdSweep threshold_sweep(std::span<const double> probs, std::span<const int> truth, double lo, double hi,
                               double step, double reference) {
    if (probs.size() != truth.size()) throw LengthMismatch("probabilities and truths differ in length");
    if (probs.empty()) throw EmptyInput("no rows to sweep");
    if (!(step > 0) || hi < lo) throw std::invalid_argument("bad sweep range");
    auto bytes = to_bytes(truth);
    ThresholdSweep sweep;
    sweep.reference = reference;
    auto ref_f1 = metrics(from_kernel(simd::confusion(probs, bytes, reference))).f1;
    for (int k = 0;; ++k) {
        double thr = std::round((lo + k * step) * 1e9) / 1e9;
        if (thr > hi + 1e-12) break;
        SweepPoint pt;
        pt.threshold = thr;
        pt.cm = from_kernel(simd::confusion(probs, bytes, thr));
        pt.m = metrics(pt.cm);
        if (pt.m.f1 && ref_f1) {
            pt.delta_f1 = *pt.m.f1 - *ref_f1;
            double a = std::abs(*pt.delta_f1);
            if (!sweep.max_abs_delta_f1 || a > *sweep.max_abs_delta_f1) sweep.max_abs_delta_f1 = a;
        }
        sweep.points.push_back(pt);
    }
    return sweep;
}

VerificationReport score_rows(std::vector<BenchRow> rows, double threshold) {
    VerificationReport r;
    r.threshold = threshold;
    r.n_scored = rows.size();
    if (!rows.empty()) {
        std::vector<double> probs;
        std::vector<int> truth, taf;
        for (const auto& row : rows) {
            probs.push_back(row.ml_probability);
            truth.push_back(row.truth);
            taf.push_back(row.taf_pred);
        }
        auto bytes = to_bytes(truth);
        r.ml.cm = from_kernel(simd::confusion(probs, bytes, threshold));
        r.ml.m = metrics(r.ml.cm);
        if (r.ml.cm.tp + r.ml.cm.fn > 0 && r.ml.cm.tn + r.ml.cm.fp > 0) r.ml.auc = auc(probs, truth);
        r.taf.cm = confusion(taf, truth);
        r.taf.m = metrics(r.taf.cm);
        r.sweep = threshold_sweep(probs, truth, 0.4, 0.6, 0.05, threshold);
        r.test_start = rows.front().t0;
        r.test_end = rows.back().t0;
    }
    r.rows = std::move(rows);
    return r;
}

VerificationReport run_benchmark(const Model& model, const HourlySeries& series, std::span<const TafBulletin> bulletins,
                                 int horizon_h, StationLocation loc, const BenchmarkOptions& options) {
    if (model.metadata.horizon_h != 0 && model.metadata.horizon_h != horizon_h)
        throw HorizonMismatch("model horizon " + std::to_string(model.metadata.horizon_h) + " h, requested " +
                              std::to_string(horizon_h) + " h");
    if (series.empty()) throw NoOverlap("empty series");
    Hour from = options.from.value_or(series.first_hour());
    Hour to = options.to.value_or(series.last_hour());
    if (bulletins.empty()) throw NoOverlap("no TAF bulletins");

    std::vector<TafBulletin> sorted(bulletins.begin(), bulletins.end());
    sort_by_issue_time(sorted);
    Utc first_valid = sorted.front().valid_from, last_valid = sorted.front().valid_to;
    for (const auto& b : sorted) {
        first_valid = std::min(first_valid, b.valid_from);
        last_valid = std::max(last_valid, b.valid_to);
    }
    if (last_valid < Utc(from) || first_valid > Utc(to + std::chrono::hours{horizon_h}))
        throw NoOverlap("bulletins valid " + format_utc(first_valid) + " to " + format_utc(last_valid) +
                        " do not overlap test window");

    auto examples = build_matrix(series, loc, horizon_h, options.labels);
    std::map<Hour, const LabeledExample*> by_hour;
    for (const auto& e : examples) by_hour[e.t] = &e;

    Exclusions ex;
    std::vector<BenchRow> rows;
    for (const auto& hr : series.rows) {
        if (hr.hour < from || hr.hour > to) continue;
        auto it = by_hour.find(hr.hour);
        if (it == by_hour.end()) {
            ++ex.no_ground_truth;
            continue;
        }
        const TafBulletin* b = select_bulletin(sorted, Utc(hr.hour));
        if (!b) {
            ++ex.no_bulletin;
            continue;
        }
        auto taf = taf_predicts_ifr(*b, Utc(hr.hour + std::chrono::hours{horizon_h}));
        if (!taf) {
            ++ex.not_covered;
            continue;
        }
        const LabeledExample& e = *it->second;
        rows.push_back({e.t, e.label, predict_proba(model, e.features), *taf});
    }
    VerificationReport r = score_rows(std::move(rows), options.threshold);
    r.station = series.station;
    r.horizon_h = horizon_h;
    r.test_start = from;
    r.test_end = to;
    r.excluded = ex;
    r.n_excluded = ex.total();
    return r;
}

namespace {

std::string pct(const std::optional<double>& v) {
    if (!v) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", *v * 100.0);
    return buf;
}

std::string fixed3(const std::optional<double>& v) {
    if (!v) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", *v);
    return buf;
}

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

nlohmann::json agent_json(const AgentScore& a) {
    return {{"tn", a.cm.tn},
            {"fp", a.cm.fp},
            {"fn", a.cm.fn},
            {"tp", a.cm.tp},
            {"recall", opt(a.m.recall)},
            {"precision", opt(a.m.precision)},
            {"f1", opt(a.m.f1)},
            {"auc", opt(a.auc)}};
}

} // namespace

void write_report_text(std::ostream& out, const VerificationReport& r) {
    char line[256];
    out << "Station " << r.station << ", horizon +" << r.horizon_h << " h, threshold " << r.threshold << "\n";
    if (r.test_start && r.test_end)
        out << "Test window " << format_hour(*r.test_start) << " to " << format_hour(*r.test_end) << "\n";
    std::snprintf(line, sizeof line, "%-14s %9s %9s %9s %9s %8s %9s %7s %6s\n", "Agent", "TN", "FP", "FN", "TP",
                  "Recall", "Precision", "F1", "AUC");
    out << line;
    auto row = [&](const char* name, const AgentScore& a) {
        std::snprintf(line, sizeof line, "%-14s %9llu %9llu %9llu %9llu %8s %9s %7s %6s\n", name,
                      (unsigned long long)a.cm.tn, (unsigned long long)a.cm.fp, (unsigned long long)a.cm.fn,
                      (unsigned long long)a.cm.tp, pct(a.m.recall).c_str(), pct(a.m.precision).c_str(),
                      pct(a.m.f1).c_str(), fixed3(a.auc).c_str());
        out << line;
    };
    row("Human (TAF)", r.taf);
    row("ML Framework", r.ml);
    out << "Scored rows " << r.n_scored << ", excluded " << r.n_excluded << " (no ground truth "
        << r.excluded.no_ground_truth << ", no bulletin " << r.excluded.no_bulletin << ", not covered "
        << r.excluded.not_covered << ")\n";
    if (!r.sweep.points.empty()) {
        out << "Threshold sweep (ML):\n";
        for (const auto& p : r.sweep.points) {
            std::snprintf(line, sizeof line, "  %.2f  recall %7s  precision %7s  F1 %7s  dF1 %s\n", p.threshold,
                          pct(p.m.recall).c_str(), pct(p.m.precision).c_str(), pct(p.m.f1).c_str(),
                          fixed3(p.delta_f1).c_str());
            out << line;
        }
        out << "  max |dF1| " << fixed3(r.sweep.max_abs_delta_f1) << "\n";
    }
}

std::string report_json(const VerificationReport& r) {
    nlohmann::json j;
    j["station"] = r.station;
    j["horizon_h"] = r.horizon_h;
    j["threshold"] = r.threshold;
    j["test_start"] = r.test_start ? nlohmann::json(format_hour(*r.test_start)) : nlohmann::json(nullptr);
    j["test_end"] = r.test_end ? nlohmann::json(format_hour(*r.test_end)) : nlohmann::json(nullptr);
    j["n_scored"] = r.n_scored;
    j["n_excluded"] = r.n_excluded;
    j["excluded"] = {{"no_ground_truth", r.excluded.no_ground_truth},
                     {"no_bulletin", r.excluded.no_bulletin},
                     {"not_covered", r.excluded.not_covered}};
    j["ml"] = agent_json(r.ml);
    j["taf"] = agent_json(r.taf);
    nlohmann::json sweep = nlohmann::json::array();
    for (const auto& p : r.sweep.points)
        sweep.push_back({{"threshold", p.threshold},
                         {"recall", opt(p.m.recall)},
                         {"precision", opt(p.m.precision)},
                         {"f1", opt(p.m.f1)},
                         {"delta_f1", opt(p.delta_f1)}});
    j["threshold_sweep"] = {{"reference", r.sweep.reference},
                            {"points", sweep},
                            {"max_abs_delta_f1", opt(r.sweep.max_abs_delta_f1)}};
    return j.dump(2);
}

std::string_view to_string(AblationGroup g) {
    switch (g) {
    case AblationGroup::none: return "none";
    case AblationGroup::lags: return "lags";
    case AblationGroup::thermodynamic: return "thermodynamic";
    case AblationGroup::kinematic: return "kinematic";
    }
    return "?";
}

AblationGroup parse_ablation_group(std::string_view name) {
    for (auto g : {AblationGroup::none, AblationGroup::lags, AblationGroup::thermodynamic, AblationGroup::kinematic})
        if (name == to_string(g)) return g;
    throw UnknownGroup("'" + std::string(name) + "' (expected lags, thermodynamic, kinematic or none)");
}

std::span<const Feature> group_features(AblationGroup g) {
    static constexpr std::array<Feature, 4> lags{Feature::current_visibility, Feature::visibility_lag_1h,
                                                 Feature::visibility_lag_3h, Feature::visibility_lag_6h};
    static constexpr std::array<Feature, 3> thermo{Feature::dew_point_depression, Feature::cooling_rate,
                                                   Feature::relative_humidity};
    static constexpr std::array<Feature, 3> kinematic{Feature::wind_sin, Feature::wind_cos, Feature::wind_speed};
    switch (g) {
    case AblationGroup::none: return {};
    case AblationGroup::lags: return lags;
    case AblationGroup::thermodynamic: return thermo;
    case AblationGroup::kinematic: return kinematic;
    }
    return {};
}

namespace {

FeatureMatrix without(const FeatureMatrix& m, AblationGroup g) {
    FeatureMatrix out = m;
    for (Feature f : group_features(g))
        for (std::size_t r = 0; r < out.rows(); ++r) out.values[r * out.cols + std::size_t(f)] = kMissing;
    return out;
}

struct Scores {
    double auc = 0.0;
    std::optional<double> recall;
};

Scores fit_and_score(const FeatureMatrix& train_m, const FeatureMatrix& test_m, const AblationOptions& o) {
    TrainResult res = train(train_m, test_m, o.config);
    auto probs = predict_proba(res.model, test_m);
    Scores s;
    s.auc = auc(probs, test_m.labels);
    std::vector<int> pred(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) pred[i] = classify(probs[i], o.threshold);
    s.recall = metrics(confusion(pred, test_m.labels)).recall;
    return s;
}

} // namespace

AblationReport run_ablation(const Split& split, int horizon_h, std::span<const AblationGroup> groups,
                            const AblationOptions& options) {
    FeatureMatrix train_m = to_matrix(split.train), test_m = to_matrix(split.test);
    AblationReport rep;
    rep.horizon_h = horizon_h;
    Scores full = fit_and_score(train_m, test_m, options);
    rep.rows.push_back({AblationGroup::none, full.auc, full.recall, 0.0,
                        full.recall ? std::optional<double>(0.0) : std::nullopt});
    for (AblationGroup g : groups) {
        if (g == AblationGroup::none) continue;
        Scores s = fit_and_score(without(train_m, g), without(test_m, g), options);
        AblationRow row{g, s.auc, s.recall, s.auc - full.auc, std::nullopt};
        if (s.recall && full.recall) row.delta_recall = *s.recall - *full.recall;
        rep.rows.push_back(row);
    }
    return rep;
}

AblationReport run_ablation(const HourlySeries& series, StationLocation loc, int horizon_h,
                            std::span<const AblationGroup> groups, const AblationOptions& options) {
    Split split = temporal_split(build_matrix(series, loc, horizon_h, options.labels), options.train_fraction);
    AblationReport rep = run_ablation(split, horizon_h, groups, options);
    rep.station = series.station;
    return rep;
}

AblationReport run_ablation(const HourlySeries& series, StationLocation loc, int horizon_h,
                            std::span<const std::string> groups, const AblationOptions& options) {
    std::vector<AblationGroup> parsed;
    for (const auto& g : groups) parsed.push_back(parse_ablation_group(g));
    return run_ablation(series, loc, horizon_h, std::span<const AblationGroup>(parsed), options);
}

void write_ablation_csv(std::ostream& out, const AblationReport& rep) {
    csv::write_row(out, {"station", "horizon_h", "group", "auc", "recall", "delta_auc", "delta_recall"});
    auto num = [](const std::optional<double>& v) {
        if (!v) return std::string();
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", *v);
        return std::string(buf);
    };
    for (const auto& r : rep.rows)
        csv::write_row(out, {rep.station, std::to_string(rep.horizon_h), std::string(to_string(r.group)), num(r.auc),
                             num(r.recall), num(r.delta_auc), num(r.delta_recall)});
}

} // namespace visnow
