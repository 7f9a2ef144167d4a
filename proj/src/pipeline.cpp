#include "visnow/pipeline.hpp"

#include "visnow/csv.hpp"
#include "visnow/errors.hpp"

#include <json.hpp>

#include <cstdio>

namespace visnow {

HourlySeries build_series(std::span<const Observation> reports, const BuildOptions& options) {
    std::vector<Observation> kept;
    kept.reserve(reports.size());
    for (const auto& r : reports) {
        if (options.start && r.time < *options.start) continue;
        if (options.end && r.time >= *options.end) continue;
        kept.push_back(r);
    }
    if (kept.empty()) throw EmptySeries("no reports in the requested window");
    return forward_fill(downsample_hourly(kept), options.fill);
}

HorizonData prepare_horizon(const HourlySeries& series, StationLocation loc, int horizon_h, double train_fraction,
                            const LabelOptions& labels) {
    return {horizon_h, temporal_split(build_matrix(series, loc, horizon_h, labels), train_fraction)};
}

TrainResult train_horizon(const HorizonData& data, const TrainConfig& config, const std::string& station) {
    TrainResult r = train(to_matrix(data.split.train), to_matrix(data.split.test), config);
    r.model.metadata.station = station;
    r.model.metadata.horizon_h = data.horizon_h;
    if (!data.split.train.empty()) {
        r.model.metadata.train_start = format_hour(data.split.train.front().t);
        r.model.metadata.train_end = format_hour(data.split.train.back().t);
    }
    return r;
}

Evaluation evaluate_model(const Model& model, const HorizonData& data, double threshold, std::uint64_t seed) {
    Evaluation e;
    e.horizon_h = data.horizon_h;
    e.n_train = data.split.train.size();
    e.n_test = data.split.test.size();
    e.n_purged = data.split.purged;
    FeatureMatrix test = to_matrix(data.split.test);
    if (test.rows() == 0) throw EmptyDataset("test split is empty");
    auto probs = predict_proba(model, test);
    std::vector<int> pred(probs.size());
    std::size_t pos = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        pred[i] = classify(probs[i], threshold);
        pos += test.labels[i] != 0;
    }
    e.test_prevalence = double(pos) / double(test.rows());
    e.cm = confusion(pred, test.labels);
    e.m = metrics(e.cm);
    if (pos > 0 && pos < test.rows()) e.auc = auc(probs, test.labels);
    e.sweep = threshold_sweep(probs, test.labels, 0.4, 0.6, 0.05, threshold);
    FeatureMatrix train_m = to_matrix(data.split.train);
    if (train_m.rows() > 0) {
        TreeExplainer explainer(model, background_sample(train_m, 1000, seed));
        e.importance = mean_abs_shap(explainer, test);
    } else {
        e.importance = mean_abs_shap(model, test);
    }
    return e;
}

namespace {

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

std::string pct(const std::optional<double>& v) {
    if (!v) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", *v * 100);
    return buf;
}

} // namespace

std::string evaluation_json(const Evaluation& e, const std::string& station) {
    nlohmann::json j;
    j["station"] = station;
    j["horizon_h"] = e.horizon_h;
    j["n_train"] = e.n_train;
    j["n_test"] = e.n_test;
    j["n_purged"] = e.n_purged;
    j["test_prevalence"] = e.test_prevalence;
    j["auc"] = opt(e.auc);
    j["confusion"] = {{"tn", e.cm.tn}, {"fp", e.cm.fp}, {"fn", e.cm.fn}, {"tp", e.cm.tp}};
    j["recall"] = opt(e.m.recall);
    j["precision"] = opt(e.m.precision);
    j["f1"] = opt(e.m.f1);
    nlohmann::json sweep = nlohmann::json::array();
    for (const auto& p : e.sweep.points)
        sweep.push_back({{"threshold", p.threshold}, {"f1", opt(p.m.f1)}, {"delta_f1", opt(p.delta_f1)}});
    j["threshold_sweep"] = sweep;
    j["max_abs_delta_f1"] = opt(e.sweep.max_abs_delta_f1);
    nlohmann::json imp = nlohmann::json::array();
    for (const auto& i : e.importance) imp.push_back({{"feature", i.name}, {"mean_abs_shap", i.mean_abs_shap}});
    j["importance"] = imp;
    return j.dump(2);
}

void write_evaluation_text(std::ostream& out, const Evaluation& e, const std::string& station) {
    char line[160];
    out << "Station " << station << ", horizon +" << e.horizon_h << " h\n";
    out << "Train " << e.n_train << " rows (" << e.n_purged << " purged), test " << e.n_test << " rows, prevalence ";
    std::snprintf(line, sizeof line, "%.1f%%\n", e.test_prevalence * 100);
    out << line;
    std::snprintf(line, sizeof line, "TN %llu  FP %llu  FN %llu  TP %llu\n", (unsigned long long)e.cm.tn,
                  (unsigned long long)e.cm.fp, (unsigned long long)e.cm.fn, (unsigned long long)e.cm.tp);
    out << line;
    out << "AUC " << (e.auc ? std::to_string(*e.auc) : "n/a") << "  recall " << pct(e.m.recall) << "  precision "
        << pct(e.m.precision) << "  F1 " << pct(e.m.f1) << "\n";
    out << "Feature importance (mean |SHAP|, log-odds):\n";
    for (std::size_t r = 0; r < e.importance.size(); ++r) {
        std::snprintf(line, sizeof line, "  %2zu. %-22s %.4f\n", r + 1, e.importance[r].name.c_str(),
                      e.importance[r].mean_abs_shap);
        out << line;
    }
}

void write_importance_csv(std::ostream& out, std::span<const Importance> importance) {
    csv::write_row(out, {"feature", "mean_abs_shap", "rank"});
    for (std::size_t r = 0; r < importance.size(); ++r) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.8g", importance[r].mean_abs_shap);
        csv::write_row(out, {importance[r].name, buf, std::to_string(r + 1)});
    }
}

} // namespace visnow
