// visnow: station-level IFR visibility nowcasting pipeline.

#include "visnow/archive.hpp"
#include "visnow/bench.hpp"
#include "visnow/csv.hpp"
#include "visnow/errors.hpp"
#include "visnow/ingest.hpp"
#include "visnow/pipeline.hpp"
#include "visnow/shap.hpp"
#include "visnow/simd/kernels.hpp"
#include "visnow/stations.hpp"
#include "visnow/synthetic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace visnow;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string station;
    std::string start, end;
    std::vector<int> horizons;
    double train_frac = 0.8;
    double threshold = kDecisionThreshold;
    int label_window = 0;
    int max_fill_gap = 3;
    std::string fill_fields = "pressure,visibility";
    std::uint64_t seed = 42;
    std::string out_dir = "out";
    std::string cache_dir = "cache";
    std::string sources = "config/sources.json";
    std::string hourly_input;
    std::string metar_archive;
    std::string taf_archive;
    std::optional<double> lat, lon;
    int batch_days = 30;
    int min_interval_ms = 1000;
    std::string fetch_source = "both";
    std::vector<std::string> ablate;
    bool skip_benchmark = false;
    bool skip_fetch = false;
    // predict / explain
    std::string model;
    std::string metar_file;
    std::string reference;
    int top_k = 5;
    // synth
    std::size_t synth_hours = 30000;
    std::string synth_metar_out;
};

std::vector<int> horizons(const Options& o) {
    if (o.horizons.empty()) return {kHorizons.begin(), kHorizons.end()};
    for (int h : o.horizons)
        if (!valid_horizon(h)) throw UsageError("--horizon must be 2, 3 or 6");
    return o.horizons;
}

std::string upper(std::string s) {
    for (char& c : s) c = char(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

void require_station(const Options& o) {
    if (o.station.size() != 4) throw UsageError("--station must be a 4-character ICAO identifier");
}

StationLocation location(const Options& o, const std::string& station) {
    if (o.lat && o.lon) return {*o.lat, *o.lon};
    if (o.lat || o.lon) throw UsageError("--lat and --lon must be given together");
    auto info = lookup_station(station);
    if (!info)
        throw DataError("no coordinates for " + station + " in the bundled table; pass --lat and --lon");
    return info->location;
}

fs::path station_dir(const Options& o) {
    fs::path d = fs::path(o.out_dir) / o.station;
    fs::create_directories(d);
    return d;
}

fs::path model_path(const Options& o, int h) { return station_dir(o) / ("model_h" + std::to_string(h) + ".vngb"); }

std::optional<Utc> parse_bound(const std::string& text, const char* flag) {
    if (text.empty()) return std::nullopt;
    auto t = parse_utc(text);
    if (!t) throw UsageError(std::string(flag) + " expects YYYY-MM-DD or YYYY-MM-DDTHH:MM");
    return t;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

void note(const std::string& msg) { std::cerr << msg << "\n"; }

void report_archive(const char* what, const ArchiveStats& s) {
    note(std::string(what) + ": " + std::to_string(s.parsed) + " of " + std::to_string(s.rows) + " rows decoded");
    for (const auto& e : s.first_errors) note("  skipped " + e);
}

FillPolicy fill_policy(const Options& o) {
    if (o.max_fill_gap < 0) throw UsageError("--max-fill-gap must be >= 0");
    FillPolicy p;
    p.max_gap_h = o.max_fill_gap;
    try {
        p.fields = parse_field_list(o.fill_fields);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--fill-fields: ") + e.what());
    }
    return p;
}

LabelOptions label_options(const Options& o) { return {o.label_window}; }

fs::path hourly_path(const Options& o) {
    return o.hourly_input.empty() ? station_dir(o) / "hourly.csv" : fs::path(o.hourly_input);
}

HourlySeries load_series(const Options& o) {
    fs::path p = hourly_path(o);
    std::ifstream in(p);
    if (!in) throw DataError("no hourly series at " + p.string() + "; run `build` first or pass --hourly-input");
    HourlySeries s = read_series_csv(in);
    if (s.station.empty()) s.station = o.station;
    return s;
}

// ---- fetch ----------------------------------------------------------------

void cmd_fetch(const Options& o) {
    require_station(o);
    auto start = parse_date(o.start), end = parse_date(o.end);
    if (!start || !end) throw UsageError("fetch needs --start and --end (YYYY-MM-DD)");
    SourcesConfig sources = SourcesConfig::load(o.sources);
    HttplibTransport transport;
    std::vector<Source> which;
    if (o.fetch_source == "both") which = {Source::observations, Source::tafs};
    else if (auto s = parse_source(o.fetch_source)) which = {*s};
    else throw UsageError("--source must be metar, taf or both");
    for (Source src : which) {
        FetchJob job{o.station, *start, *end, src, o.batch_days, o.min_interval_ms};
        try {
            job.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        FetchResult r = fetch(job, o.cache_dir, transport, sources);
        note("fetch " + std::string(source_dir(src)) + ": " + std::to_string(r.chunks) + " chunks, " +
             std::to_string(r.cache_hits) + " cached, " + std::to_string(r.requests) + " requests -> " + r.dir.string());
    }
}

// ---- build ----------------------------------------------------------------

std::vector<Observation> load_reports(const Options& o) {
    ArchiveStats stats;
    std::vector<Observation> reports;
    if (!o.metar_archive.empty()) {
        std::ifstream in(o.metar_archive);
        if (!in) throw DataError("cannot open " + o.metar_archive);
        reports = read_metar_archive(in, &stats);
    } else {
        fs::path dir = cache_path(o.cache_dir, Source::observations, o.station);
        if (!fs::exists(dir / "manifest.json"))
            throw DataError("no cached observations in " + dir.string() + "; run `fetch` or pass --metar-archive");
        verify_cache(dir);
        reports = read_metar_dir(dir, &stats);
    }
    report_archive("observations", stats);
    std::erase_if(reports, [&](const Observation& r) { return r.station != o.station; });
    return reports;
}

void cmd_build(const Options& o) {
    require_station(o);
    StationLocation loc = location(o, o.station);
    HourlySeries series;
    if (!o.hourly_input.empty()) {
        series = load_series(o);
    } else {
        BuildOptions b;
        b.fill = fill_policy(o);
        b.start = parse_bound(o.start, "--start");
        b.end = parse_bound(o.end, "--end");
        auto reports = load_reports(o);
        series = build_series(reports, b);
        auto out = open_out(station_dir(o) / "hourly.csv");
        write_series_csv(out, series);
    }
    note("hourly series: " + std::to_string(series.rows.size()) + " hours, " + format_hour(series.first_hour()) +
         " to " + format_hour(series.last_hour()));
    for (int h : horizons(o)) {
        auto examples = build_matrix(series, loc, h, label_options(o));
        auto out = open_out(station_dir(o) / ("features_h" + std::to_string(h) + ".csv"));
        write_feature_csv(out, examples);
        std::size_t pos = 0;
        for (const auto& e : examples) pos += e.label;
        note("+" + std::to_string(h) + " h: " + std::to_string(examples.size()) + " examples, " + std::to_string(pos) +
             " IFR");
    }
}

// ---- train ----------------------------------------------------------------

TrainConfig train_config(const Options& o) {
    TrainConfig c;
    c.seed = o.seed;
    return c;
}

void cmd_train(const Options& o) {
    require_station(o);
    StationLocation loc = location(o, o.station);
    HourlySeries series = load_series(o);
    auto hs = horizons(o);
    // Horizons are independent; train them side by side.
    std::vector<std::future<TrainResult>> jobs;
    std::vector<HorizonData> data;
    for (int h : hs) data.push_back(prepare_horizon(series, loc, h, o.train_frac, label_options(o)));
    for (const auto& d : data)
        jobs.push_back(std::async(std::launch::async, [&o, &d] { return train_horizon(d, train_config(o), o.station); }));
    for (std::size_t i = 0; i < hs.size(); ++i) {
        TrainResult r = jobs[i].get();
        fs::path mp = model_path(o, hs[i]);
        save_model(r.model, mp);
        auto hist = open_out(station_dir(o) / ("history_h" + std::to_string(hs[i]) + ".csv"));
        csv::write_row(hist, {"round", "train_loss", "valid_auc"});
        for (std::size_t k = 0; k < r.history.size(); ++k) {
            char loss[32], a[32] = "";
            std::snprintf(loss, sizeof loss, "%.10g", r.history[k].train_loss);
            if (r.history[k].valid_auc) std::snprintf(a, sizeof a, "%.6f", *r.history[k].valid_auc);
            csv::write_row(hist, {std::to_string(k), loss, a});
        }
        std::string auc_text = r.history.back().valid_auc ? std::to_string(*r.history.back().valid_auc) : "n/a";
        note("+" + std::to_string(hs[i]) + " h: " + std::to_string(data[i].split.train.size()) + " train rows, " +
             std::to_string(r.model.trees.size()) + " trees, validation AUC " + auc_text + " -> " + mp.string());
    }
}

// ---- evaluate -------------------------------------------------------------

void cmd_evaluate(const Options& o) {
    require_station(o);
    StationLocation loc = location(o, o.station);
    HourlySeries series = load_series(o);
    for (int h : horizons(o)) {
        Model m = load_model(model_path(o, h));
        HorizonData d = prepare_horizon(series, loc, h, o.train_frac, label_options(o));
        Evaluation e = evaluate_model(m, d, o.threshold, o.seed);
        std::string tag = "_h" + std::to_string(h);
        auto js = open_out(station_dir(o) / ("validation" + tag + ".json"));
        js << evaluation_json(e, o.station) << "\n";
        auto txt = open_out(station_dir(o) / ("validation" + tag + ".txt"));
        write_evaluation_text(txt, e, o.station);
        auto imp = open_out(station_dir(o) / ("importance" + tag + ".csv"));
        write_importance_csv(imp, e.importance);
        write_evaluation_text(std::cout, e, o.station);
    }
}

// ---- benchmark ------------------------------------------------------------

std::vector<TafBulletin> load_bulletins(const Options& o) {
    ArchiveStats stats;
    std::vector<TafBulletin> out;
    if (!o.taf_archive.empty()) {
        std::ifstream in(o.taf_archive);
        if (!in) throw DataError("cannot open " + o.taf_archive);
        out = read_taf_archive(in, &stats);
    } else {
        fs::path dir = cache_path(o.cache_dir, Source::tafs, o.station);
        if (!fs::exists(dir / "manifest.json"))
            throw DataError("no cached TAFs in " + dir.string() + "; run `fetch` or pass --taf-archive");
        verify_cache(dir);
        out = read_taf_dir(dir, &stats);
    }
    report_archive("TAF bulletins", stats);
    std::erase_if(out, [&](const TafBulletin& b) { return b.station != o.station; });
    return out;
}

void cmd_benchmark(const Options& o) {
    require_station(o);
    StationLocation loc = location(o, o.station);
    HourlySeries series = load_series(o);
    auto bulletins = load_bulletins(o);
    std::vector<AblationGroup> groups;
    for (const auto& g : o.ablate) groups.push_back(parse_ablation_group(g));
    for (int h : horizons(o)) {
        Model m = load_model(model_path(o, h));
        HorizonData d = prepare_horizon(series, loc, h, o.train_frac, label_options(o));
        BenchmarkOptions bo;
        bo.threshold = o.threshold;
        bo.labels = label_options(o);
        if (!d.split.test.empty()) {
            bo.from = d.split.test.front().t;
            bo.to = d.split.test.back().t;
        }
        VerificationReport r = run_benchmark(m, series, bulletins, h, loc, bo);
        std::string tag = "_h" + std::to_string(h);
        auto txt = open_out(station_dir(o) / ("benchmark" + tag + ".txt"));
        write_report_text(txt, r);
        auto js = open_out(station_dir(o) / ("benchmark" + tag + ".json"));
        js << report_json(r) << "\n";
        write_report_text(std::cout, r);
        if (!groups.empty()) {
            AblationOptions ao;
            ao.train_fraction = o.train_frac;
            ao.threshold = o.threshold;
            ao.config = train_config(o);
            ao.labels = label_options(o);
            AblationReport rep = run_ablation(d.split, h, groups, ao);
            rep.station = o.station;
            auto csv_out = open_out(station_dir(o) / ("ablation" + tag + ".csv"));
            write_ablation_csv(csv_out, rep);
        }
    }
}

// ---- explain / predict ----------------------------------------------------

nlohmann::json top_features(const Model& m, const Attribution& a, int k) {
    std::vector<std::size_t> idx(a.phi.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t x, std::size_t y) { return std::abs(a.phi[x]) > std::abs(a.phi[y]); });
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < idx.size() && int(i) < k; ++i) {
        double v = a.x[idx[i]];
        arr.push_back({{"feature", m.feature_names[idx[i]]},
                       {"phi", a.phi[idx[i]]},
                       {"value", std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v)}});
    }
    return arr;
}

void cmd_explain(const Options& o) {
    require_station(o);
    StationLocation loc = location(o, o.station);
    HourlySeries series = load_series(o);
    for (int h : horizons(o)) {
        Model m = load_model(model_path(o, h));
        HorizonData d = prepare_horizon(series, loc, h, o.train_frac, label_options(o));
        FeatureMatrix train_m = to_matrix(d.split.train);
        TreeExplainer ex = train_m.rows() ? TreeExplainer(m, background_sample(train_m, 1000, o.seed))
                                          : TreeExplainer(m);
        auto out = open_out(station_dir(o) / ("explain_h" + std::to_string(h) + ".jsonl"));
        for (const auto& e : d.split.test) {
            Attribution a = ex.explain(e.features.values());
            nlohmann::json j = {{"time", format_hour(e.t)},
                                {"probability", sigmoid(a.margin())},
                                {"base_value", a.base_value},
                                {"top", top_features(m, a, o.top_k)}};
            out << j.dump() << "\n";
        }
        note("+" + std::to_string(h) + " h: explained " + std::to_string(d.split.test.size()) + " test hours");
    }
}

void cmd_predict(const Options& o) {
    if (o.model.empty() || o.metar_file.empty()) throw UsageError("predict needs --model and --metar-file");
    fs::path mp = o.model;
    if (!fs::exists(mp) && fs::exists(fs::path(o.model + ".vngb"))) mp = o.model + ".vngb";
    Model m = load_model(mp);
    std::string station = o.station.empty() ? m.metadata.station : o.station;
    StationLocation loc = location(o, station);

    std::ifstream in(o.metar_file);
    if (!in) throw DataError("cannot open " + o.metar_file);
    std::string first;
    std::getline(in, first);
    in.clear();
    in.seekg(0);
    ArchiveStats stats;
    std::vector<Observation> reports;
    if (first.rfind("station,", 0) == 0) {
        reports = read_metar_archive(in, &stats);
    } else {
        Utc ref = std::chrono::floor<std::chrono::minutes>(std::chrono::system_clock::now());
        if (auto r = parse_bound(o.reference, "--reference")) ref = *r;
        reports = read_metar_lines(in, ref, &stats);
    }
    if (reports.empty()) throw DataError("no decodable reports in " + o.metar_file);
    if (!station.empty()) std::erase_if(reports, [&](const Observation& r) { return r.station != station; });
    if (reports.empty()) throw DataError("no reports for " + station + " in " + o.metar_file);
    BuildOptions b;
    b.fill = fill_policy(o);
    HourlySeries series = build_series(reports, b);
    const HourRow* last = nullptr;
    for (auto it = series.rows.rbegin(); it != series.rows.rend() && !last; ++it)
        if (it->observed(Field::temp)) last = &*it;
    if (!last) throw DataError("no report with a temperature");
    FeatureVector fv = features_at(series, last->hour, loc);
    TreeExplainer ex(m);
    Attribution a = ex.explain(fv.values());
    nlohmann::json j = {{"station", station},
                        {"decision_time", format_hour(last->hour)},
                        {"horizon_h", m.metadata.horizon_h},
                        {"probability", predict_proba(m, fv)},
                        {"ifr_alert", classify(predict_proba(m, fv), o.threshold) == 1},
                        {"top", top_features(m, a, o.top_k)}};
    std::cout << j.dump(2) << "\n";
}

// ---- synth ----------------------------------------------------------------

void cmd_synth(const Options& o) {
    SyntheticConfig c;
    c.station = o.station.empty() ? "SYNT" : o.station;
    c.seed = o.seed;
    c.hours = o.synth_hours;
    if (!o.horizons.empty()) c.formation_lag_h = o.horizons.front();
    if (o.lat && o.lon) c.location = {*o.lat, *o.lon};
    if (auto s = parse_bound(o.start, "--start")) c.start = *s;
    SyntheticData d = generate_synthetic(c);
    Options so = o;
    so.station = c.station;
    BuildOptions b;
    b.fill = fill_policy(o);
    HourlySeries series = build_series(d.reports, b);
    fs::path out_path = o.hourly_input.empty() ? station_dir(so) / "hourly.csv" : fs::path(o.hourly_input);
    auto out = open_out(out_path);
    write_series_csv(out, series);
    if (!o.synth_metar_out.empty()) {
        auto arch = open_out(o.synth_metar_out);
        write_metar_archive_header(arch);
        for (const auto& r : d.reports) write_metar_archive_row(arch, r);
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "synthetic %s: %zu hours, fog rate %.3f, mean depression %.2f C -> ",
                  c.station.c_str(), c.hours, d.fog_rate, d.depression_mean);
    note(buf + out_path.string());
}

void cmd_all(const Options& o) {
    require_station(o);
    bool offline = o.skip_fetch || !o.hourly_input.empty() || !o.metar_archive.empty();
    if (!offline) cmd_fetch(o);
    cmd_build(o);
    cmd_train(o);
    cmd_evaluate(o);
    if (!o.skip_benchmark) cmd_benchmark(o);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"visnow: IFR visibility nowcasting from METAR archives"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c) {
        c->add_option("--station", o.station, "4-character ICAO identifier")->transform([](std::string s) {
            return upper(std::move(s));
        });
        c->add_option("--out-dir", o.out_dir, "Artifact root; files land in <out-dir>/<station>/");
        c->add_option("--cache-dir", o.cache_dir, "Raw archive cache");
        c->add_option("--seed", o.seed, "Seed for every random choice");
        c->add_option("--lat", o.lat, "Station latitude (overrides the bundled table)");
        c->add_option("--lon", o.lon, "Station longitude (overrides the bundled table)");
        c->add_option("--hourly-input", o.hourly_input, "Use this hourly series CSV instead of out-dir/hourly.csv");
    };
    auto window = [&](CLI::App* c) {
        c->add_option("--start", o.start, "Window start (YYYY-MM-DD)");
        c->add_option("--end", o.end, "Window end, exclusive (YYYY-MM-DD)");
    };
    auto modelling = [&](CLI::App* c) {
        c->add_option("--horizon", o.horizons, "Forecast horizon in hours (2, 3 or 6); default all");
        c->add_option("--train-frac", o.train_frac, "Chronological training fraction");
        c->add_option("--threshold", o.threshold, "Alert threshold on the predicted probability");
        c->add_option("--label-window", o.label_window, "Hours before t+h that also count toward the label");
    };
    auto building = [&](CLI::App* c) {
        c->add_option("--max-fill-gap", o.max_fill_gap, "Longest gap (hours) bridged by forward fill");
        c->add_option("--fill-fields", o.fill_fields, "Fields eligible for forward fill");
        c->add_option("--metar-archive", o.metar_archive, "CSV (station,valid,metar) instead of the cache");
    };
    auto fetching = [&](CLI::App* c) {
        c->add_option("--sources", o.sources, "Endpoint configuration JSON");
        c->add_option("--batch-days", o.batch_days, "Days per request");
        c->add_option("--min-interval-ms", o.min_interval_ms, "Minimum spacing between requests");
    };

    auto* fetch_cmd = app.add_subcommand("fetch", "Download observation and TAF archives into the cache");
    common(fetch_cmd);
    window(fetch_cmd);
    fetching(fetch_cmd);
    fetch_cmd->add_option("--source", o.fetch_source, "metar, taf or both");

    auto* build_cmd = app.add_subcommand("build", "Decode, downsample, fill and derive labelled features");
    common(build_cmd);
    window(build_cmd);
    building(build_cmd);
    modelling(build_cmd);

    auto* train_cmd = app.add_subcommand("train", "Train one model per horizon");
    common(train_cmd);
    modelling(train_cmd);

    auto* eval_cmd = app.add_subcommand("evaluate", "Validation metrics and feature importance");
    common(eval_cmd);
    modelling(eval_cmd);

    auto* bench_cmd = app.add_subcommand("benchmark", "Compare models with TAF forecasts");
    common(bench_cmd);
    modelling(bench_cmd);
    bench_cmd->add_option("--taf-archive", o.taf_archive, "CSV (station,issued_utc,raw_taf) instead of the cache");
    bench_cmd->add_option("--ablate", o.ablate, "Feature groups to ablate: lags, thermodynamic, kinematic")->delimiter(',');

    auto* explain_cmd = app.add_subcommand("explain", "Per-hour SHAP attributions for the test period");
    common(explain_cmd);
    modelling(explain_cmd);
    explain_cmd->add_option("--top-k", o.top_k, "Attributions listed per hour");

    auto* predict_cmd = app.add_subcommand("predict", "Single prediction from recent reports");
    common(predict_cmd);
    building(predict_cmd);
    predict_cmd->add_option("--model", o.model, "Model file")->required();
    predict_cmd->add_option("--metar-file", o.metar_file, "Raw reports, one per line, or an archive CSV")->required();
    predict_cmd->add_option("--reference", o.reference, "Time used to resolve report days (default now)");
    predict_cmd->add_option("--threshold", o.threshold, "Alert threshold");
    predict_cmd->add_option("--top-k", o.top_k, "Attributions listed");

    auto* all_cmd = app.add_subcommand("all", "fetch, build, train, evaluate and benchmark");
    common(all_cmd);
    window(all_cmd);
    building(all_cmd);
    modelling(all_cmd);
    fetching(all_cmd);
    all_cmd->add_option("--taf-archive", o.taf_archive, "CSV (station,issued_utc,raw_taf) instead of the cache");
    all_cmd->add_option("--ablate", o.ablate, "Feature groups to ablate")->delimiter(',');
    all_cmd->add_flag("--skip-fetch", o.skip_fetch, "Use only cached or supplied archives");
    all_cmd->add_flag("--skip-benchmark", o.skip_benchmark, "Stop after evaluation");

    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic hourly series with a known fog rule");
    common(synth_cmd);
    synth_cmd->add_option("--hours", o.synth_hours, "Length in hours");
    synth_cmd->add_option("--horizon", o.horizons, "Fog formation lag in hours");
    synth_cmd->add_option("--start", o.start, "First hour (YYYY-MM-DD)");
    synth_cmd->add_option("--max-fill-gap", o.max_fill_gap, "Longest gap bridged by forward fill");
    synth_cmd->add_option("--fill-fields", o.fill_fields, "Fields eligible for forward fill");
    synth_cmd->add_option("--metar-out", o.synth_metar_out, "Also write the reports as an archive CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    const std::map<CLI::App*, void (*)(const Options&)> handlers{
        {fetch_cmd, cmd_fetch},       {build_cmd, cmd_build},     {train_cmd, cmd_train},
        {eval_cmd, cmd_evaluate},     {bench_cmd, cmd_benchmark}, {explain_cmd, cmd_explain},
        {predict_cmd, cmd_predict},   {all_cmd, cmd_all},         {synth_cmd, cmd_synth},
    };
    try {
        for (auto* sub : app.get_subcommands()) {
            if (sub != synth_cmd) horizons(o);
            if (!(o.train_frac > 0 && o.train_frac < 1)) throw UsageError("--train-frac must be in (0, 1)");
            if (!(o.threshold >= 0 && o.threshold <= 1)) throw UsageError("--threshold must be in [0, 1]");
            handlers.at(sub)(o);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
