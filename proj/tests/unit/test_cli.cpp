#include "visnow/features.hpp"
#include "visnow/gbdt.hpp"
#include "visnow/stations.hpp"
#include "visnow/time.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sys/wait.h>

#include <json.hpp>

using namespace visnow;
using namespace std::chrono;
namespace fs = std::filesystem;

namespace {

const std::string kLoc = " --station SYNT --lat 40.64 --lon -73.78";

// Runs the CLI with stdout and stderr redirected into `dir`; returns the exit code.
int run(const test::TempDir& dir, const std::string& args, const std::string& env = "") {
    std::string cmd = env + (env.empty() ? "" : " ") + std::string(VISNOW_CLI) + " " + args + " > " +
                      (dir / "stdout.txt").string() + " 2> " + (dir / "stderr.txt").string();
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string two(int v) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d", v);
    return buf;
}

// Six-hourly bulletins covering [first, last], one CSV row each.
void write_taf_archive(const fs::path& p, Utc first, Utc last) {
    std::ofstream out(p);
    out << "station,issued_utc,raw_taf\n";
    for (Utc t = first; t <= last; t += hours{6}) {
        auto day = [](Utc u) { return int(unsigned(year_month_day{floor<days>(u)}.day())); };
        auto hour = [](Utc u) { return int((u - floor<days>(u)) / hours{1}); };
        Utc end = t + hours{24};
        out << "SYNT," << format_utc(t) << ",TAF SYNT " << two(day(t)) << two(hour(t)) << "00Z " << two(day(t))
            << two(hour(t)) << "/" << two(day(end)) << two(hour(end)) << " 18005KT P6SM\n";
    }
}

// Synthetic archive plus an hourly series built from it, shared by the cases below.
struct Workspace {
    test::TempDir dir;
    fs::path out = dir / "out";
    fs::path station = out / "SYNT";
    fs::path archive = dir / "synt.csv";

    Workspace() {
        REQUIRE(run(dir, "synth --hours 4000 --out-dir " + (dir / "synth").string() + " --metar-out " +
                             archive.string()) == 0);
        REQUIRE(run(dir, "build" + kLoc + " --horizon 3 --out-dir " + out.string() + " --metar-archive " +
                             archive.string()) == 0);
    }
};

} // namespace

TEST_CASE("usage errors exit with 1") {
    test::TempDir dir;
    CHECK(run(dir, "") == 1);
    CHECK(run(dir, "frobnicate") == 1);
    CHECK(run(dir, "train --station SYNT --horizon 4") == 1);
    CHECK(run(dir, "train --station SYNT --train-frac 1.5") == 1);
    CHECK(run(dir, "train --station SYNT --threshold 2") == 1);
    CHECK(run(dir, "train --station TOOLONG") == 1);
    CHECK(run(dir, "predict --model x.vngb") == 1);
    CHECK(run(dir, "build --station SYNT --lat 40") == 1);
    CHECK(run(dir, "build --station KJFK --max-fill-gap -1 --metar-archive x.csv") == 1);
    CHECK(run(dir, "--help") == 0);
}

TEST_CASE("data errors exit with 2") {
    test::TempDir dir;
    CHECK(run(dir, "train" + kLoc + " --out-dir " + (dir / "empty").string()) == 2);
    CHECK(test::slurp(dir / "stderr.txt").find("data error") != std::string::npos);
    CHECK(run(dir, "build --station ZZZZ --metar-archive x.csv --out-dir " + (dir / "o").string()) == 2);
    std::ofstream(dir / "junk.vngb") << "not a model";
    std::ofstream(dir / "m.txt") << "KJFK 051151Z 31015KT 10SM M05/M17 A3011\n";
    CHECK(run(dir, "predict --model " + (dir / "junk.vngb").string() + " --metar-file " + (dir / "m.txt").string()) ==
          2);
    CHECK(run(dir, "build --station KJFK --out-dir " + (dir / "o").string() + " --cache-dir " +
                       (dir / "nocache").string()) == 2);
}

TEST_CASE("the offline chain writes every artifact") {
    Workspace w;
    CHECK(fs::exists(w.station / "hourly.csv"));
    CHECK(fs::exists(w.station / "features_h3.csv"));
    CHECK_FALSE(fs::exists(w.station / "features_h2.csv"));

    REQUIRE(run(w.dir, "train" + kLoc + " --horizon 3 --out-dir " + w.out.string()) == 0);
    REQUIRE(fs::exists(w.station / "model_h3.vngb"));
    CHECK_FALSE(fs::exists(w.station / "model_h6.vngb"));
    Model m = load_model(w.station / "model_h3.vngb");
    CHECK(m.metadata.horizon_h == 3);
    CHECK(m.metadata.station == "SYNT");
    REQUIRE(m.feature_names.size() == feature_names().size());
    for (std::size_t i = 0; i < m.feature_names.size(); ++i) CHECK(m.feature_names[i] == feature_names()[i]);
    CHECK(test::slurp(w.station / "history_h3.csv").rfind("round,train_loss,valid_auc\n0,", 0) == 0);

    REQUIRE(run(w.dir, "evaluate" + kLoc + " --horizon 3 --out-dir " + w.out.string()) == 0);
    auto js = nlohmann::json::parse(test::slurp(w.station / "validation_h3.json"));
    CHECK(js["station"] == "SYNT");
    CHECK(fs::exists(w.station / "validation_h3.txt"));
    CHECK(fs::exists(w.station / "importance_h3.csv"));
    CHECK(test::slurp(w.dir / "stdout.txt").find("horizon +3 h") != std::string::npos);

    REQUIRE(run(w.dir, "explain" + kLoc + " --horizon 3 --top-k 3 --out-dir " + w.out.string()) == 0);
    std::ifstream ex(w.station / "explain_h3.jsonl");
    std::string line;
    REQUIRE(std::getline(ex, line));
    auto first = nlohmann::json::parse(line);
    CHECK(first["top"].size() == 3);
    CHECK(first["probability"].get<double>() >= 0);

    write_taf_archive(w.dir / "taf.csv", make_utc(2019, 1, 1), make_utc(2019, 6, 20));
    REQUIRE(run(w.dir, "benchmark" + kLoc + " --horizon 3 --out-dir " + w.out.string() + " --taf-archive " +
                           (w.dir / "taf.csv").string() + " --ablate lags,kinematic") == 0);
    auto bench = nlohmann::json::parse(test::slurp(w.station / "benchmark_h3.json"));
    CHECK(bench.is_object());
    CHECK(fs::exists(w.station / "benchmark_h3.txt"));
    auto ablation = test::slurp(w.station / "ablation_h3.csv");
    CHECK(std::count(ablation.begin(), ablation.end(), '\n') == 4);
    CHECK(ablation.find("SYNT,3,kinematic,") != std::string::npos);
}

TEST_CASE("predict answers from recent raw reports") {
    Workspace w;
    REQUIRE(run(w.dir, "train" + kLoc + " --horizon 3 --out-dir " + w.out.string()) == 0);
    std::ofstream(w.dir / "recent.txt") << "SYNT 051051Z 18005KT 10SM 12/03 A3001\n"
                                        << "SYNT 051151Z 18005KT 10SM 11/04 A3002\n"
                                        << "SYNT 051251Z 18005KT 6SM BR 10/09 A3003\n";
    auto t0 = steady_clock::now();
    REQUIRE(run(w.dir, "predict --lat 40.64 --lon -73.78 --model " + (w.station / "model_h3").string() +
                           " --metar-file " + (w.dir / "recent.txt").string() + " --reference 2024-03-05T13:00") == 0);
    auto elapsed = steady_clock::now() - t0;
    CHECK(elapsed < seconds{1});
    auto j = nlohmann::json::parse(test::slurp(w.dir / "stdout.txt"));
    CHECK(j["station"] == "SYNT");
    CHECK(j["decision_time"] == "2024-03-05T13:00Z");
    CHECK(j["horizon_h"] == 3);
    double p = j["probability"];
    CHECK(p >= 0);
    CHECK(p <= 1);
    CHECK(j["top"].size() == 5);
    CHECK(j["ifr_alert"] == (p >= 0.5));
}

TEST_CASE("training is reproducible across runs and instruction sets") {
    Workspace w;
    std::string hourly = " --hourly-input " + (w.station / "hourly.csv").string();
    auto train_into = [&](const std::string& sub, const std::string& env) {
        fs::path out = w.dir / sub;
        REQUIRE(run(w.dir, "train" + kLoc + " --horizon 2 --out-dir " + out.string() + hourly, env) == 0);
        return test::slurp(out / "SYNT" / "model_h2.vngb");
    };
    auto a = train_into("a", ""), b = train_into("b", ""), c = train_into("c", "VISNOW_SIMD=scalar");
    CHECK_FALSE(a.empty());
    CHECK(a == b);
    CHECK(a == c);
}

TEST_CASE("all runs offline from supplied archives") {
    test::TempDir dir;
    REQUIRE(run(dir, "synth --hours 3000 --out-dir " + (dir / "s").string() + " --metar-out " +
                         (dir / "a.csv").string()) == 0);
    write_taf_archive(dir / "taf.csv", make_utc(2019, 1, 1), make_utc(2019, 5, 10));
    REQUIRE(run(dir, "all" + kLoc + " --horizon 6 --out-dir " + (dir / "o").string() + " --metar-archive " +
                         (dir / "a.csv").string() + " --taf-archive " + (dir / "taf.csv").string()) == 0);
    for (const char* f : {"hourly.csv", "features_h6.csv", "model_h6.vngb", "validation_h6.json", "benchmark_h6.json"})
        CHECK(fs::exists(dir / "o" / "SYNT" / f));
}

TEST_CASE("station identifiers live only in the station table") {
    std::string alternatives;
    for (const auto& s : known_stations()) alternatives += (alternatives.empty() ? "" : "|") + std::string(s.icao);
    std::regex literal("\"(" + alternatives + ")\"");
    for (const auto& dir : {"src", "tools", "include"}) {
        for (const auto& e : fs::recursive_directory_iterator(fs::path(VISNOW_SOURCE_DIR) / dir)) {
            if (!e.is_regular_file() || e.path().filename() == "stations.cpp") continue;
            CAPTURE(e.path().string());
            CHECK_FALSE(std::regex_search(test::slurp(e.path()), literal));
        }
    }
}
