#include "visnow/archive.hpp"
#include "visnow/errors.hpp"
#include "visnow/pipeline.hpp"
#include "visnow/stations.hpp"
#include "visnow/synthetic.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <sstream>

#include <json.hpp>

using namespace visnow;
using namespace std::chrono;

TEST_CASE("build window and empty input") {
    auto reps = test::hourly_reports("KJFK", make_utc(2024, 1, 1), std::vector<std::optional<double>>(48, 5.0));
    BuildOptions opt;
    opt.start = make_utc(2024, 1, 1, 12);
    opt.end = make_utc(2024, 1, 2, 0);
    auto s = build_series(reps, opt);
    CHECK(s.rows.size() == 12);
    CHECK(s.first_hour() == floor<hours>(*opt.start));
    opt.start = make_utc(2025, 1, 1);
    opt.end.reset();
    CHECK_THROWS_AS(build_series(reps, opt), EmptySeries);
    CHECK_THROWS_AS(build_series(std::vector<Observation>{}), EmptySeries);
}

TEST_CASE("METAR archive round trip") {
    auto d = generate_synthetic([] {
        SyntheticConfig c;
        c.hours = 200;
        return c;
    }());
    std::stringstream ss;
    write_metar_archive_header(ss);
    for (const auto& r : d.reports) write_metar_archive_row(ss, r);
    ss << "SYNT,2019-01-05 00:00,SYNT 05ZZZZ garbage\n";
    ss << "SYNT,not-a-time,SYNT 050000Z 10SM\n";
    ArchiveStats stats;
    auto back = read_metar_archive(ss, &stats);
    CHECK(stats.rows == d.reports.size() + 2);
    CHECK(stats.parsed == d.reports.size());
    CHECK(stats.rejected == 2);
    CHECK_FALSE(stats.first_errors.empty());
    REQUIRE(back.size() == d.reports.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].time == d.reports[i].time);
        CHECK(back[i].visibility_sm == d.reports[i].visibility_sm);
    }
}

TEST_CASE("raw report lines") {
    std::istringstream in("# last six hours\nKJFK 051151Z 31015KT 10SM M05/M17 A3011\n\n"
                          "KJFK 051251Z 31015KT 2SM BR M04/M06 A3010\nnonsense\n");
    ArchiveStats stats;
    auto obs = read_metar_lines(in, make_utc(2024, 3, 5, 13), &stats);
    REQUIRE(obs.size() == 2);
    CHECK(obs[1].time == make_utc(2024, 3, 5, 12, 51));
    CHECK(obs[1].visibility_sm == 2.0);
    CHECK(stats.rejected == 1);
}

TEST_CASE("TAF archive") {
    std::istringstream in("station,issued_utc,raw_taf\n"
                          "KJFK,2024-03-05 11:30,TAF KJFK 051130Z 0512/0618 31012KT P6SM FM051800 32008KT 2SM BR\n"
                          "KJFK,2024-03-05 17:30,TAF KJFK 051730Z 0518/0624 31012KT P6SM\n"
                          "KJFK,2024-03-05 18:00,TAF KJFK 051800Z 31012KT\n");
    ArchiveStats stats;
    auto b = read_taf_archive(in, &stats);
    REQUIRE(b.size() == 2);
    CHECK(b[0].issue_time == make_utc(2024, 3, 5, 11, 30));
    CHECK(stats.rejected == 1);
}

TEST_CASE("station table") {
    auto scel = lookup_station("scel");
    REQUIRE(scel);
    CHECK(scel->location.lat_deg == doctest::Approx(-33.39).epsilon(0.01));
    CHECK_FALSE(lookup_station("ZZZZ"));
    auto all = known_stations();
    for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].icao < all[i].icao);
    for (const auto& s : all) {
        CHECK(s.icao.size() == 4);
        CHECK(std::abs(s.location.lat_deg) <= 90);
        CHECK(std::abs(s.location.lon_deg) <= 180);
    }
}

TEST_CASE("build, train and evaluate on a short synthetic record") {
    SyntheticConfig sc;
    sc.hours = 10000;
    auto d = generate_synthetic(sc);
    auto series = build_series(d.reports);
    auto data = prepare_horizon(series, sc.location, 3, 0.8);
    CHECK(data.horizon_h == 3);
    CHECK(data.split.purged == 2);
    TrainConfig tc;
    tc.n_trees = 50;
    auto r = train_horizon(data, tc, "SYNT");
    CHECK(r.model.metadata.station == "SYNT");
    CHECK(r.model.metadata.horizon_h == 3);
    CHECK(r.model.metadata.train_start == format_hour(data.split.train.front().t));
    CHECK(r.history.size() == 51);
    REQUIRE(r.history.back().valid_auc);

    auto e = evaluate_model(r.model, data);
    CHECK(e.n_test == data.split.test.size());
    REQUIRE(e.auc);
    CHECK(*e.auc == doctest::Approx(*r.history.back().valid_auc));
    CHECK(*e.auc > 0.9);
    CHECK(e.cm.total() == e.n_test);
    REQUIRE(e.importance.size() == kFeatureCount);
    CHECK(e.sweep.points.size() == 5);

    auto j = nlohmann::json::parse(evaluation_json(e, "SYNT"));
    CHECK(j["station"] == "SYNT");
    CHECK(j["importance"].size() == kFeatureCount);
    std::ostringstream text, csv;
    write_evaluation_text(text, e, "SYNT");
    CHECK(text.str().find("horizon +3 h") != std::string::npos);
    write_importance_csv(csv, e.importance);
    CHECK(csv.str().rfind("feature,mean_abs_shap,rank\n" + e.importance[0].name + ",", 0) == 0);

    HorizonData empty = data;
    empty.split.test.clear();
    CHECK_THROWS_AS(evaluate_model(r.model, empty), EmptyDataset);
}
