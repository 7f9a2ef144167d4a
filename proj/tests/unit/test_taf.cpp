#include "visnow/errors.hpp"
#include "visnow/taf.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace visnow;
using visnow::test::utc;
using namespace std::chrono;

namespace {

const Utc kRef = make_utc(2024, 3, 5, 11, 30);
const char* kJfk = "TAF KJFK 051130Z 0512/0618 31012KT P6SM FM051800 32008KT 2SM BR";

TafBulletin decode(const std::string& raw, Utc ref = kRef) { return parse_taf(raw, ref); }

} // namespace

TEST_CASE("curated corpus") {
    auto corpus = test::load_taf_corpus();
    REQUIRE(corpus.size() >= 20);
    for (const auto& c : corpus) {
        CAPTURE(c.raw);
        if (!c.error.empty()) {
            try {
                parse_taf(c.raw, c.reference);
                FAIL("expected " << c.error);
            } catch (const DataError& e) {
                CHECK(std::string(e.what()).rfind(c.error + ":", 0) == 0);
            }
            continue;
        }
        auto b = parse_taf(c.raw, c.reference);
        CHECK(b.station == c.station);
        CHECK(format_utc(b.valid_from) == format_utc(c.valid_from));
        CHECK(format_utc(b.valid_to) == format_utc(c.valid_to));
        REQUIRE(b.groups.size() == c.kinds.size());
        for (std::size_t k = 0; k < c.kinds.size(); ++k) CHECK(to_string(b.groups[k].kind) == c.kinds[k]);
        CHECK(b.amended == (c.flags == "amd"));
        CHECK(b.corrected == (c.flags == "cor"));
        for (const auto& q : c.queries) {
            CAPTURE(format_utc(q.t));
            auto v = resolve_visibility(b, q.t);
            REQUIRE(v.has_value() == q.vis_sm.has_value());
            if (q.vis_sm) CHECK(std::abs(*v - *q.vis_sm) <= 1e-5);
        }
    }
}

TEST_CASE("FM onset and validity window") {
    auto b = decode(kJfk);
    REQUIRE(b.groups.size() == 2);
    CHECK(b.groups[0].kind == GroupKind::base);
    CHECK(b.groups[0].window.start == make_utc(2024, 3, 5, 12));
    CHECK(b.groups[0].window.end == make_utc(2024, 3, 5, 18));
    CHECK(*b.groups[0].visibility_sm == doctest::Approx(6.21).epsilon(0.001));
    CHECK(b.groups[1].kind == GroupKind::fm);
    CHECK(b.groups[1].window.start == make_utc(2024, 3, 5, 18));
    CHECK(b.groups[1].window.end == make_utc(2024, 3, 6, 18));
    CHECK(*b.groups[1].visibility_sm == 2.0);

    CHECK(resolve_visibility(b, make_utc(2024, 3, 5, 19)) == 2.0);
    CHECK(*resolve_visibility(b, make_utc(2024, 3, 5, 13)) == doctest::Approx(6.21).epsilon(0.001));
    CHECK_FALSE(resolve_visibility(b, make_utc(2024, 3, 7, 0)));
    CHECK_FALSE(resolve_visibility(b, make_utc(2024, 3, 5, 11)));
}

TEST_CASE("TEMPO inside the prevailing window") {
    auto b = decode("TAF SCEL 112300Z 1200/1306 18005KT 9999 SCT030 TEMPO 1206/1210 0800 FG",
                    make_utc(2024, 6, 11, 23));
    REQUIRE(b.groups.size() == 2);
    const auto& tempo = b.groups[1];
    CHECK(tempo.kind == GroupKind::tempo);
    CHECK(*tempo.visibility_sm == doctest::Approx(0.497).epsilon(0.001));
    CHECK(tempo.window.start >= b.groups[0].window.start);
    CHECK(tempo.window.end <= b.groups[0].window.end);
    CHECK(*resolve_visibility(b, make_utc(2024, 6, 12, 8)) == doctest::Approx(0.497).epsilon(0.001));
}

TEST_CASE("IFR decision uses a strict 3 SM threshold") {
    auto b = decode(kJfk);
    CHECK(taf_predicts_ifr(b, make_utc(2024, 3, 5, 19)) == 1);
    CHECK(taf_predicts_ifr(b, make_utc(2024, 3, 5, 13)) == 0);
    CHECK_FALSE(taf_predicts_ifr(b, make_utc(2024, 3, 8)));
    auto three = decode("TAF KBOS 051130Z 0512/0618 04015KT 3SM -SN OVC015");
    CHECK(taf_predicts_ifr(three, make_utc(2024, 3, 5, 13)) == 0);
}

TEST_CASE("BECMG applies from the start of its transition") {
    auto b = decode("TAF EGLL 051100Z 0512/0618 24010KT 9999 SCT030 BECMG 0514/0516 4000 RA");
    REQUIRE(b.groups.size() == 2);
    REQUIRE(b.groups[1].transition);
    CHECK(b.groups[1].transition->start == make_utc(2024, 3, 5, 14));
    CHECK(b.groups[0].window.end == make_utc(2024, 3, 5, 16));
    double bec = 4000 / kMetersPerStatuteMile;
    CHECK(*resolve_visibility(b, make_utc(2024, 3, 5, 15)) == doctest::Approx(bec));
    CHECK(*resolve_visibility(b, make_utc(2024, 3, 6, 12)) == doctest::Approx(bec));
}

TEST_CASE("change groups without visibility inherit it") {
    auto b = decode("TAF KSFO 051130Z 0512/0618 28015KT P6SM FEW010 FM060000 30010KT 4SM BR TEMPO 0602/0606 BKN005");
    REQUIRE(b.groups.size() == 3);
    CHECK(b.groups[2].visibility_inherited);
    CHECK(b.groups[2].visibility_sm == 4.0);
    CHECK_FALSE(b.groups[1].visibility_inherited);
}

TEST_CASE("PROB groups carry their probability") {
    auto b = decode("TAF KORD 051120Z 0512/0618 27010KT P6SM BKN040 PROB30 0520/0524 1SM TSRA");
    REQUIRE(b.groups.size() == 2);
    CHECK(b.groups[1].kind == GroupKind::prob);
    CHECK(b.groups[1].probability_pct == 30);
    auto t = decode("TAF KATL 051140Z 0512/0618 09005KT P6SM SCT050 PROB40 TEMPO 0606/0610 1/2SM FG");
    CHECK(t.groups[1].probability_pct == 40);
    CHECK(t.groups[1].visibility_sm == 0.5);
}

TEST_CASE("malformed bulletins") {
    CHECK_THROWS_AS(decode("TAF KJFK 051130Z 31012KT P6SM"), MalformedBulletin);
    CHECK_THROWS_AS(decode(""), MalformedBulletin);
    CHECK_THROWS_AS(decode("TAF"), MalformedBulletin);
    CHECK_THROWS_AS(decode("TAF KJFK 051130Z 0518/0512 31012KT P6SM"), MalformedBulletin);
    CHECK_THROWS_AS(decode("TAF KJFK 051130Z 0512/0618 P6SM FM071800 2SM"), UnresolvableGroupTime);
    CHECK_THROWS_AS(decode("TAF KJFK 051130Z 0512/0618 P6SM TEMPO 0710/0712 2SM"), UnresolvableGroupTime);
    CHECK_THROWS_AS(decode("TAF KJFK 051130Z 0512/0618 P6SM BECMG 2SM"), UnresolvableGroupTime);
}

namespace {

// Prevailing groups (BASE and FM) tile the validity window.
void check_tiling(const TafBulletin& b) {
    std::vector<TimeWindow> chain;
    for (const auto& g : b.groups)
        if (g.kind == GroupKind::base || g.kind == GroupKind::fm) chain.push_back(g.window);
    REQUIRE_FALSE(chain.empty());
    CHECK(chain.front().start == b.valid_from);
    for (std::size_t k = 1; k < chain.size(); ++k) CHECK(chain[k].start == chain[k - 1].end);
    CHECK(chain.back().end == b.valid_to);
    CHECK(chain.back().closed_end);
}

} // namespace

TEST_CASE("FM chain tiles validity and resolution is total inside it") {
    for (const auto& c : test::load_taf_corpus()) {
        if (!c.error.empty()) continue;
        CAPTURE(c.raw);
        auto b = parse_taf(c.raw, c.reference);
        bool has_becmg = false;
        for (const auto& g : b.groups) has_becmg |= g.kind == GroupKind::becmg;
        if (!has_becmg) check_tiling(b);
        if (!b.groups[0].visibility_sm) continue;
        for (Utc t = b.valid_from; t <= b.valid_to; t += minutes{30}) CHECK(resolve_visibility(b, t).has_value());
    }
}

TEST_CASE("adding a TEMPO group never raises resolved visibility") {
    std::mt19937_64 rng(11);
    const char* vis[] = {"0800", "1/2SM", "2SM", "4000", "9999", "P6SM", "3SM", ""};
    for (const auto& c : test::load_taf_corpus()) {
        if (!c.error.empty()) continue;
        auto base = parse_taf(c.raw, c.reference);
        for (int k = 0; k < 10; ++k) {
            auto span_h = (base.valid_to - base.valid_from) / hours{1};
            int a = int(rng() % span_h), len = 1 + int(rng() % 6);
            Utc s = base.valid_from + hours{a};
            Utc e = std::min(base.valid_to, s + hours{len});
            year_month_day ds{floor<days>(s)}, de{floor<days>(e)};
            int hs = int((s - floor<days>(s)) / hours{1});
            int he = int((e - floor<days>(e)) / hours{1});
            if (he == 0) {
                de = year_month_day{floor<days>(e) - days{1}};
                he = 24;
            }
            char group[64];
            std::snprintf(group, sizeof group, " TEMPO %02u%02d/%02u%02d %s", unsigned(ds.day()), hs,
                          unsigned(de.day()), he, vis[rng() % 8]);
            auto more = parse_taf(c.raw + group, c.reference);
            for (Utc t = base.valid_from; t <= base.valid_to; t += hours{1}) {
                auto before = resolve_visibility(base, t), after = resolve_visibility(more, t);
                if (before && after) CHECK(*after <= *before);
                if (before) CHECK(after.has_value());
            }
        }
    }
}

TEST_CASE("bulletin selection uses the latest issue at or before the decision time") {
    std::vector<TafBulletin> bs{
        decode("TAF KJFK 051730Z 0518/0624 31012KT P6SM", make_utc(2024, 3, 5, 17, 30)),
        decode("TAF KJFK 051130Z 0512/0618 31012KT 2SM BR", make_utc(2024, 3, 5, 11, 30)),
        decode("TAF AMD KJFK 051415Z 0514/0618 31012KT 1SM BR", make_utc(2024, 3, 5, 14, 15)),
    };
    sort_by_issue_time(bs);
    CHECK(select_bulletin(bs, make_utc(2024, 3, 5, 11)) == nullptr);
    CHECK(select_bulletin(bs, make_utc(2024, 3, 5, 11, 30))->issue_time == make_utc(2024, 3, 5, 11, 30));
    CHECK(select_bulletin(bs, make_utc(2024, 3, 5, 14))->issue_time == make_utc(2024, 3, 5, 11, 30));
    // The amendment replaces its predecessor from its issue time on.
    const TafBulletin* amd = select_bulletin(bs, make_utc(2024, 3, 5, 15));
    CHECK(amd->amended);
    CHECK(resolve_visibility(*amd, make_utc(2024, 3, 5, 18)) == 1.0);
    CHECK(select_bulletin(bs, make_utc(2024, 3, 6))->issue_time == make_utc(2024, 3, 5, 17, 30));
}

TEST_CASE("mutated bulletins decode or raise a data error") {
    auto corpus = test::load_taf_corpus();
    std::mt19937_64 rng(5);
    for (int i = 0; i < 3000; ++i) {
        const auto& c = corpus[rng() % corpus.size()];
        std::string raw = test::mutate(c.raw, rng);
        try {
            auto b = parse_taf(raw, c.reference);
            CHECK(b.valid_from < b.valid_to);
            for (const auto& g : b.groups) {
                CHECK(g.window.start >= b.valid_from);
                CHECK(g.window.end <= b.valid_to);
            }
        } catch (const DataError&) {
        }
    }
}
