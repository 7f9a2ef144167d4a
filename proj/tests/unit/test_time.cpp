#include "visnow/time.hpp"

#include <doctest.h>

using namespace visnow;
using namespace std::chrono;

TEST_CASE("format and parse round trip") {
    Utc t = make_utc(2024, 6, 21, 6, 5);
    CHECK(format_utc(t) == "2024-06-21T06:05Z");
    CHECK(parse_utc("2024-06-21T06:05Z") == t);
    CHECK(parse_utc("2024-06-21 06:05") == t);
    CHECK(parse_utc("2024-06-21T06:05:00") == t);
    CHECK(parse_utc("2024-06-21") == make_utc(2024, 6, 21));
    CHECK(format_date(sys_days{2024y / 2 / 29}) == "2024-02-29");
}

TEST_CASE("parse rejects malformed times") {
    CHECK_FALSE(parse_utc(""));
    CHECK_FALSE(parse_utc("2024-13-01"));
    CHECK_FALSE(parse_utc("2023-02-29"));
    CHECK_FALSE(parse_utc("2024-06-21T25:00"));
    CHECK_FALSE(parse_utc("2024-06-21T06:61"));
    CHECK_FALSE(parse_utc("2024-06-21X06:00"));
    CHECK_FALSE(parse_utc("2024-06-21T06:00+02:00"));
    CHECK_FALSE(parse_date("21/06/2024"));
}

TEST_CASE("nearest hour rounds exact half hours down") {
    CHECK(nearest_hour(make_utc(2024, 1, 1, 5, 29)) == Hour{sys_days{2024y / 1 / 1}} + hours{5});
    CHECK(nearest_hour(make_utc(2024, 1, 1, 5, 30)) == Hour{sys_days{2024y / 1 / 1}} + hours{5});
    CHECK(nearest_hour(make_utc(2024, 1, 1, 5, 31)) == Hour{sys_days{2024y / 1 / 1}} + hours{6});
    CHECK(nearest_hour(make_utc(2024, 1, 1, 23, 50)) == Hour{sys_days{2024y / 1 / 2}});
}

TEST_CASE("day resolution picks the latest match not after the reference") {
    Utc ref = make_utc(2024, 3, 5, 13, 0);
    CHECK(resolve_day_time(5, 12, 51, ref) == make_utc(2024, 3, 5, 12, 51));
    CHECK(resolve_day_time(28, 23, 0, ref) == make_utc(2024, 2, 28, 23, 0));
    // A day that does not exist in the previous month is looked up further back.
    CHECK(resolve_day_time(31, 0, 0, make_utc(2024, 3, 2)) == make_utc(2024, 1, 31));
    // Slack lets a report stamped slightly after the reference resolve forward.
    CHECK(resolve_day_time(6, 0, 10, ref) == make_utc(2024, 3, 6, 0, 10));
    CHECK_FALSE(resolve_day_time(0, 12, 0, ref));
    CHECK_FALSE(resolve_day_time(32, 12, 0, ref));
    CHECK_FALSE(resolve_day_time(5, 24, 30, ref));
    CHECK(resolve_day_time(4, 24, 0, ref) == make_utc(2024, 3, 5));
}
