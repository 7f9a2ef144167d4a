#include "visnow/csv.hpp"

#include <doctest.h>

#include <sstream>

using namespace visnow;

TEST_CASE("split handles quotes and empty fields") {
    CHECK(csv::split("a,b,c") == csv::Row{"a", "b", "c"});
    CHECK(csv::split("a,,c,") == csv::Row{"a", "", "c", ""});
    CHECK(csv::split(R"("x, y","say ""hi""",z)") == csv::Row{"x, y", R"(say "hi")", "z"});
    CHECK(csv::split("a,b\r") == csv::Row{"a", "b"});
}

TEST_CASE("write then read round trip") {
    std::stringstream ss;
    csv::Row header{"station", "metar"};
    csv::Row row{"KJFK", "KJFK 051251Z 31015KT, odd \"quoted\""};
    csv::write_row(ss, header);
    ss << "# comment\n\n";
    csv::write_row(ss, row);
    csv::Reader r(ss);
    CHECK(r.header() == header);
    CHECK(r.column("metar") == 1u);
    CHECK_FALSE(r.column("nope"));
    csv::Row got;
    REQUIRE(r.next(got));
    CHECK(got == row);
    CHECK_FALSE(r.next(got));
}

TEST_CASE("escape quotes leading and trailing spaces") {
    CHECK(csv::escape("plain") == "plain");
    CHECK(csv::escape(" pad") == "\" pad\"");
    CHECK(csv::escape("a\"b") == "\"a\"\"b\"");
}
