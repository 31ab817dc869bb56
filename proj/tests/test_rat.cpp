#include <catch2/catch_amalgamated.hpp>

#include "wefc/rat.hpp"

using namespace wefc;

TEST_CASE("parse and print round-trip") {
    CHECK(rat_str(rat_parse("0")) == "0");
    CHECK(rat_str(rat_parse("-7")) == "-7");
    CHECK(rat_str(rat_parse("1/2")) == "1/2");
    CHECK(rat_str(rat_parse("-3/4")) == "-3/4");
    CHECK(rat_str(rat_parse("+5/10")) == "1/2");
    CHECK(rat_str(rat_parse("6/3")) == "2");
    CHECK(rat_str(rat_parse("-6/4")) == "-3/2");
    CHECK(rat_str(rat_parse("0/9")) == "0");
}

TEST_CASE("malformed rationals are rejected") {
    for (const char* s : {"", "1/0", "1/-2", "a", "1.5", "1/2/3", "2 /3", "--1", "/3", "3/"})
        CHECK_THROWS_AS(rat_parse(s), Error);
}

TEST_CASE("arithmetic keeps canonical form") {
    Rat a = rat_parse("1/6"), b = rat_parse("1/3");
    CHECK(rat_str(a + b) == "1/2");
    CHECK(rat_str(a - b) == "-1/6");
    CHECK(rat_str(a * b) == "1/18");
    CHECK(rat_str(a / b) == "1/2");
    CHECK(a + b == rat_parse("3/6"));
}

TEST_CASE("integrality predicates") {
    CHECK(rat_is_integer(rat_parse("4")));
    CHECK(!rat_is_integer(rat_parse("1/2")));
    CHECK(rat_is_01(Rat(0)));
    CHECK(rat_is_01(Rat(1)));
    CHECK(!rat_is_01(rat_parse("1/2")));
    CHECK(!rat_is_01(Rat(2)));
    CHECK(rat_to_long(rat_parse("-12")) == -12);
    CHECK_THROWS_AS(rat_to_long(rat_parse("1/2")), Error);
}

TEST_CASE("decimal rendering marks truncation") {
    bool exact = false;
    CHECK(rat_decimal(rat_parse("1/2"), 10, &exact) == "0.5");
    CHECK(exact);
    CHECK(rat_decimal(rat_parse("-9/4"), 10, &exact) == "-2.25");
    CHECK(exact);
    CHECK(rat_decimal(rat_parse("22"), 10, &exact) == "22");
    CHECK(exact);
    rat_decimal(rat_parse("1/3"), 5, &exact);
    CHECK(!exact);
    CHECK(rat_decimal(rat_parse("1/3"), 5, nullptr) == "0.33333");
}
