#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tmlg/csv.hpp"

#include <sstream>

using namespace tmlg;

TEST_CASE("plain and quoted fields") {
    std::istringstream in("a,b,c\r\n1,\"x,y\",\"he said \"\"hi\"\"\"\n\n\"multi\nline\",2,3\n");
    csv::Reader r(in);
    std::vector<std::string> f;
    REQUIRE(r.next(f));
    CHECK(f == std::vector<std::string>{"a", "b", "c"});
    CHECK(r.line() == 1);
    REQUIRE(r.next(f));
    CHECK(f == std::vector<std::string>{"1", "x,y", "he said \"hi\""});
    REQUIRE(r.next(f));
    CHECK(f == std::vector<std::string>{"multi\nline", "2", "3"});
    CHECK(r.line() == 4);
    CHECK_FALSE(r.next(f));
}

TEST_CASE("empty trailing field is kept") {
    std::istringstream in("a,,\n");
    csv::Reader r(in);
    std::vector<std::string> f;
    REQUIRE(r.next(f));
    CHECK(f.size() == 3);
    CHECK(f[2].empty());
}

TEST_CASE("delimiter detection") {
    CHECK(csv::detect_delimiter("a,b,c") == ',');
    CHECK(csv::detect_delimiter("a\tb\tc") == '\t');
    CHECK(csv::detect_delimiter("a;b;c") == ';');
    CHECK(csv::detect_delimiter("a|b") == '|');
    CHECK(csv::detect_delimiter("single") == ',');
}

TEST_CASE("write then read returns the same fields") {
    std::vector<std::vector<std::string>> rows = {{"pre\\post", "x,y", "q\"uote"}, {"", "line\nbreak", "plain"}};
    std::ostringstream out;
    for (const auto& row : rows) csv::write_row(out, row);
    std::istringstream in(out.str());
    csv::Reader r(in);
    std::vector<std::string> f;
    for (const auto& row : rows) {
        REQUIRE(r.next(f));
        CHECK(f == row);
    }
}

TEST_CASE("header normalisation") {
    CHECK(csv::normalize_header("\xEF\xBB\xBF From_Address ") == "from_address");
    CHECK(csv::escape("plain") == "plain");
    CHECK(csv::escape("a,b") == "\"a,b\"");
}
