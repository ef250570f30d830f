#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crpq/fragment.hpp"
#include "crpq/parser.hpp"

#include "helpers.hpp"

using namespace crpq;

static std::string classify_str(const std::string& regex_text) {
    return fragment_name(classify_regex(parse_regex(regex_text)));
}

TEST_CASE("fixture expressions classify to their names") {
    CHECK(classify_str("a*") == "(a,a*)");
    CHECK(classify_str("a.b*") == "(a,a*)");
    CHECK(classify_str("(a+b)c*") == "(A,a*)");
    CHECK(classify_str("a(b+c)*d") == "(a,A*)");
    CHECK(classify_str("a") == "a");
    CHECK(classify_str("a+b") == "A");
    CHECK(classify_str("(a+b)(b+c)") == "A");
    CHECK(classify_str("(a+b)*") == "(a,A*)");
    CHECK(classify_str("(a+b)(c+b)*") == "(A,A*)");
    CHECK(classify_str("(a.b)*") == "W");
    CHECK(classify_str("_*a") == "W");
    CHECK(classify_str("(a.b+c)*") == "CRPQ");
    CHECK(classify_str("(a*b)*") == "CRPQ");
}

TEST_CASE("duplicate alternatives collapse") {
    // a + a is just a single symbol; (a+a)* a single-symbol star.
    CHECK(classify_str("a+a") == "a");
    CHECK(classify_str("(a+a)*") == "(a,a*)");
}

TEST_CASE("fragment predicates nest along the lattice") {
    testutil::Rng rng(4242);
    const std::vector<Label> alphabet = {"a", "b", "c"};
    for (int i = 0; i < 500; ++i) {
        RegexPtr r = testutil::random_regex(rng, testutil::pick(rng, 1, 6), alphabet);
        FragmentClass fc = classify_regex(r);
        if (in_fragment_a(fc)) CHECK(in_fragment_A(fc));
        if (in_fragment_a(fc)) CHECK(in_fragment_a_astar(fc));
        if (in_fragment_a_astar(fc)) CHECK(in_fragment_A_astar(fc));
        if (in_fragment_a_astar(fc)) CHECK(in_fragment_a_Astar(fc));
        if (in_fragment_A_astar(fc)) CHECK(in_fragment_A_Astar(fc));
        if (in_fragment_a_Astar(fc)) CHECK(in_fragment_A_Astar(fc));
        if (in_fragment_A_astar(fc)) CHECK(in_fragment_w(fc));
    }
}

TEST_CASE("row generators land in their rows") {
    using testutil::Row;
    testutil::Rng rng(99);
    const std::vector<Label> alphabet = {"a", "b", "c"};
    for (int i = 0; i < 300; ++i) {
        auto in_row = [&](Row row, const FragmentClass& fc) {
            switch (row) {
                case Row::a: return in_fragment_a(fc);
                case Row::A: return in_fragment_A(fc);
                case Row::a_astar: return in_fragment_a_astar(fc);
                case Row::A_astar: return in_fragment_A_astar(fc);
                case Row::a_Astar: return in_fragment_a_Astar(fc);
                case Row::A_Astar: return in_fragment_A_Astar(fc);
                case Row::W: return in_fragment_w(fc);
                case Row::CRPQ: return true;
            }
            return false;
        };
        for (Row row : {Row::a, Row::A, Row::a_astar, Row::A_astar,
                        Row::a_Astar, Row::A_Astar, Row::W}) {
            RegexPtr r = testutil::random_regex_in_row(rng, row, alphabet);
            CHECK(in_row(row, classify_regex(r)));
        }
    }
}

TEST_CASE("query classification joins atom classes") {
    Crpq q = parse_query("Q() <- x a y, y b* z");
    CHECK(fragment_name(classify_query(q)) == "(a,a*)");
    q = parse_query("Q() <- x a+b y, y (b+c)* z");
    CHECK(fragment_name(classify_query(q)) == "(A,A*)");
}
