#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crpq/regex.hpp"
#include "crpq/parser.hpp"

#include "helpers.hpp"

using namespace crpq;

TEST_CASE("constructors and basic predicates") {
    CHECK(is_empty_language(re_empty()));
    CHECK(!is_empty_language(re_epsilon()));
    CHECK(!is_empty_language(re_star(re_empty())));  // contains epsilon
    CHECK(is_empty_language(re_concat(re_symbol("a"), re_empty())));
    CHECK(!is_empty_language(re_union(re_symbol("a"), re_empty())));

    CHECK(nullable(re_epsilon()));
    CHECK(nullable(re_star(re_symbol("a"))));
    CHECK(!nullable(re_symbol("a")));
    CHECK(nullable(re_concat(re_epsilon(), re_star(re_symbol("b")))));

    CHECK_THROWS_AS(re_symbol(""), std::invalid_argument);

    CHECK(leaf_count(re_word({"a", "b", "c"})) == 3);
    CHECK(symbols_of(re_any_of({"a", "b"})) == std::set<Label>{"a", "b"});
    CHECK(uses_wildcard(re_star(re_wildcard())));
    CHECK(!uses_wildcard(re_word({"a", "b"})));
}

TEST_CASE("render fixture strings") {
    CHECK(render(re_star(re_symbol("a"))) == "a*");
    CHECK(render(re_concat(re_symbol("a"), re_star(re_symbol("b")))) == "a.b*");
    CHECK(render(re_star(re_union(re_symbol("a"), re_symbol("b")))) == "(a+b)*");
    CHECK(render(re_empty()) == "[]");
    CHECK(render(re_epsilon()) == "()");
}

TEST_CASE("render/parse round-trip on random regexes") {
    testutil::Rng rng(20240817);
    const std::vector<Label> alphabet = {"a", "b", "app"};
    for (int i = 0; i < 300; ++i) {
        RegexPtr r = testutil::random_regex(rng, testutil::pick(rng, 1, 8), alphabet);
        RegexPtr back = parse_regex(render(r));
        // The reparse need not be structurally identical (parentheses regroup
        // associativity), so compare languages on all short words instead.
        auto w1 = testutil::enumerate_language(r, alphabet, 4);
        auto w2 = testutil::enumerate_language(back, alphabet, 4);
        REQUIRE(w1 == w2);
    }
}

TEST_CASE("regex_equal is structural") {
    RegexPtr a = re_concat(re_symbol("a"), re_symbol("b"));
    RegexPtr b = re_concat(re_symbol("a"), re_symbol("b"));
    CHECK(regex_equal(a, b));
    CHECK(!regex_equal(a, re_concat(re_symbol("b"), re_symbol("a"))));
}
