#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crpq/parser.hpp"

#include "helpers.hpp"

using namespace crpq;

TEST_CASE("query parse and render round-trip") {
    Crpq q = parse_query("Q(x1,x2) <- x1 app jm1, x2 app jm1, jm1 app jm2");
    CHECK(q.name == "Q");
    CHECK(q.distinguished == std::vector<std::string>{"x1", "x2"});
    REQUIRE(q.atoms.size() == 3);
    CHECK(q.atoms[0].src == "x1");
    CHECK(q.atoms[2].dst == "jm2");

    Crpq back = parse_query(render_query(q));
    CHECK(render_query(back) == render_query(q));
}

TEST_CASE("query grammar errors") {
    CHECK_THROWS_AS(parse_query("Q(x) - x a y"), ParseError);      // no arrow
    CHECK_THROWS_AS(parse_query("(x) <- x a y"), ParseError);      // no name
    CHECK_THROWS_AS(parse_query("Q(x) <- x a"), ParseError);       // two fields
    CHECK_THROWS_AS(parse_query("Q(x) <- x a y b z"), ParseError); // four fields
    CHECK_THROWS_AS(parse_query("Q(x) <- "), ParseError);          // no atoms
    CHECK_THROWS_AS(parse_regex("(("), ParseError);
    CHECK_THROWS_AS(parse_regex("a+"), ParseError);  // '+' needs an operand here
}

TEST_CASE("query mode lexes maximal identifiers") {
    RegexPtr r = parse_regex("app.app");
    CHECK(render(r) == "app.app");
    // Without the dot, "appapp" is one label in query mode.
    CHECK(render(parse_regex("appapp")) == "appapp");
}

TEST_CASE("log mode lexes single characters and extra operators") {
    LogSyntaxFlags flags;
    RegexPtr r = parse_log_expression("ab*", flags);
    CHECK(testutil::derivative_match(r, {"a"}));
    CHECK(testutil::derivative_match(r, {"a", "b", "b"}));
    CHECK(!testutil::derivative_match(r, {"a", "a"}));

    r = parse_log_expression("a|b", flags);
    CHECK(testutil::derivative_match(r, {"b"}));

    r = parse_log_expression("a+", flags);  // postfix one-or-more
    CHECK(!testutil::derivative_match(r, {}));
    CHECK(testutil::derivative_match(r, {"a", "a"}));

    r = parse_log_expression("a?", flags);  // optional
    CHECK(testutil::derivative_match(r, {}));
    CHECK(testutil::derivative_match(r, {"a"}));

    CHECK(!flags.inverse);
    parse_log_expression("^a", flags);
    CHECK(flags.inverse);
    parse_log_expression("!a", flags);
    CHECK(flags.negation);
}

TEST_CASE("log mode IRI brackets give one opaque label") {
    LogSyntaxFlags flags;
    RegexPtr r = parse_log_expression("<http://example.org/p>*", flags);
    CHECK(r->kind == RegexKind::Star);
}

TEST_CASE("rendered random queries re-parse") {
    testutil::Rng rng(77);
    const std::vector<Label> alphabet = {"a", "b", "c"};
    for (int i = 0; i < 200; ++i) {
        Crpq q = testutil::random_query_in_row(rng, testutil::Row::CRPQ, alphabet);
        Crpq back = parse_query(render_query(q));
        CHECK(render_query(back) == render_query(q));
    }
}
