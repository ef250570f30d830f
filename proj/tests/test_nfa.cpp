#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crpq/nfa.hpp"
#include "crpq/parser.hpp"

#include "helpers.hpp"

using namespace crpq;

namespace {

// Every word over the alphabet up to the length bound.
std::vector<std::vector<Label>> all_words(const std::vector<Label>& alphabet,
                                          int max_len) {
    std::vector<std::vector<Label>> out{{}}, layer{{}};
    for (int len = 1; len <= max_len; ++len) {
        std::vector<std::vector<Label>> next;
        for (const auto& w : layer)
            for (const Label& a : alphabet) {
                auto v = w;
                v.push_back(a);
                next.push_back(v);
                out.push_back(std::move(v));
            }
        layer = std::move(next);
    }
    return out;
}

}  // namespace

TEST_CASE("membership matches the derivative oracle on random regexes") {
    testutil::Rng rng(20240818);
    const std::vector<Label> alphabet = {"a", "b"};
    const auto words = all_words(alphabet, 5);
    for (int i = 0; i < 150; ++i) {
        RegexPtr r = testutil::random_regex(rng, testutil::pick(rng, 1, 6), alphabet);
        Nfa nfa = compile(r, {"a", "b"});
        for (const auto& w : words)
            REQUIRE(accepts(nfa, w) == testutil::derivative_match(r, w));
    }
}

TEST_CASE("wildcard compiles against the supplied alphabet") {
    RegexPtr r = parse_regex("a._*");
    Nfa nfa = compile(r, {"a", "b", "c"});
    CHECK(accepts(nfa, {"a"}));
    CHECK(accepts(nfa, {"a", "b", "c"}));
    CHECK(!accepts(nfa, {"b"}));
    CHECK_THROWS_AS(compile(parse_regex("_"), std::set<Label>{}),
                    std::invalid_argument);
}

TEST_CASE("enumerate_words lists the language in order and completely") {
    testutil::Rng rng(5150);
    const std::vector<Label> alphabet = {"a", "b"};
    for (int i = 0; i < 100; ++i) {
        RegexPtr r = testutil::random_regex(rng, testutil::pick(rng, 1, 5), alphabet);
        Nfa nfa = compile(r, {"a", "b"});
        std::vector<std::vector<Label>> got;
        bool complete = enumerate_words(nfa, 4, 100000, got);
        CHECK(complete);
        auto expected = testutil::enumerate_language(r, alphabet, 4);
        // Oracle enumerates length-first over the same sorted alphabet.
        REQUIRE(got == expected);
    }
}

TEST_CASE("enumerate_words honors the count cap") {
    Nfa nfa = compile(parse_regex("a*"), {"a"});
    std::vector<std::vector<Label>> got;
    bool complete = enumerate_words(nfa, 50, 5, got);
    CHECK(!complete);
    CHECK(got.size() == 5);
}

TEST_CASE("viable prefixes and suffixes") {
    // Language a.b.a: the only viable prefix of length 2 is "ab".
    Nfa nfa = compile(parse_regex("a.b.a"), {"a", "b"});
    std::vector<std::vector<Label>> out;
    CHECK(enumerate_viable_prefixes(nfa, 2, 100, out));
    REQUIRE(out.size() == 1);
    CHECK(out[0] == std::vector<Label>{"a", "b"});
    CHECK(enumerate_viable_suffixes(nfa, 2, 100, out));
    REQUIRE(out.size() == 1);
    CHECK(out[0] == std::vector<Label>{"b", "a"});
}

TEST_CASE("viable prefixes agree with a brute-force definition") {
    testutil::Rng rng(31337);
    const std::vector<Label> alphabet = {"a", "b"};
    for (int i = 0; i < 60; ++i) {
        RegexPtr r = testutil::random_regex(rng, testutil::pick(rng, 1, 5), alphabet);
        Nfa nfa = compile(r, {"a", "b"});
        // Brute force: w is viable iff some extension of length <= leaf count+4
        // lands in the language.
        auto lang = testutil::enumerate_language(r, alphabet, 6);
        for (int len = 0; len <= 2; ++len) {
            std::set<std::vector<Label>> expected;
            for (const auto& w : lang)
                if (static_cast<int>(w.size()) >= len)
                    expected.insert({w.begin(), w.begin() + len});
            std::vector<std::vector<Label>> got;
            REQUIRE(enumerate_viable_prefixes(nfa, len, 100000, got));
            std::set<std::vector<Label>> got_set(got.begin(), got.end());
            // The brute-force set misses prefixes whose completions are all
            // longer than the enumeration depth, so one-sided containment.
            for (const auto& w : expected) CHECK(got_set.count(w));
        }
    }
}
