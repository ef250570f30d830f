#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crpq/canonical.hpp"
#include "crpq/parser.hpp"

#include "helpers.hpp"

using namespace crpq;

TEST_CASE("build_canonical lays out disjoint atom paths") {
    Crpq q = parse_query("Q(x) <- x a.b y, y c z");
    CanonicalModel cm = build_canonical(q, {{"a", "b"}, {"c"}});
    // Path nodes: x, y, z plus one interior node for the two-letter word.
    CHECK(cm.kb.num_nodes() == 4);
    CHECK(cm.kb.edges.size() == 3);
    CHECK(cm.nu.at("x") == cm.kb.node("x"));
    // The spelled words are recorded atom by atom.
    REQUIRE(cm.atom_words.size() == 2);
    CHECK(cm.atom_words[0] == std::vector<Label>{"a", "b"});
    // Every atom path is embeddable back: src reaches dst along the word.
    CHECK(testutil::path_matches(cm.kb, cm.kb.node("x"), cm.kb.node("y"),
                                 re_word({"a", "b"})));
    CHECK(testutil::path_matches(cm.kb, cm.kb.node("y"), cm.kb.node("z"),
                                 re_word({"c"})));
}

TEST_CASE("empty words merge atom endpoints") {
    Crpq q = parse_query("Q(x) <- x a* y, y b z");
    CanonicalModel cm = build_canonical(q, {{}, {"b"}});
    // x and y collapse into one node named after the distinguished variable.
    CHECK(cm.kb.node("x") == cm.nu.at("x"));
    CHECK(cm.kb.num_nodes() == 2);
    CHECK_THROWS_AS(build_canonical(q, {{}}), std::invalid_argument);
}

TEST_CASE("enumerator streams every bounded model exactly once") {
    Crpq q = parse_query("Q() <- x a* y, y a+b z");
    CanonicalEnumerator en(q, 2);
    // a* within length 2: {eps, a, aa}; a+b: {a, b} -> six models.
    CHECK(en.total_models() == 6);
    CHECK(en.complete());
    std::set<std::string> seen;
    CanonicalModel cm;
    int count = 0;
    while (en.next(cm)) {
        ++count;
        std::string key;
        for (const auto& w : cm.atom_words) key += word_to_string(w, ".") + "|";
        CHECK(seen.insert(key).second);
        // Words must come from the atom languages.
        CHECK(testutil::derivative_match(q.atoms[0].regex, cm.atom_words[0]));
        CHECK(testutil::derivative_match(q.atoms[1].regex, cm.atom_words[1]));
    }
    CHECK(count == 6);
}

TEST_CASE("model_at matches stream order") {
    Crpq q = parse_query("Q() <- x a+b y, y a* z");
    CanonicalEnumerator en(q, 1);
    CanonicalEnumerator en2(q, 1);
    CanonicalModel cm;
    BigUint k = 0;
    while (en.next(cm)) {
        CanonicalModel direct = en2.model_at(k);
        CHECK(direct.atom_words == cm.atom_words);
        ++k;
    }
    CHECK(k == en2.total_models());
}

TEST_CASE("decompose_w_regex factors the W shapes") {
    RegexPtr r = parse_regex("a.(a+b).(a.b)*.c*");
    auto fs = decompose_w_regex(r);
    REQUIRE(fs.size() == 4);
    CHECK(fs[0].kind == WFactor::Kind::Fixed);
    CHECK(fs[1].kind == WFactor::Kind::Branch);
    CHECK(fs[1].alternatives == std::vector<Label>{"a", "b"});
    CHECK(fs[2].kind == WFactor::Kind::Power);
    CHECK(fs[2].word == std::vector<Label>{"a", "b"});
    CHECK(fs[3].kind == WFactor::Kind::Power);
    CHECK(fs[3].word == std::vector<Label>{"c"});
    CHECK_THROWS_AS(decompose_w_regex(parse_regex("(a*b)*")), std::invalid_argument);
}

TEST_CASE("compressed models expand to ordinary canonical models") {
    Crpq q = parse_query("Q(x) <- x (a.b)* y, y c z");
    std::vector<std::vector<WFactor>> factored;
    for (const auto& a : q.atoms) factored.push_back(decompose_w_regex(a.regex));
    CompressedWEnumerator en(q, factored, {{BigUint(0), BigUint(2), BigUint(5)}});
    CHECK(en.total_models() == 3);
    CompressedCanonicalModel cm;
    int count = 0;
    while (en.next(cm)) {
        ++count;
        CanonicalModel full = expand(cm, 1000);
        const BigUint& e = cm.exponent_choices[0][0];
        // The expanded path spells (ab)^e from x to y; at e = 0 the node y is
        // merged into x, so check the full x-to-z path (ab)^e c instead.
        std::vector<Label> word;
        for (BigUint i = 0; i < e; ++i) {
            word.push_back("a");
            word.push_back("b");
        }
        CHECK(testutil::derivative_match(q.atoms[0].regex, word));
        word.push_back("c");
        CHECK(testutil::path_matches(full.kb, full.nu.at("x"),
                                     full.kb.node("z"), re_word(word)));
    }
    CHECK(count == 3);
}

TEST_CASE("huge exponents stay symbolic until expansion") {
    Crpq q = parse_query("Q() <- x a* y");
    std::vector<std::vector<WFactor>> factored = {decompose_w_regex(q.atoms[0].regex)};
    BigUint huge = BigUint(1) << 100;
    CompressedWEnumerator en(q, factored, {{huge}});
    CompressedCanonicalModel cm;
    REQUIRE(en.next(cm));
    REQUIRE(cm.kb.power_edges.size() == 1);
    CHECK(cm.kb.power_edges[0].count == huge);
    CHECK_THROWS(expand(cm, 1000));  // the guard must refuse the blowup
}
