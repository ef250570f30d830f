#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "crpq/corpus.hpp"

#include "helpers.hpp"

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

using namespace crpq;

namespace {

// Writes `lines` to a temp file and returns its path.
std::string write_log(const std::vector<std::string>& lines) {
    static int serial = 0;
    std::string path =
        "corpus_test_" + std::to_string(serial++) + ".log";
    std::ofstream out(path);
    for (const auto& l : lines) out << l << '\n';
    return path;
}

struct LogFile {
    std::string path;
    explicit LogFile(const std::vector<std::string>& lines)
        : path(write_log(lines)) {}
    ~LogFile() { std::remove(path.c_str()); }
};

ClassReport classify_all(const std::vector<std::string>& exprs) {
    ClassReport rep;
    for (const auto& e : exprs) {
        LogRecord rec;
        rec.raw = e;
        report_add(rep, rec, classify_expression_string(e));
    }
    return rep;
}

}  // namespace

TEST_CASE("expression strings classify into the expected classes") {
    struct Row {
        const char* expr;
        bool a_astar, a_Astar, A_astar, A_Astar;
    };
    // Membership is cumulative along the lattice.
    std::vector<Row> rows = {
        {"a", true, true, true, true},
        {"a+", true, true, true, true},            // a then a* in log syntax
        {"ab+", true, true, true, true},
        {"a|b", false, false, true, true},         // union in a single slot
        {"(a|b)c+", false, false, true, true},
        {"a(b|c)*", false, true, false, true},     // union only under a star
        {"a(b|c)+", false, false, false, true},    // + leaves a bare union
        {"(a|b)(c|d)+", false, false, false, true},
        {"a?", false, false, false, false},        // optional: general regex
        {"(ab)+", false, false, false, false},     // starred word: W only
    };
    for (const auto& row : rows) {
        auto ec = classify_expression_string(row.expr);
        INFO("expr=", row.expr, " class=", fragment_name(ec.cls));
        CHECK(!ec.unparseable);
        CHECK(in_fragment_a_astar(ec.cls) == row.a_astar);
        CHECK(in_fragment_a_Astar(ec.cls) == row.a_Astar);
        CHECK(in_fragment_A_astar(ec.cls) == row.A_astar);
        CHECK(in_fragment_A_Astar(ec.cls) == row.A_Astar);
    }
}

TEST_CASE("inverse, negation, and parse failures are flagged and excluded") {
    auto inv = classify_expression_string("^a");
    CHECK(inv.inverse);
    CHECK(!inv.unparseable);
    CHECK(detail::report_classes(inv).empty());

    auto neg = classify_expression_string("!a");
    CHECK(neg.wildcard);
    CHECK(!neg.unparseable);
    CHECK(detail::report_classes(neg).empty());

    auto wild = classify_expression_string("_+");
    CHECK(wild.wildcard);
    CHECK(detail::report_classes(wild).empty());

    auto bad = classify_expression_string("((");
    CHECK(bad.unparseable);
    CHECK(detail::report_classes(bad).empty());

    auto iri = classify_expression_string("<http://example.org/knows>");
    CHECK(!iri.unparseable);
    CHECK(in_fragment_a_astar(iri.cls));
}

TEST_CASE("report classes are cumulative along the lattice") {
    // Every expression that counts toward a lower class also counts toward
    // everything above it; (A,A*) dominates the other three.
    std::vector<std::string> pool = {"a",      "ab+",      "a|b", "a(b|c)+",
                                     "(a|b)c+", "(a|b)(c|d)+", "abc"};
    for (const auto& e : pool) {
        auto idx = detail::report_classes(classify_expression_string(e));
        std::set<int> s(idx.begin(), idx.end());
        if (s.count(0)) {
            CHECK(s.count(1));
            CHECK(s.count(2));
        }
        if (s.count(1)) CHECK(s.count(3));
        if (s.count(2)) CHECK(s.count(3));
        CHECK(s.count(3));  // all parseable simple expressions fit (A,A*)
    }
}

TEST_CASE("report counts on a known mix") {
    // Three records, one duplicated expression kept as separate records.
    ClassReport rep = classify_all({"a+", "a+", "ab+"});
    CHECK(rep.valid_total == 3);
    CHECK(rep.unique_total == 3);
    CHECK(rep.unparseable_total == 0);
    for (int i = 0; i < ClassReport::kNumClasses; ++i) {
        CHECK(rep.valid_count[i] == 3);
        CHECK(rep.unique_count[i] == 3);
        CHECK(rep.valid_pct(i) == doctest::Approx(100.0));
    }

    // One (a,a*) and one general-union expression: the lower classes get
    // half the weight, the top class everything.
    ClassReport mix = classify_all({"a+", "a|b"});
    CHECK(mix.valid_count[0] == 1);
    CHECK(mix.valid_count[1] == 1);
    CHECK(mix.valid_count[2] == 2);
    CHECK(mix.valid_count[3] == 2);
    CHECK(mix.valid_pct(0) == doctest::Approx(50.0));
    CHECK(mix.valid_pct(3) == doctest::Approx(100.0));
}

TEST_CASE("log line parsing handles counts and rejects bad ones") {
    auto plain = parse_log_line("ab+");
    CHECK(plain.raw == "ab+");
    CHECK(plain.multiplicity == 1);
    CHECK(!plain.unparseable);

    auto counted = parse_log_line("ab+\t42");
    CHECK(counted.raw == "ab+");
    CHECK(counted.multiplicity == 42);
    CHECK(!counted.unparseable);

    CHECK(parse_log_line("ab+\tx").unparseable);
    CHECK(parse_log_line("ab+\t0").unparseable);
    CHECK(parse_log_line("ab+\t-3").unparseable);
    CHECK(parse_log_line("ab+\t3x").unparseable);
}

TEST_CASE("analyze_log tallies a file, with and without dedupe") {
    LogFile log({"a+\t10", "a+\t5", "a|b\t4", "((\t7", "", "  ", "b"});

    ClassReport rep = analyze_log(log.path, false);
    CHECK(rep.valid_total == 20);   // 10 + 5 + 4 + 1
    CHECK(rep.unique_total == 4);   // a+ twice, a|b, b
    CHECK(rep.unparseable_total == 7);
    CHECK(rep.valid_count[0] == 16);  // both a+ lines and b
    CHECK(rep.valid_count[3] == 20);

    ClassReport dd = analyze_log(log.path, true);
    // Dedupe folds the two a+ lines into one record of multiplicity 15.
    CHECK(dd.valid_total == 20);
    CHECK(dd.unique_total == 3);
    CHECK(dd.unparseable_total == 7);
    CHECK(dd.valid_count[0] == 16);
    CHECK(dd.unique_count[0] == 2);

    // Dedupe never increases the unique totals.
    for (int i = 0; i < ClassReport::kNumClasses; ++i) {
        CHECK(dd.unique_count[i] <= rep.unique_count[i]);
        CHECK(dd.valid_count[i] == rep.valid_count[i]);
    }

    CHECK_THROWS_AS(analyze_log("no_such_file.log", false),
                    std::runtime_error);
}

TEST_CASE("analyze_log ignores blank lines and carriage returns") {
    LogFile log({"a+\r", "", "\t", "b\t2\r"});
    ClassReport rep = analyze_log(log.path, false);
    CHECK(rep.valid_total == 3);
    CHECK(rep.unique_total == 2);
    CHECK(rep.unparseable_total == 0);

    LogFile empty({});
    ClassReport zero = analyze_log(empty.path, false);
    CHECK(zero.valid_total == 0);
    CHECK(zero.unique_total == 0);
    CHECK(zero.unparseable_total == 0);
}

TEST_CASE("report serialization round-trips the counters") {
    LogFile log({"a+\t3", "a|b", "((\t2"});
    ClassReport rep = analyze_log(log.path, false);

    auto j = report_to_json(rep);
    CHECK(j["valid_total"] == rep.valid_total);
    CHECK(j["unique_total"] == rep.unique_total);
    CHECK(j["unparseable_total"] == rep.unparseable_total);
    REQUIRE(j["classes"].size() == ClassReport::kNumClasses);
    for (int i = 0; i < ClassReport::kNumClasses; ++i) {
        CHECK(j["classes"][i]["class"] == ClassReport::class_names()[i]);
        CHECK(j["classes"][i]["valid_count"] == rep.valid_count[i]);
        CHECK(j["classes"][i]["unique_count"] == rep.unique_count[i]);
    }

    std::string text = report_to_text(rep);
    for (const char* name : ClassReport::class_names())
        CHECK(text.find(name) != std::string::npos);
    CHECK(text.find("unparseable: 2") != std::string::npos);
}

TEST_CASE("random query-mode regexes classify consistently in log mode") {
    // Render a random regex in the log grammar (single-char labels, '|'
    // unions, '*' stars); the class must agree with classifying the regex
    // tree directly.
    testutil::Rng rng(20240817);
    std::vector<Label> alphabet = {"a", "b", "c"};
    int checked = 0;
    for (int it = 0; it < 400; ++it) {
        auto r = testutil::random_regex_in_row(
            rng, testutil::Row::A_Astar, alphabet);
        // Log syntax: one char per label, '|' unions, '+' for star.
        std::string s;
        bool expressible = true;
        std::function<void(const RegexPtr&, bool)> emit =
            [&](const RegexPtr& re, bool top) {
                switch (re->kind) {
                    case RegexKind::Symbol:
                        s += re->symbol;
                        break;
                    case RegexKind::Concat:
                        emit(re->left, false);
                        emit(re->right, false);
                        break;
                    case RegexKind::Union:
                        if (!top) s += '(';
                        emit(re->left, false);
                        s += '|';
                        emit(re->right, false);
                        if (!top) s += ')';
                        break;
                    case RegexKind::Star:
                        if (re->left->kind == RegexKind::Symbol) {
                            s += re->left->symbol;
                        } else if (re->left->kind == RegexKind::Union) {
                            s += '(';
                            emit(re->left, true);
                            s += ')';
                        } else {
                            expressible = false;
                        }
                        s += '*';
                        break;
                    default:
                        expressible = false;
                }
            };
        emit(r, true);
        if (!expressible || s.empty()) continue;
        ++checked;
        auto ec = classify_expression_string(s);
        INFO("expr=", s);
        REQUIRE(!ec.unparseable);
        auto direct = classify_regex(r);
        CHECK(in_fragment_a_astar(ec.cls) == in_fragment_a_astar(direct));
        CHECK(in_fragment_a_Astar(ec.cls) == in_fragment_a_Astar(direct));
        CHECK(in_fragment_A_astar(ec.cls) == in_fragment_A_astar(direct));
        CHECK(in_fragment_A_Astar(ec.cls) == in_fragment_A_Astar(direct));
    }
    CHECK(checked > 100);
}
