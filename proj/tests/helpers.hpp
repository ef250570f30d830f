#ifndef CRPQ_TESTS_HELPERS_HPP
#define CRPQ_TESTS_HELPERS_HPP

// Test-side oracles and random generators.  Everything here is implemented
// independently of the library's algorithms: regex matching uses Brzozowski
// derivatives, path reachability uses a Thompson construction with explicit
// epsilon edges, and embeddings are found by exhaustive assignment
// enumeration.  Agreement between these and the library is what the property
// tests check.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "crpq/kb.hpp"
#include "crpq/query.hpp"
#include "crpq/regex.hpp"

namespace testutil {

using crpq::Crpq;
using crpq::KnowledgeBase;
using crpq::Label;
using crpq::Regex;
using crpq::RegexKind;
using crpq::RegexPtr;

// --- Brzozowski derivative matcher -----------------------------------------

// Lightly simplifying constructors keep derivative towers small.
inline RegexPtr d_concat(const RegexPtr& a, const RegexPtr& b) {
    if (a->kind == RegexKind::Empty || b->kind == RegexKind::Empty)
        return crpq::re_empty();
    if (a->kind == RegexKind::Epsilon) return b;
    if (b->kind == RegexKind::Epsilon) return a;
    return crpq::re_concat(a, b);
}

inline RegexPtr d_union(const RegexPtr& a, const RegexPtr& b) {
    if (a->kind == RegexKind::Empty) return b;
    if (b->kind == RegexKind::Empty) return a;
    if (crpq::render(a) == crpq::render(b)) return a;
    return crpq::re_union(a, b);
}

inline RegexPtr derivative(const RegexPtr& r, const Label& a) {
    switch (r->kind) {
        case RegexKind::Empty:
        case RegexKind::Epsilon: return crpq::re_empty();
        case RegexKind::Symbol:
            return r->symbol == a ? crpq::re_epsilon() : crpq::re_empty();
        case RegexKind::Wildcard: return crpq::re_epsilon();
        case RegexKind::Concat: {
            RegexPtr first = d_concat(derivative(r->left, a), r->right);
            if (!crpq::nullable(r->left)) return first;
            return d_union(first, derivative(r->right, a));
        }
        case RegexKind::Union:
            return d_union(derivative(r->left, a), derivative(r->right, a));
        case RegexKind::Star:
            return d_concat(derivative(r->left, a), crpq::re_star(r->left));
    }
    return crpq::re_empty();
}

inline bool derivative_match(RegexPtr r, const std::vector<Label>& word) {
    for (const Label& a : word) r = derivative(r, a);
    return crpq::nullable(r);
}

// --- Thompson construction with epsilon edges ------------------------------

// Label "" marks an epsilon edge, "_" a wildcard edge.
struct TNfa {
    int num_states = 0;
    int start = 0;
    int accept = 0;
    std::vector<std::tuple<int, Label, int>> edges;
};

namespace detail {

inline std::pair<int, int> thompson_rec(const RegexPtr& r, TNfa& n) {
    int s = n.num_states++;
    int t = n.num_states++;
    switch (r->kind) {
        case RegexKind::Empty: break;  // no edge at all
        case RegexKind::Epsilon: n.edges.push_back({s, "", t}); break;
        case RegexKind::Symbol: n.edges.push_back({s, r->symbol, t}); break;
        case RegexKind::Wildcard: n.edges.push_back({s, "_", t}); break;
        case RegexKind::Concat: {
            auto [ls, lt] = thompson_rec(r->left, n);
            auto [rs, rt] = thompson_rec(r->right, n);
            n.edges.push_back({s, "", ls});
            n.edges.push_back({lt, "", rs});
            n.edges.push_back({rt, "", t});
            break;
        }
        case RegexKind::Union: {
            auto [ls, lt] = thompson_rec(r->left, n);
            auto [rs, rt] = thompson_rec(r->right, n);
            n.edges.push_back({s, "", ls});
            n.edges.push_back({s, "", rs});
            n.edges.push_back({lt, "", t});
            n.edges.push_back({rt, "", t});
            break;
        }
        case RegexKind::Star: {
            auto [bs, bt] = thompson_rec(r->left, n);
            n.edges.push_back({s, "", t});
            n.edges.push_back({s, "", bs});
            n.edges.push_back({bt, "", bs});
            n.edges.push_back({bt, "", t});
            break;
        }
    }
    return {s, t};
}

}  // namespace detail

inline TNfa thompson(const RegexPtr& r) {
    TNfa n;
    auto [s, t] = detail::thompson_rec(r, n);
    n.start = s;
    n.accept = t;
    return n;
}

inline void eps_close(const TNfa& n, std::set<int>& states) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [u, lab, v] : n.edges)
            if (lab.empty() && states.count(u) && !states.count(v)) {
                states.insert(v);
                changed = true;
            }
    }
}

inline bool thompson_accepts(const TNfa& n, const std::vector<Label>& word) {
    std::set<int> cur{n.start};
    eps_close(n, cur);
    for (const Label& a : word) {
        std::set<int> next;
        for (const auto& [u, lab, v] : n.edges)
            if (cur.count(u) && (lab == a || lab == "_")) next.insert(v);
        eps_close(n, next);
        cur = std::move(next);
        if (cur.empty()) return false;
    }
    return cur.count(n.accept) != 0;
}

// All words of the language up to the given length, by exhaustive trial over
// the alphabet.
inline std::vector<std::vector<Label>> enumerate_language(
    const RegexPtr& r, const std::vector<Label>& alphabet, int max_len) {
    TNfa n = thompson(r);
    std::vector<std::vector<Label>> out, layer{{}};
    for (int len = 0; len <= max_len; ++len) {
        for (const auto& w : layer)
            if (thompson_accepts(n, w)) out.push_back(w);
        if (len == max_len) break;
        std::vector<std::vector<Label>> next;
        for (const auto& w : layer)
            for (const Label& a : alphabet) {
                auto v = w;
                v.push_back(a);
                next.push_back(std::move(v));
            }
        layer = std::move(next);
    }
    return out;
}

// --- exhaustive embedding oracle -------------------------------------------

// Some path from u to v spells a word of the regex: breadth-first search on
// (graph node, automaton state) pairs.
inline bool path_matches(const KnowledgeBase& kb, int u, int v,
                         const RegexPtr& r) {
    TNfa n = thompson(r);
    std::set<std::pair<int, int>> seen;
    std::vector<std::pair<int, int>> stack{{u, n.start}};
    seen.insert({u, n.start});
    while (!stack.empty()) {
        auto [node, state] = stack.back();
        stack.pop_back();
        if (node == v && state == n.accept) return true;
        for (const auto& [s, lab, t] : n.edges) {
            if (s != state) continue;
            if (lab.empty()) {
                if (seen.insert({node, t}).second) stack.push_back({node, t});
                continue;
            }
            for (const auto& e : kb.edges)
                if (e.src == node && (lab == "_" || lab == e.label) &&
                    seen.insert({e.dst, t}).second)
                    stack.push_back({e.dst, t});
        }
    }
    return false;
}

// Tries every assignment of query variables to graph nodes.
inline std::optional<std::map<std::string, int>> brute_embedding(
    const Crpq& q, const KnowledgeBase& kb,
    const std::map<std::string, int>& pinning = {}) {
    std::vector<std::string> vars = crpq::variables_of(q);
    std::map<std::string, int> assign = pinning;
    // Memoized per-atom relation, oracle-computed.
    std::vector<std::vector<std::vector<char>>> rel(q.atoms.size());
    for (std::size_t i = 0; i < q.atoms.size(); ++i) {
        rel[i].assign(kb.num_nodes(), std::vector<char>(kb.num_nodes(), 0));
        for (int u = 0; u < kb.num_nodes(); ++u)
            for (int v = 0; v < kb.num_nodes(); ++v)
                rel[i][u][v] = path_matches(kb, u, v, q.atoms[i].regex);
    }
    std::function<bool(std::size_t)> go = [&](std::size_t k) -> bool {
        if (k == vars.size()) {
            for (std::size_t i = 0; i < q.atoms.size(); ++i)
                if (!rel[i][assign.at(q.atoms[i].src)]
                          [assign.at(q.atoms[i].dst)])
                    return false;
            return true;
        }
        if (assign.count(vars[k])) return go(k + 1);
        for (int node = 0; node < kb.num_nodes(); ++node) {
            assign[vars[k]] = node;
            if (go(k + 1)) return true;
        }
        assign.erase(vars[k]);
        return false;
    };
    if (go(0)) return assign;
    return std::nullopt;
}

// --- random generators ------------------------------------------------------

using Rng = std::mt19937;

inline int pick(Rng& rng, int lo, int hi) {  // inclusive bounds
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline Label pick_label(Rng& rng, const std::vector<Label>& alphabet) {
    return alphabet[pick(rng, 0, static_cast<int>(alphabet.size()) - 1)];
}

// Unrestricted random regex with roughly `size` leaves.
inline RegexPtr random_regex(Rng& rng, int size,
                             const std::vector<Label>& alphabet) {
    if (size <= 1) {
        switch (pick(rng, 0, 5)) {
            case 0: return crpq::re_epsilon();
            default: return crpq::re_symbol(pick_label(rng, alphabet));
        }
    }
    int split = pick(rng, 1, size - 1);
    switch (pick(rng, 0, 3)) {
        case 0:
            return crpq::re_union(random_regex(rng, split, alphabet),
                                  random_regex(rng, size - split, alphabet));
        case 1: return crpq::re_star(random_regex(rng, size - 1, alphabet));
        default:
            return crpq::re_concat(random_regex(rng, split, alphabet),
                                   random_regex(rng, size - split, alphabet));
    }
}

// Fragment rows for constrained generation.
enum class Row { a, A, a_astar, A_astar, a_Astar, A_Astar, W, CRPQ };

inline RegexPtr random_disjunction(Rng& rng, const std::vector<Label>& alphabet) {
    int k = pick(rng, 2, std::min<int>(3, static_cast<int>(alphabet.size())));
    std::vector<Label> picks(alphabet.begin(), alphabet.end());
    std::shuffle(picks.begin(), picks.end(), rng);
    picks.resize(k);
    return crpq::re_any_of(picks);
}

// One concatenation factor legal for the row.
inline RegexPtr random_factor(Rng& rng, Row row,
                              const std::vector<Label>& alphabet) {
    auto sym = [&] { return crpq::re_symbol(pick_label(rng, alphabet)); };
    auto disj = [&] { return random_disjunction(rng, alphabet); };
    switch (row) {
        case Row::a: return sym();
        case Row::A: return pick(rng, 0, 1) ? sym() : disj();
        case Row::a_astar: return pick(rng, 0, 1) ? sym() : crpq::re_star(sym());
        case Row::A_astar:
            switch (pick(rng, 0, 2)) {
                case 0: return sym();
                case 1: return disj();
                default: return crpq::re_star(sym());
            }
        case Row::a_Astar:
            switch (pick(rng, 0, 2)) {
                case 0: return sym();
                case 1: return crpq::re_star(sym());
                default: return crpq::re_star(disj());
            }
        case Row::A_Astar:
            switch (pick(rng, 0, 3)) {
                case 0: return sym();
                case 1: return disj();
                case 2: return crpq::re_star(sym());
                default: return crpq::re_star(disj());
            }
        case Row::W:
            switch (pick(rng, 0, 3)) {
                case 0: return sym();
                case 1: return disj();
                case 2: return crpq::re_star(sym());
                default: {  // star of a fixed short word
                    std::vector<Label> w;
                    int len = pick(rng, 2, 3);
                    for (int i = 0; i < len; ++i)
                        w.push_back(pick_label(rng, alphabet));
                    return crpq::re_star(crpq::re_word(w));
                }
            }
        case Row::CRPQ: return random_regex(rng, pick(rng, 1, 3), alphabet);
    }
    return sym();
}

inline RegexPtr random_regex_in_row(Rng& rng, Row row,
                                    const std::vector<Label>& alphabet,
                                    int max_factors = 3) {
    RegexPtr r = random_factor(rng, row, alphabet);
    int extra = pick(rng, 0, max_factors - 1);
    for (int i = 0; i < extra; ++i)
        r = crpq::re_concat(r, random_factor(rng, row, alphabet));
    return r;
}

// Random query with up to `max_atoms` atoms over a small variable pool and
// atom regexes drawn from the row.
inline Crpq random_query_in_row(Rng& rng, Row row,
                                const std::vector<Label>& alphabet,
                                int max_atoms = 3, int max_vars = 3,
                                int num_distinguished = 1) {
    static const std::vector<std::string> pool = {"x", "y", "z", "u"};
    Crpq q;
    q.name = "Q";
    int vars = pick(rng, 1, max_vars);
    for (int i = 0; i < num_distinguished && i < vars; ++i)
        q.distinguished.push_back(pool[i]);
    int atoms = pick(rng, 1, max_atoms);
    for (int i = 0; i < atoms; ++i)
        q.atoms.push_back({pool[pick(rng, 0, vars - 1)],
                           random_regex_in_row(rng, row, alphabet),
                           pool[pick(rng, 0, vars - 1)]});
    return q;
}

inline KnowledgeBase random_kb(Rng& rng, int num_nodes, int num_edges,
                               const std::vector<Label>& alphabet) {
    KnowledgeBase kb;
    for (int i = 0; i < num_nodes; ++i) kb.add_node("n" + std::to_string(i));
    for (int i = 0; i < num_edges; ++i)
        kb.add_edge(pick(rng, 0, num_nodes - 1), pick_label(rng, alphabet),
                    pick(rng, 0, num_nodes - 1));
    return kb;
}

// --- the worked example ------------------------------------------------------

// Q1(x1,x2) <- x1 app jm1, x2 app jm1, jm1 app jm2
inline Crpq jedi_q1() {
    Crpq q;
    q.name = "Q1";
    q.distinguished = {"x1", "x2"};
    q.atoms.push_back({"x1", crpq::re_symbol("app"), "jm1"});
    q.atoms.push_back({"x2", crpq::re_symbol("app"), "jm1"});
    q.atoms.push_back({"jm1", crpq::re_symbol("app"), "jm2"});
    return q;
}

// Q2(x1,x2) <- x1 app.app jm, x2 app.app jm
inline Crpq jedi_q2() {
    Crpq q;
    q.name = "Q2";
    q.distinguished = {"x1", "x2"};
    RegexPtr appapp = crpq::re_concat(crpq::re_symbol("app"), crpq::re_symbol("app"));
    q.atoms.push_back({"x1", appapp, "jm"});
    q.atoms.push_back({"x2", appapp, "jm"});
    return q;
}

// Q1 with the last atom removed: no longer contained in Q2.
inline Crpq jedi_q1_reduced() {
    Crpq q = jedi_q1();
    q.atoms.pop_back();
    return q;
}

}  // namespace testutil

#endif  // CRPQ_TESTS_HELPERS_HPP
