#ifndef CRPQ_NFA_HPP
#define CRPQ_NFA_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "crpq/regex.hpp"

namespace crpq {

// Epsilon-free NFA over an explicit finite alphabet, built with the Glushkov
// (position) construction: one state per regex leaf plus an initial state.
struct Nfa {
    std::vector<Label> alphabet;                    // sorted, duplicate-free
    int num_states = 0;                             // state 0 is initial
    std::vector<std::map<Label, std::vector<int>>> delta;  // delta[state][label]
    std::vector<bool> accepting;

    bool is_accepting_set(const std::set<int>& states) const {
        for (int s : states)
            if (accepting[s]) return true;
        return false;
    }

    std::set<int> step(const std::set<int>& states, const Label& a) const {
        std::set<int> out;
        for (int s : states) {
            auto it = delta[s].find(a);
            if (it != delta[s].end()) out.insert(it->second.begin(), it->second.end());
        }
        return out;
    }
};

namespace detail {

struct GlushkovInfo {
    bool nullable;
    std::vector<int> first, last;  // leaf positions (1-based states)
};

struct GlushkovBuilder {
    std::vector<Label> leaf_label;       // label per position; "" for wildcard
    std::vector<std::set<int>> follow;   // follow set per position

    GlushkovInfo build(const RegexPtr& r) {
        switch (r->kind) {
            case RegexKind::Empty: return {false, {}, {}};
            case RegexKind::Epsilon: return {true, {}, {}};
            case RegexKind::Symbol:
            case RegexKind::Wildcard: {
                int pos = static_cast<int>(leaf_label.size()) + 1;
                leaf_label.push_back(r->kind == RegexKind::Symbol ? r->symbol : Label{});
                follow.emplace_back();
                return {false, {pos}, {pos}};
            }
            case RegexKind::Union: {
                GlushkovInfo a = build(r->left), b = build(r->right);
                GlushkovInfo out;
                out.nullable = a.nullable || b.nullable;
                out.first = a.first;
                out.first.insert(out.first.end(), b.first.begin(), b.first.end());
                out.last = a.last;
                out.last.insert(out.last.end(), b.last.begin(), b.last.end());
                return out;
            }
            case RegexKind::Concat: {
                GlushkovInfo a = build(r->left), b = build(r->right);
                for (int p : a.last) follow[p - 1].insert(b.first.begin(), b.first.end());
                GlushkovInfo out;
                out.nullable = a.nullable && b.nullable;
                out.first = a.first;
                if (a.nullable) out.first.insert(out.first.end(), b.first.begin(), b.first.end());
                out.last = b.last;
                if (b.nullable) out.last.insert(out.last.end(), a.last.begin(), a.last.end());
                return out;
            }
            case RegexKind::Star: {
                GlushkovInfo a = build(r->left);
                for (int p : a.last) follow[p - 1].insert(a.first.begin(), a.first.end());
                return {true, a.first, a.last};
            }
        }
        return {false, {}, {}};
    }
};

}  // namespace detail

// Compiles a regex over the given alphabet.  Wildcard leaves match every
// alphabet symbol.  Symbols outside the alphabet are added to it.
inline Nfa compile(const RegexPtr& regex, std::set<Label> alphabet = {}) {
    for (const Label& a : symbols_of(regex)) alphabet.insert(a);
    if (uses_wildcard(regex) && alphabet.empty())
        throw std::invalid_argument("wildcard regex needs a nonempty alphabet");

    detail::GlushkovBuilder gb;
    detail::GlushkovInfo info = gb.build(regex);

    Nfa nfa;
    nfa.alphabet.assign(alphabet.begin(), alphabet.end());
    nfa.num_states = static_cast<int>(gb.leaf_label.size()) + 1;
    nfa.delta.assign(nfa.num_states, {});
    nfa.accepting.assign(nfa.num_states, false);
    nfa.accepting[0] = info.nullable;
    for (int p : info.last) nfa.accepting[p] = true;

    auto connect = [&](int from, int to_pos) {
        const Label& lab = gb.leaf_label[to_pos - 1];
        if (!lab.empty()) {
            nfa.delta[from][lab].push_back(to_pos);
        } else {
            for (const Label& a : nfa.alphabet) nfa.delta[from][a].push_back(to_pos);
        }
    };
    for (int p : info.first) connect(0, p);
    for (std::size_t i = 0; i < gb.follow.size(); ++i)
        for (int p : gb.follow[i]) connect(static_cast<int>(i) + 1, p);
    return nfa;
}

inline bool accepts(const Nfa& nfa, const std::vector<Label>& word) {
    std::set<int> cur{0};
    for (const Label& a : word) {
        cur = nfa.step(cur, a);
        if (cur.empty()) return false;
    }
    return nfa.is_accepting_set(cur);
}

namespace detail {

// Shortest distance from each state to an accepting state (INT_MAX/2 if none).
inline std::vector<int> distance_to_accepting(const Nfa& nfa) {
    const int INF = 1 << 29;
    std::vector<int> dist(nfa.num_states, INF);
    std::deque<int> queue;
    for (int s = 0; s < nfa.num_states; ++s)
        if (nfa.accepting[s]) {
            dist[s] = 0;
            queue.push_back(s);
        }
    // Reverse adjacency once.
    std::vector<std::vector<int>> radj(nfa.num_states);
    for (int s = 0; s < nfa.num_states; ++s)
        for (const auto& [lab, tos] : nfa.delta[s])
            for (int t : tos) radj[t].push_back(s);
    while (!queue.empty()) {
        int s = queue.front();
        queue.pop_front();
        for (int p : radj[s])
            if (dist[p] > dist[s] + 1) {
                dist[p] = dist[s] + 1;
                queue.push_back(p);
            }
    }
    return dist;
}

}  // namespace detail

// All words of length <= max_len accepted by the NFA, in length-lexicographic
// order (alphabet order = sorted label order).  Stops after max_count words;
// the return flag is false iff the enumeration was cut short by max_count.
inline bool enumerate_words(const Nfa& nfa, int max_len, std::size_t max_count,
                            std::vector<std::vector<Label>>& out) {
    out.clear();
    std::vector<int> dist = detail::distance_to_accepting(nfa);
    bool complete = true;

    std::vector<Label> word;
    // Enumerate by exact length so the order is length-first.
    for (int len = 0; len <= max_len; ++len) {
        word.clear();
        std::function<bool(const std::set<int>&, int)> rec_exact =
            [&](const std::set<int>& states, int remaining) -> bool {
            if (remaining == 0) {
                if (!nfa.is_accepting_set(states)) return true;
                if (out.size() >= max_count) {
                    complete = false;
                    return false;
                }
                out.push_back(word);
                return true;
            }
            for (const Label& a : nfa.alphabet) {
                std::set<int> next = nfa.step(states, a);
                if (next.empty()) continue;
                bool live = false;
                for (int s : next)
                    if (dist[s] <= remaining - 1) live = true;
                if (!live) continue;
                word.push_back(a);
                bool go_on = rec_exact(next, remaining - 1);
                word.pop_back();
                if (!go_on) return false;
            }
            return true;
        };
        if (!rec_exact({0}, len)) return complete;
    }
    return complete;
}

// Words w of length exactly `len` such that w.Sigma* intersects the language
// (viable prefixes).  Capped like enumerate_words.
inline bool enumerate_viable_prefixes(const Nfa& nfa, int len, std::size_t max_count,
                                      std::vector<std::vector<Label>>& out) {
    out.clear();
    std::vector<int> dist = detail::distance_to_accepting(nfa);
    const int INF = 1 << 29;
    bool complete = true;
    std::vector<Label> word;
    std::function<bool(const std::set<int>&, int)> rec = [&](const std::set<int>& states,
                                                             int remaining) -> bool {
        if (remaining == 0) {
            bool live = false;
            for (int s : states)
                if (dist[s] < INF) live = true;
            if (!live) return true;
            if (out.size() >= max_count) {
                complete = false;
                return false;
            }
            out.push_back(word);
            return true;
        }
        for (const Label& a : nfa.alphabet) {
            std::set<int> next = nfa.step(states, a);
            if (next.empty()) continue;
            word.push_back(a);
            bool go_on = rec(next, remaining - 1);
            word.pop_back();
            if (!go_on) return false;
        }
        return true;
    };
    rec({0}, len);
    return complete;
}

// Words w of length exactly `len` such that Sigma*.w intersects the language
// (viable suffixes).  Enumerated over the reversed transition relation, in
// lexicographic order of w.  Capped like enumerate_words.
inline bool enumerate_viable_suffixes(const Nfa& nfa, int len, std::size_t max_count,
                                      std::vector<std::vector<Label>>& out) {
    out.clear();
    // Reversed adjacency.
    std::vector<std::map<Label, std::set<int>>> rdelta(nfa.num_states);
    std::vector<bool> reachable(nfa.num_states, false);
    {
        std::vector<int> stack{0};
        reachable[0] = true;
        while (!stack.empty()) {
            int s = stack.back();
            stack.pop_back();
            for (const auto& [lab, tos] : nfa.delta[s])
                for (int t : tos) {
                    rdelta[t][lab].insert(s);
                    if (!reachable[t]) {
                        reachable[t] = true;
                        stack.push_back(t);
                    }
                }
        }
        // Transitions among unreachable states are irrelevant; skip them.
    }
    std::set<int> finals;
    for (int s = 0; s < nfa.num_states; ++s)
        if (nfa.accepting[s] && reachable[s]) finals.insert(s);

    bool complete = true;
    std::vector<Label> word;  // built back-to-front
    std::function<bool(const std::set<int>&, int)> rec = [&](const std::set<int>& states,
                                                             int remaining) -> bool {
        if (states.empty()) return true;
        if (remaining == 0) {
            bool hit = false;
            for (int s : states)
                if (reachable[s]) hit = true;
            if (!hit) return true;
            if (out.size() >= max_count) {
                complete = false;
                return false;
            }
            std::vector<Label> w(word.rbegin(), word.rend());
            out.push_back(std::move(w));
            return true;
        }
        for (const Label& a : nfa.alphabet) {
            std::set<int> prev;
            for (int s : states) {
                auto it = rdelta[s].find(a);
                if (it != rdelta[s].end()) prev.insert(it->second.begin(), it->second.end());
            }
            if (prev.empty()) continue;
            word.push_back(a);
            bool go_on = rec(prev, remaining - 1);
            word.pop_back();
            if (!go_on) return false;
        }
        return true;
    };
    rec(finals, len);
    std::sort(out.begin(), out.end());
    return complete;
}

inline std::string word_to_string(const std::vector<Label>& word, const char* sep = "") {
    std::string s;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (i) s += sep;
        s += word[i];
    }
    return s;
}

}  // namespace crpq

#endif  // CRPQ_NFA_HPP
