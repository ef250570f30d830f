#ifndef CRPQ_WORD_SEARCH_HPP
#define CRPQ_WORD_SEARCH_HPP

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "crpq/nfa.hpp"

namespace crpq {

namespace detail {

// KMP-style factor matcher: state = length of the longest prefix of `pattern`
// that is a suffix of the input read so far; state == |pattern| is absorbing
// ("the factor occurred").
struct FactorDfa {
    std::vector<Label> pattern;
    std::vector<int> failure;  // classic prefix function

    explicit FactorDfa(std::vector<Label> pat) : pattern(std::move(pat)), failure(pattern.size(), 0) {
        for (std::size_t i = 1; i < pattern.size(); ++i) {
            int k = failure[i - 1];
            while (k > 0 && pattern[i] != pattern[static_cast<std::size_t>(k)]) k = failure[k - 1];
            if (pattern[i] == pattern[static_cast<std::size_t>(k)]) ++k;
            failure[i] = k;
        }
    }

    int step(int state, const Label& a) const {
        if (state == static_cast<int>(pattern.size())) return state;  // absorbing
        int k = state;
        while (k > 0 && a != pattern[static_cast<std::size_t>(k)]) k = failure[k - 1];
        if (a == pattern[static_cast<std::size_t>(k)]) ++k;
        return k;
    }
};

}  // namespace detail

// Shortest word w (breadth-first, ties broken by label order) such that
//   * w is accepted by `nfa`,
//   * w has `prefix` as a prefix and `suffix` as a suffix,
//   * if `forbidden` is nonempty, w does not contain it as a factor,
//   * the part of w between the prefix and the suffix has length >= min_middle,
// with |w| <= max_len (<= 0 means "number of product states", which is always
// enough for existence).  Returns nothing when no such word exists.
inline std::optional<std::vector<Label>> find_word_with_constraints(
    const Nfa& nfa, const std::vector<Label>& prefix, const std::vector<Label>& suffix,
    const std::vector<Label>& forbidden, int min_middle = 0, int max_len = 0) {
    // Prefix.Sigma^min_middle.Sigma*.Suffix matcher compiled from a regex
    // over the same alphabet; the wildcard leaf expands to the full alphabet.
    RegexPtr middle = re_star(re_wildcard());
    for (int i = 0; i < min_middle; ++i) middle = re_concat(re_wildcard(), middle);
    RegexPtr ps = re_concat(re_concat(re_word(prefix), middle), re_word(suffix));
    std::set<Label> alphabet(nfa.alphabet.begin(), nfa.alphabet.end());
    if (alphabet.empty()) {
        // Degenerate: the language is a subset of {epsilon}.
        std::vector<Label> empty_word;
        if (prefix.empty() && suffix.empty() && min_middle == 0 && accepts(nfa, empty_word))
            return empty_word;
        return std::nullopt;
    }
    Nfa ps_nfa = compile(ps, alphabet);
    detail::FactorDfa fac(forbidden);
    const bool use_factor = !forbidden.empty();
    const int fac_dead = static_cast<int>(forbidden.size());

    // Product state: (nfa state, ps state, factor state).  BFS over labeled
    // product transitions finds a shortest accepted word.
    using State = std::tuple<int, int, int>;
    std::map<State, std::pair<State, Label>> parent;
    std::deque<std::pair<State, int>> queue;
    std::set<State> seen;

    long cap = max_len > 0
                   ? max_len
                   : static_cast<long>(nfa.num_states) * ps_nfa.num_states * (use_factor ? fac_dead + 1 : 1);

    auto emit = [&](State s) {
        std::vector<Label> word;
        State cur = s;
        while (true) {
            auto it = parent.find(cur);
            if (it == parent.end()) break;
            word.push_back(it->second.second);
            cur = it->second.first;
        }
        std::reverse(word.begin(), word.end());
        return word;
    };

    // Multiple initial product states arise from nondeterminism only via the
    // single Glushkov initial state, so there is exactly one start.
    State start{0, 0, 0};
    seen.insert(start);
    queue.emplace_back(start, 0);
    while (!queue.empty()) {
        auto [s, len] = queue.front();
        queue.pop_front();
        auto [qa, qb, qf] = s;
        if (nfa.accepting[qa] && ps_nfa.accepting[qb]) return emit(s);
        if (len >= cap) continue;
        for (const Label& a : nfa.alphabet) {
            int nf = use_factor ? fac.step(qf, a) : 0;
            if (use_factor && nf == fac_dead) continue;  // factor occurred
            auto ita = nfa.delta[qa].find(a);
            if (ita == nfa.delta[qa].end()) continue;
            auto itb = ps_nfa.delta[qb].find(a);
            if (itb == ps_nfa.delta[qb].end()) continue;
            for (int ta : ita->second)
                for (int tb : itb->second) {
                    State next{ta, tb, nf};
                    if (!seen.insert(next).second) continue;
                    parent.emplace(next, std::make_pair(s, a));
                    queue.emplace_back(next, len + 1);
                }
        }
    }
    return std::nullopt;
}

}  // namespace crpq

#endif  // CRPQ_WORD_SEARCH_HPP
