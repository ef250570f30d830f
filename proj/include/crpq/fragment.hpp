#ifndef CRPQ_FRAGMENT_HPP
#define CRPQ_FRAGMENT_HPP

#include <set>
#include <string>
#include <vector>

#include "crpq/query.hpp"
#include "crpq/regex.hpp"

namespace crpq {

// Classification of one top-level concatenation factor of an atom regex.
//
//   SingleSymbol      a
//   SymbolDisjunction a1 + ... + ak          (k >= 2 distinct symbols)
//   SingleSymbolStar  a*
//   DisjunctionStar   (a1 + ... + ak)*       (k >= 2 distinct symbols)
//   WStar             w* for a fixed word w, |w| >= 2
//   GeneralRegex      anything else
//
// A wildcard counts as a symbol for shape purposes and is tracked separately.
enum class AtomKind {
    SingleSymbol,
    SymbolDisjunction,
    SingleSymbolStar,
    DisjunctionStar,
    WStar,
    GeneralRegex,
};

struct FragmentClass {
    std::set<AtomKind> kinds;
    bool wildcard_used = false;

    bool has(AtomKind k) const { return kinds.count(k) != 0; }
    bool within(std::initializer_list<AtomKind> allowed) const {
        for (AtomKind k : kinds) {
            bool ok = false;
            for (AtomKind a : allowed)
                if (a == k) ok = true;
            if (!ok) return false;
        }
        return true;
    }
};

namespace detail {

inline void flatten_union(const RegexPtr& r, std::vector<RegexPtr>& out) {
    if (r->kind == RegexKind::Union) {
        flatten_union(r->left, out);
        flatten_union(r->right, out);
    } else {
        out.push_back(r);
    }
}

inline bool is_atomic_symbol(const RegexPtr& r) {
    return r->kind == RegexKind::Symbol || r->kind == RegexKind::Wildcard;
}

// True iff r is a concatenation of symbols/wildcards; appends them to word.
inline bool is_fixed_word(const RegexPtr& r, std::vector<RegexPtr>& word) {
    if (is_atomic_symbol(r)) {
        word.push_back(r);
        return true;
    }
    if (r->kind == RegexKind::Concat)
        return is_fixed_word(r->left, word) && is_fixed_word(r->right, word);
    return false;
}

inline AtomKind classify_factor(const RegexPtr& f, bool& wildcard) {
    if (uses_wildcard(f)) wildcard = true;
    if (is_atomic_symbol(f)) return AtomKind::SingleSymbol;
    if (f->kind == RegexKind::Union) {
        std::vector<RegexPtr> alts;
        flatten_union(f, alts);
        std::set<std::string> distinct;
        for (const auto& a : alts) {
            if (!is_atomic_symbol(a)) return AtomKind::GeneralRegex;
            distinct.insert(a->kind == RegexKind::Wildcard ? "_" : a->symbol);
        }
        return distinct.size() <= 1 ? AtomKind::SingleSymbol : AtomKind::SymbolDisjunction;
    }
    if (f->kind == RegexKind::Star) {
        const RegexPtr& body = f->left;
        if (is_atomic_symbol(body)) return AtomKind::SingleSymbolStar;
        if (body->kind == RegexKind::Union) {
            std::vector<RegexPtr> alts;
            flatten_union(body, alts);
            std::set<std::string> distinct;
            for (const auto& a : alts) {
                if (!is_atomic_symbol(a)) return AtomKind::GeneralRegex;
                distinct.insert(a->kind == RegexKind::Wildcard ? "_" : a->symbol);
            }
            return distinct.size() <= 1 ? AtomKind::SingleSymbolStar : AtomKind::DisjunctionStar;
        }
        std::vector<RegexPtr> word;
        if (is_fixed_word(body, word) && word.size() >= 2) return AtomKind::WStar;
        return AtomKind::GeneralRegex;
    }
    return AtomKind::GeneralRegex;
}

}  // namespace detail

// Classifies a regex by the shapes of its top-level concatenation factors.
// An epsilon-only regex yields an empty kind set.
inline FragmentClass classify_regex(const RegexPtr& r) {
    FragmentClass fc;
    if (r->kind == RegexKind::Empty) {
        fc.kinds.insert(AtomKind::GeneralRegex);
        return fc;
    }
    for (const auto& f : concat_factors(r))
        fc.kinds.insert(detail::classify_factor(f, fc.wildcard_used));
    return fc;
}

inline FragmentClass classify_query(const Crpq& q) {
    FragmentClass fc;
    for (const auto& a : q.atoms) {
        FragmentClass f = classify_regex(a.regex);
        fc.kinds.insert(f.kinds.begin(), f.kinds.end());
        fc.wildcard_used = fc.wildcard_used || f.wildcard_used;
    }
    return fc;
}

// Fragment membership predicates.  Wildcards stand for an unbounded symbol
// disjunction, so only the W fragment admits them.
inline bool in_fragment_a(const FragmentClass& fc) {
    return !fc.wildcard_used && fc.within({AtomKind::SingleSymbol});
}
inline bool in_fragment_A(const FragmentClass& fc) {
    return !fc.wildcard_used && fc.within({AtomKind::SingleSymbol, AtomKind::SymbolDisjunction});
}
inline bool in_fragment_a_astar(const FragmentClass& fc) {
    return !fc.wildcard_used && fc.within({AtomKind::SingleSymbol, AtomKind::SingleSymbolStar});
}
inline bool in_fragment_A_astar(const FragmentClass& fc) {
    return !fc.wildcard_used &&
           fc.within({AtomKind::SingleSymbol, AtomKind::SymbolDisjunction, AtomKind::SingleSymbolStar});
}
inline bool in_fragment_a_Astar(const FragmentClass& fc) {
    return !fc.wildcard_used &&
           fc.within({AtomKind::SingleSymbol, AtomKind::SingleSymbolStar, AtomKind::DisjunctionStar});
}
inline bool in_fragment_A_Astar(const FragmentClass& fc) {
    return !fc.wildcard_used && fc.within({AtomKind::SingleSymbol, AtomKind::SymbolDisjunction,
                                           AtomKind::SingleSymbolStar, AtomKind::DisjunctionStar});
}
// W: symbols, wildcard, unions of symbols, and stars over fixed words.
inline bool in_fragment_w(const FragmentClass& fc) {
    return fc.within({AtomKind::SingleSymbol, AtomKind::SymbolDisjunction, AtomKind::SingleSymbolStar,
                      AtomKind::WStar});
}

// Name of the smallest named fragment containing the class.
inline std::string fragment_name(const FragmentClass& fc) {
    if (fc.has(AtomKind::GeneralRegex)) return "CRPQ";
    if (fc.has(AtomKind::WStar)) return in_fragment_w(fc) ? "W" : "CRPQ";
    if (fc.wildcard_used) return "W";
    const bool disj = fc.has(AtomKind::SymbolDisjunction);
    if (fc.has(AtomKind::DisjunctionStar)) return disj ? "(A,A*)" : "(a,A*)";
    if (fc.has(AtomKind::SingleSymbolStar)) return disj ? "(A,a*)" : "(a,a*)";
    return disj ? "A" : "a";
}

}  // namespace crpq

#endif  // CRPQ_FRAGMENT_HPP
