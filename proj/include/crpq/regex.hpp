#ifndef CRPQ_REGEX_HPP
#define CRPQ_REGEX_HPP

#include <cstddef>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace crpq {

// Edge labels are plain strings.  The empty string is reserved (never a label).
using Label = std::string;

enum class RegexKind {
    Empty,     // the empty language
    Epsilon,   // the empty word
    Symbol,    // a single label
    Wildcard,  // any single label ("_")
    Concat,
    Union,
    Star,
};

struct Regex;
using RegexPtr = std::shared_ptr<const Regex>;

// Immutable regular-expression tree.  Shared subtrees are fine; nothing
// mutates a node after construction.
struct Regex {
    RegexKind kind;
    Label symbol;        // meaningful iff kind == Symbol
    RegexPtr left;       // Concat/Union: left operand; Star: body
    RegexPtr right;      // Concat/Union: right operand
};

inline RegexPtr re_empty() {
    static const RegexPtr r = std::make_shared<Regex>(Regex{RegexKind::Empty, "", nullptr, nullptr});
    return r;
}

inline RegexPtr re_epsilon() {
    static const RegexPtr r = std::make_shared<Regex>(Regex{RegexKind::Epsilon, "", nullptr, nullptr});
    return r;
}

inline RegexPtr re_symbol(const Label& a) {
    if (a.empty()) throw std::invalid_argument("regex symbol must be a nonempty label");
    return std::make_shared<Regex>(Regex{RegexKind::Symbol, a, nullptr, nullptr});
}

inline RegexPtr re_wildcard() {
    static const RegexPtr r = std::make_shared<Regex>(Regex{RegexKind::Wildcard, "", nullptr, nullptr});
    return r;
}

inline RegexPtr re_concat(RegexPtr a, RegexPtr b) {
    return std::make_shared<Regex>(Regex{RegexKind::Concat, "", std::move(a), std::move(b)});
}

inline RegexPtr re_union(RegexPtr a, RegexPtr b) {
    return std::make_shared<Regex>(Regex{RegexKind::Union, "", std::move(a), std::move(b)});
}

inline RegexPtr re_star(RegexPtr a) {
    return std::make_shared<Regex>(Regex{RegexKind::Star, "", std::move(a), nullptr});
}

// Concatenation of a word of labels; the empty word gives epsilon.
inline RegexPtr re_word(const std::vector<Label>& word) {
    if (word.empty()) return re_epsilon();
    RegexPtr r = re_symbol(word.front());
    for (std::size_t i = 1; i < word.size(); ++i) r = re_concat(r, re_symbol(word[i]));
    return r;
}

// Union of single labels; an empty set gives the empty language.
inline RegexPtr re_any_of(const std::vector<Label>& labels) {
    if (labels.empty()) return re_empty();
    RegexPtr r = re_symbol(labels.front());
    for (std::size_t i = 1; i < labels.size(); ++i) r = re_union(r, re_symbol(labels[i]));
    return r;
}

inline std::size_t leaf_count(const RegexPtr& r) {
    switch (r->kind) {
        case RegexKind::Empty:
        case RegexKind::Epsilon: return 0;
        case RegexKind::Symbol:
        case RegexKind::Wildcard: return 1;
        case RegexKind::Star: return leaf_count(r->left);
        case RegexKind::Concat:
        case RegexKind::Union: return leaf_count(r->left) + leaf_count(r->right);
    }
    return 0;
}

inline void collect_symbols(const RegexPtr& r, std::set<Label>& out) {
    switch (r->kind) {
        case RegexKind::Symbol: out.insert(r->symbol); break;
        case RegexKind::Star: collect_symbols(r->left, out); break;
        case RegexKind::Concat:
        case RegexKind::Union:
            collect_symbols(r->left, out);
            collect_symbols(r->right, out);
            break;
        default: break;
    }
}

inline std::set<Label> symbols_of(const RegexPtr& r) {
    std::set<Label> out;
    collect_symbols(r, out);
    return out;
}

inline bool uses_wildcard(const RegexPtr& r) {
    switch (r->kind) {
        case RegexKind::Wildcard: return true;
        case RegexKind::Star: return uses_wildcard(r->left);
        case RegexKind::Concat:
        case RegexKind::Union: return uses_wildcard(r->left) || uses_wildcard(r->right);
        default: return false;
    }
}

inline bool nullable(const RegexPtr& r) {
    switch (r->kind) {
        case RegexKind::Empty: return false;
        case RegexKind::Epsilon: return true;
        case RegexKind::Symbol:
        case RegexKind::Wildcard: return false;
        case RegexKind::Star: return true;
        case RegexKind::Concat: return nullable(r->left) && nullable(r->right);
        case RegexKind::Union: return nullable(r->left) || nullable(r->right);
    }
    return false;
}

// True iff the language is empty (no word at all).
inline bool is_empty_language(const RegexPtr& r) {
    switch (r->kind) {
        case RegexKind::Empty: return true;
        case RegexKind::Epsilon:
        case RegexKind::Symbol:
        case RegexKind::Wildcard:
        case RegexKind::Star: return false;  // a star always contains epsilon
        case RegexKind::Concat: return is_empty_language(r->left) || is_empty_language(r->right);
        case RegexKind::Union: return is_empty_language(r->left) && is_empty_language(r->right);
    }
    return false;
}

namespace detail {

// Labels render bare when they look like identifiers; anything else would need
// quoting, which the grammar does not support, so the parser only ever
// produces identifier labels.
inline bool needs_dot_before(const std::string& prev, const std::string& next) {
    auto ident_char = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    };
    return !prev.empty() && !next.empty() && ident_char(prev.back()) && ident_char(next.front());
}

inline int precedence(RegexKind k) {
    switch (k) {
        case RegexKind::Union: return 0;
        case RegexKind::Concat: return 1;
        case RegexKind::Star: return 2;  // a nested star body keeps its parens
        default: return 3;
    }
}

inline void render_rec(const RegexPtr& r, int parent_prec, std::string& out) {
    const int prec = precedence(r->kind);
    const bool paren = prec < parent_prec;
    if (paren) out += '(';
    switch (r->kind) {
        case RegexKind::Empty: out += "[]"; break;
        case RegexKind::Epsilon: out += "()"; break;
        case RegexKind::Symbol: out += r->symbol; break;
        case RegexKind::Wildcard: out += '_'; break;
        case RegexKind::Concat: {
            std::string lhs, rhs;
            render_rec(r->left, prec, lhs);
            render_rec(r->right, prec + 1, rhs);
            out += lhs;
            if (needs_dot_before(lhs, rhs)) out += '.';
            out += rhs;
            break;
        }
        case RegexKind::Union:
            render_rec(r->left, prec, out);
            out += '+';
            render_rec(r->right, prec + 1, out);
            break;
        case RegexKind::Star:
            render_rec(r->left, 3, out);
            out += '*';
            break;
    }
    if (paren) out += ')';
}

}  // namespace detail

// Text form accepted back by parse_regex: '+' union, '*' star, '.' explicit
// concatenation between identifier labels, '()' epsilon, '[]' empty language.
inline std::string render(const RegexPtr& r) {
    std::string out;
    detail::render_rec(r, 0, out);
    return out;
}

// Structural equality (renders agree iff trees agree up to this notion).
inline bool regex_equal(const RegexPtr& a, const RegexPtr& b) {
    if (a.get() == b.get()) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case RegexKind::Empty:
        case RegexKind::Epsilon:
        case RegexKind::Wildcard: return true;
        case RegexKind::Symbol: return a->symbol == b->symbol;
        case RegexKind::Star: return regex_equal(a->left, b->left);
        case RegexKind::Concat:
        case RegexKind::Union:
            return regex_equal(a->left, b->left) && regex_equal(a->right, b->right);
    }
    return false;
}

}  // namespace crpq

#endif  // CRPQ_REGEX_HPP
