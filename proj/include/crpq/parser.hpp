#ifndef CRPQ_PARSER_HPP
#define CRPQ_PARSER_HPP

#include <cctype>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "crpq/query.hpp"
#include "crpq/regex.hpp"

namespace crpq {

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Extra syntax observed in query logs that the core grammar does not model.
// An expression with any flag set is outside every simple fragment.
struct LogSyntaxFlags {
    bool inverse = false;   // '^' inverted edge traversal
    bool negation = false;  // '!' negated label set
};

namespace detail {

inline bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Recursive-descent regex parser.
//
// Two lexing modes share one grammar:
//  * query mode: a maximal identifier run is one label ("app" is a single
//    label); concatenation of two identifier labels needs an explicit '.'.
//  * log mode: every identifier character is its own single-character label,
//    so "ab*" reads as a.(b*).  Log mode also tolerates '|' for union,
//    postfix '+' (one or more), postfix '?' (optional), leading '^'
//    (inverse), and '!' (negated label), recording the latter two as flags.
class RegexParser {
  public:
    RegexParser(const std::string& text, bool log_mode, LogSyntaxFlags* flags)
        : text_(text), log_mode_(log_mode), flags_(flags) {}

    RegexPtr parse() {
        RegexPtr r = parse_union();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected character");
        return r;
    }

  private:
    [[noreturn]] void fail(const std::string& msg) const {
        std::ostringstream os;
        os << "regex parse error at offset " << pos_ << " in \"" << text_ << "\": " << msg;
        throw ParseError(os.str());
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool starts_primary(char c) const {
        return c == '(' || c == '[' || c == '_' || ident_char(c) ||
               (log_mode_ && (c == '^' || c == '!' || c == '<'));
    }

    RegexPtr parse_union() {
        RegexPtr r = parse_concat();
        while (true) {
            char c = peek();
            if (c == '+' || (log_mode_ && c == '|')) {
                // In log mode '+' doubles as postfix one-or-more; it is a
                // union separator only when an operand follows.
                std::size_t save = pos_;
                ++pos_;
                if (!starts_primary(peek())) {
                    pos_ = save;
                    break;
                }
                r = re_union(r, parse_concat());
            } else {
                break;
            }
        }
        return r;
    }

    RegexPtr parse_concat() {
        RegexPtr r = parse_postfix();
        while (true) {
            char c = peek();
            if (c == '.' || c == '/') {  // '/' is SPARQL-style sequencing
                ++pos_;
                r = re_concat(r, parse_postfix());
            } else if (starts_primary(c)) {
                r = re_concat(r, parse_postfix());
            } else {
                break;
            }
        }
        return r;
    }

    RegexPtr parse_postfix() {
        RegexPtr r = parse_primary();
        while (true) {
            char c = peek();
            if (c == '*') {
                ++pos_;
                r = re_star(r);
            } else if (log_mode_ && c == '+') {
                // Postfix one-or-more; only if no operand follows (otherwise
                // it is a union separator handled by parse_union).
                std::size_t save = pos_;
                ++pos_;
                if (starts_primary(peek())) {
                    pos_ = save;
                    break;
                }
                r = re_concat(r, re_star(r));
            } else if (log_mode_ && c == '?') {
                ++pos_;
                r = re_union(r, re_epsilon());
            } else {
                break;
            }
        }
        return r;
    }

    RegexPtr parse_primary() {
        char c = peek();
        if (c == '\0') fail("expected a regex operand");
        if (log_mode_ && c == '^') {
            ++pos_;
            if (flags_) flags_->inverse = true;
            return parse_primary();
        }
        if (log_mode_ && c == '!') {
            ++pos_;
            if (flags_) flags_->negation = true;
            return parse_primary();
        }
        if (c == '(') {
            ++pos_;
            if (peek() == ')') {  // '()' is the empty word
                ++pos_;
                return re_epsilon();
            }
            RegexPtr r = parse_union();
            if (peek() != ')') fail("expected ')'");
            ++pos_;
            return r;
        }
        if (c == '[') {  // '[]' is the empty language
            ++pos_;
            if (peek() != ']') fail("expected ']' (only '[]' is supported)");
            ++pos_;
            return re_empty();
        }
        if (log_mode_ && c == '<') {  // IRI in angle brackets: one opaque label
            std::size_t end = text_.find('>', pos_);
            if (end == std::string::npos) fail("unterminated '<'");
            std::string label = text_.substr(pos_, end - pos_ + 1);
            pos_ = end + 1;
            return re_symbol(label);
        }
        if (ident_char(c)) {
            skip_ws();
            if (log_mode_) {
                ++pos_;
                if (c == '_') return re_wildcard();
                return re_symbol(std::string(1, c));
            }
            std::size_t start = pos_;
            while (pos_ < text_.size() && ident_char(text_[pos_])) ++pos_;
            std::string tok = text_.substr(start, pos_ - start);
            if (tok == "_") return re_wildcard();
            return re_symbol(tok);
        }
        fail("unexpected character");
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    bool log_mode_;
    LogSyntaxFlags* flags_;
};

}  // namespace detail

inline RegexPtr parse_regex(const std::string& text) {
    return detail::RegexParser(text, /*log_mode=*/false, nullptr).parse();
}

// Parser for property-path expressions as they appear in query logs.
inline RegexPtr parse_log_expression(const std::string& text, LogSyntaxFlags& flags) {
    return detail::RegexParser(text, /*log_mode=*/true, &flags).parse();
}

// Query text format, one query per string:
//
//   Q(x1,...,xk) <- x1 app.app y, y friend* x2
//
// The head lists the distinguished variables (possibly none: "Q() <-").
// Atoms are comma-separated triples "src REGEX dst"; the three fields are
// whitespace-separated, so a regex must not contain spaces.
inline Crpq parse_query(const std::string& text) {
    auto arrow = text.find("<-");
    if (arrow == std::string::npos) throw ParseError("query is missing '<-'");
    std::string head = text.substr(0, arrow);
    std::string body = text.substr(arrow + 2);

    Crpq q;
    auto open = head.find('(');
    auto close = head.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
        throw ParseError("query head must look like Name(x1,...,xk)");
    {
        std::istringstream is(head.substr(0, open));
        if (!(is >> q.name)) throw ParseError("query head is missing a name");
    }
    {
        std::string args = head.substr(open + 1, close - open - 1);
        std::istringstream is(args);
        std::string var;
        while (std::getline(is, var, ',')) {
            std::istringstream vs(var);
            std::string v;
            vs >> v;
            if (v.empty()) throw ParseError("empty distinguished variable in query head");
            q.distinguished.push_back(v);
        }
    }

    std::istringstream atoms(body);
    std::string atom_text;
    while (std::getline(atoms, atom_text, ',')) {
        std::istringstream fields(atom_text);
        std::string src, regex_text, dst, extra;
        fields >> src >> regex_text >> dst;
        if (fields >> extra) throw ParseError("atom has more than three fields: " + atom_text);
        if (src.empty() && regex_text.empty() && dst.empty()) continue;  // blank section
        if (dst.empty()) throw ParseError("atom needs three fields 'src REGEX dst': " + atom_text);
        q.atoms.push_back(Atom{src, parse_regex(regex_text), dst});
    }
    if (q.atoms.empty()) throw ParseError("query has no atoms");
    return q;
}

inline std::string render_query(const Crpq& q) {
    std::ostringstream os;
    os << q.name << '(';
    for (std::size_t i = 0; i < q.distinguished.size(); ++i) {
        if (i) os << ',';
        os << q.distinguished[i];
    }
    os << ") <- ";
    for (std::size_t i = 0; i < q.atoms.size(); ++i) {
        if (i) os << ", ";
        os << q.atoms[i].src << ' ' << render(q.atoms[i].regex) << ' ' << q.atoms[i].dst;
    }
    return os.str();
}

}  // namespace crpq

#endif  // CRPQ_PARSER_HPP
