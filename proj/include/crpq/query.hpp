#ifndef CRPQ_QUERY_HPP
#define CRPQ_QUERY_HPP

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "crpq/regex.hpp"

namespace crpq {

struct Atom {
    std::string src;
    RegexPtr regex;
    std::string dst;
};

// A conjunctive regular path query.  Variables are implicit: every name used
// as an atom endpoint or listed in the head.  A query with an empty
// `distinguished` list is boolean.
struct Crpq {
    std::string name = "Q";
    std::vector<std::string> distinguished;
    std::vector<Atom> atoms;
};

inline std::vector<std::string> variables_of(const Crpq& q) {
    std::vector<std::string> vars;
    std::set<std::string> seen;
    auto add = [&](const std::string& v) {
        if (seen.insert(v).second) vars.push_back(v);
    };
    for (const auto& v : q.distinguished) add(v);
    for (const auto& a : q.atoms) {
        add(a.src);
        add(a.dst);
    }
    return vars;
}

// A label of the form `<prefix><k>` that collides with nothing in `used`.
inline std::string fresh_name(const std::string& prefix, const std::set<std::string>& used) {
    for (int k = 0;; ++k) {
        std::string cand = prefix + std::to_string(k);
        if (!used.count(cand)) return cand;
    }
}

// Labels appearing in either query.  Canonical-model construction and
// wildcard expansion both work over this finite alphabet (plus explicitly
// added fresh symbols where an algorithm requires them).
inline bool uses_wildcard_query(const Crpq& q) {
    for (const auto& a : q.atoms)
        if (uses_wildcard(a.regex)) return true;
    return false;
}

inline std::set<Label> working_alphabet(const Crpq& q1, const Crpq& q2) {
    std::set<Label> sigma;
    for (const auto& a : q1.atoms) collect_symbols(a.regex, sigma);
    for (const auto& a : q2.atoms) collect_symbols(a.regex, sigma);
    return sigma;
}

namespace detail {

struct UnionFind {
    std::map<std::string, std::string> parent;

    const std::string& find(const std::string& v) {
        auto it = parent.find(v);
        if (it == parent.end() || it->second == v) {
            parent.emplace(v, v);
            return parent.find(v)->first;
        }
        const std::string root = find(it->second);
        parent[v] = root;
        return parent.find(v)->second;
    }

    void merge(const std::string& a, const std::string& b) { parent[find(a)] = find(b); }
};

inline void flatten_concat(const RegexPtr& r, std::vector<RegexPtr>& out) {
    if (r->kind == RegexKind::Concat) {
        flatten_concat(r->left, out);
        flatten_concat(r->right, out);
    } else {
        out.push_back(r);
    }
}

}  // namespace detail

// Top-level concatenation factors of a regex, epsilon factors dropped.
inline std::vector<RegexPtr> concat_factors(const RegexPtr& r) {
    std::vector<RegexPtr> factors;
    detail::flatten_concat(r, factors);
    factors.erase(std::remove_if(factors.begin(), factors.end(),
                                 [](const RegexPtr& f) { return f->kind == RegexKind::Epsilon; }),
                  factors.end());
    return factors;
}

// Rewrites a query into the form the containment algorithms expect:
//  * every atom whose regex is a top-level concatenation R1 . ... . Rk is
//    split into a chain of k atoms through fresh middle variables;
//  * atoms whose regex is the empty word are removed and their endpoints
//    merged (the merged variable keeps a distinguished name if one is
//    involved);
//  * atoms with an empty language are rejected (the query is unsatisfiable
//    and no canonical model exists).
inline Crpq normalize_query(const Crpq& q) {
    std::set<std::string> used;
    for (const auto& v : variables_of(q)) used.insert(v);

    detail::UnionFind uf;
    // Prefer distinguished names as representatives: merge semantics below
    // always point the representative chain at the second argument.
    std::vector<Atom> atoms;
    for (const auto& a : q.atoms) {
        if (is_empty_language(a.regex))
            throw std::invalid_argument("atom '" + a.src + " ... " + a.dst +
                                        "' has an empty language; the query is unsatisfiable");
        std::vector<RegexPtr> factors = concat_factors(a.regex);
        if (factors.empty()) {  // pure-epsilon atom: merge endpoints
            if (a.src != a.dst) uf.merge(a.src, a.dst);
            continue;
        }
        std::string cur = a.src;
        for (std::size_t i = 0; i < factors.size(); ++i) {
            std::string next = (i + 1 == factors.size()) ? a.dst : fresh_name("_v", used);
            used.insert(next);
            atoms.push_back(Atom{cur, factors[i], next});
            cur = next;
        }
    }

    // Route merges toward distinguished variables so head names survive.
    std::set<std::string> dist(q.distinguished.begin(), q.distinguished.end());
    std::map<std::string, std::string> rep_override;
    {
        // Group classes and pick a representative per class.
        std::map<std::string, std::vector<std::string>> classes;
        for (const auto& kv : uf.parent) {
            std::string root = uf.find(kv.first);
            classes[root].push_back(kv.first);
        }
        for (auto& [root, members] : classes) {
            std::string rep = root;
            std::vector<std::string> dmembers;
            for (const auto& m : members)
                if (dist.count(m)) dmembers.push_back(m);
            if (!dmembers.empty()) {
                rep = *std::min_element(dmembers.begin(), dmembers.end());
                if (dmembers.size() > 1) {
                    // Two distinguished variables forced equal: keep both in the
                    // head mapped to the representative; containment handles
                    // repeated head variables fine.
                }
            }
            for (const auto& m : members) rep_override[m] = rep;
        }
    }
    auto rep = [&](const std::string& v) -> std::string {
        auto it = rep_override.find(v);
        return it == rep_override.end() ? v : it->second;
    };

    Crpq out;
    out.name = q.name;
    for (const auto& v : q.distinguished) out.distinguished.push_back(rep(v));
    for (const auto& a : atoms) out.atoms.push_back(Atom{rep(a.src), a.regex, rep(a.dst)});
    if (out.atoms.empty()) {
        // Everything merged away: keep one epsilon self-loop so the query has
        // at least one variable and a canonical model (a single node).
        std::string v = q.distinguished.empty() ? rep(q.atoms.front().src) : out.distinguished.front();
        out.atoms.push_back(Atom{v, re_epsilon(), v});
    }
    return out;
}

// The size measure |Q| used for the abstraction bounds: number of atoms plus
// the number of regex leaves (symbols and wildcards), on the query as given.
// Normalization preserves it up to the dropped epsilon atoms.
inline std::size_t size_measure(const Crpq& q) {
    std::size_t n = q.atoms.size();
    for (const auto& a : q.atoms) n += leaf_count(a.regex);
    return n;
}

// Connected components of the variable graph (atoms as undirected edges).
// Each component is a sub-query inheriting the distinguished variables that
// fall inside it; the head order is preserved.
inline std::vector<Crpq> connected_components(const Crpq& q) {
    std::vector<std::string> vars = variables_of(q);
    std::map<std::string, int> idx;
    for (std::size_t i = 0; i < vars.size(); ++i) idx[vars[i]] = static_cast<int>(i);

    std::vector<int> comp(vars.size(), -1);
    std::vector<std::vector<int>> adj(vars.size());
    for (const auto& a : q.atoms) {
        adj[idx[a.src]].push_back(idx[a.dst]);
        adj[idx[a.dst]].push_back(idx[a.src]);
    }
    int ncomp = 0;
    for (std::size_t s = 0; s < vars.size(); ++s) {
        if (comp[s] != -1) continue;
        std::vector<int> stack{static_cast<int>(s)};
        comp[s] = ncomp;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : adj[v])
                if (comp[w] == -1) {
                    comp[w] = ncomp;
                    stack.push_back(w);
                }
        }
        ++ncomp;
    }

    std::vector<Crpq> out(ncomp);
    for (int c = 0; c < ncomp; ++c) out[c].name = q.name + "_c" + std::to_string(c);
    for (const auto& v : q.distinguished) out[comp[idx[v]]].distinguished.push_back(v);
    for (const auto& a : q.atoms) out[comp[idx[a.src]]].atoms.push_back(a);
    // Isolated variables (no atoms) can only be distinguished ones; give them
    // an epsilon self-loop so the component is a well-formed query.
    for (int c = 0; c < ncomp; ++c) {
        if (out[c].atoms.empty() && !out[c].distinguished.empty()) {
            const std::string& v = out[c].distinguished.front();
            out[c].atoms.push_back(Atom{v, re_epsilon(), v});
        }
    }
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const Crpq& p) { return p.atoms.empty() && p.distinguished.empty(); }),
              out.end());
    return out;
}

}  // namespace crpq

#endif  // CRPQ_QUERY_HPP
