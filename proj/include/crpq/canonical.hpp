#ifndef CRPQ_CANONICAL_HPP
#define CRPQ_CANONICAL_HPP

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "crpq/fragment.hpp"
#include "crpq/kb.hpp"
#include "crpq/nfa.hpp"
#include "crpq/query.hpp"

namespace crpq {

// A canonical model of a query: one simple path per atom, node-disjoint
// except at shared variable endpoints, each path spelling a word of its
// atom's language.  `nu` maps the distinguished variables to nodes.
struct CanonicalModel {
    KnowledgeBase kb;
    std::map<std::string, int> nu;
    std::vector<std::vector<Label>> atom_words;  // parallel to the query's atoms
};

// Replaces every wildcard leaf by the given fresh symbol.
inline RegexPtr substitute_wildcards(const RegexPtr& r, const Label& fresh) {
    switch (r->kind) {
        case RegexKind::Wildcard: return re_symbol(fresh);
        case RegexKind::Star: return re_star(substitute_wildcards(r->left, fresh));
        case RegexKind::Concat:
            return re_concat(substitute_wildcards(r->left, fresh), substitute_wildcards(r->right, fresh));
        case RegexKind::Union:
            return re_union(substitute_wildcards(r->left, fresh), substitute_wildcards(r->right, fresh));
        default: return r;
    }
}

// Builds the canonical model of a (normalized) query for one chosen word per
// atom.  Atoms with the empty word merge their endpoints.
inline CanonicalModel build_canonical(const Crpq& q, const std::vector<std::vector<Label>>& words) {
    if (words.size() != q.atoms.size())
        throw std::invalid_argument("build_canonical: one word per atom required");

    detail::UnionFind uf;
    for (std::size_t i = 0; i < q.atoms.size(); ++i)
        if (words[i].empty() && q.atoms[i].src != q.atoms[i].dst)
            uf.merge(q.atoms[i].src, q.atoms[i].dst);

    // Prefer distinguished variables as representative node names.
    std::map<std::string, std::string> rep;
    {
        std::set<std::string> dist(q.distinguished.begin(), q.distinguished.end());
        std::map<std::string, std::vector<std::string>> classes;
        for (const auto& v : variables_of(q)) classes[uf.find(v)].push_back(v);
        for (const auto& [root, members] : classes) {
            std::string r = root;
            for (const auto& m : members)
                if (dist.count(m)) {
                    r = m;
                    break;
                }
            for (const auto& m : members) rep[m] = r;
        }
    }

    CanonicalModel cm;
    for (const auto& v : variables_of(q)) cm.kb.add_node(rep.at(v));
    for (std::size_t i = 0; i < q.atoms.size(); ++i) {
        const Atom& a = q.atoms[i];
        cm.atom_words.push_back(words[i]);
        if (words[i].empty()) continue;
        int cur = cm.kb.node(rep.at(a.src));
        int goal = cm.kb.node(rep.at(a.dst));
        for (std::size_t k = 0; k < words[i].size(); ++k) {
            int next = (k + 1 == words[i].size())
                           ? goal
                           : cm.kb.add_node("_a" + std::to_string(i) + "_" + std::to_string(k + 1));
            cm.kb.add_edge(cur, words[i][k], next);
            cur = next;
        }
    }
    for (const auto& v : q.distinguished) cm.nu[v] = cm.kb.node(rep.at(v));
    return cm;
}

// Streams every canonical model whose per-atom words have length at most
// `max_word_len`, in deterministic order (odometer over per-atom word lists,
// each list in length-lexicographic order; the last atom varies fastest).
class CanonicalEnumerator {
  public:
    CanonicalEnumerator(Crpq q, int max_word_len, std::size_t per_atom_cap = 200000,
                        std::set<Label> alphabet = {})
        : q_(std::move(q)) {
        complete_ = true;
        for (const auto& a : q_.atoms) {
            Nfa nfa = compile(a.regex, alphabet);
            std::vector<std::vector<Label>> words;
            if (!enumerate_words(nfa, max_word_len, per_atom_cap, words)) complete_ = false;
            word_lists_.push_back(std::move(words));
        }
        index_.assign(q_.atoms.size(), 0);
        for (const auto& wl : word_lists_)
            if (wl.empty()) done_ = true;  // some atom has no word within the bound
    }

    // Number of models the stream will produce.
    BigUint total_models() const {
        BigUint n = 1;
        for (const auto& wl : word_lists_) n *= wl.size();
        return n;
    }

    // True iff no per-atom word list was truncated by per_atom_cap.
    bool complete() const { return complete_; }

    const Crpq& query() const { return q_; }

    bool next(CanonicalModel& out) {
        if (done_) return false;
        std::vector<std::vector<Label>> words;
        words.reserve(q_.atoms.size());
        for (std::size_t i = 0; i < index_.size(); ++i) words.push_back(word_lists_[i][index_[i]]);
        out = build_canonical(q_, words);
        // Advance the odometer, last atom fastest.
        for (std::size_t i = index_.size(); i-- > 0;) {
            if (++index_[i] < word_lists_[i].size()) return true;
            index_[i] = 0;
            if (i == 0) done_ = true;
        }
        if (index_.empty()) done_ = true;  // no atoms: single model
        return true;
    }

    // Random access used by parallel scans: model #k in stream order.
    CanonicalModel model_at(BigUint k) const {
        std::vector<std::vector<Label>> words(q_.atoms.size());
        for (std::size_t i = q_.atoms.size(); i-- > 0;) {
            BigUint sz = word_lists_[i].size();
            words[i] = word_lists_[i][(k % sz).convert_to<std::size_t>()];
            k /= sz;
        }
        return build_canonical(q_, words);
    }

  private:
    Crpq q_;
    std::vector<std::vector<std::vector<Label>>> word_lists_;
    std::vector<std::size_t> index_;
    bool done_ = false;
    bool complete_ = true;
};

// --- compressed canonical models for the W fragment ----------------------

// One top-level factor of a W regex, as realized in a canonical model.
struct WFactor {
    enum class Kind { Fixed, Branch, Power } kind;
    std::vector<Label> word;          // Fixed: the single label; Power: the base word
    std::vector<Label> alternatives;  // Branch: the symbol alternatives
};

// Decomposes a W-fragment regex (no wildcards; substitute them first) into
// its factor sequence.  Throws std::invalid_argument outside the fragment.
inline std::vector<WFactor> decompose_w_regex(const RegexPtr& r) {
    std::vector<WFactor> out;
    for (const RegexPtr& f : concat_factors(r)) {
        bool wildcard = false;
        switch (detail::classify_factor(f, wildcard)) {
            case AtomKind::SingleSymbol:
            case AtomKind::SymbolDisjunction: {
                std::vector<RegexPtr> alts;
                detail::flatten_union(f, alts);
                WFactor wf;
                std::set<Label> seen;
                for (const auto& a : alts) {
                    if (a->kind != RegexKind::Symbol)
                        throw std::invalid_argument("decompose_w_regex: wildcard not substituted");
                    if (seen.insert(a->symbol).second) wf.alternatives.push_back(a->symbol);
                }
                if (wf.alternatives.size() == 1) {
                    wf.kind = WFactor::Kind::Fixed;
                    wf.word = {wf.alternatives.front()};
                    wf.alternatives.clear();
                } else {
                    wf.kind = WFactor::Kind::Branch;
                }
                out.push_back(std::move(wf));
                break;
            }
            case AtomKind::SingleSymbolStar:
            case AtomKind::WStar: {
                std::vector<RegexPtr> leaves;
                if (!detail::is_fixed_word(f->left, leaves)) {
                    // SingleSymbolStar via a one-symbol union: normalize it.
                    std::vector<RegexPtr> alts;
                    detail::flatten_union(f->left, alts);
                    leaves = {alts.front()};
                }
                WFactor wf;
                wf.kind = WFactor::Kind::Power;
                for (const auto& leaf : leaves) {
                    if (leaf->kind != RegexKind::Symbol)
                        throw std::invalid_argument("decompose_w_regex: wildcard not substituted");
                    wf.word.push_back(leaf->symbol);
                }
                out.push_back(std::move(wf));
                break;
            }
            default:
                throw std::invalid_argument("decompose_w_regex: regex is outside the W fragment: " +
                                            render(f));
        }
    }
    return out;
}

struct CompressedCanonicalModel {
    CompressedKb kb;
    std::map<std::string, int> nu;
    // Chosen branch symbols and star exponents per atom, for reporting.
    std::vector<std::vector<Label>> branch_choices;
    std::vector<std::vector<BigUint>> exponent_choices;
};

// Streams compressed canonical models of a W query.  The caller supplies,
// for every Power factor (in atom order, then factor order), the finite list
// of exponents to try; lists may contain arbitrarily large values, which end
// up as power-edge counts.
class CompressedWEnumerator {
  public:
    struct PowerSlot {
        std::size_t atom;
        std::vector<Label> word;
    };
    struct BranchSlot {
        std::size_t atom;
        std::vector<Label> alternatives;
    };

    // `factored[i]` is decompose_w_regex of atom i's regex.
    CompressedWEnumerator(Crpq q, std::vector<std::vector<WFactor>> factored,
                          std::vector<std::vector<BigUint>> exponent_lists)
        : q_(std::move(q)), factored_(std::move(factored)) {
        for (std::size_t i = 0; i < factored_.size(); ++i)
            for (const auto& f : factored_[i]) {
                if (f.kind == WFactor::Kind::Power) power_slots_.push_back({i, f.word});
                if (f.kind == WFactor::Kind::Branch) branch_slots_.push_back({i, f.alternatives});
            }
        if (exponent_lists.size() != power_slots_.size())
            throw std::invalid_argument("one exponent list per star factor required");
        exponent_lists_ = std::move(exponent_lists);
        for (const auto& el : exponent_lists_)
            if (el.empty()) done_ = true;
        exp_index_.assign(power_slots_.size(), 0);
        branch_index_.assign(branch_slots_.size(), 0);
    }

    const std::vector<PowerSlot>& power_slots() const { return power_slots_; }

    BigUint total_models() const {
        BigUint n = 1;
        for (const auto& el : exponent_lists_) n *= el.size();
        for (const auto& bs : branch_slots_) n *= bs.alternatives.size();
        return n;
    }

    bool next(CompressedCanonicalModel& out) {
        if (done_) return false;
        out = build_current();
        // Advance: branches fastest, then exponents.
        for (std::size_t i = branch_index_.size(); i-- > 0;) {
            if (++branch_index_[i] < branch_slots_[i].alternatives.size()) return true;
            branch_index_[i] = 0;
        }
        for (std::size_t i = exp_index_.size(); i-- > 0;) {
            if (++exp_index_[i] < exponent_lists_[i].size()) return true;
            exp_index_[i] = 0;
        }
        done_ = true;
        return true;
    }

  private:
    CompressedCanonicalModel build_current() const {
        // Realize each atom as a segment plan, merging endpoints of atoms
        // that collapse to the empty word (all stars at exponent zero).
        struct Segment {
            bool power;
            std::vector<Label> word;
            BigUint count;  // power only
        };
        std::vector<std::vector<Segment>> plans(q_.atoms.size());
        std::size_t pslot = 0, bslot = 0;
        std::vector<std::vector<Label>> branch_choices(q_.atoms.size());
        std::vector<std::vector<BigUint>> exponent_choices(q_.atoms.size());
        for (std::size_t i = 0; i < factored_.size(); ++i) {
            for (const auto& f : factored_[i]) {
                switch (f.kind) {
                    case WFactor::Kind::Fixed:
                        plans[i].push_back({false, f.word, 0});
                        break;
                    case WFactor::Kind::Branch: {
                        const Label& pick = branch_slots_[bslot].alternatives[branch_index_[bslot]];
                        branch_choices[i].push_back(pick);
                        plans[i].push_back({false, {pick}, 0});
                        ++bslot;
                        break;
                    }
                    case WFactor::Kind::Power: {
                        const BigUint& e = exponent_lists_[pslot][exp_index_[pslot]];
                        exponent_choices[i].push_back(e);
                        if (e > 0) plans[i].push_back({true, f.word, e});
                        ++pslot;
                        break;
                    }
                }
            }
        }

        detail::UnionFind uf;
        for (std::size_t i = 0; i < plans.size(); ++i)
            if (plans[i].empty() && q_.atoms[i].src != q_.atoms[i].dst)
                uf.merge(q_.atoms[i].src, q_.atoms[i].dst);
        std::map<std::string, std::string> rep;
        {
            std::set<std::string> dist(q_.distinguished.begin(), q_.distinguished.end());
            std::map<std::string, std::vector<std::string>> classes;
            for (const auto& v : variables_of(q_)) classes[uf.find(v)].push_back(v);
            for (const auto& [root, members] : classes) {
                std::string r = root;
                for (const auto& m : members)
                    if (dist.count(m)) {
                        r = m;
                        break;
                    }
                for (const auto& m : members) rep[m] = r;
            }
        }

        CompressedCanonicalModel cm;
        cm.branch_choices = std::move(branch_choices);
        cm.exponent_choices = std::move(exponent_choices);
        for (const auto& v : variables_of(q_)) cm.kb.add_node(rep.at(v));
        for (std::size_t i = 0; i < plans.size(); ++i) {
            if (plans[i].empty()) continue;
            std::string cur = rep.at(q_.atoms[i].src);
            for (std::size_t k = 0; k < plans[i].size(); ++k) {
                std::string next = (k + 1 == plans[i].size())
                                       ? rep.at(q_.atoms[i].dst)
                                       : "_a" + std::to_string(i) + "_s" + std::to_string(k + 1);
                const Segment& seg = plans[i][k];
                if (seg.power) {
                    cm.kb.add_power_edge(cur, seg.word, seg.count, next);
                } else {
                    cm.kb.add_edge(cur, seg.word.front(), next);
                }
                cur = next;
            }
        }
        for (const auto& v : q_.distinguished) cm.nu[v] = cm.kb.add_node(rep.at(v));
        return cm;
    }

    Crpq q_;
    std::vector<std::vector<WFactor>> factored_;
    std::vector<PowerSlot> power_slots_;
    std::vector<BranchSlot> branch_slots_;
    std::vector<std::vector<BigUint>> exponent_lists_;
    std::vector<std::size_t> exp_index_, branch_index_;
    bool done_ = false;
};

// Expands a compressed canonical model into a concrete one.  Only valid when
// every exponent is small enough; `max_total_edges` guards the blowup.
inline CanonicalModel expand(const CompressedCanonicalModel& cm, const BigUint& max_total_edges) {
    CanonicalModel out;
    out.kb = expand(cm.kb, max_total_edges);
    for (const auto& [v, node] : cm.nu) out.nu[v] = out.kb.node(cm.kb.node_names[node]);
    return out;
}

}  // namespace crpq

#endif  // CRPQ_CANONICAL_HPP
