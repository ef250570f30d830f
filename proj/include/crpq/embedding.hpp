#ifndef CRPQ_EMBEDDING_HPP
#define CRPQ_EMBEDDING_HPP

#include <cassert>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "crpq/kb.hpp"
#include "crpq/matrix.hpp"
#include "crpq/nfa.hpp"
#include "crpq/query.hpp"

namespace crpq {

// Variable-to-node assignment.
using Homomorphism = std::map<std::string, int>;

namespace detail {

// Binary reachability relation over the nodes of a model, stored forwards
// and transposed so both directions of arc revision are row scans.
struct Relation {
    TransitionMatrix fwd, rev;
    explicit Relation(int n) : fwd(n), rev(n) {}
    void set(int u, int v) {
        fwd.set(u, v);
        rev.set(v, u);
    }
};

// rel(u, v) iff some path from u to v spells a word of L(nfa).
inline Relation reach_relation(const KnowledgeBase& kb, const Nfa& nfa) {
    Relation rel(kb.num_nodes());
    auto adj = kb.out_adjacency();
    const int S = nfa.num_states;
    std::vector<char> seen;
    for (int u = 0; u < kb.num_nodes(); ++u) {
        seen.assign(static_cast<std::size_t>(kb.num_nodes()) * S, 0);
        std::queue<std::pair<int, int>> bfs;  // (node, nfa state)
        bfs.push({u, 0});
        seen[static_cast<std::size_t>(u) * S] = 1;
        while (!bfs.empty()) {
            auto [v, s] = bfs.front();
            bfs.pop();
            if (nfa.accepting[s]) rel.set(u, v);
            for (const auto& [label, targets] : adj[v]) {
                auto it = nfa.delta[s].find(label);
                if (it == nfa.delta[s].end()) continue;
                for (int w : targets)
                    for (int t : it->second) {
                        char& mark = seen[static_cast<std::size_t>(w) * S + t];
                        if (!mark) {
                            mark = 1;
                            bfs.push({w, t});
                        }
                    }
            }
        }
    }
    return rel;
}

// Small CSP: one variable per query variable, binary constraints given by
// reachability relations.  AC-3 pruning, then MRV backtracking search.
class CspSolver {
  public:
    struct Con {
        int x, y;
        const Relation* rel;
    };

    CspSolver(std::vector<std::string> vars, int num_nodes)
        : vars_(std::move(vars)), n_(num_nodes), words_((num_nodes + 63) / 64) {
        for (std::size_t i = 0; i < vars_.size(); ++i) index_[vars_[i]] = static_cast<int>(i);
    }

    int var_index(const std::string& v) const { return index_.at(v); }

    void add_constraint(const std::string& x, const std::string& y, const Relation* rel) {
        cons_.push_back({index_.at(x), index_.at(y), rel});
    }

    std::optional<Homomorphism> solve(const std::map<std::string, int>& pinning) const {
        if (vars_.empty()) return Homomorphism{};
        if (n_ == 0) return std::nullopt;
        std::vector<std::uint64_t> dom(vars_.size() * words_, 0);
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            for (int v = 0; v < n_; ++v) dom[i * words_ + v / 64] |= 1ULL << (v % 64);
        }
        for (const auto& [var, node] : pinning) {
            auto it = index_.find(var);
            if (it == index_.end()) continue;
            if (node < 0 || node >= n_) return std::nullopt;
            std::uint64_t* d = dom.data() + static_cast<std::size_t>(it->second) * words_;
            std::fill(d, d + words_, 0);
            d[node / 64] = 1ULL << (node % 64);
        }
        // Self-loop constraints are unary: restrict to the relation diagonal.
        for (const auto& c : cons_) {
            if (c.x != c.y) continue;
            std::uint64_t* d = dom.data() + static_cast<std::size_t>(c.x) * words_;
            for (int v = 0; v < n_; ++v)
                if (!c.rel->fwd.get(v, v)) d[v / 64] &= ~(1ULL << (v % 64));
        }
        // Pinning or diagonal restriction may already have emptied a domain;
        // AC-3 only notices that for variables with binary constraints.
        for (std::size_t i = 0; i < vars_.size(); ++i)
            if (popcount_words(dom.data() + i * words_, words_) == 0)
                return std::nullopt;
        // Constraints touching each variable, for worklist-style propagation.
        std::vector<std::vector<int>> var_cons(vars_.size());
        for (std::size_t ci = 0; ci < cons_.size(); ++ci) {
            var_cons[cons_[ci].x].push_back(static_cast<int>(ci));
            if (cons_[ci].y != cons_[ci].x)
                var_cons[cons_[ci].y].push_back(static_cast<int>(ci));
        }
        if (!ac3(dom, var_cons, -1)) return std::nullopt;

        // Strip variables hanging off the constraint graph by at most one
        // edge.  Once the graph is arc consistent such a variable can always
        // be assigned after its lone neighbor, so backtracking search only
        // has to cover the remaining core.  Tree-shaped queries (paths,
        // chains of gadgets) dissolve completely here.
        std::vector<int> edge_count(vars_.size(), 0);
        for (const auto& c : cons_)
            if (c.x != c.y) {
                ++edge_count[c.x];
                ++edge_count[c.y];
            }
        std::vector<char> eliminated(vars_.size(), 0);
        std::vector<int> elim_order;
        {
            std::vector<int> todo;
            for (std::size_t i = 0; i < vars_.size(); ++i)
                if (edge_count[i] <= 1) todo.push_back(static_cast<int>(i));
            while (!todo.empty()) {
                int v = todo.back();
                todo.pop_back();
                if (eliminated[v]) continue;
                eliminated[v] = 1;
                elim_order.push_back(v);
                for (int ci : var_cons[v]) {
                    const auto& c = cons_[ci];
                    if (c.x == c.y) continue;
                    int u = c.x == v ? c.y : c.x;
                    if (!eliminated[u] && --edge_count[u] <= 1) todo.push_back(u);
                }
            }
        }

        std::vector<int> assign(vars_.size(), -1);
        if (!search(dom, var_cons, eliminated, assign)) return std::nullopt;

        // Reinsert stripped variables in reverse order; each sees exactly its
        // parent assigned, and arc consistency guarantees a supported value.
        for (auto it = elim_order.rbegin(); it != elim_order.rend(); ++it) {
            int v = *it;
            std::vector<std::uint64_t> allowed(
                dom.begin() + static_cast<std::size_t>(v) * words_,
                dom.begin() + static_cast<std::size_t>(v + 1) * words_);
            for (int ci : var_cons[v]) {
                const auto& c = cons_[ci];
                if (c.x == c.y) continue;
                int u = c.x == v ? c.y : c.x;
                if (assign[u] < 0) continue;
                const std::uint64_t* r = (c.x == v) ? c.rel->rev.row(assign[u])
                                                    : c.rel->fwd.row(assign[u]);
                for (int w = 0; w < words_; ++w) allowed[w] &= r[w];
            }
            int val = -1;
            for (int v2 = 0; v2 < n_ && val < 0; ++v2)
                if ((allowed[v2 / 64] >> (v2 % 64)) & 1ULL) val = v2;
            if (val < 0) return std::nullopt;
            assign[v] = val;
        }

        Homomorphism h;
        for (std::size_t i = 0; i < vars_.size(); ++i) h[vars_[i]] = assign[i];
        return h;
    }

  private:
    static int popcount_words(const std::uint64_t* w, int n) {
        int c = 0;
        for (int i = 0; i < n; ++i) c += __builtin_popcountll(w[i]);
        return c;
    }

    bool intersects(const std::uint64_t* a, const std::uint64_t* b) const {
        for (int i = 0; i < words_; ++i)
            if (a[i] & b[i]) return true;
        return false;
    }

    // Keeps only values of `from` that have a support in `to` under `m`.
    // Returns true if anything was removed.
    bool revise(std::vector<std::uint64_t>& dom, int from, int to, const TransitionMatrix& m) const {
        std::uint64_t* df = dom.data() + static_cast<std::size_t>(from) * words_;
        const std::uint64_t* dt = dom.data() + static_cast<std::size_t>(to) * words_;
        bool changed = false;
        for (int v = 0; v < n_; ++v) {
            if (!((df[v / 64] >> (v % 64)) & 1ULL)) continue;
            if (!intersects(m.row(v), dt)) {
                df[v / 64] &= ~(1ULL << (v % 64));
                changed = true;
            }
        }
        return changed;
    }

    // Worklist arc consistency.  `seed` is the variable whose domain just
    // shrank, or -1 to start from every constraint.
    bool ac3(std::vector<std::uint64_t>& dom,
             const std::vector<std::vector<int>>& var_cons, int seed) const {
        std::vector<char> queued(cons_.size(), 0);
        std::vector<int> work;
        auto push_var = [&](int v) {
            for (int ci : var_cons[v])
                if (!queued[ci]) {
                    queued[ci] = 1;
                    work.push_back(ci);
                }
        };
        if (seed < 0) {
            for (std::size_t ci = 0; ci < cons_.size(); ++ci) {
                queued[ci] = 1;
                work.push_back(static_cast<int>(ci));
            }
        } else {
            push_var(seed);
        }
        while (!work.empty()) {
            int ci = work.back();
            work.pop_back();
            queued[ci] = 0;
            const auto& c = cons_[ci];
            if (c.x == c.y) continue;
            if (revise(dom, c.x, c.y, c.rel->fwd)) {
                if (popcount_words(dom.data() + static_cast<std::size_t>(c.x) * words_, words_) == 0)
                    return false;
                push_var(c.x);
            }
            if (revise(dom, c.y, c.x, c.rel->rev)) {
                if (popcount_words(dom.data() + static_cast<std::size_t>(c.y) * words_, words_) == 0)
                    return false;
                push_var(c.y);
            }
        }
        return true;
    }

    bool search(std::vector<std::uint64_t>& dom,
                const std::vector<std::vector<int>>& var_cons,
                const std::vector<char>& eliminated,
                std::vector<int>& assign) const {
        // MRV: smallest remaining domain among unassigned variables.
        int best = -1, best_size = 0;
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (assign[i] >= 0 || eliminated[i]) continue;
            int sz = popcount_words(dom.data() + i * words_, words_);
            if (sz == 0) return false;
            if (best < 0 || sz < best_size) {
                best = static_cast<int>(i);
                best_size = sz;
            }
        }
        if (best < 0) return true;  // everything assigned
        // Snapshot the candidate set: the loop body overwrites this row of
        // `dom` (and restores a different buffer on backtracking).
        const std::uint64_t* row = dom.data() + static_cast<std::size_t>(best) * words_;
        std::vector<std::uint64_t> cand(row, row + words_);
        for (int v = 0; v < n_; ++v) {
            if (!((cand[v / 64] >> (v % 64)) & 1ULL)) continue;
            std::vector<std::uint64_t> saved = dom;
            std::uint64_t* db = dom.data() + static_cast<std::size_t>(best) * words_;
            std::fill(db, db + words_, 0);
            db[v / 64] = 1ULL << (v % 64);
            assign[best] = v;
            if (ac3(dom, var_cons, best) && search(dom, var_cons, eliminated, assign)) return true;
            assign[best] = -1;
            dom = std::move(saved);
        }
        return false;
    }

    std::vector<std::string> vars_;
    std::map<std::string, int> index_;
    std::vector<Con> cons_;
    int n_, words_;
};

}  // namespace detail

// Compiles the query's atom regexes once (deduplicated) and answers repeated
// embedding questions against changing models.  The alphabet passed at
// construction must cover every label of every model later given to solve();
// it only matters when the query uses wildcards.
class EmbeddingSolver {
  public:
    explicit EmbeddingSolver(Crpq q, std::set<Label> alphabet = {}) : q_(std::move(q)) {
        vars_ = variables_of(q_);
        for (const auto& a : q_.atoms) {
            std::string key = render(a.regex);
            auto it = nfa_index_.find(key);
            if (it == nfa_index_.end()) {
                it = nfa_index_.emplace(key, static_cast<int>(nfas_.size())).first;
                nfas_.push_back(compile(a.regex, alphabet));
            }
            atom_nfa_.push_back(it->second);
        }
    }

    const Crpq& query() const { return q_; }

    std::optional<Homomorphism> solve(const KnowledgeBase& kb,
                                      const std::map<std::string, int>& pinning = {}) const {
        std::vector<detail::Relation> rels;
        rels.reserve(nfas_.size());
        for (const auto& nfa : nfas_) rels.push_back(detail::reach_relation(kb, nfa));
        return solve_with(rels, kb.num_nodes(), pinning);
    }

  protected:
    std::optional<Homomorphism> solve_with(const std::vector<detail::Relation>& rels, int num_nodes,
                                           const std::map<std::string, int>& pinning) const {
        detail::CspSolver csp(vars_, num_nodes);
        for (std::size_t i = 0; i < q_.atoms.size(); ++i)
            csp.add_constraint(q_.atoms[i].src, q_.atoms[i].dst, &rels[atom_nfa_[i]]);
        return csp.solve(pinning);
    }

    Crpq q_;
    std::vector<std::string> vars_;
    std::vector<Nfa> nfas_;
    std::map<std::string, int> nfa_index_;
    std::vector<int> atom_nfa_;
};

// One-shot convenience wrapper.
inline std::optional<Homomorphism> find_embedding(const Crpq& q, const KnowledgeBase& kb,
                                                  const std::map<std::string, int>& pinning = {},
                                                  std::set<Label> alphabet = {}) {
    return EmbeddingSolver(q, std::move(alphabet)).solve(kb, pinning);
}

// --- windowed view of compressed models -----------------------------------

// Replaces every long power edge w^c by W concrete copies of w at each end
// and a single jump edge standing for the w^(c-2W) middle.  Short power
// edges (c <= 2W + 2) are expanded in full.
struct WindowedModel {
    struct Jump {
        int src, dst;
        std::vector<Label> word;
        BigUint exponent;  // > 0
    };
    KnowledgeBase kb;
    std::vector<Jump> jumps;
};

inline WindowedModel windowed_view(const CompressedKb& ckb, const BigUint& window) {
    WindowedModel wm;
    for (const auto& name : ckb.node_names) wm.kb.add_node(name);
    for (const auto& e : ckb.edges) wm.kb.add_edge(e.src, e.label, e.dst);
    for (std::size_t i = 0; i < ckb.power_edges.size(); ++i) {
        const auto& pe = ckb.power_edges[i];
        auto emit_copies = [&](int from, long copies, long offset, int final_node) {
            int cur = from;
            for (long c = 0; c < copies; ++c)
                for (std::size_t k = 0; k < pe.word.size(); ++k) {
                    bool last = (c + 1 == copies && k + 1 == pe.word.size());
                    int next = last ? final_node
                                    : wm.kb.add_node("_w" + std::to_string(i) + "_" +
                                                     std::to_string(offset + c * static_cast<long>(pe.word.size()) + k + 1));
                    wm.kb.add_edge(cur, pe.word[k], next);
                    cur = next;
                }
        };
        if (pe.count <= 2 * window + 2) {
            emit_copies(pe.src, pe.count.convert_to<long>(), 0, pe.dst);
            continue;
        }
        long w = window.convert_to<long>();
        int mid_left = wm.kb.add_node("_w" + std::to_string(i) + "_L");
        int mid_right = wm.kb.add_node("_w" + std::to_string(i) + "_R");
        emit_copies(pe.src, w, 0, mid_left);
        emit_copies(mid_right, w, 1000000 + w * static_cast<long>(pe.word.size()), pe.dst);
        wm.jumps.push_back({mid_left, mid_right, pe.word, pe.count - 2 * window});
    }
    return wm;
}

namespace detail {

// Like reach_relation, but jump edges advance the NFA state set by the
// precomputed relation of w^exponent in one step.
inline Relation reach_relation_windowed(const WindowedModel& wm, const Nfa& nfa) {
    const int S = nfa.num_states;
    std::vector<TransitionMatrix> jump_rel;
    jump_rel.reserve(wm.jumps.size());
    for (const auto& j : wm.jumps)
        jump_rel.push_back(matrix_power(matrix_for_word(nfa, j.word), j.exponent));
    std::vector<std::vector<std::size_t>> jumps_from(wm.kb.num_nodes());
    for (std::size_t i = 0; i < wm.jumps.size(); ++i) jumps_from[wm.jumps[i].src].push_back(i);

    Relation rel(wm.kb.num_nodes());
    auto adj = wm.kb.out_adjacency();
    std::vector<char> seen;
    for (int u = 0; u < wm.kb.num_nodes(); ++u) {
        seen.assign(static_cast<std::size_t>(wm.kb.num_nodes()) * S, 0);
        std::queue<std::pair<int, int>> bfs;
        bfs.push({u, 0});
        seen[static_cast<std::size_t>(u) * S] = 1;
        while (!bfs.empty()) {
            auto [v, s] = bfs.front();
            bfs.pop();
            if (nfa.accepting[s]) rel.set(u, v);
            for (const auto& [label, targets] : adj[v]) {
                auto it = nfa.delta[s].find(label);
                if (it == nfa.delta[s].end()) continue;
                for (int w : targets)
                    for (int t : it->second) {
                        char& mark = seen[static_cast<std::size_t>(w) * S + t];
                        if (!mark) {
                            mark = 1;
                            bfs.push({w, t});
                        }
                    }
            }
            for (std::size_t ji : jumps_from[v]) {
                int w = wm.jumps[ji].dst;
                for (int t = 0; t < S; ++t) {
                    if (!jump_rel[ji].get(s, t)) continue;
                    char& mark = seen[static_cast<std::size_t>(w) * S + t];
                    if (!mark) {
                        mark = 1;
                        bfs.push({w, t});
                    }
                }
            }
        }
    }
    return rel;
}

}  // namespace detail

// Embedding into a compressed model through a windowed view.  Sound always;
// complete when `window` is at least the solver query's size measure and at
// least (V+2)(s+p) for every atom NFA's word matrix cycle (s, p), which the
// caller is responsible for.  Variables are only ever mapped to windowed
// nodes; with a sufficient window any embedding into the full expansion can
// be shifted into one of that shape.
class CompressedEmbeddingSolver : public EmbeddingSolver {
  public:
    using EmbeddingSolver::EmbeddingSolver;

    std::optional<Homomorphism> solve_compressed(const CompressedKb& ckb, const BigUint& window,
                                                 const std::map<std::string, int>& pinning = {}) const {
        WindowedModel wm = windowed_view(ckb, window);
        std::vector<detail::Relation> rels;
        rels.reserve(nfas_.size());
        for (const auto& nfa : nfas_) rels.push_back(detail::reach_relation_windowed(wm, nfa));
        return solve_with(rels, wm.kb.num_nodes(), pinning);
    }
};

// One-shot convenience wrapper.
inline std::optional<Homomorphism> find_embedding_compressed(
    const Crpq& q, const CompressedKb& ckb, const BigUint& window,
    const std::map<std::string, int>& pinning = {}, std::set<Label> alphabet = {}) {
    return CompressedEmbeddingSolver(q, std::move(alphabet))
        .solve_compressed(ckb, window, pinning);
}

}  // namespace crpq

#endif  // CRPQ_EMBEDDING_HPP
