#ifndef CRPQ_REDUCTIONS_HPP
#define CRPQ_REDUCTIONS_HPP

#include <algorithm>
#include <array>
#include <cassert>
#include <cstdlib>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "crpq/query.hpp"
#include "crpq/regex.hpp"

// Generators for families of query pairs whose containment status mirrors a
// combinatorial decision problem with an easy brute-force solver.  They give
// the test suite large supplies of instances with independently computable
// answers, and they exercise the decision procedures on structurally hard
// inputs (branching choices, pumping, address arithmetic) that random pairs
// rarely produce.
//
// Three families are provided:
//   * quantified boolean formulas (forall/exists prefix, 3-CNF matrix),
//   * corridor tiling with a fixed column count,
//   * corridor tiling with exponentially many columns given by bit addresses.

namespace crpq {

struct ReductionPair {
    Crpq q1;
    Crpq q2;
};

// ---------------------------------------------------------------------------
// Quantified boolean formulas.
//
// An instance is  forall x_1..x_n  exists y_1..y_l  phi  with phi in 3-CNF.
// Literals are signed integers: +v / -v with v in 1..n for the universal
// variables and v in n+1..n+l for the existential ones.
// ---------------------------------------------------------------------------

struct Qbf2Instance {
    int num_forall = 0;
    int num_exists = 0;
    std::vector<std::array<int, 3>> clauses;
};

inline bool qbf_brute(const Qbf2Instance& inst) {
    int n = inst.num_forall;
    int l = inst.num_exists;
    assert(n + l < 30);
    for (unsigned x = 0; x < (1u << n); ++x) {
        bool witnessed = false;
        for (unsigned y = 0; y < (1u << l) && !witnessed; ++y) {
            unsigned assign = x | (y << n);
            bool all = true;
            for (const auto& cl : inst.clauses) {
                bool sat = false;
                for (int lit : cl) {
                    int v = std::abs(lit) - 1;
                    bool val = (assign >> v) & 1u;
                    if ((lit > 0) == val) { sat = true; break; }
                }
                if (!sat) { all = false; break; }
            }
            if (all) witnessed = true;
        }
        if (!witnessed) return false;
    }
    return true;
}

// Builds a boolean query pair with q1 contained in q2 exactly when the
// formula is true.  The left query is an a-labeled path of length four whose
// five nodes each carry a variable gadget; the middle gadget commits each
// universal variable to one of t/f while the four flanking gadgets accept
// both.  The right query has one three-link chain per clause; a chain of
// three a-edges must overlap the middle node, so one literal per clause is
// checked against the committed values.  Existential variables are shared
// sink nodes, which makes their assignment consistent across clauses.
//
// With `star_edges` set, the committing gadget uses t*f edges instead of a
// t/f choice: a variable counts as true when at least one t precedes the f.
// This keeps the left query inside the single-symbol-plus-star fragment.
inline ReductionPair qbf_to_containment(const Qbf2Instance& inst,
                                        bool star_edges = false) {
    int n = inst.num_forall;
    int l = inst.num_exists;
    if (n < 1 || l < 1 || inst.clauses.empty())
        throw std::invalid_argument(
            "qbf_to_containment: need at least one variable of each kind "
            "and a nonempty clause list");
    for (const auto& cl : inst.clauses)
        for (int lit : cl) {
            int v = lit < 0 ? -lit : lit;
            if (v < 1 || v > n + l)
                throw std::invalid_argument(
                    "qbf_to_containment: literal out of range");
        }
    auto xlabel = [](int i) { return "x" + std::to_string(i); };
    auto ylabel = [](int k) { return "y" + std::to_string(k); };

    Crpq q1;
    q1.name = "Q1";
    auto path = [](int g) { return "p" + std::to_string(g); };
    for (int g = 0; g < 4; ++g)
        q1.atoms.push_back({path(g), re_symbol("a"), path(g + 1)});
    for (int g = 0; g <= 4; ++g) {
        bool committing = (g == 2);
        std::string pre = "g" + std::to_string(g) + "_";
        for (int i = 1; i <= n; ++i) {
            std::string mid = pre + "x" + std::to_string(i);
            q1.atoms.push_back({path(g), re_symbol(xlabel(i)), mid});
            if (committing) {
                RegexPtr choice =
                    star_edges
                        ? re_concat(re_star(re_symbol("t")), re_symbol("f"))
                        : re_union(re_symbol("t"), re_symbol("f"));
                q1.atoms.push_back({mid, choice, mid + "e"});
            } else {
                q1.atoms.push_back({mid, re_symbol("t"), mid + "t"});
                q1.atoms.push_back({mid, re_symbol("f"), mid + "f"});
            }
        }
        for (int k = 1; k <= l; ++k) {
            std::string mid = pre + "y" + std::to_string(k);
            std::string yt = "Y" + std::to_string(k) + "t";
            std::string yf = "Y" + std::to_string(k) + "f";
            q1.atoms.push_back({path(g), re_symbol(ylabel(k)), mid});
            q1.atoms.push_back({mid, re_symbol("t"), yt});
            q1.atoms.push_back({mid, re_symbol("f"), yf});
            if (!committing) {
                // The permissive gadgets accept either value for y_k.
                q1.atoms.push_back({mid, re_symbol("t"), yf});
                q1.atoms.push_back({mid, re_symbol("f"), yt});
            }
        }
    }

    Crpq q2;
    q2.name = "Q2";
    for (std::size_t c = 0; c < inst.clauses.size(); ++c) {
        std::string pre = "c" + std::to_string(c);
        for (int j = 0; j < 3; ++j) {
            std::string root = pre + "r" + std::to_string(j);
            if (j < 2)
                q2.atoms.push_back(
                    {root, re_symbol("a"), pre + "r" + std::to_string(j + 1)});
            int lit = inst.clauses[c][j];
            int v = std::abs(lit);
            std::string mid = pre + "m" + std::to_string(j);
            Label value = lit > 0 ? "t" : "f";
            if (v <= n) {
                q2.atoms.push_back({root, re_symbol(xlabel(v)), mid});
                q2.atoms.push_back(
                    {mid, re_symbol(value), pre + "e" + std::to_string(j)});
            } else {
                int k = v - n;
                q2.atoms.push_back({root, re_symbol(ylabel(k)), mid});
                q2.atoms.push_back(
                    {mid, re_symbol(value), "Y" + std::to_string(k) + "tf"});
            }
        }
    }
    return {q1, q2};
}

// Star-edge variant: the left query stays in the single-symbol-plus-star
// fragment.
inline ReductionPair qbf_to_containment_astar(const Qbf2Instance& inst) {
    return qbf_to_containment(inst, true);
}

// ---------------------------------------------------------------------------
// Corridor tiling with a fixed number of columns.
//
// Tiles 0..m-1 are split into three groups.  A candidate corridor starts with
// `first_row`, ends with `last_row`, and every interior row consists of
// group-1 tiles except for one adjacent pair drawn from the restricted
// horizontal relation (group 2 next to group 1, or two group-3 tiles).
// Consecutive rows must satisfy the vertical relation position by position.
// The restriction keeps the interior-row language expressible by a single
// regular expression while leaving the existence question intractable in
// general.
// ---------------------------------------------------------------------------

struct CorridorInstance {
    int num_tiles = 0;                      // tiles are 0 .. num_tiles-1
    std::vector<int> group;                 // per tile: 1, 2, or 3
    std::set<std::pair<int, int>> horiz;    // allowed left/right neighbors
    std::set<std::pair<int, int>> vert;     // allowed below/above neighbors
    std::vector<int> first_row;
    std::vector<int> last_row;

    int width() const { return static_cast<int>(first_row.size()); }
};

// The adjacent pairs an interior row may use.
inline std::vector<std::pair<int, int>> corridor_interior_pairs(
    const CorridorInstance& inst) {
    std::vector<std::pair<int, int>> out;
    for (const auto& [u, v] : inst.horiz) {
        int gu = inst.group[u], gv = inst.group[v];
        if ((gu == 1 && gv == 2) || (gu == 2 && gv == 1) ||
            (gu == 3 && gv == 3))
            out.push_back({u, v});
    }
    return out;
}

// Checks the structural restrictions the corridor family relies on and
// throws std::invalid_argument on a violation:
//   * every tile belongs to group 1, 2, or 3,
//   * first_row and last_row list valid tiles and share a positive width,
//   * group-1 tiles combine freely sideways with group-1 and group-2 tiles,
//   * every horizontally matched group-3 pair (u, v) accepts group-1 tiles
//     to the left of u and to the right of v.
// The last two conditions are what make every interior-row shape realizable,
// so the single-expression left query covers exactly the corridor candidates.
inline void corridor_validate(const CorridorInstance& inst) {
    auto bad = [](const std::string& why) {
        throw std::invalid_argument("corridor instance violates partition "
                                    "restrictions: " + why);
    };
    if (inst.num_tiles < 1) bad("no tiles");
    if (static_cast<int>(inst.group.size()) != inst.num_tiles)
        bad("group list size mismatch");
    for (int g : inst.group)
        if (g < 1 || g > 3) bad("group out of range");
    if (inst.first_row.empty() || inst.first_row.size() != inst.last_row.size())
        bad("boundary rows empty or of different widths");
    for (const auto* row : {&inst.first_row, &inst.last_row})
        for (int t : *row)
            if (t < 0 || t >= inst.num_tiles) bad("boundary tile out of range");
    std::vector<int> g1, g2;
    for (int t = 0; t < inst.num_tiles; ++t) {
        if (inst.group[t] == 1) g1.push_back(t);
        if (inst.group[t] == 2) g2.push_back(t);
    }
    for (int u : g1) {
        for (int v : g1)
            if (!inst.horiz.count({u, v}))
                bad("missing group-1/group-1 horizontal pair");
        for (int v : g2)
            if (!inst.horiz.count({u, v}) || !inst.horiz.count({v, u}))
                bad("missing group-1/group-2 horizontal pair");
    }
    for (const auto& [u, v] : inst.horiz) {
        if (inst.group[u] != 3 || inst.group[v] != 3) continue;
        for (int w : g1)
            if (!inst.horiz.count({w, u}) || !inst.horiz.count({v, w}))
                bad("group-3 pair not flanked by all group-1 tiles");
    }
}

// Searches for a corridor: first_row, then admissible interior rows, then
// last_row, with the vertical relation holding position by position between
// consecutive rows.  Returns the full row sequence, or nullopt when none
// exists with at most `max_rows` rows (max_rows <= 0 removes the cap; the
// search stays complete because revisiting a row never helps).
inline std::optional<std::vector<std::vector<int>>> tiling_brute(
    const CorridorInstance& inst, int max_rows = 0) {
    corridor_validate(inst);
    int n = inst.width();
    std::vector<int> group1;
    for (int t = 0; t < inst.num_tiles; ++t)
        if (inst.group[t] == 1) group1.push_back(t);

    std::set<std::vector<int>> interior;
    if (n >= 2) {
        for (int i = 0; i + 2 <= n; ++i) {
            int free_slots = n - 2;
            if (free_slots > 0 && group1.empty()) continue;
            for (const auto& [v1, v2] : corridor_interior_pairs(inst)) {
                std::vector<int> pick(free_slots, 0);
                while (true) {
                    std::vector<int> row;
                    for (int k = 0; k < i; ++k) row.push_back(group1[pick[k]]);
                    row.push_back(v1);
                    row.push_back(v2);
                    for (int k = i; k < free_slots; ++k)
                        row.push_back(group1[pick[k]]);
                    interior.insert(row);
                    int d = free_slots - 1;
                    while (d >= 0 &&
                           pick[d] + 1 == static_cast<int>(group1.size())) {
                        pick[d] = 0;
                        --d;
                    }
                    if (d < 0) break;
                    ++pick[d];
                }
            }
        }
    }

    auto compatible = [&](const std::vector<int>& below,
                          const std::vector<int>& above) {
        for (int j = 0; j < n; ++j)
            if (!inst.vert.count({below[j], above[j]})) return false;
        return true;
    };

    // Breadth-first search from the first row through interior rows to the
    // last row, with parent pointers for reconstructing the corridor.
    std::map<std::vector<int>, std::vector<int>> parent;
    std::deque<std::pair<std::vector<int>, int>> queue;  // (row, rows so far)
    queue.push_back({inst.first_row, 1});
    while (!queue.empty()) {
        auto [row, used] = queue.front();
        queue.pop_front();
        if ((max_rows <= 0 || used + 1 <= max_rows) &&
            compatible(row, inst.last_row)) {
            std::vector<std::vector<int>> result{inst.last_row, row};
            while (row != inst.first_row) {
                row = parent.at(row);
                result.push_back(row);
            }
            std::reverse(result.begin(), result.end());
            return result;
        }
        if (max_rows > 0 && used + 2 > max_rows) continue;
        for (const auto& next : interior) {
            if (!parent.count(next) && compatible(row, next)) {
                parent[next] = row;
                queue.push_back({next, used + 1});
            }
        }
    }
    return std::nullopt;
}

namespace detail {

// A tile is spelled as 2m symbols: a first half over {wd, bd} marking the
// tile's index, and a second half over {wt, bt} marking which tiles may sit
// directly above it.  The two disjoint halves make occurrences of a tile
// boundary unambiguous inside a row string.
inline std::vector<Label> corridor_tile_word(const CorridorInstance& inst,
                                             int t) {
    std::vector<Label> w;
    for (int j = 0; j < inst.num_tiles; ++j)
        w.push_back(j == t ? "bd" : "wd");
    for (int j = 0; j < inst.num_tiles; ++j)
        w.push_back(inst.vert.count({t, j}) ? "bt" : "wt");
    return w;
}

}  // namespace detail

// Builds a boolean query pair with q1 NOT contained in q2 exactly when a
// corridor exists.  The left query is a single path atom whose language is
// the set of row-by-row spellings of corridor candidates; horizontal
// discipline is built into the expression.  The right query matches a
// vertical defect: a "may not sit above" mark followed, exactly one row
// later, by the index mark of the offending tile.  With `stamped` set, every
// symbol is followed by a fresh separator and the defect matcher counts
// separators instead of raw symbols, which brings the right query into the
// single-symbol-plus-star fragment.
inline ReductionPair corridor_tiling_to_containment(
    const CorridorInstance& inst, bool stamped = false) {
    corridor_validate(inst);
    int m = inst.num_tiles;
    int n = inst.width();
    auto spell = [&](const std::vector<Label>& w) {
        RegexPtr r = re_epsilon();
        for (const auto& s : w) {
            r = re_concat(r, re_symbol(s));
            if (stamped) r = re_concat(r, re_symbol("sep"));
        }
        return r;
    };
    auto spell_row = [&](const std::vector<int>& row) {
        std::vector<Label> w;
        for (int t : row) {
            auto tw = detail::corridor_tile_word(inst, t);
            w.insert(w.end(), tw.begin(), tw.end());
        }
        return spell(w);
    };

    std::vector<int> group1;
    for (int t = 0; t < m; ++t)
        if (inst.group[t] == 1) group1.push_back(t);
    RegexPtr any_group1 = re_empty();
    for (std::size_t i = 0; i < group1.size(); ++i) {
        RegexPtr w = spell(detail::corridor_tile_word(inst, group1[i]));
        any_group1 = i == 0 ? w : re_union(any_group1, w);
    }

    RegexPtr interior;
    bool have_interior = false;
    for (int i = 0; i + 2 <= n; ++i) {
        if ((i > 0 || n - i - 2 > 0) && group1.empty()) continue;
        for (const auto& [v1, v2] : corridor_interior_pairs(inst)) {
            RegexPtr row = re_epsilon();
            for (int k = 0; k < i; ++k) row = re_concat(row, any_group1);
            row = re_concat(row, spell(detail::corridor_tile_word(inst, v1)));
            row = re_concat(row, spell(detail::corridor_tile_word(inst, v2)));
            for (int k = 0; k < n - i - 2; ++k)
                row = re_concat(row, any_group1);
            interior = have_interior ? re_union(interior, row) : row;
            have_interior = true;
        }
    }

    RegexPtr left = spell_row(inst.first_row);
    if (have_interior) left = re_concat(left, re_star(interior));
    left = re_concat(left, spell_row(inst.last_row));

    Crpq q1;
    q1.name = "Q1";
    q1.atoms.push_back({"s", left, "e"});

    // A wt at second-half offset k of one tile and a bd at first-half offset
    // k of the tile one row below it are exactly (2n-1)m symbols apart.
    int gap = (2 * n - 1) * m - 1;
    RegexPtr right;
    if (!stamped) {
        right = re_symbol("wt");
        for (int i = 0; i < gap; ++i)
            right = re_concat(right,
                              re_any_of({"wd", "bd", "wt", "bt"}));
        right = re_concat(right, re_symbol("bd"));
    } else {
        right = re_concat(re_symbol("wt"), re_symbol("sep"));
        for (int i = 0; i < gap; ++i) {
            for (const Label& s : {"wd", "bd", "wt", "bt"})
                right = re_concat(right, re_star(re_symbol(s)));
            right = re_concat(right, re_symbol("sep"));
        }
        right = re_concat(right, re_concat(re_symbol("bd"), re_symbol("sep")));
    }

    Crpq q2;
    q2.name = "Q2";
    q2.atoms.push_back({"u", right, "v"});
    return {q1, q2};
}

// Stamped variant: the right query lands in the single-symbol-plus-star
// fragment.
inline ReductionPair corridor_tiling_to_containment_aastar(
    const CorridorInstance& inst) {
    return corridor_tiling_to_containment(inst, true);
}

// ---------------------------------------------------------------------------
// Corridor tiling with 2^addr_bits columns.
//
// Tiles are 0..m-1; a corridor has any number of rows, each of width
// 2^addr_bits, with `first_tile` at the bottom-left and `last_tile` at the
// top-right, and all horizontal and vertical constraints satisfied.
// ---------------------------------------------------------------------------

struct ExpTilingInstance {
    int num_tiles = 0;
    int first_tile = 0;
    int last_tile = 0;
    std::set<std::pair<int, int>> horiz;
    std::set<std::pair<int, int>> vert;
    int addr_bits = 1;
};

// Searches for a corridor of width 2^addr_bits: every row satisfies the
// horizontal relation, consecutive rows the vertical one, the first row
// starts with first_tile and the last row ends with last_tile.  Returns the
// row sequence, or nullopt when none exists with at most `max_rows` rows
// (max_rows <= 0 removes the cap without losing completeness).
inline std::optional<std::vector<std::vector<int>>> exp_tiling_brute(
    const ExpTilingInstance& inst, int max_rows = 0) {
    if (inst.num_tiles < 1 || inst.addr_bits < 1)
        throw std::invalid_argument(
            "exp_tiling_brute: need at least one tile and one address bit");
    assert(inst.addr_bits <= 4);
    int width = 1 << inst.addr_bits;
    int m = inst.num_tiles;

    // All rows satisfying the horizontal constraints.
    std::vector<std::vector<int>> rows;
    std::vector<int> row(width, 0);
    while (true) {
        bool ok = true;
        for (int j = 0; j + 1 < width && ok; ++j)
            ok = inst.horiz.count({row[j], row[j + 1]}) > 0;
        if (ok) rows.push_back(row);
        int d = width - 1;
        while (d >= 0 && row[d] + 1 == m) row[d--] = 0;
        if (d < 0) break;
        ++row[d];
    }

    auto compatible = [&](const std::vector<int>& below,
                          const std::vector<int>& above) {
        for (int j = 0; j < width; ++j)
            if (!inst.vert.count({below[j], above[j]})) return false;
        return true;
    };

    // Breadth-first search over row indices with parent pointers.
    std::vector<int> parent(rows.size(), -2);  // -2 unseen, -1 start row
    std::deque<std::pair<int, int>> queue;     // (row index, rows so far)
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i][0] == inst.first_tile) {
            parent[i] = -1;
            queue.push_back({static_cast<int>(i), 1});
        }
    while (!queue.empty()) {
        auto [i, used] = queue.front();
        queue.pop_front();
        if (rows[i][width - 1] == inst.last_tile) {
            std::vector<std::vector<int>> result;
            for (int k = i; k != -1; k = parent[k]) result.push_back(rows[k]);
            std::reverse(result.begin(), result.end());
            return result;
        }
        if (max_rows > 0 && used + 1 > max_rows) continue;
        for (std::size_t j = 0; j < rows.size(); ++j)
            if (parent[j] == -2 && compatible(rows[i], rows[j])) {
                parent[j] = i;
                queue.push_back({static_cast<int>(j), used + 1});
            }
    }
    return std::nullopt;
}

namespace detail {

// One step of a defect-pattern path: either a single symbol or a starred
// symbol set.
struct PatternStep {
    bool star = false;
    std::vector<Label> syms;
};
using PatternPath = std::vector<PatternStep>;

inline PatternStep pstep(const Label& s) { return {false, {s}}; }
inline PatternStep pstar(std::vector<Label> syms) {
    return {true, std::move(syms)};
}

inline RegexPtr pattern_step_regex(const PatternStep& st) {
    if (st.star) return re_star(re_any_of(st.syms));
    return re_symbol(st.syms.front());
}

}  // namespace detail

// Builds a boolean query pair with q1 NOT contained in q2 exactly when a
// corridor exists.  A corridor is spelled bottom-up as a string over
//   sep  b0 b1 hash   wd bd
// with rows separated by `sep` and every tile followed by its addr_bits-wide
// binary column address (bits separated by `hash`).  The left query guesses
// an arbitrary such string on a path between two angle-bracket edges, with
// generous self-loop collectors on both sides.  The right query is a chain
// of bracketed defect patterns; embedding it forces exactly one pattern onto
// the guessed string, so it embeds exactly when every guess is defective.
inline ReductionPair exp_tiling_to_containment(const ExpTilingInstance& inst) {
    if (inst.num_tiles < 1 || inst.addr_bits < 1)
        throw std::invalid_argument(
            "exp_tiling_to_containment: need at least one tile and one "
            "address bit");
    using detail::PatternPath;
    using detail::PatternStep;
    using detail::pstar;
    using detail::pstep;

    int m = inst.num_tiles;
    int n = inst.addr_bits;
    const std::vector<Label> base = {"sep", "b0", "b1", "wd", "bd", "hash"};
    const std::vector<Label> base_nosep = {"b0", "b1", "wd", "bd", "hash"};
    const std::vector<Label> base_ang = {"sep", "b0", "b1", "wd",
                                         "bd",  "hash", "oang", "cang"};
    const std::vector<Label> base_brk = {"sep", "b0",   "b1",   "wd",  "bd",
                                         "hash", "oang", "cang", "obr", "cbr"};

    auto tile_word = [&](int t) {
        std::vector<Label> w;
        for (int j = 0; j < m; ++j) w.push_back(j == t ? "bd" : "wd");
        return w;
    };

    Crpq q1;
    q1.name = "Q1";
    q1.atoms.push_back({"z1", re_symbol("mark"), "z2"});
    for (const Label& s : base_brk)
        q1.atoms.push_back({"z2", re_symbol(s), "z2"});
    q1.atoms.push_back({"z2", re_symbol("obr"), "z3"});
    for (const Label& s : base_ang)
        q1.atoms.push_back({"z3", re_symbol(s), "z3"});
    q1.atoms.push_back({"z3", re_symbol("oang"), "z4"});
    q1.atoms.push_back({"z4", re_star(re_any_of(base)), "z5"});
    q1.atoms.push_back({"z5", re_symbol("cang"), "z6"});
    for (const Label& s : base_ang)
        q1.atoms.push_back({"z6", re_symbol(s), "z6"});
    q1.atoms.push_back({"z6", re_symbol("cbr"), "z7"});
    for (const Label& s : base_brk)
        q1.atoms.push_back({"z7", re_symbol(s), "z7"});
    q1.atoms.push_back({"z7", re_symbol("mark"), "z8"});
    q1.atoms.push_back({"z6", re_symbol("lnk"), "z3"});

    // -- the defect patterns -------------------------------------------------

    std::vector<PatternPath> paths;
    auto add = [&](PatternPath p) { paths.push_back(std::move(p)); };
    auto cat = [](PatternPath& p, const PatternPath& q) {
        p.insert(p.end(), q.begin(), q.end());
    };
    auto word = [&](const std::vector<Label>& w) {
        PatternPath p;
        for (const auto& s : w) p.push_back(pstep(s));
        return p;
    };
    // A defect that may occur anywhere in the string.
    auto add_inner = [&](PatternPath mid) {
        PatternPath p;
        p.push_back(pstep("oang"));
        p.push_back(pstar(base));
        cat(p, mid);
        p.push_back(pstar(base));
        p.push_back(pstep("cang"));
        add(std::move(p));
    };
    auto bits01 = pstar({"b0", "b1"});
    auto run = pstar({"wd", "bd"});

    // Tile spellings: two index marks with fewer than m fillers between
    // them, or m consecutive fillers with no mark.
    for (int i = 0; i <= m - 1; ++i) {
        PatternPath mid{pstep("bd")};
        for (int k = 0; k < i; ++k) mid.push_back(pstep("wd"));
        mid.push_back(pstep("bd"));
        add_inner(std::move(mid));
    }
    {
        PatternPath mid;
        for (int k = 0; k < m; ++k) mid.push_back(pstep("wd"));
        add_inner(std::move(mid));
    }
    // A tile run of the wrong length, flanked by non-tile symbols.
    for (const Label& a : {"b0", "b1", "hash", "sep"})
        for (const Label& b : {"b0", "b1", "hash", "sep"}) {
            for (int p = 0; p <= m - 1; ++p)
                for (int q = 0; q <= m - 1; ++q) {
                    if (p + q == m - 1) continue;
                    PatternPath mid{pstep(a)};
                    for (int k = 0; k < p; ++k) mid.push_back(pstep("wd"));
                    mid.push_back(pstep("bd"));
                    for (int k = 0; k < q; ++k) mid.push_back(pstep("wd"));
                    mid.push_back(pstep(b));
                    add_inner(std::move(mid));
                }
            for (int p = 1; p <= m - 1; ++p) {
                PatternPath mid{pstep(a)};
                for (int k = 0; k < p; ++k) mid.push_back(pstep("wd"));
                mid.push_back(pstep(b));
                add_inner(std::move(mid));
            }
        }

    // Address spellings: bits and bit separators must alternate.
    for (const Label& a : {"b0", "b1"})
        for (const Label& b : {"b0", "b1"})
            add_inner({pstep(a), pstep(b)});
    add_inner({pstep("hash"), pstep("hash")});
    for (const Label& a : {"sep", "wd", "bd"}) {
        add_inner({pstep("hash"), pstep(a)});
        add_inner({pstep(a), pstep("hash")});
    }
    // Too many bits in one address.
    {
        PatternPath mid;
        for (int i = 0; i < n; ++i) {
            mid.push_back(pstep("hash"));
            mid.push_back(bits01);
        }
        add_inner(std::move(mid));
    }
    // Too few bits in one address (at least one bit, fewer separators).
    for (int np = 0; np <= n - 2; ++np)
        for (const Label& a1 : {"sep", "wd", "bd"})
            for (const Label& a2 : {"sep", "wd", "bd"})
                for (const Label& b : {"b0", "b1"}) {
                    PatternPath mid{pstep(a1), pstep(b)};
                    for (int k = 0; k < np; ++k) {
                        mid.push_back(bits01);
                        mid.push_back(pstep("hash"));
                    }
                    mid.push_back(bits01);
                    mid.push_back(pstep(a2));
                    add_inner(std::move(mid));
                }

    // The string must start and end with a row separator and be nonempty.
    for (const Label& a : base_nosep) {
        add({pstep("oang"), pstep(a), pstar(base), pstep("cang")});
        add({pstep("oang"), pstar(base), pstep(a), pstep("cang")});
    }
    add({pstep("oang"), pstep("cang")});
    add({pstep("oang"), pstep("sep"), pstep("cang")});
    // A separator may only be followed by a tile or the string end, and a
    // tile mark may not sit directly before a separator (the address is
    // missing).
    for (const Label& a : {"b0", "b1", "hash", "sep"})
        add_inner({pstep("sep"), pstep(a)});
    for (const Label& c : {"wd", "bd"})
        add_inner({pstep(c), pstep("sep")});

    // Wrong corner tiles.
    for (int t = 0; t < m; ++t) {
        if (t != inst.first_tile) {
            PatternPath p{pstep("oang"), pstep("sep")};
            cat(p, word(tile_word(t)));
            p.push_back(pstar(base));
            p.push_back(pstep("cang"));
            add(std::move(p));
        }
        if (t != inst.last_tile) {
            PatternPath p{pstep("oang"), pstar(base)};
            cat(p, word(tile_word(t)));
            p.push_back(pstep("b1"));
            for (int k = 1; k < n; ++k) {
                p.push_back(pstep("hash"));
                p.push_back(pstep("b1"));
            }
            p.push_back(pstep("sep"));
            p.push_back(pstep("cang"));
            add(std::move(p));
        }
    }

    // Addresses must count from all-zeros up to all-ones within each row.
    add_inner({pstep("sep"), run, pstar({"b0", "hash"}), pstep("b1")});
    add_inner({pstep("b0"), pstar({"b1", "hash"}), pstep("sep")});
    for (const Label& a : base_nosep) {
        PatternPath mid{pstep("b1")};
        for (int k = 1; k < n; ++k) {
            mid.push_back(pstep("hash"));
            mid.push_back(pstep("b1"));
        }
        mid.push_back(pstep(a));
        add_inner(std::move(mid));
    }
    // Bit i must flip from 0 to 1 when every lower bit is 1.
    for (int i = 1; i <= n; ++i)
        for (const Label& c : {"wd", "bd"}) {
            PatternPath mid{pstep("b0")};
            for (int k = 0; k < n - i; ++k) {
                mid.push_back(pstep("hash"));
                mid.push_back(pstep("b1"));
            }
            mid.push_back(pstep(c));
            mid.push_back(run);
            for (int k = 0; k < i - 1; ++k) {
                mid.push_back(bits01);
                mid.push_back(pstep("hash"));
            }
            mid.push_back(pstep("b0"));
            add_inner(std::move(mid));
        }
    // Bits below the flipped one must reset to 0.
    for (int i = 1; i <= n - 1; ++i)
        for (const Label& c : {"wd", "bd"}) {
            PatternPath mid{pstep("b0")};
            for (int k = 0; k < n - i; ++k) {
                mid.push_back(pstep("hash"));
                mid.push_back(pstep("b1"));
            }
            mid.push_back(pstep(c));
            mid.push_back(run);
            for (int k = 0; k < i; ++k) {
                mid.push_back(bits01);
                mid.push_back(pstep("hash"));
            }
            mid.push_back(pstar({"b0", "b1", "hash"}));
            mid.push_back(pstep("b1"));
            add_inner(std::move(mid));
        }
    // Bits above the flipped one must keep their value.
    for (int i = 1; i <= n - 1; ++i)
        for (int j = 0; i + j + 1 <= n; ++j) {
            int k = n - i - j - 1;
            for (const Label& a : {"b0", "b1"})
                for (const Label& c : {"wd", "bd"}) {
                    PatternPath mid;
                    for (int r = 0; r < i - 1; ++r) {
                        mid.push_back(bits01);
                        mid.push_back(pstep("hash"));
                    }
                    mid.push_back(pstep(a));
                    mid.push_back(pstep("hash"));
                    for (int r = 0; r < j; ++r) {
                        mid.push_back(bits01);
                        mid.push_back(pstep("hash"));
                    }
                    mid.push_back(pstep("b0"));
                    for (int r = 0; r < k; ++r) {
                        mid.push_back(pstep("hash"));
                        mid.push_back(pstep("b1"));
                    }
                    mid.push_back(pstep(c));
                    mid.push_back(run);
                    for (int r = 0; r < i - 1; ++r) {
                        mid.push_back(bits01);
                        mid.push_back(pstep("hash"));
                    }
                    mid.push_back(pstep(a == "b0" ? "b1" : "b0"));
                    add_inner(std::move(mid));
                }
        }

    // Horizontal violations: two tiles with one address between them.
    for (int t = 0; t < m; ++t)
        for (int u = 0; u < m; ++u) {
            if (inst.horiz.count({t, u})) continue;
            PatternPath mid = word(tile_word(t));
            mid.push_back(pstar({"b0", "b1", "hash"}));
            cat(mid, word(tile_word(u)));
            add_inner(std::move(mid));
        }

    // -- assembling q2 -------------------------------------------------------

    Crpq q2;
    q2.name = "Q2";
    int fresh = 0;
    auto next_var = [&]() { return "v" + std::to_string(fresh++); };
    auto emit_path = [&](const std::string& from, const std::string& to,
                         const PatternPath& p) {
        std::string cur = from;
        for (std::size_t i = 0; i < p.size(); ++i) {
            std::string nxt = i + 1 == p.size() ? to : next_var();
            q2.atoms.push_back(
                {cur, detail::pattern_step_regex(p[i]), nxt});
            cur = nxt;
        }
    };

    std::string chain = next_var();
    {
        std::string start = next_var();
        q2.atoms.push_back({start, re_symbol("mark"), chain});
    }
    auto open_pattern = [&]() {
        std::string left = next_var();
        q2.atoms.push_back({chain, re_symbol("obr"), left});
        return left;
    };
    auto close_pattern = [&](const std::string& right) {
        std::string nxt = next_var();
        q2.atoms.push_back({right, re_symbol("cbr"), nxt});
        chain = nxt;
    };

    for (const auto& p : paths) {
        std::string left = open_pattern();
        std::string right = next_var();
        emit_path(left, right, p);
        close_pattern(right);
    }

    // Vertical violations.  For each forbidden pair the pattern checks, bit
    // by bit, that some tile and the tile one row above it (same address,
    // exactly one separator apart) spell the pair.  Each bit check offers a
    // 0-branch and a 1-branch; the back-and-forth `lnk` edges force all
    // branches that land on the guessed string to agree on one position per
    // row, so the two positions agree on the whole address.
    PatternPath ell{pstar({"lnk"}), pstar(base_ang), pstar({"lnk"})};
    for (int t = 0; t < m; ++t)
        for (int u = 0; u < m; ++u) {
            if (inst.vert.count({t, u})) continue;
            std::string left = open_pattern();
            std::string right = next_var();
            std::string pre =
                "g" + std::to_string(t) + "_" + std::to_string(u) + "_";
            auto bit_check = [&](int i, const Label& b) {
                // tile t, address with bit i = b, one row later tile u with
                // the same bit value.
                PatternPath mid = word(tile_word(t));
                auto ei = [&](PatternPath& p) {
                    for (int r = 0; r < i - 1; ++r) {
                        p.push_back(bits01);
                        p.push_back(pstep("hash"));
                    }
                    p.push_back(pstep(b));
                    for (int r = i; r < n; ++r) {
                        p.push_back(pstep("hash"));
                        p.push_back(bits01);
                    }
                };
                ei(mid);
                mid.push_back(pstar(base_nosep));
                mid.push_back(pstep("sep"));
                mid.push_back(pstar(base_nosep));
                cat(mid, word(tile_word(u)));
                ei(mid);
                return mid;
            };
            for (int i = 1; i <= n; ++i) {
                std::string x0 = pre + "x" + std::to_string(i) + "_0";
                std::string y0 = pre + "y" + std::to_string(i) + "_0";
                std::string x1 = pre + "x" + std::to_string(i) + "_1";
                std::string y1 = pre + "y" + std::to_string(i) + "_1";
                emit_path(left, x0, {pstep("oang"), pstar(base)});
                emit_path(x0, y0, bit_check(i, "b0"));
                emit_path(y0, x1,
                          {pstar(base), pstep("cang"), pstep("oang"),
                           pstar(base)});
                emit_path(x1, y1, bit_check(i, "b1"));
                emit_path(y1, right, {pstar(base), pstep("cang")});
            }
            for (int i = 1; i <= n - 1; ++i)
                for (const char* zk : {"x", "y"})
                    for (const char* c : {"_0", "_1"})
                        for (const char* d : {"_0", "_1"}) {
                            std::string a =
                                pre + zk + std::to_string(i) + c;
                            std::string b =
                                pre + zk + std::to_string(i + 1) + d;
                            emit_path(a, b, ell);
                            emit_path(b, a, ell);
                        }
            close_pattern(right);
        }

    {
        std::string end = next_var();
        q2.atoms.push_back({chain, re_symbol("mark"), end});
    }
    return {q1, q2};
}

}  // namespace crpq

#endif  // CRPQ_REDUCTIONS_HPP
