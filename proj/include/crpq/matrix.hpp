#ifndef CRPQ_MATRIX_HPP
#define CRPQ_MATRIX_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "crpq/nfa.hpp"

namespace crpq {

using BigUint = boost::multiprecision::cpp_int;

// Square boolean matrix with bitset rows, used as the state-transition
// relation of an NFA under a fixed word.
struct TransitionMatrix {
    int n = 0;
    int words_per_row = 0;
    std::vector<std::uint64_t> bits;  // row-major, words_per_row per row

    TransitionMatrix() = default;
    explicit TransitionMatrix(int dim)
        : n(dim), words_per_row((dim + 63) / 64), bits(static_cast<std::size_t>(dim) * words_per_row, 0) {}

    static TransitionMatrix identity(int dim) {
        TransitionMatrix m(dim);
        for (int i = 0; i < dim; ++i) m.set(i, i);
        return m;
    }

    void set(int i, int j) { bits[static_cast<std::size_t>(i) * words_per_row + j / 64] |= 1ULL << (j % 64); }
    bool get(int i, int j) const {
        return (bits[static_cast<std::size_t>(i) * words_per_row + j / 64] >> (j % 64)) & 1ULL;
    }

    const std::uint64_t* row(int i) const { return bits.data() + static_cast<std::size_t>(i) * words_per_row; }
    std::uint64_t* row(int i) { return bits.data() + static_cast<std::size_t>(i) * words_per_row; }

    friend bool operator==(const TransitionMatrix& a, const TransitionMatrix& b) {
        return a.n == b.n && a.bits == b.bits;
    }

    // Boolean matrix product: (a * b)[i][j] = OR_k a[i][k] & b[k][j].
    friend TransitionMatrix operator*(const TransitionMatrix& a, const TransitionMatrix& b) {
        if (a.n != b.n) throw std::invalid_argument("transition matrix dimension mismatch");
        TransitionMatrix out(a.n);
        for (int i = 0; i < a.n; ++i) {
            std::uint64_t* orow = out.row(i);
            const std::uint64_t* arow = a.row(i);
            for (int k = 0; k < a.n; ++k) {
                if (!((arow[k / 64] >> (k % 64)) & 1ULL)) continue;
                const std::uint64_t* brow = b.row(k);
                for (int w = 0; w < out.words_per_row; ++w) orow[w] |= brow[w];
            }
        }
        return out;
    }
};

inline TransitionMatrix matrix_for_label(const Nfa& nfa, const Label& a) {
    TransitionMatrix m(nfa.num_states);
    for (int s = 0; s < nfa.num_states; ++s) {
        auto it = nfa.delta[s].find(a);
        if (it == nfa.delta[s].end()) continue;
        for (int t : it->second) m.set(s, t);
    }
    return m;
}

// Relation "state i goes to state j reading exactly `word`".
inline TransitionMatrix matrix_for_word(const Nfa& nfa, const std::vector<Label>& word) {
    TransitionMatrix m = TransitionMatrix::identity(nfa.num_states);
    for (const Label& a : word) m = m * matrix_for_label(nfa, a);
    return m;
}

// m^e by fast squaring; the exponent may be astronomically large.
inline TransitionMatrix matrix_power(TransitionMatrix m, BigUint e) {
    if (e < 0) throw std::invalid_argument("matrix_power: negative exponent");
    TransitionMatrix acc = TransitionMatrix::identity(m.n);
    while (e > 0) {
        if ((e & 1) != 0) acc = acc * m;
        e >>= 1;
        if (e > 0) m = m * m;
    }
    return acc;
}

// Index of the first repeat in the sequence I, m, m^2, ...: returns the pair
// (j, k), j < k, with m^j == m^k and k minimal.  The sequence of powers of a
// boolean matrix is eventually periodic, so this terminates; `cap` guards
// against degenerate blowup (throws if exceeded).
inline std::pair<std::size_t, std::size_t> matrix_cycle(const TransitionMatrix& m, std::size_t cap = 1 << 14) {
    std::vector<TransitionMatrix> seen{TransitionMatrix::identity(m.n)};
    while (seen.size() <= cap) {
        TransitionMatrix next = seen.back() * m;
        for (std::size_t j = 0; j < seen.size(); ++j)
            if (seen[j] == next) return {j, seen.size()};
        seen.push_back(std::move(next));
    }
    throw std::runtime_error("matrix_cycle: no repeat within cap");
}

}  // namespace crpq

#endif  // CRPQ_MATRIX_HPP
