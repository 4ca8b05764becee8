#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace qcm {

/// Occupation numbers (n_1, ..., n_N) of M identical systems distributed
/// over N levels. Labels one basis state of the completely symmetric
/// M-copy subspace.
class OccupationVector {
public:
    OccupationVector() = default;

    explicit OccupationVector(std::vector<int> counts) : counts_(std::move(counts)) {
        if (counts_.empty())
            throw std::invalid_argument("OccupationVector: needs at least one level");
        for (int c : counts_)
            if (c < 0) throw std::invalid_argument("OccupationVector: negative count");
        total_ = std::accumulate(counts_.begin(), counts_.end(), 0);
    }

    int levels() const { return static_cast<int>(counts_.size()); }
    int total() const { return total_; }
    int count(int level) const { return counts_.at(static_cast<std::size_t>(level)); }
    const std::vector<int>& counts() const { return counts_; }

    /// m_i = M - n_i, the number of copies not in `level`.
    int errors(int level) const { return total_ - count(level); }

    /// Occupation with `delta` added at `level`; throws if it would go negative.
    OccupationVector shifted(int level, int delta) const {
        std::vector<int> c = counts_;
        c.at(static_cast<std::size_t>(level)) += delta;
        if (c[static_cast<std::size_t>(level)] < 0)
            throw std::invalid_argument("OccupationVector: shift below zero");
        return OccupationVector(std::move(c));
    }

    friend bool operator==(const OccupationVector& a, const OccupationVector& b) {
        return a.counts_ == b.counts_;
    }
    friend bool operator<(const OccupationVector& a, const OccupationVector& b) {
        return a.counts_ < b.counts_;
    }

private:
    std::vector<int> counts_;
    int total_ = 0;
};

/// C(M+N-1, N-1) in exact integer arithmetic; throws std::overflow_error
/// instead of wrapping around.
inline std::int64_t symmetric_dimension(int n_levels, int n_copies) {
    if (n_levels < 1) throw std::invalid_argument("symmetric_dimension: n_levels must be >= 1");
    if (n_copies < 0) throw std::invalid_argument("symmetric_dimension: n_copies must be >= 0");
    // C(n, k) by stepwise multiply/divide; each prefix is itself a binomial,
    // so intermediate values stay exact.
    const int n = n_copies + n_levels - 1;
    int k = n_levels - 1;
    if (k > n - k) k = n - k;
    std::int64_t out = 1;
    for (int j = 1; j <= k; ++j) {
        if (__builtin_mul_overflow(out, static_cast<std::int64_t>(n - k + j), &out))
            throw std::overflow_error("symmetric_dimension: 64-bit overflow");
        out /= j;
    }
    return out;
}

/// The ordered basis of the symmetric subspace of M copies of an N-level
/// system: all occupation vectors summing to M, with a rank map back from
/// vector to index.
///
/// Enumeration order is colexicographic — vectors are sorted by ascending
/// (n_N, ..., n_2), with n_1 holding the remainder — so ranks are stable
/// across runs and platforms. For N=2, M=2 this gives (2,0), (1,1), (0,2).
class SymmetricBasis {
public:
    SymmetricBasis(int n_levels, int n_copies)
        : n_levels_(n_levels), n_copies_(n_copies) {
        if (n_levels < 1) throw std::invalid_argument("SymmetricBasis: n_levels must be >= 1");
        if (n_copies < 0) throw std::invalid_argument("SymmetricBasis: n_copies must be >= 0");
        const std::int64_t dim = symmetric_dimension(n_levels, n_copies);
        vectors_.reserve(static_cast<std::size_t>(dim));
        std::vector<int> cursor(static_cast<std::size_t>(n_levels), 0);
        emit(cursor, n_levels - 1, n_copies);
        for (std::size_t i = 0; i < vectors_.size(); ++i) rank_[vectors_[i]] = static_cast<int>(i);
    }

    int levels() const { return n_levels_; }
    int copies() const { return n_copies_; }
    int size() const { return static_cast<int>(vectors_.size()); }

    const OccupationVector& at(int index) const {
        return vectors_.at(static_cast<std::size_t>(index));
    }
    const std::vector<OccupationVector>& vectors() const { return vectors_; }

    int rank(const OccupationVector& v) const {
        auto it = rank_.find(v);
        if (it == rank_.end())
            throw std::invalid_argument("SymmetricBasis: vector not in basis");
        return it->second;
    }

    bool contains(const OccupationVector& v) const { return rank_.count(v) != 0; }

private:
    // Fills slots N-1 down to 1; slot 0 absorbs what remains. Outer slots
    // vary slowest, which is exactly the colex order documented above.
    void emit(std::vector<int>& cursor, int slot, int remaining) {
        if (slot == 0) {
            cursor[0] = remaining;
            vectors_.emplace_back(cursor);
            return;
        }
        for (int c = 0; c <= remaining; ++c) {
            cursor[static_cast<std::size_t>(slot)] = c;
            emit(cursor, slot - 1, remaining - c);
        }
        cursor[static_cast<std::size_t>(slot)] = 0;
    }

    int n_levels_;
    int n_copies_;
    std::vector<OccupationVector> vectors_;
    std::map<OccupationVector, int> rank_;
};

inline SymmetricBasis enumerate_occupations(int n_levels, int n_copies) {
    return SymmetricBasis(n_levels, n_copies);
}

/// Matrix element <n'| |k><l| (on one copy) |n> between normalized
/// symmetric M-copy states:
///
///   k != l :  sqrt(n_l (n_k + 1)) / M   when n' = n - e_l + e_k
///   k == l :  n_l / M                   when n' = n
///
/// and zero otherwise. Levels are 0-based.
inline double single_copy_transition(const OccupationVector& n_prime, int k, int l,
                                     const OccupationVector& n) {
    if (n_prime.levels() != n.levels())
        throw std::invalid_argument("single_copy_transition: level-count mismatch");
    if (n_prime.total() != n.total())
        throw std::invalid_argument("single_copy_transition: copy-count mismatch");
    const int n_levels = n.levels();
    const int m_copies = n.total();
    if (k < 0 || k >= n_levels || l < 0 || l >= n_levels)
        throw std::invalid_argument("single_copy_transition: level index out of range");
    if (m_copies < 1) throw std::invalid_argument("single_copy_transition: needs M >= 1");

    if (k == l) {
        if (!(n_prime == n)) return 0.0;
        return static_cast<double>(n.count(l)) / static_cast<double>(m_copies);
    }
    if (n.count(l) == 0) return 0.0;
    for (int j = 0; j < n_levels; ++j) {
        const int expected = n.count(j) - (j == l ? 1 : 0) + (j == k ? 1 : 0);
        if (n_prime.count(j) != expected) return 0.0;
    }
    const double w = static_cast<double>(n.count(l)) * static_cast<double>(n.count(k) + 1);
    return std::sqrt(w) / static_cast<double>(m_copies);
}

}  // namespace qcm
