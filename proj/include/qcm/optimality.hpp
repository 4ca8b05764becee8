#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcm/linalg.hpp"
#include "qcm/machine.hpp"
#include "qcm/rng.hpp"
#include "qcm/sphere.hpp"
#include "qcm/symmetric_basis.hpp"
#include "qcm/types.hpp"

namespace qcm {

/// The fidelity moment matrix A over index pairs (level j, occupation n),
/// flattened as x = j * dim + rank(n). Hermitian with real non-negative
/// entries.
struct MomentMatrix {
    int n_levels;
    int n_copies;
    SymmetricBasis basis;
    Matrix entries;

    int side() const { return n_levels * basis.size(); }
    int index_of(int level, int occupation_rank) const {
        return level * basis.size() + occupation_rank;
    }
    int level_of(int index) const { return index / basis.size(); }
    int rank_of(int index) const { return index % basis.size(); }
};

/// From-scratch entry of A: the fourth moments of the invariant measure
/// contracted with the single-copy transition elements,
///   A[(j',n'),(j,n)] = sum_{i,i'} moment(j',i',i,j) <n'| |i'><i| |n>.
inline double moment_entry_from_scratch(int n_levels, const OccupationVector& n_prime,
                                        int j_prime, int j, const OccupationVector& n) {
    double acc = 0.0;
    for (int i = 0; i < n_levels; ++i)
        for (int ip = 0; ip < n_levels; ++ip) {
            const double t = single_copy_transition(n_prime, ip, i, n);
            if (t == 0.0) continue;
            const Rational mu =
                fourth_moment_exact_rational(n_levels, MomentPattern{j_prime, ip, i, j});
            if (mu.numerator() != 0) acc += mu.value() * t;
        }
    return acc;
}

/// Closed-form entry of A (the paper's evaluated expression; kept as an
/// independent oracle for the from-scratch construction):
///   diagonal (j'=j, n'=n): (M + n_j)/(MN(N+1)),
///   off-diagonal with n' = n - e_j + e_j': sqrt(n_j (n_j' + 1))/(MN(N+1)),
///   zero otherwise.
inline double moment_entry_closed_form(int n_levels, int m_copies,
                                       const OccupationVector& n_prime, int j_prime, int j,
                                       const OccupationVector& n) {
    const double scale = 1.0 / (static_cast<double>(m_copies) * n_levels * (n_levels + 1));
    if (j_prime == j) {
        if (!(n_prime == n)) return 0.0;
        return (m_copies + n.count(j)) * scale;
    }
    if (n.count(j) == 0) return 0.0;
    for (int lvl = 0; lvl < n_levels; ++lvl) {
        const int expected =
            n.count(lvl) - (lvl == j ? 1 : 0) + (lvl == j_prime ? 1 : 0);
        if (n_prime.count(lvl) != expected) return 0.0;
    }
    return std::sqrt(static_cast<double>(n.count(j)) *
                     static_cast<double>(n.count(j_prime) + 1)) *
           scale;
}

inline MomentMatrix build_A(int n_levels, int m_copies, std::int64_t cap = 0) {
    if (n_levels < 1 || m_copies < 1)
        throw std::invalid_argument("build_A: need N >= 1 and M >= 1");
    SymmetricBasis basis(n_levels, m_copies);
    const std::int64_t side = static_cast<std::int64_t>(n_levels) * basis.size();
    const std::int64_t limit = dimension_cap(cap);
    if (side > limit)
        throw DimensionCapError("build_A: matrix side " + std::to_string(side) +
                                " exceeds cap " + std::to_string(limit));
    Matrix a = Matrix::Zero(side, side);
    const int dim = basis.size();
    for (int x = 0; x < side; ++x) {
        const int jp = x / dim;
        const OccupationVector& np = basis.at(x % dim);
        for (int y = x; y < static_cast<int>(side); ++y) {
            const int j = y / dim;
            const OccupationVector& n = basis.at(y % dim);
            const double value = moment_entry_from_scratch(n_levels, np, jp, j, n);
            a(x, y) = value;
            a(y, x) = value;
        }
    }
    return MomentMatrix{n_levels, m_copies, std::move(basis), std::move(a)};
}

/// Monte Carlo version of build_A with per-entry standard errors.
struct MomentMatrixEstimate {
    MomentMatrix matrix;
    RealMatrix std_errors;
    std::int64_t samples;
};

namespace detail {

/// Occupation pairs (n', n) the transition elements connect: n' = n, or
/// n' = n - e_dec + e_inc.
struct ReachablePair {
    int rank_prime;
    int rank;
    bool same;
    int dec;
    int inc;
    double hop_factor;  // sqrt(n_dec (n_inc + 1))/M for hop pairs
};

inline std::vector<ReachablePair> reachable_pairs(const SymmetricBasis& basis, int m_copies) {
    std::vector<ReachablePair> out;
    for (int r = 0; r < basis.size(); ++r) {
        out.push_back({r, r, true, -1, -1, 0.0});
        const OccupationVector& n = basis.at(r);
        for (int dec = 0; dec < basis.levels(); ++dec) {
            if (n.count(dec) == 0) continue;
            for (int inc = 0; inc < basis.levels(); ++inc) {
                if (inc == dec) continue;
                const OccupationVector np = n.shifted(dec, -1).shifted(inc, 1);
                const double f = std::sqrt(static_cast<double>(n.count(dec)) *
                                           static_cast<double>(n.count(inc) + 1)) /
                                 static_cast<double>(m_copies);
                out.push_back({basis.rank(np), r, false, dec, inc, f});
            }
        }
    }
    return out;
}

}  // namespace detail

/// Replaces the exact fourth moments with sample averages over
/// invariant-measure draws. Entries the transition elements never connect
/// are exact zeros (their estimate and standard error are both 0).
/// Deterministic for a given (seed, workers).
inline MomentMatrixEstimate build_A_montecarlo(int n_levels, int m_copies, std::int64_t samples,
                                               std::uint64_t seed, int workers = 1,
                                               std::int64_t cap = 0) {
    if (samples < 2) throw std::invalid_argument("build_A_montecarlo: samples must be >= 2");
    if (workers < 1) throw std::invalid_argument("build_A_montecarlo: workers must be >= 1");
    SymmetricBasis basis(n_levels, m_copies);
    const std::int64_t side = static_cast<std::int64_t>(n_levels) * basis.size();
    const std::int64_t limit = dimension_cap(cap);
    if (side > limit)
        throw DimensionCapError("build_A_montecarlo: matrix side " + std::to_string(side) +
                                " exceeds cap " + std::to_string(limit));
    const int dim = basis.size();
    const auto pairs = detail::reachable_pairs(basis, m_copies);

    // One accumulator per upper-triangle entry touched by a reachable pair.
    struct Slot {
        int x;
        int y;
        int pair;
        int j_prime;
        int j;
    };
    std::vector<Slot> slots;
    for (int p = 0; p < static_cast<int>(pairs.size()); ++p)
        for (int jp = 0; jp < n_levels; ++jp)
            for (int j = 0; j < n_levels; ++j) {
                const int x = jp * dim + pairs[static_cast<std::size_t>(p)].rank_prime;
                const int y = j * dim + pairs[static_cast<std::size_t>(p)].rank;
                if (x <= y) slots.push_back({x, y, p, jp, j});
            }

    std::vector<detail::WelfordAccumulator> total(slots.size());
    const auto ranges = detail::worker_ranges(samples, workers);
    std::vector<Complex> cache(pairs.size());
    std::vector<detail::WelfordAccumulator> local(slots.size());
    for (int w = 0; w < workers; ++w) {
        RandomStream rng(seed, static_cast<std::uint64_t>(w));
        for (auto& acc : local) acc = detail::WelfordAccumulator{};
        for (std::int64_t s = ranges[static_cast<std::size_t>(w)].first;
             s < ranges[static_cast<std::size_t>(w)].second; ++s) {
            const PureState psi = sample_state(n_levels, rng);
            const Vector& xi = psi.amplitudes();
            for (std::size_t p = 0; p < pairs.size(); ++p) {
                const auto& pr = pairs[p];
                if (pr.same) {
                    double acc_same = 0.0;
                    const OccupationVector& n = basis.at(pr.rank);
                    for (int i = 0; i < n_levels; ++i)
                        acc_same += std::norm(xi(i)) * n.count(i);
                    cache[p] = Complex(acc_same / m_copies, 0.0);
                } else {
                    cache[p] = xi(pr.inc) * std::conj(xi(pr.dec)) * pr.hop_factor;
                }
            }
            for (std::size_t k = 0; k < slots.size(); ++k) {
                const Slot& sl = slots[k];
                local[k].add(std::conj(xi(sl.j_prime)) * xi(sl.j) *
                             cache[static_cast<std::size_t>(sl.pair)]);
            }
        }
        for (std::size_t k = 0; k < slots.size(); ++k) total[k].merge(local[k]);
    }

    Matrix a = Matrix::Zero(side, side);
    RealMatrix se = RealMatrix::Zero(side, side);
    for (std::size_t k = 0; k < slots.size(); ++k) {
        const Slot& sl = slots[k];
        a(sl.x, sl.y) = total[k].mean;
        a(sl.y, sl.x) = std::conj(total[k].mean);
        se(sl.x, sl.y) = total[k].standard_error();
        se(sl.y, sl.x) = se(sl.x, sl.y);
    }
    return MomentMatrixEstimate{MomentMatrix{n_levels, m_copies, std::move(basis), std::move(a)},
                                std::move(se), samples};
}

/// One diagonal block of A in the paper's arrangement, parameterized by
/// (n_2, ..., n_N) with n_1 = M - sum. Scaled by 1/(MN(N+1)).
struct BlockMatrix {
    std::vector<int> base;
    RealMatrix entries;
};

inline BlockMatrix block_of_A(int n_levels, int m_copies, const std::vector<int>& base) {
    if (n_levels < 1 || m_copies < 1)
        throw std::invalid_argument("block_of_A: need N >= 1 and M >= 1");
    if (static_cast<int>(base.size()) != n_levels - 1)
        throw std::invalid_argument("block_of_A: base must list n_2..n_N");
    int sum = 0;
    for (int b : base) {
        if (b < 0) throw std::invalid_argument("block_of_A: negative base entry");
        sum += b;
    }
    if (sum > m_copies) throw std::invalid_argument("block_of_A: base exceeds M");
    const int n1 = m_copies - sum;
    const double scale = 1.0 / (static_cast<double>(m_copies) * n_levels * (n_levels + 1));
    // Row weight w_j: n_1 for the first index, n_j + 1 for the others; the
    // block is (M I + w w^T) scaled.
    std::vector<double> w(static_cast<std::size_t>(n_levels));
    w[0] = static_cast<double>(n1);
    for (int j = 1; j < n_levels; ++j)
        w[static_cast<std::size_t>(j)] = static_cast<double>(base[static_cast<std::size_t>(j) - 1] + 1);
    RealMatrix b(n_levels, n_levels);
    for (int r = 0; r < n_levels; ++r)
        for (int c = 0; c < n_levels; ++c) {
            double v = std::sqrt(w[static_cast<std::size_t>(r)] * w[static_cast<std::size_t>(c)]);
            if (r == c) v = m_copies + w[static_cast<std::size_t>(r)];
            b(r, c) = v * scale;
        }
    return BlockMatrix{base, std::move(b)};
}

/// Spectrum summary; fidelity_from_lambda = N * lambda_max.
struct SpectrumReport {
    RealVector eigenvalues;  // descending
    double lambda_max;
    double fidelity_from_lambda;
};

/// Eigenvalues every block carries: M with multiplicity N-1 and 2M+N-1,
/// scaled by 1/(MN(N+1)).
inline SpectrumReport block_spectrum_closed_form(int n_levels, int m_copies) {
    if (n_levels < 1 || m_copies < 1)
        throw std::invalid_argument("block_spectrum_closed_form: need N >= 1 and M >= 1");
    const double scale = 1.0 / (static_cast<double>(m_copies) * n_levels * (n_levels + 1));
    RealVector values(n_levels);
    values(0) = (2.0 * m_copies + n_levels - 1) * scale;
    for (int k = 1; k < n_levels; ++k) values(k) = m_copies * scale;
    const double lambda_max = values(0);
    return SpectrumReport{std::move(values), lambda_max,
                          n_levels * lambda_max};
}

/// Numerical spectrum of the full A matrix.
inline SpectrumReport max_eigen_fidelity(int n_levels, int m_copies, std::int64_t cap = 0,
                                         double tol = 1e-13) {
    const MomentMatrix a = build_A(n_levels, m_copies, cap);
    EigenDecomposition eig = hermitian_eigen(a.entries, tol);
    const double lambda_max = eig.values(0);
    return SpectrumReport{std::move(eig.values), lambda_max, n_levels * lambda_max};
}

/// Average fidelity of an arbitrary machine (isometry into copy x ancilla
/// space, rows = copy_rank * dim(ancilla) + ancilla_rank) evaluated through
/// the quadratic form: F = sum_{x,y} <R_x|R_y> A[x,y] with
/// <R_x|R_y> = sum_a conj(V[(n',a),j']) V[(n,a),j].
inline double machine_average_fidelity(const Matrix& isometry, const MomentMatrix& a) {
    const int dim = a.basis.size();
    const int side = a.side();
    if (isometry.cols() != a.n_levels)
        throw std::invalid_argument("machine_average_fidelity: column count must be N");
    if (isometry.rows() % dim != 0)
        throw std::invalid_argument("machine_average_fidelity: rows must be copy x ancilla");
    const int da = static_cast<int>(isometry.rows()) / dim;
    double total = 0.0;
    for (int x = 0; x < side; ++x) {
        const int jp = x / dim, rp = x % dim;
        for (int y = 0; y < side; ++y) {
            const double axy = a.entries(x, y).real();
            if (axy == 0.0) continue;
            const int j = y / dim, r = y % dim;
            Complex g(0.0, 0.0);
            for (int k = 0; k < da; ++k)
                g += std::conj(isometry(rp * da + k, jp)) * isometry(r * da + k, j);
            total += axy * g.real();
        }
    }
    return total;
}

/// Report of the stationarity identity: the trace-constrained quadratic
/// form evaluates to N * lambda_max both on the top-eigenvector family and
/// on the explicitly constructed machine.
struct LagrangeReport {
    double n_lambda_max;
    double family_value;
    double machine_value;
    int top_multiplicity;
};

inline LagrangeReport lagrange_identity_check(int n_levels, int m_copies, std::int64_t cap = 0) {
    const MomentMatrix a = build_A(n_levels, m_copies, cap);
    const EigenDecomposition eig = hermitian_eigen(a.entries);
    const double lambda_max = eig.values(0);
    int mult = 1;
    while (mult < eig.values.size() && eig.values(mult) > lambda_max * (1.0 - 1e-6)) ++mult;

    // R_{j,n} = sqrt(N/K) * (b-th top eigenvector component), b = 1..K:
    // satisfies the trace constraint sum <R_x|R_x> = N and gives
    // sum G A = (N/K) sum_b v_b^H A v_b.
    double family = 0.0;
    for (int b = 0; b < mult; ++b) {
        const Vector v = eig.vectors.col(b);
        family += (v.adjoint() * a.entries * v)(0, 0).real();
    }
    family *= static_cast<double>(n_levels) / static_cast<double>(mult);

    const CloningIsometry machine = build_isometry(MachineSpec(n_levels, 1, m_copies), cap);
    const double machine_value = machine_average_fidelity(machine.matrix, a);
    return LagrangeReport{n_levels * lambda_max, family, machine_value, mult};
}

/// Average fidelity of a Haar-random admissible machine: a random isometry
/// into the same copy x ancilla space the optimal machine uses.
inline double random_machine_fidelity(const MomentMatrix& a, RandomStream& rng) {
    const std::int64_t da = symmetric_dimension(a.n_levels, a.n_copies - 1);
    const Matrix v = haar_isometry(a.basis.size() * static_cast<int>(da), a.n_levels, rng);
    return machine_average_fidelity(v, a);
}

inline double random_machine_fidelity(int n_levels, int m_copies, RandomStream& rng,
                                      std::int64_t cap = 0) {
    const MomentMatrix a = build_A(n_levels, m_copies, cap);
    return random_machine_fidelity(a, rng);
}

/// Index order that exposes the block structure: for every occupation r of
/// M-1 systems the members (j, r + e_j), then the indices (j, n) with
/// n_j = 0, which A leaves uncoupled.
inline std::vector<int> block_index_arrangement(int n_levels, int m_copies) {
    SymmetricBasis basis(n_levels, m_copies);
    SymmetricBasis anchors(n_levels, m_copies - 1);
    std::vector<int> order;
    order.reserve(static_cast<std::size_t>(n_levels) * basis.size());
    for (int r = 0; r < anchors.size(); ++r)
        for (int j = 0; j < n_levels; ++j) {
            const OccupationVector n = anchors.at(r).shifted(j, 1);
            order.push_back(j * basis.size() + basis.rank(n));
        }
    for (int j = 0; j < n_levels; ++j)
        for (int r = 0; r < basis.size(); ++r)
            if (basis.at(r).count(j) == 0) order.push_back(j * basis.size() + r);
    return order;
}

}  // namespace qcm
