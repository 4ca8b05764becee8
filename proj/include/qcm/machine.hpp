#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qcm/rational.hpp"
#include "qcm/sphere.hpp"
#include "qcm/symmetric_basis.hpp"
#include "qcm/types.hpp"

namespace qcm {

/// Parameters of a cloning machine: N' identical N-level inputs into M
/// approximate copies, M >= N' >= 1.
struct MachineSpec {
    int n_levels;
    int n_inputs;
    int n_copies;

    MachineSpec(int levels, int inputs, int copies)
        : n_levels(levels), n_inputs(inputs), n_copies(copies) {
        if (levels < 1) throw std::invalid_argument("MachineSpec: n_levels must be >= 1");
        if (inputs < 1) throw std::invalid_argument("MachineSpec: n_inputs must be >= 1");
        if (copies < inputs)
            throw std::invalid_argument("MachineSpec: n_copies must be >= n_inputs");
    }
};

namespace detail {

/// (N'+N-1)! (M-N')! / (N'! (M+N-1)!), the squared cloning-coefficient scale.
inline Rational coefficient_scale_squared(const MachineSpec& s) {
    const Rational num = Rational(factorial_exact(s.n_inputs + s.n_levels - 1)) *
                         Rational(factorial_exact(s.n_copies - s.n_inputs));
    const Rational den = Rational(factorial_exact(s.n_inputs)) *
                         Rational(factorial_exact(s.n_copies + s.n_levels - 1));
    return num / den;
}

}  // namespace detail

/// beta(m)^2 as an exact rational: (M-m)!/(M-N'-m)! times the scale, where
/// m is the number of copies not in the cloned level.
inline Rational beta_squared_rational(const MachineSpec& spec, int m) {
    if (m < 0 || m > spec.n_copies - spec.n_inputs)
        throw std::invalid_argument("beta_coefficient: error count m out of [0, M-N']");
    return Rational(falling_factorial_exact(spec.n_copies - m, spec.n_inputs)) *
           detail::coefficient_scale_squared(spec);
}

inline double beta_coefficient(const MachineSpec& spec, int m) {
    return std::sqrt(beta_squared_rational(spec, m).value());
}

/// Coefficient of the 1->M machine branch whose ancilla occupation is
/// ancilla_occ and whose cloned level is `level` (0-based). Equals
/// sqrt(M-m) sqrt(N!(M-1)!/(M+N-1)!), with M-m recovered as the ancilla
/// count in the cloned level plus one.
inline double alpha_coefficient(const MachineSpec& spec, int level,
                                const OccupationVector& ancilla_occ) {
    if (spec.n_inputs != 1)
        throw std::invalid_argument("alpha_coefficient: defined for N'=1 machines");
    if (ancilla_occ.levels() != spec.n_levels)
        throw std::invalid_argument("alpha_coefficient: ancilla level count mismatch");
    if (ancilla_occ.total() != spec.n_copies - 1)
        throw std::invalid_argument("alpha_coefficient: ancilla must hold M-1 systems");
    if (level < 0 || level >= spec.n_levels)
        throw std::invalid_argument("alpha_coefficient: level out of range");
    const int m = spec.n_copies - (ancilla_occ.count(level) + 1);
    return beta_coefficient(spec, m);
}

/// The machine as an explicit isometry from the N input levels into
/// (symmetric M-copy space) x (symmetric (M-N')-system ancilla space).
/// Row layout: copy_rank * dim(ancilla) + ancilla_rank.
struct CloningIsometry {
    MachineSpec spec;
    SymmetricBasis copy_basis;
    SymmetricBasis ancilla_basis;
    Matrix matrix;

    int row_index(int copy_rank, int ancilla_rank) const {
        return copy_rank * ancilla_basis.size() + ancilla_rank;
    }
};

/// Column j maps |N' j> to the sum over copy occupations n with n_j >= N' of
/// beta(M - n_j) |n> x |n - N' e_j>. Pairing each branch with the ancilla
/// occupation n - N' e_j gives distinct columns disjoint support, so the
/// map is an exact isometry.
inline CloningIsometry build_isometry(const MachineSpec& spec, std::int64_t cap = 0) {
    SymmetricBasis copies(spec.n_levels, spec.n_copies);
    SymmetricBasis ancilla(spec.n_levels, spec.n_copies - spec.n_inputs);
    const std::int64_t rows =
        static_cast<std::int64_t>(copies.size()) * static_cast<std::int64_t>(ancilla.size());
    const std::int64_t limit = dimension_cap(cap);
    if (rows > limit)
        throw DimensionCapError("build_isometry: copy x ancilla dimension " +
                                std::to_string(rows) + " exceeds cap " + std::to_string(limit));
    Matrix u = Matrix::Zero(rows, spec.n_levels);
    for (int j = 0; j < spec.n_levels; ++j) {
        for (int a = 0; a < ancilla.size(); ++a) {
            const OccupationVector& anc = ancilla.at(a);
            const OccupationVector n = anc.shifted(j, spec.n_inputs);
            const int m = spec.n_copies - n.count(j);
            const int row = copies.rank(n) * ancilla.size() + a;
            u(row, j) = beta_coefficient(spec, m);
        }
    }
    return CloningIsometry{spec, std::move(copies), std::move(ancilla), std::move(u)};
}

/// Output of a cloning machine: sparse superposition of
/// (copy occupation, ancilla occupation) branches.
struct CloneOutput {
    MachineSpec spec;
    std::map<std::pair<int, int>, Complex> branches;

    double norm_squared() const {
        double s = 0.0;
        for (const auto& [key, amp] : branches) s += std::norm(amp);
        return s;
    }
};

/// Output for the basis input |N' level>: column `level` of the isometry.
inline CloneOutput clone_basis(const CloningIsometry& iso, int level) {
    if (level < 0 || level >= iso.spec.n_levels)
        throw std::invalid_argument("clone_basis: level out of range");
    CloneOutput out{iso.spec, {}};
    const int da = iso.ancilla_basis.size();
    for (int c = 0; c < iso.copy_basis.size(); ++c)
        for (int a = 0; a < da; ++a) {
            const Complex amp = iso.matrix(c * da + a, level);
            if (amp != Complex(0.0, 0.0)) out.branches[{c, a}] = amp;
        }
    return out;
}

/// Linear extension to arbitrary inputs, defined for N'=1 machines:
/// branches of sum_j xi_j (column j).
inline CloneOutput clone_state(const PureState& psi, const CloningIsometry& iso) {
    if (iso.spec.n_inputs != 1)
        throw std::invalid_argument("clone_state: arbitrary inputs need an N'=1 machine");
    if (psi.levels() != iso.spec.n_levels)
        throw std::invalid_argument("clone_state: state dimension mismatch");
    CloneOutput out{iso.spec, {}};
    const int da = iso.ancilla_basis.size();
    const Vector image = iso.matrix * psi.amplitudes();
    for (int c = 0; c < iso.copy_basis.size(); ++c)
        for (int a = 0; a < da; ++a) {
            const Complex amp = image(c * da + a);
            if (amp != Complex(0.0, 0.0)) out.branches[{c, a}] = amp;
        }
    return out;
}

inline CloneOutput clone_state(const PureState& psi, int m_copies, std::int64_t cap = 0) {
    return clone_state(psi, build_isometry(MachineSpec(psi.levels(), 1, m_copies), cap));
}

/// N x N single-copy reduced density matrix.
class DensityMatrix {
public:
    explicit DensityMatrix(Matrix entries) : entries_(std::move(entries)) {
        if (entries_.rows() != entries_.cols() || entries_.rows() < 1)
            throw std::invalid_argument("DensityMatrix: square matrix required");
        if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
            throw std::invalid_argument("DensityMatrix: not Hermitian");
        if (std::abs(entries_.trace() - Complex(1.0, 0.0)) > 1e-10)
            throw std::invalid_argument("DensityMatrix: trace must be 1");
    }

    int dim() const { return static_cast<int>(entries_.rows()); }
    const Matrix& entries() const { return entries_; }

    double expectation(const PureState& psi) const {
        if (psi.levels() != dim())
            throw std::invalid_argument("DensityMatrix: state dimension mismatch");
        return (psi.amplitudes().adjoint() * entries_ * psi.amplitudes())(0, 0).real();
    }

private:
    Matrix entries_;
};

/// Traces the output over the ancilla and over all copies but one:
///   rho[k,l] = sum over branch pairs sharing an ancilla occupation of
///              amp(n) conj(amp(n')) <n'| (|l><k| on one copy) |n>.
/// The transition element is nonzero only when n' = n - e_k + e_l
/// (value sqrt(n_k (n_l + 1))/M) or when n' = n and k = l.
inline DensityMatrix single_copy_density(const CloneOutput& out) {
    const int n_levels = out.spec.n_levels;
    const int m_copies = out.spec.n_copies;
    SymmetricBasis copies(n_levels, m_copies);
    std::map<int, std::vector<std::pair<int, Complex>>> by_ancilla;
    for (const auto& [key, amp] : out.branches) by_ancilla[key.second].emplace_back(key.first, amp);

    Matrix rho = Matrix::Zero(n_levels, n_levels);
    for (const auto& [anc, group] : by_ancilla) {
        for (const auto& [ket_rank, ket_amp] : group) {
            const OccupationVector& n = copies.at(ket_rank);
            const double w = std::norm(ket_amp) / static_cast<double>(m_copies);
            for (int k = 0; k < n_levels; ++k) rho(k, k) += w * n.count(k);
            for (const auto& [bra_rank, bra_amp] : group) {
                if (bra_rank == ket_rank) continue;
                const OccupationVector& np = copies.at(bra_rank);
                int k = -1, l = -1;
                bool reachable = true;
                for (int lvl = 0; lvl < n_levels && reachable; ++lvl) {
                    const int d = np.count(lvl) - n.count(lvl);
                    if (d == 0) continue;
                    if (d == -1 && k < 0) k = lvl;
                    else if (d == 1 && l < 0) l = lvl;
                    else reachable = false;
                }
                if (!reachable || k < 0 || l < 0) continue;
                const double t = std::sqrt(static_cast<double>(n.count(k)) *
                                           static_cast<double>(n.count(l) + 1)) /
                                 static_cast<double>(m_copies);
                rho(k, l) += ket_amp * std::conj(bra_amp) * t;
            }
        }
    }
    return DensityMatrix(std::move(rho));
}

inline double fidelity_of_clone(const PureState& psi, const CloningIsometry& iso) {
    return single_copy_density(clone_state(psi, iso)).expectation(psi);
}

inline double fidelity_of_clone(const PureState& psi, int m_copies, std::int64_t cap = 0) {
    return single_copy_density(clone_state(psi, m_copies, cap)).expectation(psi);
}

/// Per-copy fidelity the machine actually delivers on basis inputs,
/// computed through the full clone/reduce pipeline and averaged over the
/// N input levels (they agree by symmetry; the average is reported).
inline double machine_basis_fidelity(const CloningIsometry& iso) {
    double sum = 0.0;
    for (int j = 0; j < iso.spec.n_levels; ++j) {
        const DensityMatrix rho = single_copy_density(clone_basis(iso, j));
        sum += rho.entries()(j, j).real();
    }
    return sum / static_cast<double>(iso.spec.n_levels);
}

/// Combinatorial fidelity sum of the machine on basis inputs:
/// sum over m of C(m+N-2, N-2) ((M-m)/M) beta(m)^2.
inline Rational basis_fidelity_rational(const MachineSpec& spec) {
    Rational total(0);
    for (int m = 0; m <= spec.n_copies - spec.n_inputs; ++m) {
        const Rational count(spec.n_levels >= 2
                                 ? symmetric_dimension(spec.n_levels - 1, m)
                                 : (m == 0 ? 1 : 0));
        total = total + count * Rational(spec.n_copies - m, spec.n_copies) *
                            beta_squared_rational(spec, m);
    }
    return total;
}

inline double basis_fidelity(const MachineSpec& spec) {
    return basis_fidelity_rational(spec).value();
}

/// Normalization sum of the branch coefficients; equals 1 exactly.
inline Rational beta_squared_sum_rational(const MachineSpec& spec) {
    Rational total(0);
    for (int m = 0; m <= spec.n_copies - spec.n_inputs; ++m) {
        const Rational count(spec.n_levels >= 2
                                 ? symmetric_dimension(spec.n_levels - 1, m)
                                 : (m == 0 ? 1 : 0));
        total = total + count * beta_squared_rational(spec, m);
    }
    return total;
}

/// (2M+N-1)/(M(N+1)), the optimal 1->M fidelity.
inline Rational fmax_rational(int n_levels, int m_copies) {
    if (n_levels < 1 || m_copies < 1)
        throw std::invalid_argument("fmax_analytic: need N >= 1 and M >= 1");
    return Rational(2LL * m_copies + n_levels - 1,
                    static_cast<std::int64_t>(m_copies) * (n_levels + 1));
}

inline double fmax_analytic(int n_levels, int m_copies) {
    return fmax_rational(n_levels, m_copies).value();
}

/// (M + N'(M+N-1))/(M(N+N')), the optimal N'->M fidelity.
inline Rational fnm_rational(int n_levels, int n_inputs, int m_copies) {
    const MachineSpec spec(n_levels, n_inputs, m_copies);
    (void)spec;
    const std::int64_t num = m_copies + static_cast<std::int64_t>(n_inputs) *
                                            (m_copies + n_levels - 1);
    return Rational(num, static_cast<std::int64_t>(m_copies) * (n_levels + n_inputs));
}

inline double fnm_analytic(int n_levels, int n_inputs, int m_copies) {
    return fnm_rational(n_levels, n_inputs, m_copies).value();
}

/// The 1->M formula with N replaced by N^N': the fidelity available when
/// the N' inputs are treated as one composite system. Never exceeds the
/// N'->M machine fidelity.
inline Rational tilde_fmax_rational(int n_levels, int n_inputs, int m_copies) {
    const MachineSpec spec(n_levels, n_inputs, m_copies);
    (void)spec;
    const std::int64_t power = ipow_exact(n_levels, n_inputs);
    std::int64_t num = 0, den = 0;
    if (__builtin_add_overflow(2LL * m_copies, power - 1, &num) ||
        __builtin_mul_overflow(static_cast<std::int64_t>(m_copies), power + 1, &den))
        throw std::overflow_error("tilde_fmax: 64-bit overflow");
    return Rational(num, den);
}

inline double tilde_fmax(int n_levels, int n_inputs, int m_copies) {
    return tilde_fmax_rational(n_levels, n_inputs, m_copies).value();
}

}  // namespace qcm
