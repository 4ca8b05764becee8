// Acceptance gate: one line per criterion, nonzero exit if any fails.
//
// Every numeric claim is checked against a second, independently coded route:
// closed forms against the machine pipeline, eigenvalues against the block
// pattern, transitions against a dense tensor construction, Monte Carlo
// against exact moments.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "qcm/linalg.hpp"
#include "qcm/machine.hpp"
#include "qcm/optimality.hpp"
#include "qcm/rng.hpp"
#include "qcm/sphere.hpp"
#include "qcm/symmetric_basis.hpp"

using qcm::Complex;
using qcm::MachineSpec;
using qcm::OccupationVector;
using qcm::Rational;

namespace {

struct Outcome {
    bool pass = true;
    double worst = 0.0;
    double tolerance = 0.0;
    std::string note;

    void fold(double error) {
        worst = std::max(worst, error);
        pass = pass && error <= tolerance;
    }
    void require(bool ok) { pass = pass && ok; }
};

// --- criterion 1: machine basis fidelity equals the 1->M closed form -------

Outcome basis_fidelity_matches_closed_form() {
    Outcome out;
    out.tolerance = 1e-12;
    for (int n = 2; n <= 5; ++n)
        for (int m = 1; m <= 6; ++m) {
            const qcm::CloningIsometry iso =
                qcm::build_isometry(MachineSpec(n, 1, m), 1 << 20);
            out.fold(std::abs(qcm::machine_basis_fidelity(iso) - qcm::fmax_analytic(n, m)));
        }
    out.note = "grid N=2..5, M=1..6";
    return out;
}

// --- criterion 2: moment matrix spectrum ------------------------------------

Outcome moment_spectrum_matches_block_pattern() {
    Outcome out;
    out.tolerance = 1e-10;
    for (int n = 2; n <= 4; ++n)
        for (int m = 1; m <= 5; ++m) {
            const qcm::MomentMatrix a = qcm::build_A(n, m);
            const qcm::EigenDecomposition eig = qcm::hermitian_eigen(a.entries);
            const double scale = 1.0 / (static_cast<double>(m) * n * (n + 1));
            const std::int64_t top = qcm::symmetric_dimension(n, m - 1);
            for (int k = 0; k < eig.values.size(); ++k) {
                const double expected = (k < top ? 2.0 * m + n - 1 : m) * scale;
                out.fold(std::abs(eig.values(k) - expected));
            }
            out.fold(std::abs(n * eig.values(0) - qcm::fmax_analytic(n, m)));
        }
    out.note = "eigenvalues and N*lambda_max, N=2..4, M=1..5";
    return out;
}

// --- criterion 3: the machine is an isometry --------------------------------

Outcome machines_are_isometries() {
    Outcome out;
    out.tolerance = 1e-12;
    for (int n = 2; n <= 5; ++n)
        for (int m = 1; m <= 6; ++m)
            for (int nprime = 1; nprime <= std::min(3, m); ++nprime) {
                const qcm::CloningIsometry iso =
                    qcm::build_isometry(MachineSpec(n, nprime, m), 1 << 20);
                const qcm::Matrix gram = iso.matrix.adjoint() * iso.matrix;
                out.fold((gram - qcm::Matrix::Identity(n, n)).cwiseAbs().maxCoeff());
            }
    out.note = "U^dag U = 1, N=2..5, M=1..6, N'=1..3";
    return out;
}

// --- criterion 4: the fidelity is input independent -------------------------

Outcome cloning_is_universal() {
    Outcome out;
    out.tolerance = 1e-10;
    qcm::RandomStream rng(2024);
    for (int n = 2; n <= 4; ++n)
        for (int m = 1; m <= 5; ++m) {
            const qcm::CloningIsometry iso = qcm::build_isometry(MachineSpec(n, 1, m));
            double lo = 1.0, hi = 0.0;
            for (int s = 0; s < 200; ++s) {
                const double f = qcm::fidelity_of_clone(qcm::sample_state(n, rng), iso);
                lo = std::min(lo, f);
                hi = std::max(hi, f);
            }
            out.fold(hi - lo);
        }
    out.note = "fidelity spread over 200 random inputs, N=2..4, M=1..5";
    return out;
}

// --- criterion 5: coefficient sum equals the N'->M closed form --------------

Outcome combinatorial_sum_matches_closed_form() {
    Outcome out;
    out.tolerance = 1e-12;
    for (int n = 2; n <= 5; ++n)
        for (int m = 1; m <= 6; ++m) {
            for (int nprime = 1; nprime <= std::min(3, m); ++nprime) {
                const MachineSpec spec(n, nprime, m);
                out.require(qcm::basis_fidelity_rational(spec) ==
                            qcm::fnm_rational(n, nprime, m));
                out.fold(std::abs(qcm::basis_fidelity(spec) -
                                  qcm::fnm_analytic(n, nprime, m)));
            }
            out.require(qcm::fnm_rational(n, m, m) == Rational(1));
            out.require(qcm::fnm_rational(n, 1, m) == qcm::fmax_rational(n, m));
        }
    out.note = "exact rational equality on the full grid";
    return out;
}

// --- criterion 6: composite input bound -------------------------------------

Outcome composite_bound_holds() {
    Outcome out;
    out.tolerance = 0.0;
    for (int n = 2; n <= 5; ++n)
        for (int m = 1; m <= 6; ++m)
            for (int nprime = 1; nprime <= std::min(3, m); ++nprime) {
                const Rational tilde = qcm::tilde_fmax_rational(n, nprime, m);
                const Rational fnm = qcm::fnm_rational(n, nprime, m);
                out.require(!(fnm < tilde));
                if (nprime >= 2 && m > nprime) out.require(tilde < fnm);
            }
    out.note = "tilde-F <= F, strict for N'>=2 and M>N'";
    return out;
}

// --- criterion 7: Monte Carlo agrees with exact moments ---------------------

Outcome monte_carlo_matches_exact_moments() {
    Outcome out;
    out.tolerance = 3.0;  // standard errors
    const std::int64_t samples = 100000;
    for (int n : {2, 3, 4}) {
        const std::vector<qcm::MomentPattern> patterns{
            {0, 0, 0, 0}, {0, 0, 1, 1}, {0, 1, 1, 0}, {1, 1, 0, 0}, {0, 1, 1, 1}};
        for (const qcm::MomentPattern& p : patterns) {
            const qcm::MomentEstimate est =
                qcm::estimate_fourth_moment(n, p, samples, 101, 4);
            const double exact = qcm::fourth_moment_exact(n, p);
            out.fold(std::abs(est.mean - Complex(exact, 0.0)) / est.standard_error);
        }
    }
    for (auto [n, m] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}}) {
        const qcm::MomentMatrix exact = qcm::build_A(n, m);
        const qcm::MomentMatrixEstimate est =
            qcm::build_A_montecarlo(n, m, samples, 202, 4);
        double worst_sigma = 0.0;
        for (int x = 0; x < exact.side(); ++x)
            for (int y = 0; y < exact.side(); ++y) {
                const double se = est.std_errors(x, y);
                const double dev = std::abs(est.matrix.entries(x, y) - exact.entries(x, y));
                if (se == 0.0)
                    out.require(dev == 0.0);
                else
                    worst_sigma = std::max(worst_sigma, dev / se);
            }
        // matrix entries use a wider gate than scalar moments
        out.require(worst_sigma <= 5.0);
    }
    out.note = "moments within 3 se, matrix entries within 5 se, 1e5 samples";
    return out;
}

// --- criterion 8: random machines never beat the bound -----------------------

Outcome random_machines_respect_bound() {
    Outcome out;
    out.tolerance = 1e-9;
    qcm::RandomStream rng(8088);
    for (int n = 2; n <= 3; ++n)
        for (int m = 2; m <= 3; ++m) {
            const qcm::MomentMatrix a = qcm::build_A(n, m);
            const double fmax = qcm::fmax_analytic(n, m);
            for (int draw = 0; draw < 1000; ++draw)
                out.fold(std::max(0.0, qcm::random_machine_fidelity(a, rng) - fmax));
        }
    out.note = "1000 draws per point, N=2..3, M=2..3";
    return out;
}

// --- criterion 9: asymptotics in the number of levels ------------------------

Outcome fidelity_shrinks_with_levels() {
    Outcome out;
    out.tolerance = 0.0;
    for (int m : {2, 3, 6}) {
        for (int n = 1; n <= 64; ++n) {
            const Rational f = qcm::fmax_rational(n, m);
            if (n > 1) out.require(f < qcm::fmax_rational(n - 1, m));
            const Rational gap = f - Rational(1, m);
            out.require(gap < Rational(2, n));
            out.require(Rational(0) < gap);
        }
    }
    out.note = "strict decrease and |F - 1/M| < 2/N up to N=64";
    return out;
}

// --- criterion 10: transitions against a dense tensor oracle -----------------

std::vector<int> tuple_digits(std::int64_t t, int n_levels, int m_copies) {
    std::vector<int> d(static_cast<std::size_t>(m_copies));
    for (int c = 0; c < m_copies; ++c) {
        d[static_cast<std::size_t>(c)] = static_cast<int>(t % n_levels);
        t /= n_levels;
    }
    return d;
}

double dense_transition(const OccupationVector& bra, int k, int l,
                        const OccupationVector& ket, int m_copies) {
    const int n_levels = ket.levels();
    std::int64_t dim = 1;
    for (int c = 0; c < m_copies; ++c) dim *= n_levels;
    std::vector<double> ket_vec(static_cast<std::size_t>(dim)),
        bra_vec(static_cast<std::size_t>(dim));
    std::int64_t ket_count = 0, bra_count = 0;
    for (std::int64_t t = 0; t < dim; ++t) {
        std::vector<int> counts(static_cast<std::size_t>(n_levels), 0);
        for (int d : tuple_digits(t, n_levels, m_copies))
            ++counts[static_cast<std::size_t>(d)];
        if (counts == ket.counts()) {
            ket_vec[static_cast<std::size_t>(t)] = 1.0;
            ++ket_count;
        }
        if (counts == bra.counts()) {
            bra_vec[static_cast<std::size_t>(t)] = 1.0;
            ++bra_count;
        }
    }
    double acc = 0.0;
    for (std::int64_t t = 0; t < dim; ++t) {
        if (ket_vec[static_cast<std::size_t>(t)] == 0.0) continue;
        if (t % n_levels != l) continue;
        acc += bra_vec[static_cast<std::size_t>(t - l + k)];
    }
    return acc / std::sqrt(static_cast<double>(ket_count) *
                           static_cast<double>(bra_count));
}

Outcome transitions_match_dense_oracle() {
    Outcome out;
    out.tolerance = 1e-12;
    for (int n = 2; n <= 3; ++n)
        for (int m = 1; m <= 3; ++m) {
            const qcm::SymmetricBasis basis = qcm::enumerate_occupations(n, m);
            for (const OccupationVector& bra : basis.vectors())
                for (const OccupationVector& ket : basis.vectors())
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l)
                            out.fold(std::abs(
                                qcm::single_copy_transition(bra, k, l, ket) -
                                dense_transition(bra, k, l, ket, m)));
        }
    out.note = "all elements, N=2..3, M=1..3";
    return out;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"basis fidelity equals closed form", basis_fidelity_matches_closed_form},
        {"moment spectrum follows block pattern", moment_spectrum_matches_block_pattern},
        {"machines are isometries", machines_are_isometries},
        {"cloning is universal", cloning_is_universal},
        {"coefficient sum equals closed form", combinatorial_sum_matches_closed_form},
        {"composite input bound holds", composite_bound_holds},
        {"monte carlo matches exact moments", monte_carlo_matches_exact_moments},
        {"random machines respect the bound", random_machines_respect_bound},
        {"fidelity shrinks with level count", fidelity_shrinks_with_levels},
        {"transitions match dense oracle", transitions_match_dense_oracle},
    };

    bool all_pass = true;
    int index = 0;
    for (const auto& [label, run] : criteria) {
        ++index;
        const Outcome out = run();
        all_pass = all_pass && out.pass;
        std::printf("criterion %2d %-42s %s  worst=%.3e tol=%.1e  (%s)\n", index,
                    label.c_str(), out.pass ? "PASS" : "FAIL", out.worst, out.tolerance,
                    out.note.c_str());
    }
    return all_pass ? 0 : 1;
}
