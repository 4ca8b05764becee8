#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "qcm/rational.hpp"
#include "qcm/rng.hpp"
#include "qcm/symmetric_basis.hpp"

using qcm::OccupationVector;
using qcm::SymmetricBasis;

namespace {

// Builds the normalized symmetric occupation state as a dense vector over the
// full M-fold tensor product and evaluates <n'|(|k><l| on copy 1)|n> directly.
// Used as an independent reference for single_copy_transition.
std::vector<int> digits(std::int64_t t, int n_levels, int m_copies) {
    std::vector<int> d(static_cast<std::size_t>(m_copies));
    for (int c = 0; c < m_copies; ++c) {
        d[static_cast<std::size_t>(c)] = static_cast<int>(t % n_levels);
        t /= n_levels;
    }
    return d;
}

std::vector<std::complex<double>> dense_symmetric_state(const OccupationVector& occ,
                                                        int m_copies) {
    const int n_levels = occ.levels();
    std::int64_t dim = 1;
    for (int c = 0; c < m_copies; ++c) dim *= n_levels;
    std::vector<std::complex<double>> v(static_cast<std::size_t>(dim));
    std::int64_t arrangements = 0;
    for (std::int64_t t = 0; t < dim; ++t) {
        std::vector<int> counts(static_cast<std::size_t>(n_levels), 0);
        for (int d : digits(t, n_levels, m_copies)) ++counts[static_cast<std::size_t>(d)];
        if (counts == occ.counts()) {
            v[static_cast<std::size_t>(t)] = 1.0;
            ++arrangements;
        }
    }
    const double norm = std::sqrt(static_cast<double>(arrangements));
    for (auto& x : v) x /= norm;
    return v;
}

double tensor_transition(const OccupationVector& n_prime, int k, int l,
                         const OccupationVector& n, int m_copies) {
    const int n_levels = n.levels();
    const auto ket = dense_symmetric_state(n, m_copies);
    const auto bra = dense_symmetric_state(n_prime, m_copies);
    std::vector<std::complex<double>> image(ket.size());
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(ket.size()); ++t) {
        const auto d = digits(t, n_levels, m_copies);
        if (d[0] != l) continue;
        const std::int64_t shifted = t - l + k;  // copy 1 is the least significant digit
        image[static_cast<std::size_t>(shifted)] += ket[static_cast<std::size_t>(t)];
    }
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < bra.size(); ++t) acc += std::conj(bra[t]) * image[t];
    CHECK(std::abs(acc.imag()) < 1e-15);
    return acc.real();
}

}  // namespace

TEST_CASE("symmetric dimension counts occupations") {
    CHECK(qcm::symmetric_dimension(2, 2) == 3);
    CHECK(qcm::symmetric_dimension(3, 2) == 6);
    CHECK(qcm::symmetric_dimension(6, 3) == 56);
    CHECK(qcm::symmetric_dimension(5, 6) == 210);
    CHECK(qcm::symmetric_dimension(1, 9) == 1);
    CHECK(qcm::symmetric_dimension(5, 0) == 1);
    CHECK_THROWS_AS(qcm::symmetric_dimension(0, 2), std::invalid_argument);
    CHECK_THROWS_AS(qcm::symmetric_dimension(2, -1), std::invalid_argument);
    CHECK_THROWS_AS(qcm::symmetric_dimension(40, 40), std::overflow_error);
}

TEST_CASE("enumeration order for two qubit copies") {
    const SymmetricBasis basis = qcm::enumerate_occupations(2, 2);
    REQUIRE(basis.size() == 3);
    CHECK(basis.at(0).counts() == std::vector<int>{2, 0});
    CHECK(basis.at(1).counts() == std::vector<int>{1, 1});
    CHECK(basis.at(2).counts() == std::vector<int>{0, 2});
}

TEST_CASE("first and last occupation for three levels") {
    const SymmetricBasis basis = qcm::enumerate_occupations(3, 2);
    REQUIRE(basis.size() == 6);
    CHECK(basis.at(0).counts() == std::vector<int>{2, 0, 0});
    CHECK(basis.at(basis.size() - 1).counts() == std::vector<int>{0, 0, 2});
}

TEST_CASE("diagonal transitions count copies") {
    for (int n = 2; n <= 4; ++n)
        for (int m = 1; m <= 4; ++m) {
            const SymmetricBasis basis = qcm::enumerate_occupations(n, m);
            for (std::int64_t r = 0; r < basis.size(); ++r) {
                const OccupationVector& occ = basis.at(r);
                double copies = 0.0;
                for (int l = 0; l < n; ++l)
                    copies += m * qcm::single_copy_transition(occ, l, l, occ);
                CHECK(copies == doctest::Approx(static_cast<double>(m)));
            }
        }
}

TEST_CASE("rank is the inverse of at") {
    for (int n = 1; n <= 5; ++n)
        for (int m = 0; m <= 5; ++m) {
            const SymmetricBasis basis = qcm::enumerate_occupations(n, m);
            REQUIRE(basis.size() == qcm::symmetric_dimension(n, m));
            for (std::int64_t r = 0; r < basis.size(); ++r) {
                const OccupationVector& occ = basis.at(r);
                CHECK(occ.total() == m);
                CHECK(occ.levels() == n);
                CHECK(basis.rank(occ) == r);
                CHECK(basis.contains(occ));
            }
        }
}

TEST_CASE("occupation arithmetic") {
    const OccupationVector occ({1, 0, 3});
    CHECK(occ.total() == 4);
    CHECK(occ.count(2) == 3);
    CHECK(occ.shifted(1, 2).counts() == std::vector<int>{1, 2, 3});
    CHECK_THROWS_AS(occ.shifted(1, -1), std::invalid_argument);
    CHECK_THROWS_AS(OccupationVector({1, -2}), std::invalid_argument);
    CHECK_THROWS_AS(occ.count(3), std::out_of_range);
}

TEST_CASE("squared amplitudes over the basis resolve the identity") {
    // sum_n M!/prod(n_j!) prod_j |psi_j|^(2 n_j) = (sum_j |psi_j|^2)^M = 1
    qcm::RandomStream rng(404);
    for (int n = 2; n <= 4; ++n)
        for (int m = 1; m <= 4; ++m) {
            std::vector<double> p(static_cast<std::size_t>(n));
            double norm = 0.0;
            for (auto& x : p) {
                const double re = rng.normal(), im = rng.normal();
                x = re * re + im * im;
                norm += x;
            }
            for (auto& x : p) x /= norm;
            double total = 0.0;
            const SymmetricBasis basis = qcm::enumerate_occupations(n, m);
            for (const OccupationVector& occ : basis.vectors()) {
                double term = static_cast<double>(qcm::factorial_exact(m));
                for (int j = 0; j < n; ++j) {
                    term /= static_cast<double>(qcm::factorial_exact(occ.count(j)));
                    term *= std::pow(p[static_cast<std::size_t>(j)], occ.count(j));
                }
                total += term;
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
}

TEST_CASE("single copy transitions on two qubit copies") {
    const OccupationVector n20({2, 0}), n11({1, 1}), n02({0, 2});
    CHECK(qcm::single_copy_transition(n20, 0, 1, n11) == doctest::Approx(std::sqrt(2.0) / 2));
    CHECK(qcm::single_copy_transition(n11, 0, 0, n11) == doctest::Approx(0.5));
    CHECK(qcm::single_copy_transition(n20, 0, 0, n20) == doctest::Approx(1.0));
    CHECK(qcm::single_copy_transition(n02, 0, 0, n02) == 0.0);
    CHECK(qcm::single_copy_transition(n02, 0, 1, n11) == 0.0);
    CHECK(qcm::single_copy_transition(n11, 1, 0, n20) == doctest::Approx(std::sqrt(2.0) / 2));
}

TEST_CASE("transitions match the dense tensor construction") {
    for (int n = 2; n <= 3; ++n)
        for (int m = 1; m <= 3; ++m) {
            const SymmetricBasis basis = qcm::enumerate_occupations(n, m);
            for (const OccupationVector& bra : basis.vectors())
                for (const OccupationVector& ket : basis.vectors())
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l) {
                            const double got = qcm::single_copy_transition(bra, k, l, ket);
                            const double want = tensor_transition(bra, k, l, ket, m);
                            CHECK(got == doctest::Approx(want).epsilon(1e-12));
                        }
        }
}

TEST_CASE("transition argument validation") {
    const OccupationVector n11({1, 1});
    const OccupationVector n100({1, 0, 0});
    CHECK_THROWS_AS(qcm::single_copy_transition(n100, 0, 0, n11), std::invalid_argument);
    CHECK_THROWS_AS(qcm::single_copy_transition(n11, 2, 0, n11), std::invalid_argument);
    CHECK_THROWS_AS(qcm::single_copy_transition(n11, 0, -1, n11), std::invalid_argument);
    const OccupationVector zero2({0, 0});
    CHECK_THROWS_AS(qcm::single_copy_transition(zero2, 0, 0, zero2), std::invalid_argument);
}
