#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/QR>

#include "qcm/rng.hpp"
#include "qcm/types.hpp"

namespace qcm {

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matmul: inner dimensions disagree");
    return a * b;
}

inline Matrix adjoint(const Matrix& a) { return a.adjoint(); }

struct EigenDecomposition {
    RealVector values;  // descending
    Matrix vectors;     // column k pairs with values[k]
};

namespace detail {

inline double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

}  // namespace detail

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Each pivot applies the unitary that zeroes one off-diagonal pair; sweeps
/// run in fixed (p, q) order, so results are bit-for-bit reproducible for a
/// given input. Converges when the off-diagonal Frobenius norm drops below
/// tol times the matrix norm; throws after 100 sweeps if it does not.
///
/// Eigenvalues come back sorted descending, with eigenvector columns
/// permuted to match.
inline EigenDecomposition hermitian_eigen(const Matrix& input, double tol = 1e-13) {
    const Eigen::Index n = input.rows();
    if (input.cols() != n)
        throw std::invalid_argument("hermitian_eigen: matrix must be square");
    if (!(tol > 0.0))
        throw std::invalid_argument("hermitian_eigen: tol must be positive");
    const double fro = input.norm();
    const double herm_tol = 10.0 * tol * (1.0 + fro);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i <= j; ++i)
            if (std::abs(input(i, j) - std::conj(input(j, i))) > herm_tol)
                throw std::invalid_argument("hermitian_eigen: matrix is not Hermitian");

    Matrix a = (input + input.adjoint()) / 2.0;
    Matrix v = Matrix::Identity(n, n);
    const double stop = tol * (fro > 0.0 ? fro : 1.0);

    int sweeps = 0;
    while (detail::off_diagonal_norm(a) > stop) {
        if (++sweeps > 100)
            throw std::runtime_error("hermitian_eigen: no convergence after 100 sweeps");
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = std::abs(a(p, q));
                if (apq == 0.0) continue;
                const Complex u = a(p, q) / apq;
                const double tau = (a(q, q).real() - a(p, p).real()) / (2.0 * apq);
                const double sgn = (tau >= 0.0) ? 1.0 : -1.0;
                const double t = sgn / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // A <- J^H A J with J the identity apart from
                // [[c, s*u], [-s*conj(u), c]] in rows/cols (p, q).
                for (Eigen::Index i = 0; i < n; ++i) {
                    const Complex aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * std::conj(u) * aiq;
                    a(i, q) = s * u * aip + c * aiq;
                }
                for (Eigen::Index i = 0; i < n; ++i) {
                    const Complex api = a(p, i), aqi = a(q, i);
                    a(p, i) = c * api - s * u * aqi;
                    a(q, i) = s * std::conj(u) * api + c * aqi;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = Complex(a(p, p).real(), 0.0);
                a(q, q) = Complex(a(q, q).real(), 0.0);

                for (Eigen::Index i = 0; i < n; ++i) {
                    const Complex vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * std::conj(u) * viq;
                    v(i, q) = s * u * vip + c * viq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&a](Eigen::Index x, Eigen::Index y) {
        return a(x, x).real() > a(y, y).real();
    });

    EigenDecomposition out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values[k] = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]).real();
        out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
    }
    return out;
}

/// Isometry (rows x cols, rows >= cols) drawn from the unitarily invariant
/// distribution: complex Gaussian matrix, thin QR, columns rephased by the
/// sign of the corresponding R diagonal so the result does not depend on
/// QR sign conventions.
inline Matrix haar_isometry(int rows, int cols, RandomStream& rng) {
    if (cols < 1 || rows < cols)
        throw std::invalid_argument("haar_isometry: need rows >= cols >= 1");
    Matrix g(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) {
            auto [re, im] = rng.normal_pair();
            g(i, j) = Complex(re, im);
        }
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
    Matrix r = qr.matrixQR().topRows(cols).template triangularView<Eigen::Upper>();
    for (int k = 0; k < cols; ++k) {
        const double mag = std::abs(r(k, k));
        const Complex phase = (mag > 0.0) ? r(k, k) / mag : Complex(1.0, 0.0);
        q.col(k) *= phase;
    }
    return q;
}

}  // namespace qcm
