#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qcm/rational.hpp"
#include "qcm/rng.hpp"
#include "qcm/types.hpp"

namespace qcm {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kHalfPi = 1.5707963267948966192313216916398;

/// Normalized pure state of an N-level system: amplitudes xi_1..xi_N with
/// sum |xi_j|^2 = 1 within 1e-12. Levels are 0-based throughout the library.
class PureState {
public:
    explicit PureState(Vector amplitudes) : amp_(std::move(amplitudes)) {
        if (amp_.size() < 1) throw std::invalid_argument("PureState: needs N >= 1");
        if (std::abs(amp_.norm() - 1.0) > 1e-12)
            throw std::invalid_argument("PureState: amplitudes not normalized");
    }

    /// Builds a state from an arbitrary nonzero vector by normalizing it.
    static PureState normalized(const Vector& v) {
        const double n = v.norm();
        if (!(n > 0.0)) throw std::invalid_argument("PureState: zero vector");
        return PureState(Vector(v / n));
    }

    int levels() const { return static_cast<int>(amp_.size()); }
    const Vector& amplitudes() const { return amp_; }
    Complex amplitude(int j) const { return amp_(j); }

private:
    Vector amp_;
};

/// Chart coordinates on the complex sphere: N phases in [0, 2*pi) and
/// N-1 polar angles in [0, pi/2). For N=1 the angle list is empty.
class SphericalCoordinates {
public:
    SphericalCoordinates(std::vector<double> phases, std::vector<double> polars)
        : phases_(std::move(phases)), polars_(std::move(polars)) {
        if (phases_.empty())
            throw std::invalid_argument("SphericalCoordinates: needs N >= 1");
        if (polars_.size() + 1 != phases_.size())
            throw std::invalid_argument("SphericalCoordinates: need N-1 polar angles");
        for (double p : phases_)
            if (!(p >= 0.0 && p < kTwoPi))
                throw std::invalid_argument("SphericalCoordinates: phase out of [0, 2*pi)");
        for (double t : polars_)
            if (!(t >= 0.0 && t < kHalfPi))
                throw std::invalid_argument("SphericalCoordinates: polar angle out of [0, pi/2)");
    }

    int levels() const { return static_cast<int>(phases_.size()); }
    const std::vector<double>& phases() const { return phases_; }
    const std::vector<double>& polars() const { return polars_; }

private:
    std::vector<double> phases_;
    std::vector<double> polars_;
};

/// Amplitudes from chart coordinates:
///   xi_j = e^{i phi_j} * sin(theta_{N-1}) ... sin(theta_j) * cos(theta_{j-1})
/// with the cos factor absent for j=1 and the sin chain empty for j=N.
inline PureState state_from_coordinates(const SphericalCoordinates& c) {
    const int n = c.levels();
    Vector amp(n);
    // sin_tail[j] = product of sin(theta_k) for k >= j+1 (0-based slots).
    std::vector<double> sin_tail(static_cast<std::size_t>(n), 1.0);
    for (int j = n - 2; j >= 0; --j)
        sin_tail[static_cast<std::size_t>(j)] =
            sin_tail[static_cast<std::size_t>(j) + 1] * std::sin(c.polars()[static_cast<std::size_t>(j)]);
    for (int j = 0; j < n; ++j) {
        double mag = (j + 1 < n) ? sin_tail[static_cast<std::size_t>(j)] : 1.0;
        if (j > 0) mag *= std::cos(c.polars()[static_cast<std::size_t>(j) - 1]);
        const double phi = c.phases()[static_cast<std::size_t>(j)];
        amp(j) = Complex(mag * std::cos(phi), mag * std::sin(phi));
    }
    return PureState(amp);
}

/// Density of the invariant measure in chart coordinates:
///   (N-1)!/(2 pi^N) * prod_k sin^{2k-1}(theta_k) cos(theta_k),
/// which integrates to 1 over the chart. For N=1 only the phase remains
/// and the density is 1/(2 pi).
inline double coordinate_density(const SphericalCoordinates& c) {
    const int n = c.levels();
    double value = 0.5;
    for (int j = 1; j < n; ++j) value *= static_cast<double>(j);
    for (int j = 0; j < n; ++j) value /= 3.14159265358979323846264338328;
    for (int k = 1; k <= n - 1; ++k) {
        const double t = c.polars()[static_cast<std::size_t>(k) - 1];
        value *= std::pow(std::sin(t), 2 * k - 1) * std::cos(t);
    }
    return value;
}

/// State distributed by the invariant measure: 2N independent standard
/// normals form N complex amplitudes, then normalize.
inline PureState sample_state(int n_levels, RandomStream& rng) {
    if (n_levels < 1) throw std::invalid_argument("sample_state: n_levels must be >= 1");
    Vector v(n_levels);
    for (int j = 0; j < n_levels; ++j) {
        auto [re, im] = rng.normal_pair();
        v(j) = Complex(re, im);
    }
    return PureState::normalized(v);
}

/// Same distribution drawn through the chart: phases uniform, each polar
/// angle by inverse CDF of its marginal, theta_k = asin(u^(1/2k)).
/// Kept as an independent cross-check of sample_state.
inline PureState sample_state_chart(int n_levels, RandomStream& rng) {
    if (n_levels < 1) throw std::invalid_argument("sample_state_chart: n_levels must be >= 1");
    std::vector<double> phases(static_cast<std::size_t>(n_levels));
    for (double& p : phases) p = rng.uniform_angle();
    std::vector<double> polars(static_cast<std::size_t>(n_levels) - 1);
    for (int k = 1; k <= n_levels - 1; ++k)
        polars[static_cast<std::size_t>(k) - 1] =
            std::asin(std::pow(rng.uniform(), 1.0 / (2.0 * k)));
    return state_from_coordinates(SphericalCoordinates(std::move(phases), std::move(polars)));
}

/// Index pattern (j', i', i, j) of the moment integral
/// int dxi  conj(xi_{j'}) xi_{i'} conj(xi_i) xi_j.  0-based levels.
struct MomentPattern {
    int j_prime;
    int i_prime;
    int i;
    int j;
};

namespace detail {

inline void check_pattern(int n_levels, const MomentPattern& p) {
    for (int idx : {p.j_prime, p.i_prime, p.i, p.j})
        if (idx < 0 || idx >= n_levels)
            throw std::invalid_argument("moment pattern: level index out of range");
}

}  // namespace detail

/// Exact fourth moment of the invariant measure:
///   2/(N(N+1)) when all four indices coincide,
///   1/(N(N+1)) when the conjugated pair {j', i} matches the plain pair
///   {i', j} as a multiset without all four being equal,
///   0 otherwise (a free phase survives the angular integrals).
inline Rational fourth_moment_exact_rational(int n_levels, const MomentPattern& p) {
    if (n_levels < 1) throw std::invalid_argument("fourth_moment: n_levels must be >= 1");
    detail::check_pattern(n_levels, p);
    const int lo_c = std::min(p.j_prime, p.i), hi_c = std::max(p.j_prime, p.i);
    const int lo_p = std::min(p.i_prime, p.j), hi_p = std::max(p.i_prime, p.j);
    if (lo_c != lo_p || hi_c != hi_p) return Rational(0);
    const bool all_equal = (lo_c == hi_c) && (lo_p == hi_p) && (lo_c == lo_p);
    const std::int64_t n = n_levels;
    return Rational(all_equal ? 2 : 1, n * (n + 1));
}

inline double fourth_moment_exact(int n_levels, const MomentPattern& p) {
    return fourth_moment_exact_rational(n_levels, p).value();
}

/// Monte Carlo estimate with its standard error.
struct MomentEstimate {
    Complex mean;
    double standard_error;  // of the complex mean, combining both components
    std::int64_t samples;
};

namespace detail {

/// Streaming mean/scatter accumulator (Welford) over complex samples,
/// mergeable across per-worker chunks in a fixed order.
struct WelfordAccumulator {
    std::int64_t count = 0;
    Complex mean{0.0, 0.0};
    double m2 = 0.0;

    void add(Complex x) {
        ++count;
        const Complex d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += std::norm(d) * static_cast<double>(count - 1) / static_cast<double>(count);
    }

    void merge(const WelfordAccumulator& other) {
        if (other.count == 0) return;
        if (count == 0) {
            *this = other;
            return;
        }
        const std::int64_t total = count + other.count;
        const Complex d = other.mean - mean;
        mean += d * (static_cast<double>(other.count) / static_cast<double>(total));
        m2 += other.m2 + std::norm(d) * static_cast<double>(count) *
                             static_cast<double>(other.count) / static_cast<double>(total);
        count = total;
    }

    double standard_error() const {
        if (count < 2) return 0.0;
        return std::sqrt(m2 / (static_cast<double>(count - 1) * static_cast<double>(count)));
    }
};

inline std::vector<std::pair<std::int64_t, std::int64_t>> worker_ranges(std::int64_t samples,
                                                                        int workers) {
    std::vector<std::pair<std::int64_t, std::int64_t>> out;
    const std::int64_t base = samples / workers, extra = samples % workers;
    std::int64_t start = 0;
    for (int w = 0; w < workers; ++w) {
        const std::int64_t len = base + (w < extra ? 1 : 0);
        out.emplace_back(start, start + len);
        start += len;
    }
    return out;
}

}  // namespace detail

/// Sample mean of conj(xi_{j'}) xi_{i'} conj(xi_i) xi_j over invariant-measure
/// draws. Work splits into per-worker streams derived from the master seed
/// and merges in worker order, so the result depends only on
/// (seed, workers, samples).
inline MomentEstimate estimate_fourth_moment(int n_levels, const MomentPattern& p,
                                             std::int64_t samples, std::uint64_t seed,
                                             int workers = 1, bool use_chart_sampler = false) {
    if (samples < 2) throw std::invalid_argument("estimate_fourth_moment: samples must be >= 2");
    if (workers < 1) throw std::invalid_argument("estimate_fourth_moment: workers must be >= 1");
    detail::check_pattern(n_levels, p);
    detail::WelfordAccumulator total;
    const auto ranges = detail::worker_ranges(samples, workers);
    for (int w = 0; w < workers; ++w) {
        RandomStream rng(seed, static_cast<std::uint64_t>(w));
        detail::WelfordAccumulator acc;
        for (std::int64_t s = ranges[static_cast<std::size_t>(w)].first;
             s < ranges[static_cast<std::size_t>(w)].second; ++s) {
            const PureState psi =
                use_chart_sampler ? sample_state_chart(n_levels, rng) : sample_state(n_levels, rng);
            const Vector& xi = psi.amplitudes();
            acc.add(std::conj(xi(p.j_prime)) * xi(p.i_prime) * std::conj(xi(p.i)) * xi(p.j));
        }
        total.merge(acc);
    }
    return MomentEstimate{total.mean, total.standard_error(), total.count};
}

}  // namespace qcm
