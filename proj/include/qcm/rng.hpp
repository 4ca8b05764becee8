#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>

namespace qcm {

/// Derives independent per-worker seeds from a master seed. splitmix64 is
/// the usual choice for seed scrambling and keeps worker streams decorrelated
/// even for adjacent worker ids.
inline std::uint64_t derive_stream_seed(std::uint64_t master_seed, std::uint64_t worker) {
    std::uint64_t z = master_seed + (worker + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic random stream. The uniform and Gaussian transforms are
/// spelled out here rather than taken from <random>'s distributions because
/// distribution implementations may differ between standard libraries; with
/// the transforms fixed, a (seed, workers) pair yields bit-identical output
/// everywhere mt19937_64 does.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    RandomStream(std::uint64_t master_seed, std::uint64_t worker)
        : engine_(derive_stream_seed(master_seed, worker)) {}

    /// Uniform on [0, 1): top 53 bits of the engine output.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [0, 2*pi).
    double uniform_angle() { return uniform() * 6.283185307179586476925286766559; }

    /// Standard normal pair via the polar (Marsaglia) method.
    std::pair<double, double> normal_pair() {
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double r = std::sqrt(-2.0 * std::log(s) / s);
        return {u * r, v * r};
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        auto [a, b] = normal_pair();
        spare_ = b;
        have_spare_ = true;
        return a;
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace qcm
