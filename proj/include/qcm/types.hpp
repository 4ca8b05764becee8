#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace qcm {

inline constexpr const char* kVersion = "0.1.0";

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Default guard on dense matrix sides and isometry row counts.
inline constexpr int kDefaultDimensionCap = 4096;

/// Thrown when a requested construction would exceed the dimension cap.
class DimensionCapError : public std::runtime_error {
public:
    explicit DimensionCapError(const std::string& what) : std::runtime_error(what) {}
};

/// Effective dimension cap: an explicit positive request wins, then the
/// QCM_DIM_CAP environment variable, then the built-in default.
inline std::int64_t dimension_cap(std::int64_t requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("QCM_DIM_CAP")) {
        char* end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::int64_t>(v);
    }
    return kDefaultDimensionCap;
}

}  // namespace qcm
