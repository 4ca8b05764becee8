#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace qcm {

/// Exact rational arithmetic on 64-bit integers. Overflow is a reported
/// error (std::overflow_error), never silent wraparound. Values stay small
/// here: the fidelity formulas involve factorial ratios that are reduced
/// at every step.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT: implicit by design
    Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
        if (den_ == 0) throw std::invalid_argument("Rational: zero denominator");
        reduce();
    }

    std::int64_t numerator() const { return num_; }
    std::int64_t denominator() const { return den_; }

    double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    /// "p/q" form; integers render without the "/1".
    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        const std::int64_t g = std::gcd(a.den_, b.den_);
        const std::int64_t bd = b.den_ / g;
        // a.num*(b.den/g) + b.num*(a.den/g), over a.den*(b.den/g)
        const std::int64_t lhs = checked_mul(a.num_, bd);
        const std::int64_t rhs = checked_mul(b.num_, a.den_ / g);
        return Rational(checked_add(lhs, rhs), checked_mul(a.den_, bd));
    }

    friend Rational operator-(const Rational& a, const Rational& b) {
        return a + Rational(-b.num_, b.den_);
    }

    friend Rational operator*(const Rational& a, const Rational& b) {
        const std::int64_t g1 = std::gcd(std::abs(a.num_), b.den_);
        const std::int64_t g2 = std::gcd(std::abs(b.num_), a.den_);
        return Rational(checked_mul(a.num_ / g1, b.num_ / g2),
                        checked_mul(a.den_ / g2, b.den_ / g1));
    }

    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::invalid_argument("Rational: division by zero");
        return a * Rational(b.den_, b.num_);
    }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        // a.num/a.den < b.num/b.den with positive denominators
        return checked_mul(a.num_, b.den_) < checked_mul(b.num_, a.den_);
    }
    friend bool operator<=(const Rational& a, const Rational& b) { return a < b || a == b; }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator>=(const Rational& a, const Rational& b) { return b <= a; }

private:
    static std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
        std::int64_t out = 0;
        if (__builtin_mul_overflow(a, b, &out))
            throw std::overflow_error("Rational: 64-bit overflow in multiplication");
        return out;
    }
    static std::int64_t checked_add(std::int64_t a, std::int64_t b) {
        std::int64_t out = 0;
        if (__builtin_add_overflow(a, b, &out))
            throw std::overflow_error("Rational: 64-bit overflow in addition");
        return out;
    }

    void reduce() {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        const std::int64_t g = std::gcd(std::abs(num_), den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
        if (num_ == 0) den_ = 1;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// n! as an exact 64-bit integer; throws std::overflow_error for n > 20.
inline std::int64_t factorial_exact(int n) {
    if (n < 0) throw std::invalid_argument("factorial_exact: negative argument");
    std::int64_t out = 1;
    for (int k = 2; k <= n; ++k) {
        if (__builtin_mul_overflow(out, static_cast<std::int64_t>(k), &out))
            throw std::overflow_error("factorial_exact: 64-bit overflow");
    }
    return out;
}

/// Falling factorial n!/(n-k)! with overflow detection.
inline std::int64_t falling_factorial_exact(int n, int k) {
    if (k < 0 || k > n) throw std::invalid_argument("falling_factorial_exact: bad arguments");
    std::int64_t out = 1;
    for (int j = 0; j < k; ++j) {
        if (__builtin_mul_overflow(out, static_cast<std::int64_t>(n - j), &out))
            throw std::overflow_error("falling_factorial_exact: 64-bit overflow");
    }
    return out;
}

/// Checked integer power; throws on overflow.
inline std::int64_t ipow_exact(std::int64_t base, int exp) {
    if (exp < 0) throw std::invalid_argument("ipow_exact: negative exponent");
    std::int64_t out = 1;
    for (int k = 0; k < exp; ++k) {
        if (__builtin_mul_overflow(out, base, &out))
            throw std::overflow_error("ipow_exact: 64-bit overflow");
    }
    return out;
}

}  // namespace qcm
