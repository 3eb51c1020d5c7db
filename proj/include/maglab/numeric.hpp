#pragma once

// Small numeric helpers shared across the library: probability validation,
// log-space binomial terms, stable (1-x)^m, and compensated/pairwise sums.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace maglab {

// Probabilities are kept a margin away from {0,1} so their logarithms stay finite.
inline constexpr double kProbMargin = 1e-12;

inline void validate_probability(double p, const char* name) {
    if (!(p >= kProbMargin && p <= 1.0 - kProbMargin)) {
        throw std::invalid_argument(std::string(name) + " must lie in (0,1) with margin " +
                                    std::to_string(kProbMargin) + ", got " + std::to_string(p));
    }
}

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

// (1 - x)^m for x in [0,1), m >= 0, without underflow in the base.
inline double pow1m(double x, double m) {
    if (m == 0.0) return 1.0;
    return std::exp(m * std::log1p(-x));
}

// log C(n,k) via log-gamma.
inline double log_binom(int64_t n, int64_t k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
           std::lgamma(double(n - k) + 1.0);
}

// log P[Bin(n,p) = k]
inline double log_binom_pmf(int64_t n, int64_t k, double p) {
    return log_binom(n, k) + double(k) * std::log(p) + double(n - k) * std::log1p(-p);
}

inline double binom_pmf(int64_t n, int64_t k, double p) {
    return std::exp(log_binom_pmf(n, k, p));
}

// Pairwise summation; error grows like O(log n) rather than O(n).
inline double pairwise_sum(std::span<const double> v) {
    const std::size_t m = v.size();
    if (m <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = m / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum(std::span<const double>(v.data(), v.size()));
}

// Neumaier-compensated accumulator, for long enumerations.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + carry; }
};

}  // namespace maglab
