#pragma once

// Large-n machinery: the Bernoulli rate function G, the critical tilt solving
// 1 + rho ln G = 0, zero-one-law regime classification, rho-admissible
// scalings L_n ~ rho ln n, and finite-n evaluators for the quantities whose
// limits drive the two laws.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "maglab/model.hpp"
#include "maglab/numeric.hpp"

namespace maglab {

// ln G(nu, mu) = -KL(Bernoulli(nu) || Bernoulli(mu)); <= 0, zero iff nu == mu.
// Endpoints use the 0 ln 0 = 0 convention: ln G(0,mu) = ln(1-mu), ln G(1,mu) = ln mu.
inline double log_rate_function(double nu, double mu) {
    validate_probability(mu, "mu");
    if (!(nu >= 0.0 && nu <= 1.0)) {
        throw std::invalid_argument("nu must lie in [0,1], got " + std::to_string(nu));
    }
    if (nu == 0.0) return std::log1p(-mu);
    if (nu == 1.0) return std::log(mu);
    return -nu * std::log(nu / mu) - (1.0 - nu) * std::log((1.0 - nu) / (1.0 - mu));
}

// G(nu, mu) = (mu/nu)^nu ((1-mu)/(1-nu))^(1-nu), extended by continuity to [0,1].
inline double rate_function(double nu, double mu) { return std::exp(log_rate_function(nu, mu)); }

// Unique root in (0, mu1) of 1 + rho ln G(nu, mu1) = 0. Exists iff
// 1 + rho ln(1-mu1) < 0; ln G increases strictly on (0, mu1), so bisection is
// safe (and is preferred over Newton: the derivative of ln G blows up at 0).
inline double critical_tilt(double rho, double mu1) {
    if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
    validate_probability(mu1, "mu1");
    const double at_zero = 1.0 + rho * std::log1p(-mu1);
    if (!(at_zero < 0.0)) {
        throw std::invalid_argument(
            "no root below mu1: requires 1 + rho*ln(1-mu1) < 0, got " + std::to_string(at_zero) +
            " (rho=" + std::to_string(rho) + ", mu1=" + std::to_string(mu1) + ")");
    }
    double lo = 0.0;        // f(lo) < 0
    double hi = mu1;        // f(mu1) = 1 > 0
    double mid = 0.5 * mu1;
    for (int iter = 0; iter < 200; ++iter) {
        mid = 0.5 * (lo + hi);
        const double f = 1.0 + rho * log_rate_function(mid, mu1);
        if (std::abs(f) <= 1e-12 || (hi - lo) <= 1e-15) break;
        (f < 0.0 ? lo : hi) = mid;
    }
    return mid;
}

// A rho-admissible scaling n -> L_n realized as nearest-integer(rho ln n),
// floored at one attribute. rho_n = L_n / ln n then converges to rho.
class ScalingSpec {
  public:
    explicit ScalingSpec(double rho) : rho_(rho) {
        if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
    }

    double rho() const { return rho_; }

    int64_t level_count(int64_t n) const {
        if (n < 1) throw std::invalid_argument("n must be >= 1");
        return std::max<int64_t>(1, llround(rho_ * std::log(double(n))));
    }

    double rho_n(int64_t n) const {
        if (n < 2) throw std::invalid_argument("rho_n is defined for n >= 2");
        return double(level_count(n)) / std::log(double(n));
    }

    // floor(nu * L_n): an integer level sequence tracking the fraction nu.
    int64_t associated_level(int64_t n, double nu) const {
        return int64_t(std::floor(nu * double(level_count(n))));
    }

  private:
    double rho_;
};

enum class RegimeCase { CaseOne, CaseTwo, Boundary };
enum class PredictedLimit { Zero, One, Boundary };

inline const char* to_string(RegimeCase c) {
    switch (c) {
        case RegimeCase::CaseOne: return "CaseOne";
        case RegimeCase::CaseTwo: return "CaseTwo";
        default: return "Boundary";
    }
}
inline const char* to_string(PredictedLimit p) {
    switch (p) {
        case PredictedLimit::Zero: return "Zero";
        case PredictedLimit::One: return "One";
        default: return "Boundary";
    }
}

// Which zero-one law applies and the sign of its threshold expression.
struct RegimeReport {
    RegimeCase regime_case;
    double discriminant;             // 1 + rho ln mu(0)
    double threshold;                // case-dependent threshold expression
    PredictedLimit predicted;        // limit of P[no isolated nodes]
    std::optional<double> nu_star;   // present iff regime_case == CaseTwo
};

// Classification tolerance: the laws exclude exact boundaries, so values
// within 1e-12 of zero are reported as Boundary rather than silently signed.
inline constexpr double kBoundaryTol = 1e-12;

inline RegimeReport classify_regime(double rho, const MagParams& params) {
    if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
    const double mu0 = params.pmf().mu0();
    const double discriminant = 1.0 + rho * std::log(mu0);

    RegimeReport report{};
    report.discriminant = discriminant;

    if (std::abs(discriminant) <= kBoundaryTol) {
        report.regime_case = RegimeCase::Boundary;
        report.threshold = 0.0;
        report.predicted = PredictedLimit::Boundary;
        return report;
    }

    const double lg1 = std::log(params.gamma1());
    const double lg0 = std::log(params.gamma0());
    if (discriminant > 0.0) {
        report.regime_case = RegimeCase::CaseOne;
        report.threshold = 1.0 + rho * lg0;
    } else {
        report.regime_case = RegimeCase::CaseTwo;
        const double ns = critical_tilt(rho, params.pmf().mu1());
        report.nu_star = ns;
        report.threshold = 1.0 + rho * (ns * lg1 + (1.0 - ns) * lg0);
    }
    report.predicted = std::abs(report.threshold) <= kBoundaryTol ? PredictedLimit::Boundary
                       : report.threshold < 0.0                   ? PredictedLimit::Zero
                                                                  : PredictedLimit::One;
    return report;
}

// (1 - (Gamma1^nu Gamma0^(1-nu))^{L_n})^(n-1): the per-node non-adjacency
// factor along a level fraction nu; tends to 0 or 1 with the sign of
// 1 + rho ln(Gamma1^nu Gamma0^(1-nu)).
inline double isolation_factor(double nu, int64_t n, const ScalingSpec& scaling,
                               const MagParams& params) {
    if (!(nu >= 0.0 && nu <= 1.0)) throw std::invalid_argument("nu must lie in [0,1]");
    if (n < 2) throw std::invalid_argument("n must be >= 2");
    const int64_t L = scaling.level_count(n);
    const double lx =
        double(L) * (nu * std::log(params.gamma1()) + (1.0 - nu) * std::log(params.gamma0()));
    return pow1m(std::exp(lx), double(n - 1));
}

// n * c^{L_n} = n^(1 + rho_n ln c): diverges or vanishes with the sign of
// 1 + rho ln c.
inline double scaled_power(double c, int64_t n, const ScalingSpec& scaling) {
    if (!(c > 0.0)) throw std::invalid_argument("base must be positive");
    if (n < 2) throw std::invalid_argument("n must be >= 2");
    const int64_t L = scaling.level_count(n);
    return std::exp(std::log(double(n)) + double(L) * std::log(c));
}

// n * C(L, round(nu L)) mu1^l mu0^(L-l), exactly via log-gamma.
inline double level_weight_exact_term(double n_value, int64_t L, double nu,
                                      const AttributePmf& pmf) {
    const int64_t l = llround(nu * double(L));
    if (l < 1 || l > L - 1) {
        throw std::invalid_argument("rounded level " + std::to_string(l) +
                                    " degenerate for L = " + std::to_string(L));
    }
    return n_value * binom_pmf(L, l, pmf.mu1());
}

// The Stirling form of the same quantity: n G(nu, mu1)^L / sqrt(2 pi nu(1-nu) L).
inline double level_weight_asymptote_term(double n_value, int64_t L, double nu,
                                          const AttributePmf& pmf) {
    if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("nu must lie in (0,1)");
    return n_value * std::exp(double(L) * log_rate_function(nu, pmf.mu1())) /
           std::sqrt(2.0 * M_PI * nu * (1.0 - nu) * double(L));
}

inline double level_weight_exact(int64_t n, const ScalingSpec& scaling, double nu,
                                 const AttributePmf& pmf) {
    return level_weight_exact_term(double(n), scaling.level_count(n), nu, pmf);
}

inline double level_weight_asymptote(int64_t n, const ScalingSpec& scaling, double nu,
                                     const AttributePmf& pmf) {
    return level_weight_asymptote_term(double(n), scaling.level_count(n), nu, pmf);
}

}  // namespace maglab
