#pragma once

// Exact moments of the isolated-node counts: closed-form first moments per
// attribute level, the exact second moment via a sum over joint attribute
// patterns, first/second-moment-method brackets on P[no isolated nodes], and
// the exponentially tilted re-expression of the first moment.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "maglab/asymptotics.hpp"
#include "maglab/model.hpp"
#include "maglab/numeric.hpp"

namespace maglab {

// E[# isolated nodes with exactly `level` ones]:
//   n (1 - Gamma1^level Gamma0^(L-level))^(n-1) P[S_L = level],
// assembled fully in log space.
inline double expected_isolated_at_level(const MagParams& params, int level) {
    const int L = params.l();
    if (level < 0 || level > L) {
        throw std::invalid_argument("level " + std::to_string(level) + " out of range [0, " +
                                    std::to_string(L) + "]");
    }
    const double x = mean_pair_affinity(level, L, params.q(), params.pmf());
    const double lt = std::log(double(params.n())) + log_binom_pmf(L, level, params.pmf().mu1()) +
                      double(params.n() - 1) * std::log1p(-x);
    return std::exp(lt);
}

inline std::vector<double> expected_isolated_by_level(const MagParams& params) {
    std::vector<double> levels(std::size_t(params.l()) + 1);
    for (int l = 0; l <= params.l(); ++l) {
        levels[std::size_t(l)] = expected_isolated_at_level(params, l);
    }
    return levels;
}

// E[# isolated nodes], as the pairwise-summed level decomposition.
inline double expected_isolated(const MagParams& params) {
    return pairwise_sum(expected_isolated_by_level(params));
}

// P[two given nodes are both isolated | their attribute vectors]:
//   (1 - Q(a,b)) (1 - union_affinity(a,b))^(n-2).
inline double joint_isolation_conditional(const AttributeVector& a, const AttributeVector& b,
                                          const MagParams& params) {
    const double q = pair_affinity(a, b, params.q());
    const double u = union_affinity(a, b, params.q(), params.pmf());
    return (1.0 - q) * pow1m(u, double(params.n() - 2));
}

namespace detail {

// Exact E[xi(1) xi(2)] by summing the conditional pair probability over the
// joint law of two independent attribute vectors. The minimal sufficient
// statistic is (j11, s_a, s_b): the kernel product and the product mean
// depend on the agreement pattern alone, but the union term needs both
// individual ones-counts, so an O(L^2) sum over patterns is not enough and
// the sum runs over O(L^3) triples. Kept exact; sizes beyond the cap would
// take minutes and are rejected.
inline constexpr int kSecondMomentMaxLevels = 1024;

inline double expected_pair_isolation(const MagParams& params) {
    const int L = params.l();
    if (L > kSecondMomentMaxLevels) {
        throw std::invalid_argument("exact second moment limited to L <= " +
                                    std::to_string(kSecondMomentMaxLevels) + ", got " +
                                    std::to_string(L));
    }
    const double lmu1 = std::log(params.pmf().mu1());
    const double lmu0 = std::log1p(-params.pmf().mu1());
    const double lq11 = std::log(params.q().q11());
    const double lq10 = std::log(params.q().q10());
    const double lq00 = std::log(params.q().q00());
    const KernelSecondMoments m = affinity_second_moments(params.q(), params.pmf());
    const double lm11 = std::log(m.m11), lm10 = std::log(m.m10), lm00 = std::log(m.m00);
    const double exponent = double(params.n() - 2);

    std::vector<double> lnfact(std::size_t(L) + 1);
    for (int k = 0; k <= L; ++k) lnfact[std::size_t(k)] = std::lgamma(double(k) + 1.0);
    std::vector<double> qs(std::size_t(L) + 1);
    for (int s = 0; s <= L; ++s) {
        qs[std::size_t(s)] = mean_pair_affinity(s, L, params.q(), params.pmf());
    }

    KahanSum acc;
    for (int sa = 0; sa <= L; ++sa) {
        for (int sb = sa; sb <= L; ++sb) {
            const double mult = (sa == sb) ? 1.0 : 2.0;  // (sa,sb) and (sb,sa) terms agree
            const int j11_lo = std::max(0, sa + sb - L);
            const int j11_hi = std::min(sa, sb);
            for (int j11 = j11_lo; j11 <= j11_hi; ++j11) {
                const int j10a = sa - j11;
                const int j10b = sb - j11;
                const int j00 = L - sa - sb + j11;
                const int j10 = j10a + j10b;
                const double lw = lnfact[std::size_t(L)] - lnfact[std::size_t(j11)] -
                                  lnfact[std::size_t(j10a)] - lnfact[std::size_t(j10b)] -
                                  lnfact[std::size_t(j00)] + double(sa + sb) * lmu1 +
                                  double(2 * L - sa - sb) * lmu0;
                const double kernel =
                    std::exp(double(j11) * lq11 + double(j10) * lq10 + double(j00) * lq00);
                const double product_mean =
                    std::exp(double(j11) * lm11 + double(j10) * lm10 + double(j00) * lm00);
                const double either = qs[std::size_t(sa)] + qs[std::size_t(sb)] - product_mean;
                acc.add(mult * std::exp(lw) * (1.0 - kernel) * pow1m(either, exponent));
            }
        }
    }
    return acc.value();
}

}  // namespace detail

// E[I^2] = n E[xi(1)] + n(n-1) E[xi(1) xi(2)], both factors exact.
inline double expected_isolated_squared(const MagParams& params) {
    const double n = double(params.n());
    const double e1 = expected_isolated(params) / n;
    const double e12 = detail::expected_pair_isolation(params);
    return n * e1 + n * (n - 1.0) * e12;
}

// Upper bound on the cross moment E[xi^(k)(1) xi^(l)(2)]: the product of the
// two level probabilities P[S_L = k] P[S_L = l].
inline double level_cross_moment_bound(const MagParams& params, int k, int l) {
    const int L = params.l();
    if (k < 0 || k > L || l < 0 || l > L) {
        throw std::invalid_argument("levels (" + std::to_string(k) + ", " + std::to_string(l) +
                                    ") out of range [0, " + std::to_string(L) + "]");
    }
    return binom_pmf(L, k, params.pmf().mu1()) * binom_pmf(L, l, params.pmf().mu1());
}

// 1 - E[Z] <= P[Z = 0] <= 1 - E[Z]^2 / E[Z^2] for an integer count Z,
// clamped to [0,1]. E[Z] = 0 collapses both bounds to 1.
inline std::pair<double, double> moment_method_bounds(double e1, double e2) {
    if (e1 < 0.0 || e2 < 0.0) throw std::invalid_argument("moments must be nonnegative");
    if (e1 == 0.0) return {1.0, 1.0};
    if (e2 < e1 * e1 * (1.0 - 1e-9)) {
        throw std::invalid_argument("inconsistent moments: E[Z^2] = " + std::to_string(e2) +
                                    " below E[Z]^2 = " + std::to_string(e1 * e1));
    }
    return {clamp01(1.0 - e1), clamp01(1.0 - (e1 * e1) / e2)};
}

// Exact moment summary with the induced bracket on P[no isolated nodes].
struct MomentReport {
    double e_isolated;                  // E[I]
    std::vector<double> e_by_level;     // E[I^(l)], l = 0..L
    double e_isolated_sq;               // E[I^2]
    double p_zero_lower;
    double p_zero_upper;
};

inline MomentReport moment_report(const MagParams& params) {
    MomentReport r;
    r.e_by_level = expected_isolated_by_level(params);
    r.e_isolated = pairwise_sum(r.e_by_level);
    r.e_isolated_sq = expected_isolated_squared(params);
    const auto [lo, hi] = moment_method_bounds(r.e_isolated, r.e_isolated_sq);
    r.p_zero_lower = lo;
    r.p_zero_upper = hi;
    return r;
}

// E[I] re-expressed under a tilted attribute law Bernoulli(nu):
//   E[I] = n G(nu, mu1)^L E_n(nu, L),
// where E_n averages the non-adjacency power times the likelihood-ratio
// correction r^(S - L nu) under the tilted binomial. The decomposition splits
// the tilted mean at its center S = L nu.
struct TiltReport {
    double nu;
    double rate_pow_l;           // G(nu, mu1)^L
    double tilted_mean;          // E_n(nu, L), summed over all levels
    double tilted_mean_upper;    // levels with s > L nu
    double tilted_mean_lower;    // levels with s <= L nu
    double reconstructed_e_isolated;  // n G^L E_n; equals expected_isolated exactly
};

namespace detail {

// Core evaluation with explicit kernel means, so consistency checks can
// inject perturbed values (a mismatch must break the reconstruction).
inline TiltReport tilted_first_moment_with_means(const MagParams& params, double nu, double g1,
                                                 double g0) {
    if (!(nu >= kProbMargin && nu <= 1.0 - kProbMargin)) {
        throw std::invalid_argument("nu must lie in (0,1), got " + std::to_string(nu));
    }
    const int L = params.l();
    const double mu1 = params.pmf().mu1();
    // log of r = (mu1/nu) ((1-nu)/(1-mu1))
    const double log_ratio = std::log(mu1) - std::log(nu) + std::log1p(-nu) - std::log1p(-mu1);
    const double center = double(L) * nu;
    const double lg1 = std::log(g1);
    const double lg0 = std::log(g0);

    std::vector<double> all, upper, lower;
    all.reserve(std::size_t(L) + 1);
    for (int s = 0; s <= L; ++s) {
        const double x = std::exp(double(s) * lg1 + double(L - s) * lg0);
        const double lt = log_binom_pmf(L, s, nu) + double(params.n() - 1) * std::log1p(-x) +
                          (double(s) - center) * log_ratio;
        const double t = std::exp(lt);
        all.push_back(t);
        (double(s) > center ? upper : lower).push_back(t);
    }

    TiltReport r;
    r.nu = nu;
    r.rate_pow_l = std::exp(double(L) * log_rate_function(nu, mu1));
    r.tilted_mean = pairwise_sum(all);
    r.tilted_mean_upper = pairwise_sum(upper);
    r.tilted_mean_lower = pairwise_sum(lower);
    r.reconstructed_e_isolated = double(params.n()) * r.rate_pow_l * r.tilted_mean;
    return r;
}

}  // namespace detail

inline TiltReport tilted_first_moment(const MagParams& params, double nu) {
    return detail::tilted_first_moment_with_means(params, nu, params.gamma1(), params.gamma0());
}

}  // namespace maglab
