#pragma once

// Verification battery and the Monte Carlo sweep harness: an exhaustive
// oracle for tiny instances, exact-identity checks, and the phase-transition
// table generator with CSV/JSON emitters.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "maglab/asymptotics.hpp"
#include "maglab/jsonout.hpp"
#include "maglab/model.hpp"
#include "maglab/moments.hpp"
#include "maglab/numeric.hpp"
#include "maglab/sampler.hpp"

namespace maglab {

// Exhaustive integration over every attribute matrix and edge subset.
// Probabilities are built from plain per-coordinate products, deliberately
// not sharing the library's log-space evaluation path.
struct OracleResult {
    double p_zero;
    double e_isolated;
    double e_isolated_sq;
    std::vector<double> per_level;
};

inline constexpr int64_t kOracleMaxNodes = 5;
inline constexpr int kOracleMaxLevels = 3;

inline OracleResult brute_force(const MagParams& params) {
    const int64_t n = params.n();
    const int L = params.l();
    if (n > kOracleMaxNodes || L > kOracleMaxLevels) {
        throw std::invalid_argument("exhaustive oracle limited to n <= " +
                                    std::to_string(kOracleMaxNodes) + ", L <= " +
                                    std::to_string(kOracleMaxLevels));
    }

    const int attr_bits = int(n) * L;
    const int pair_count = int(n * (n - 1) / 2);
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(std::size_t(pair_count));
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
    }

    KahanSum p_zero, e1, e2;
    std::vector<KahanSum> levels(std::size_t(L) + 1, KahanSum{});

    std::vector<int> bits(std::size_t(attr_bits), 0);
    std::vector<int> ones(std::size_t(n), 0);
    std::vector<double> edge_prob(std::size_t(pair_count), 0.0);
    std::vector<int> degree(std::size_t(n), 0);

    for (uint64_t a = 0; a < (uint64_t(1) << attr_bits); ++a) {
        double attr_w = 1.0;
        for (int i = 0; i < attr_bits; ++i) {
            bits[std::size_t(i)] = int((a >> i) & 1u);
            attr_w *= params.pmf().prob(bits[std::size_t(i)]);
        }
        for (int u = 0; u < n; ++u) {
            int s = 0;
            for (int c = 0; c < L; ++c) s += bits[std::size_t(u * L + c)];
            ones[std::size_t(u)] = s;
        }
        for (int e = 0; e < pair_count; ++e) {
            const auto [u, v] = pairs[std::size_t(e)];
            double p = 1.0;
            for (int c = 0; c < L; ++c) {
                p *= params.q().q(bits[std::size_t(u * L + c)], bits[std::size_t(v * L + c)]);
            }
            edge_prob[std::size_t(e)] = p;
        }

        for (uint64_t m = 0; m < (uint64_t(1) << pair_count); ++m) {
            double w = attr_w;
            std::fill(degree.begin(), degree.end(), 0);
            for (int e = 0; e < pair_count; ++e) {
                if ((m >> e) & 1u) {
                    w *= edge_prob[std::size_t(e)];
                    ++degree[std::size_t(pairs[std::size_t(e)].first)];
                    ++degree[std::size_t(pairs[std::size_t(e)].second)];
                } else {
                    w *= 1.0 - edge_prob[std::size_t(e)];
                }
            }
            int isolated = 0;
            for (int u = 0; u < n; ++u) {
                if (degree[std::size_t(u)] == 0) {
                    ++isolated;
                    levels[std::size_t(ones[std::size_t(u)])].add(w);
                }
            }
            if (isolated == 0) p_zero.add(w);
            e1.add(w * isolated);
            e2.add(w * isolated * isolated);
        }
    }

    OracleResult r;
    r.p_zero = p_zero.value();
    r.e_isolated = e1.value();
    r.e_isolated_sq = e2.value();
    r.per_level.reserve(levels.size());
    for (const auto& k : levels) r.per_level.push_back(k.value());
    return r;
}

// Exact-identity battery. Failures are reported, not thrown.
struct IdentityCheck {
    std::string name;
    double residual;
    double tolerance;
    bool pass;
};

struct IdentityReport {
    std::vector<IdentityCheck> checks;
    bool all_pass = true;

    void add(std::string name, double residual, double tolerance) {
        const bool ok = residual <= tolerance;
        checks.push_back({std::move(name), residual, tolerance, ok});
        all_pass = all_pass && ok;
    }
};

struct VerifyOptions {
    // Fault-injection hook: scales the kernel means used in the tilted
    // reconstruction. Anything but 1.0 must break the reconstruction check.
    double gamma_scale = 1.0;
};

inline double relative_gap(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline IdentityReport verify_identities(const MagParams& params, const std::vector<double>& nus,
                                        const VerifyOptions& opts = {}) {
    IdentityReport report;

    const MomentReport m = moment_report(params);
    report.add("level-sum", relative_gap(pairwise_sum(m.e_by_level), m.e_isolated), 1e-10);

    for (double nu : nus) {
        const TiltReport t =
            opts.gamma_scale == 1.0
                ? tilted_first_moment(params, nu)
                : detail::tilted_first_moment_with_means(params, nu,
                                                         params.gamma1() * opts.gamma_scale,
                                                         params.gamma0() * opts.gamma_scale);
        const std::string tag = " (nu=" + format_double17(nu) + ")";
        report.add("tilted-reconstruction" + tag,
                   relative_gap(t.reconstructed_e_isolated, m.e_isolated), 1e-10);
        report.add("tilted-partition" + tag,
                   relative_gap(t.tilted_mean, t.tilted_mean_upper + t.tilted_mean_lower), 1e-12);
    }

    report.add("bound-ordering", std::max(0.0, m.p_zero_lower - m.p_zero_upper), 0.0);
    return report;
}

// Small-instance grid where every closed form is checked against the
// exhaustive oracle and the bracket must contain the exact probability.
struct OracleGridResult {
    int64_t n;
    int level_count;
    double mu1;
    double q11, q10, q00;
    double max_rel_err;   // worst gap among E[I], E[I^2], per-level means
    bool bracket_ok;      // exact P[I=0] inside the moment bracket
    bool pass;
};

inline std::vector<OracleGridResult> run_oracle_grid(double tolerance = 1e-10) {
    static constexpr double kMu[] = {0.3, 0.5};
    static constexpr double kQ[][3] = {{0.8, 0.5, 0.2}, {0.6, 0.4, 0.3}};

    std::vector<OracleGridResult> results;
    for (int64_t n = 2; n <= 4; ++n) {
        for (int L = 1; L <= 2; ++L) {
            for (double mu1 : kMu) {
                for (const auto& qv : kQ) {
                    const MagParams params(n, L, AttributePmf(mu1),
                                           AffinityMatrix(qv[0], qv[1], qv[2]));
                    const OracleResult oracle = brute_force(params);
                    const MomentReport m = moment_report(params);

                    double worst = relative_gap(m.e_isolated, oracle.e_isolated);
                    worst = std::max(worst, relative_gap(m.e_isolated_sq, oracle.e_isolated_sq));
                    for (int l = 0; l <= L; ++l) {
                        worst = std::max(worst, relative_gap(m.e_by_level[std::size_t(l)],
                                                             oracle.per_level[std::size_t(l)]));
                    }
                    const bool bracket = m.p_zero_lower - 1e-12 <= oracle.p_zero &&
                                         oracle.p_zero <= m.p_zero_upper + 1e-12;
                    results.push_back({n, L, mu1, qv[0], qv[1], qv[2], worst, bracket,
                                       worst <= tolerance && bracket});
                }
            }
        }
    }
    return results;
}

// One (rho, n) cell of the phase-transition table.
struct SweepRow {
    int64_t n;
    int64_t level_count;
    double rho;
    double rho_n;
    double p_hat;
    double std_err;
    double e_isolated;
    double e_isolated_sq;
    double p_lower;
    double p_upper;
    RegimeReport regime;
};

struct SweepConfig {
    AttributePmf pmf;
    AffinityMatrix q;
    std::vector<double> rho_list;
    std::vector<int64_t> n_list;      // ascending
    int64_t replications = 2000;
    uint64_t seed = 7;
    CensusMode mode = CensusMode::CensusOnly;
    int threads = 0;
    int64_t max_rows = 10000;         // resource caps; max_seconds 0 = unlimited
    double max_seconds = 0.0;
};

// Rows in config order: rho outer, n inner. Each row gets its own seed
// derived from (seed, row index); identical config + seed reproduce the
// table byte for byte.
inline std::vector<SweepRow> run_sweep(const SweepConfig& config) {
    if (config.replications < 1) throw std::invalid_argument("replications must be >= 1");
    for (std::size_t i = 1; i < config.n_list.size(); ++i) {
        if (config.n_list[i] <= config.n_list[i - 1]) {
            throw std::invalid_argument("n_list must be strictly ascending");
        }
    }
    const int64_t rows = int64_t(config.rho_list.size()) * int64_t(config.n_list.size());
    if (rows > config.max_rows) {
        throw std::runtime_error("sweep would emit " + std::to_string(rows) +
                                 " rows, above the cap of " + std::to_string(config.max_rows));
    }

    const auto started = std::chrono::steady_clock::now();
    std::vector<SweepRow> table;
    table.reserve(std::size_t(rows));
    uint64_t row_index = 0;
    for (double rho : config.rho_list) {
        const ScalingSpec scaling(rho);
        for (int64_t n : config.n_list) {
            if (config.max_seconds > 0.0) {
                const std::chrono::duration<double> elapsed =
                    std::chrono::steady_clock::now() - started;
                if (elapsed.count() > config.max_seconds) {
                    throw std::runtime_error("sweep exceeded the wall-clock budget of " +
                                             std::to_string(config.max_seconds) + " s");
                }
            }
            const int64_t L = scaling.level_count(n);
            const MagParams params(n, int(L), config.pmf, config.q);

            SweepRow row;
            row.n = n;
            row.level_count = L;
            row.rho = rho;
            row.rho_n = scaling.rho_n(n);
            row.regime = classify_regime(rho, params);

            const MomentReport m = moment_report(params);
            row.e_isolated = m.e_isolated;
            row.e_isolated_sq = m.e_isolated_sq;
            row.p_lower = m.p_zero_lower;
            row.p_upper = m.p_zero_upper;

            const EstimateResult est =
                estimate_prob_no_isolated(params, config.replications,
                                          derived_seed(config.seed, row_index), config.mode,
                                          config.threads);
            row.p_hat = est.p_hat;
            row.std_err = est.std_err;

            table.push_back(row);
            ++row_index;
        }
    }
    return table;
}

inline constexpr const char* kSweepCsvHeader =
    "n,L,rho,rho_n,p_hat,std_err,e_I,e_I_sq,p_lower,p_upper,case,threshold,predicted";

inline std::string sweep_to_csv(const std::vector<SweepRow>& table) {
    std::string out = kSweepCsvHeader;
    out += '\n';
    for (const SweepRow& r : table) {
        out += std::to_string(r.n);
        out += ',';
        out += std::to_string(r.level_count);
        out += ',';
        out += format_double17(r.rho);
        out += ',';
        out += format_double17(r.rho_n);
        out += ',';
        out += format_double17(r.p_hat);
        out += ',';
        out += format_double17(r.std_err);
        out += ',';
        out += format_double17(r.e_isolated);
        out += ',';
        out += format_double17(r.e_isolated_sq);
        out += ',';
        out += format_double17(r.p_lower);
        out += ',';
        out += format_double17(r.p_upper);
        out += ',';
        out += to_string(r.regime.regime_case);
        out += ',';
        out += format_double17(r.regime.threshold);
        out += ',';
        out += to_string(r.regime.predicted);
        out += '\n';
    }
    return out;
}

inline std::string sweep_to_json(const std::vector<SweepRow>& table) {
    JsonWriter w;
    w.begin_array();
    for (const SweepRow& r : table) {
        w.begin_object();
        w.key("n");
        w.value(r.n);
        w.key("L");
        w.value(r.level_count);
        w.key("rho");
        w.value(r.rho);
        w.key("rho_n");
        w.value(r.rho_n);
        w.key("p_hat");
        w.value(r.p_hat);
        w.key("std_err");
        w.value(r.std_err);
        w.key("e_I");
        w.value(r.e_isolated);
        w.key("e_I_sq");
        w.value(r.e_isolated_sq);
        w.key("p_lower");
        w.value(r.p_lower);
        w.key("p_upper");
        w.value(r.p_upper);
        w.key("case");
        w.value(std::string_view(to_string(r.regime.regime_case)));
        w.key("threshold");
        w.value(r.regime.threshold);
        w.key("predicted");
        w.value(std::string_view(to_string(r.regime.predicted)));
        w.end_object();
    }
    w.end_array();
    std::string out = w.str();
    out += '\n';
    return out;
}

}  // namespace maglab
