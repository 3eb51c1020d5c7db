#pragma once

// Graph sampling and isolated-node counting.
//
// A realization is a pure function of (params, seed, replication): attribute
// uniforms occupy stream indices [0, nL), pair uniforms follow in row-major
// pair order, and an edge exists iff its uniform is <= the pair kernel. Two
// sampling modes share that definition:
//
//   FullGraph  - materializes the adjacency (bit rows), n <= 2^16;
//   CensusOnly - O(n) memory walk that only tracks isolation flags. Pairs
//                whose endpoints both already have neighbors cannot change
//                the census and are skipped; the walk stops early once no
//                isolated node remains. With a sparse kernel (max Q_L below
//                1/4) the walk visits candidate pairs by geometric jumps and
//                accepts with probability Q/max Q_L; identical in law,
//                though not realization-identical to the full mode.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "maglab/model.hpp"
#include "maglab/numeric.hpp"
#include "maglab/parallel.hpp"
#include "maglab/rng.hpp"

namespace maglab {

inline constexpr int64_t kMaxFullGraphNodes = 1 << 16;

// Uniform-index layout of one graph realization.
class RealizationLayout {
  public:
    RealizationLayout(int64_t n, int l) : n_(n), l_(l) {}

    uint64_t attribute_index(int64_t node, int coord) const {
        return uint64_t(node) * uint64_t(l_) + uint64_t(coord);
    }

    // Row-major rank of the unordered pair (u,v), u < v.
    uint64_t pair_index(int64_t u, int64_t v) const {
        const uint64_t rank =
            uint64_t(u) * uint64_t(n_) - uint64_t(u) * uint64_t(u + 1) / 2 + uint64_t(v - u - 1);
        return uint64_t(n_) * uint64_t(l_) + rank;
    }

    uint64_t pair_count() const { return uint64_t(n_) * uint64_t(n_ - 1) / 2; }

  private:
    int64_t n_;
    int l_;
};

inline std::vector<AttributeVector> sample_attributes(const MagParams& params,
                                                      const UniformStream& stream) {
    const RealizationLayout layout(params.n(), params.l());
    const double mu1 = params.pmf().mu1();
    std::vector<AttributeVector> attrs;
    attrs.reserve(std::size_t(params.n()));
    for (int64_t u = 0; u < params.n(); ++u) {
        AttributeVector a(params.l());
        for (int c = 0; c < params.l(); ++c) {
            if (stream.uniform(layout.attribute_index(u, c)) < mu1) a.set(c);
        }
        attrs.push_back(std::move(a));
    }
    return attrs;
}

// A sampled realization: attributes plus a symmetric, loop-free adjacency.
class MagGraph {
  public:
    MagGraph(int64_t n, int l, std::vector<AttributeVector> attributes)
        : n_(n), l_(l), attributes_(std::move(attributes)),
          words_per_row_(std::size_t((n + 63) / 64)),
          adjacency_(std::size_t(n) * words_per_row_, 0) {
        if (int64_t(attributes_.size()) != n) {
            throw std::invalid_argument("expected one attribute vector per node");
        }
        for (const AttributeVector& a : attributes_) {
            if (a.length() != l) throw std::invalid_argument("attribute vector length mismatch");
        }
    }

    int64_t n() const { return n_; }
    int l() const { return l_; }
    const std::vector<AttributeVector>& attributes() const { return attributes_; }

    void add_edge(int64_t u, int64_t v) {
        row(u)[std::size_t(v) >> 6] |= (uint64_t(1) << (v & 63));
        row(v)[std::size_t(u) >> 6] |= (uint64_t(1) << (u & 63));
    }

    bool has_edge(int64_t u, int64_t v) const {
        return (row(u)[std::size_t(v) >> 6] >> (v & 63)) & 1u;
    }

    int64_t degree(int64_t u) const {
        int64_t d = 0;
        const uint64_t* r = row(u);
        for (std::size_t w = 0; w < words_per_row_; ++w) d += std::popcount(r[w]);
        return d;
    }

    int64_t edge_count() const {
        int64_t total = 0;
        for (int64_t u = 0; u < n_; ++u) total += degree(u);
        return total / 2;
    }

  private:
    uint64_t* row(int64_t u) { return adjacency_.data() + std::size_t(u) * words_per_row_; }
    const uint64_t* row(int64_t u) const {
        return adjacency_.data() + std::size_t(u) * words_per_row_;
    }

    int64_t n_;
    int l_;
    std::vector<AttributeVector> attributes_;
    std::size_t words_per_row_;
    std::vector<uint64_t> adjacency_;
};

// Full realization for (params, seed, replication); deterministic bit-for-bit.
inline MagGraph sample_graph(const MagParams& params, uint64_t seed, uint64_t replication = 0) {
    if (params.n() > kMaxFullGraphNodes) {
        throw std::invalid_argument("full-graph sampling limited to n <= " +
                                    std::to_string(kMaxFullGraphNodes) +
                                    "; use the census mode for larger sweeps");
    }
    const UniformStream stream = replication_stream(seed, replication);
    const RealizationLayout layout(params.n(), params.l());
    MagGraph g(params.n(), params.l(), sample_attributes(params, stream));
    const PairKernelTable kernel(params.q(), params.l());

    for (int64_t u = 0; u + 1 < params.n(); ++u) {
        for (int64_t v = u + 1; v < params.n(); ++v) {
            const PairType t = pair_type(g.attributes()[std::size_t(u)],
                                         g.attributes()[std::size_t(v)]);
            if (stream.uniform(layout.pair_index(u, v)) <= kernel.value(t)) g.add_edge(u, v);
        }
    }
    return g;
}

// Counts of degree-zero nodes, total and split by the nodes' ones-count.
struct IsolationCensus {
    int64_t total = 0;
    std::vector<int64_t> by_level;  // length L+1; sums to total

    int64_t level_sum() const {
        int64_t s = 0;
        for (int64_t x : by_level) s += x;
        return s;
    }
};

inline IsolationCensus isolation_census(const MagGraph& g) {
    IsolationCensus census;
    census.by_level.assign(std::size_t(g.l()) + 1, 0);
    for (int64_t u = 0; u < g.n(); ++u) {
        if (g.degree(u) == 0) {
            ++census.total;
            ++census.by_level[std::size_t(g.attributes()[std::size_t(u)].ones())];
        }
    }
    return census;
}

enum class CensusStrategy { Auto, Direct, Thinned };

// Threshold below which the thinned walk wins over the direct one.
inline constexpr double kThinningKernelCutoff = 0.25;

// Reusable streaming-census engine: O(n) memory, buffers persist across
// replications, one instance per worker thread.
//
// The direct walk visits pairs in row-major order, drawing the pair-keyed
// uniform only while at least one endpoint is still isolated; it reproduces
// sample_graph + isolation_census bit for bit. The thinned walk (chosen when
// max Q_L < 1/4) hops between candidate pairs with geometric gaps and
// accepts with probability Q / max Q_L; same law, separate jump stream.
class CensusSampler {
  public:
    explicit CensusSampler(const MagParams& params,
                           CensusStrategy strategy = CensusStrategy::Auto)
        : params_(params),
          kernel_(params.q(), params.l()),
          layout_(params.n(), params.l()),
          words_per_node_(std::size_t((params.l() + 63) / 64)),
          attr_words_(std::size_t(params.n()) * words_per_node_, 0),
          ones_(std::size_t(params.n()), 0),
          isolated_(std::size_t(params.n()), 1),
          next_(std::size_t(params.n()) + 1, 0) {
        strategy_ = strategy != CensusStrategy::Auto ? strategy
                    : kernel_.max_value() < kThinningKernelCutoff ? CensusStrategy::Thinned
                                                                  : CensusStrategy::Direct;
    }

    CensusStrategy strategy() const { return strategy_; }

    IsolationCensus run(uint64_t seed, uint64_t replication) {
        const UniformStream stream = replication_stream(seed, replication);
        sample_attributes_packed(stream);
        reset_isolated();
        if (strategy_ == CensusStrategy::Thinned) {
            walk_thinned(stream, jump_stream(seed, replication));
        } else {
            walk_direct(stream);
        }

        IsolationCensus census;
        census.by_level.assign(std::size_t(params_.l()) + 1, 0);
        for (int64_t u = 0; u < params_.n(); ++u) {
            if (isolated_[std::size_t(u)]) {
                ++census.total;
                ++census.by_level[std::size_t(ones_[std::size_t(u)])];
            }
        }
        return census;
    }

  private:
    void sample_attributes_packed(const UniformStream& stream) {
        SequentialUniforms draws(stream);  // attribute indices are 0 .. nL-1
        const double mu1 = params_.pmf().mu1();
        const int L = params_.l();
        std::fill(attr_words_.begin(), attr_words_.end(), 0);
        for (int64_t node = 0; node < params_.n(); ++node) {
            uint64_t* row = attr_words_.data() + std::size_t(node) * words_per_node_;
            int count = 0;
            for (int c = 0; c < L; ++c) {
                if (draws.next() < mu1) {
                    row[c >> 6] |= uint64_t(1) << (c & 63);
                    ++count;
                }
            }
            ones_[std::size_t(node)] = count;
        }
    }

    void reset_isolated() {
        std::fill(isolated_.begin(), isolated_.end(), uint8_t(1));
        for (std::size_t i = 0; i < next_.size(); ++i) next_[i] = int64_t(i);
        count_ = params_.n();
    }

    bool isolated(int64_t u) const { return isolated_[std::size_t(u)] != 0; }

    void remove(int64_t u) {
        if (!isolated_[std::size_t(u)]) return;
        isolated_[std::size_t(u)] = 0;
        next_[std::size_t(u)] = u + 1;
        --count_;
    }

    // Smallest isolated node >= i (path-halving jump list; n is the sentinel).
    int64_t find(int64_t i) {
        int64_t root = i;
        while (next_[std::size_t(root)] != root) root = next_[std::size_t(root)];
        while (next_[std::size_t(i)] != root) {
            const int64_t up = next_[std::size_t(i)];
            next_[std::size_t(i)] = root;
            i = up;
        }
        return root;
    }

    PairType type_of(int64_t u, int64_t v) const {
        const uint64_t* a = attr_words_.data() + std::size_t(u) * words_per_node_;
        const uint64_t* b = attr_words_.data() + std::size_t(v) * words_per_node_;
        int j11 = 0, j10 = 0;
        for (std::size_t i = 0; i < words_per_node_; ++i) {
            j11 += std::popcount(a[i] & b[i]);
            j10 += std::popcount(a[i] ^ b[i]);
        }
        return {j11, j10, params_.l() - j11 - j10};
    }

    void test_pair(const UniformStream& stream, int64_t u, int64_t v) {
        if (stream.uniform(layout_.pair_index(u, v)) <= kernel_.value(type_of(u, v))) {
            remove(u);
            remove(v);
        }
    }

    void walk_direct(const UniformStream& stream) {
        const int64_t n = params_.n();
        for (int64_t u = 0; u + 1 < n && count_ > 0; ++u) {
            if (isolated(u)) {
                int64_t v = u + 1;
                for (; v < n && isolated(u); ++v) test_pair(stream, u, v);
                // u just connected: the rest of its row matters only for isolated v
                for (v = find(v); v < n; v = find(v + 1)) test_pair(stream, u, v);
            } else {
                for (int64_t v = find(u + 1); v < n; v = find(v + 1)) test_pair(stream, u, v);
            }
        }
    }

    void walk_thinned(const UniformStream& stream, const UniformStream& jumps) {
        const int64_t n = params_.n();
        const double t_max = kernel_.max_value();
        const double log1m_tmax = std::log1p(-t_max);
        const uint64_t pairs = layout_.pair_count();
        SequentialUniforms gap_draws(jumps);

        // Cursor over ranks, kept as row-major coordinates: pair (u, u+1+o).
        int64_t u = 0, o = 0;
        uint64_t done = 0;  // pairs strictly before the cursor
        while (done < pairs && count_ > 0) {
            const double g = std::floor(std::log(gap_draws.next()) / log1m_tmax);
            if (!(g < double(pairs - done))) break;  // next candidate past the last pair
            o += int64_t(g);
            while (o >= n - 1 - u) {  // spill into later rows
                o -= n - 1 - u;
                ++u;
            }
            done += uint64_t(g) + 1;

            const int64_t v = u + 1 + o;
            if (isolated(u) || isolated(v)) {
                if (stream.uniform(layout_.pair_index(u, v)) <=
                    kernel_.value(type_of(u, v)) / t_max) {
                    remove(u);
                    remove(v);
                }
            }
            if (++o >= n - 1 - u && done < pairs) {  // step past the candidate
                o -= n - 1 - u;
                ++u;
            }
        }
    }

    MagParams params_;
    PairKernelTable kernel_;
    RealizationLayout layout_;
    CensusStrategy strategy_;
    std::size_t words_per_node_;
    std::vector<uint64_t> attr_words_;
    std::vector<int> ones_;
    std::vector<uint8_t> isolated_;
    std::vector<int64_t> next_;
    int64_t count_ = 0;
};

// Isolation census of one realization without materializing the adjacency.
inline IsolationCensus census_sample(const MagParams& params, uint64_t seed,
                                     uint64_t replication = 0,
                                     CensusStrategy strategy = CensusStrategy::Auto) {
    return CensusSampler(params, strategy).run(seed, replication);
}

enum class CensusMode { CensusOnly, FullGraph };

inline IsolationCensus replication_census(const MagParams& params, uint64_t seed,
                                          uint64_t replication, CensusMode mode) {
    if (mode == CensusMode::FullGraph) {
        return isolation_census(sample_graph(params, seed, replication));
    }
    return census_sample(params, seed, replication);
}

// Monte Carlo estimate of P[no isolated nodes] with a Wilson 95% interval.
struct EstimateResult {
    double p_hat;
    double std_err;
    double ci95_lower;
    double ci95_upper;
    int64_t replications;
};

inline EstimateResult estimate_prob_no_isolated(const MagParams& params, int64_t replications,
                                                uint64_t seed,
                                                CensusMode mode = CensusMode::CensusOnly,
                                                int threads = 0) {
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");

    struct Acc {
        int64_t zero_count = 0;
        std::unique_ptr<CensusSampler> engine;
    };
    const auto accs = run_replications<Acc>(replications, threads, [&](int64_t rep, Acc& acc) {
        IsolationCensus census;
        if (mode == CensusMode::CensusOnly) {
            if (!acc.engine) acc.engine = std::make_unique<CensusSampler>(params);
            census = acc.engine->run(seed, uint64_t(rep));
        } else {
            census = isolation_census(sample_graph(params, seed, uint64_t(rep)));
        }
        if (census.total == 0) ++acc.zero_count;
    });
    int64_t zero = 0;
    for (const auto& a : accs) zero += a.zero_count;

    const double r = double(replications);
    const double p = double(zero) / r;
    const double z = 1.959963984540054;  // 97.5% normal quantile
    const double z2 = z * z;
    const double denom = 1.0 + z2 / r;
    const double center = (p + z2 / (2.0 * r)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / r + z2 / (4.0 * r * r)) / denom;

    EstimateResult out;
    out.p_hat = p;
    out.std_err = std::sqrt(p * (1.0 - p) / r);
    out.ci95_lower = clamp01(center - half);
    out.ci95_upper = clamp01(center + half);
    out.replications = replications;
    return out;
}

// Sample means of I, I^2 and the per-level counts, with standard errors.
// Tallies are integers, so the result is independent of the thread count.
struct MeanEstimate {
    double mean;
    double std_err;
};

struct McMoments {
    MeanEstimate mean_isolated;
    MeanEstimate mean_isolated_sq;
    std::vector<MeanEstimate> per_level;
    int64_t replications;
};

inline McMoments estimate_moments_mc(const MagParams& params, int64_t replications, uint64_t seed,
                                     CensusMode mode = CensusMode::CensusOnly, int threads = 0) {
    if (replications < 2) throw std::invalid_argument("replications must be >= 2");
    const std::size_t levels = std::size_t(params.l()) + 1;

    // Integer tallies keep the reduction exact; wide ones because I^4
    // reaches n^4 per replication.
    using wide = __int128;
    struct Acc {
        int64_t s1 = 0;
        wide s2 = 0, s4 = 0;
        std::vector<int64_t> lvl1;
        std::vector<wide> lvl2;
        std::unique_ptr<CensusSampler> engine;

        void ensure(std::size_t levels) {
            if (lvl1.empty()) {
                lvl1.assign(levels, 0);
                lvl2.assign(levels, 0);
            }
        }
    };
    const auto accs = run_replications<Acc>(replications, threads, [&](int64_t rep, Acc& acc) {
        acc.ensure(levels);
        IsolationCensus c;
        if (mode == CensusMode::CensusOnly) {
            if (!acc.engine) acc.engine = std::make_unique<CensusSampler>(params);
            c = acc.engine->run(seed, uint64_t(rep));
        } else {
            c = isolation_census(sample_graph(params, seed, uint64_t(rep)));
        }
        const wide i1 = c.total;
        const wide i2 = i1 * i1;
        acc.s1 += c.total;
        acc.s2 += i2;
        acc.s4 += i2 * i2;
        for (std::size_t l = 0; l < levels; ++l) {
            acc.lvl1[l] += c.by_level[l];
            acc.lvl2[l] += wide(c.by_level[l]) * wide(c.by_level[l]);
        }
    });

    Acc total;
    total.ensure(levels);
    for (const auto& a : accs) {
        if (a.lvl1.empty()) continue;
        total.s1 += a.s1;
        total.s2 += a.s2;
        total.s4 += a.s4;
        for (std::size_t l = 0; l < levels; ++l) {
            total.lvl1[l] += a.lvl1[l];
            total.lvl2[l] += a.lvl2[l];
        }
    }

    const double r = double(replications);
    auto mean_se = [r](wide sum, wide sum_sq) {
        const double mean = double(sum) / r;
        const double var = std::max(0.0, (double(sum_sq) / r - mean * mean) * r / (r - 1.0));
        return MeanEstimate{mean, std::sqrt(var / r)};
    };

    McMoments out;
    out.mean_isolated = mean_se(total.s1, total.s2);
    out.mean_isolated_sq = mean_se(total.s2, total.s4);
    out.per_level.reserve(levels);
    for (std::size_t l = 0; l < levels; ++l) {
        out.per_level.push_back(mean_se(total.lvl1[l], total.lvl2[l]));
    }
    out.replications = replications;
    return out;
}

// Debug dumps for small cases: "u v" edge lines (0-based, u < v) and one
// 0/1 row of attributes per node.
inline void write_edge_list(const MagGraph& g, std::ostream& os) {
    for (int64_t u = 0; u + 1 < g.n(); ++u) {
        for (int64_t v = u + 1; v < g.n(); ++v) {
            if (g.has_edge(u, v)) os << u << ' ' << v << '\n';
        }
    }
}

inline void write_attribute_matrix(const MagGraph& g, std::ostream& os) {
    for (int64_t u = 0; u < g.n(); ++u) {
        const AttributeVector& a = g.attributes()[std::size_t(u)];
        for (int c = 0; c < a.length(); ++c) {
            if (c) os << ' ';
            os << a.bit(c);
        }
        os << '\n';
    }
}

}  // namespace maglab
