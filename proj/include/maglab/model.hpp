#pragma once

// Model parameters and affinity kernels of the homogeneous binary
// multiplicative attribute graph: a symmetric 2x2 link-propensity matrix, a
// Bernoulli attribute law, and the kernel means every other module consumes.
//
// All products of per-attribute probabilities are evaluated as exponentials
// of sums of logarithms; attribute counts up to ~1e4 stay clear of underflow.

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "maglab/numeric.hpp"

namespace maglab {

// Symmetric 2x2 affinity matrix; q(1,0) == q(0,1) is structural (stored once).
class AffinityMatrix {
  public:
    AffinityMatrix(double q11, double q10, double q00) : q11_(q11), q10_(q10), q00_(q00) {
        validate_probability(q11, "q11");
        validate_probability(q10, "q10");
        validate_probability(q00, "q00");
    }

    double q(int a, int b) const {
        if (a == b) return a ? q11_ : q00_;
        return q10_;
    }
    double q11() const { return q11_; }
    double q10() const { return q10_; }
    double q00() const { return q00_; }

  private:
    double q11_, q10_, q00_;
};

// Bernoulli attribute law; mu0 is derived so mu0 + mu1 == 1 exactly.
class AttributePmf {
  public:
    explicit AttributePmf(double mu1) : mu1_(mu1) { validate_probability(mu1, "mu1"); }

    double mu1() const { return mu1_; }
    double mu0() const { return 1.0 - mu1_; }
    double prob(int bit) const { return bit ? mu1() : mu0(); }

  private:
    double mu1_;
};

// Mean affinity of a fixed attribute bit against a random attribute.
inline double mean_affinity(int bit, const AffinityMatrix& q, const AttributePmf& pmf) {
    return pmf.mu0() * q.q(bit, 0) + pmf.mu1() * q.q(bit, 1);
}

// Full model parameterization. Construction enforces the canonical
// orientation mean_affinity(0) < mean_affinity(1); the mirrored model is
// obtained by exchanging the roles of the two attribute values, not here.
class MagParams {
  public:
    MagParams(int64_t n, int l, AttributePmf pmf, AffinityMatrix q)
        : n_(n), l_(l), pmf_(pmf), q_(q) {
        if (n < 2) throw std::invalid_argument("node count must be >= 2, got " + std::to_string(n));
        if (l < 1)
            throw std::invalid_argument("attribute count must be >= 1, got " + std::to_string(l));
        const double g0 = mean_affinity(0, q_, pmf_);
        const double g1 = mean_affinity(1, q_, pmf_);
        if (!(g0 < g1)) {
            throw std::invalid_argument(
                "compact condition violated: mean_affinity(0) = " + std::to_string(g0) +
                " must be strictly below mean_affinity(1) = " + std::to_string(g1) +
                "; exchange the roles of the attribute values 0 and 1");
        }
    }

    int64_t n() const { return n_; }
    int l() const { return l_; }
    const AttributePmf& pmf() const { return pmf_; }
    const AffinityMatrix& q() const { return q_; }

    double gamma1() const { return mean_affinity(1, q_, pmf_); }
    double gamma0() const { return mean_affinity(0, q_, pmf_); }

  private:
    int64_t n_;
    int l_;
    AttributePmf pmf_;
    AffinityMatrix q_;
};

// Binary attribute vector, bit-packed, with the count of ones cached.
class AttributeVector {
  public:
    explicit AttributeVector(int length)
        : length_(length), ones_(0), words_((length + 63) / 64, 0) {
        if (length < 1) throw std::invalid_argument("attribute vector length must be >= 1");
    }

    static AttributeVector from_bits(std::span<const int> bits) {
        AttributeVector v(int(bits.size()));
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i]) v.set(int(i));
        }
        return v;
    }

    static AttributeVector from_string(const std::string& s) {
        AttributeVector v(int(s.size()));
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '1') v.set(int(i));
        }
        return v;
    }

    // Raises a zero bit; sampling only ever sets bits once.
    void set(int i) {
        words_[std::size_t(i) >> 6] |= (uint64_t(1) << (i & 63));
        ++ones_;
    }

    int bit(int i) const { return int((words_[std::size_t(i) >> 6] >> (i & 63)) & 1u); }
    int length() const { return length_; }
    int ones() const { return ones_; }
    std::span<const uint64_t> words() const { return words_; }

  private:
    int length_;
    int ones_;
    std::vector<uint64_t> words_;
};

// Coordinatewise agreement pattern of a pair (#both-one, #mismatch, #both-zero).
struct PairType {
    int j11;
    int j10;
    int j00;
};

inline PairType pair_type(const AttributeVector& a, const AttributeVector& b) {
    if (a.length() != b.length()) {
        throw std::invalid_argument("attribute vectors differ in length: " +
                                    std::to_string(a.length()) + " vs " +
                                    std::to_string(b.length()));
    }
    int j11 = 0, j10 = 0;
    const auto wa = a.words();
    const auto wb = b.words();
    for (std::size_t i = 0; i < wa.size(); ++i) {
        j11 += std::popcount(wa[i] & wb[i]);
        j10 += std::popcount(wa[i] ^ wb[i]);
    }
    return {j11, j10, a.length() - j11 - j10};
}

// prod over coordinates of q(a_l, b_l), given the agreement pattern.
inline double kernel_product(const PairType& t, const AffinityMatrix& q) {
    return std::exp(double(t.j11) * std::log(q.q11()) + double(t.j10) * std::log(q.q10()) +
                    double(t.j00) * std::log(q.q00()));
}

// Edge-probability kernel of two attribute vectors. Symmetric by
// construction (only the agreement pattern enters) and strictly in (0,1).
inline double pair_affinity(const AttributeVector& a, const AttributeVector& b,
                            const AffinityMatrix& q) {
    return kernel_product(pair_type(a, b), q);
}

// Expected kernel against a random attribute vector; depends on the fixed
// vector only through its count of ones.
inline double mean_pair_affinity(int ones, int length, const AffinityMatrix& q,
                                 const AttributePmf& pmf) {
    if (ones < 0 || ones > length) {
        throw std::invalid_argument("count of ones " + std::to_string(ones) +
                                    " out of range [0, " + std::to_string(length) + "]");
    }
    const double g1 = mean_affinity(1, q, pmf);
    const double g0 = mean_affinity(0, q, pmf);
    return std::exp(double(ones) * std::log(g1) + double(length - ones) * std::log(g0));
}

// Second-order kernel means: E[q(1,A)^2], E[q(1,A)q(0,A)], E[q(0,A)^2].
struct KernelSecondMoments {
    double m11;
    double m10;
    double m00;
};

inline KernelSecondMoments affinity_second_moments(const AffinityMatrix& q,
                                                   const AttributePmf& pmf) {
    const double mu0 = pmf.mu0(), mu1 = pmf.mu1();
    return {
        mu0 * q.q(1, 0) * q.q(1, 0) + mu1 * q.q(1, 1) * q.q(1, 1),
        mu0 * q.q(1, 0) * q.q(0, 0) + mu1 * q.q(1, 1) * q.q(0, 1),
        mu0 * q.q(0, 0) * q.q(0, 0) + mu1 * q.q(0, 1) * q.q(0, 1),
    };
}

inline double affinity_product_mean_by_type(const PairType& t, const KernelSecondMoments& m) {
    return std::exp(double(t.j11) * std::log(m.m11) + double(t.j10) * std::log(m.m10) +
                    double(t.j00) * std::log(m.m00));
}

// E[Q(a,A) Q(b,A)]: mean of the product of the two kernels against a shared
// random vector; factorizes over coordinates by independence.
inline double affinity_product_mean(const AttributeVector& a, const AttributeVector& b,
                                    const AffinityMatrix& q, const AttributePmf& pmf) {
    return affinity_product_mean_by_type(pair_type(a, b), affinity_second_moments(q, pmf));
}

// Probability that a random third node links to a or to b (inclusion-exclusion).
// 1 - union_affinity is the per-witness non-adjacency factor of the pair
// second moment.
inline double union_affinity(const AttributeVector& a, const AttributeVector& b,
                             const AffinityMatrix& q, const AttributePmf& pmf) {
    const PairType t = pair_type(a, b);
    const double qa = mean_pair_affinity(a.ones(), a.length(), q, pmf);
    const double qb = mean_pair_affinity(b.ones(), b.length(), q, pmf);
    return qa + qb - affinity_product_mean_by_type(t, affinity_second_moments(q, pmf));
}

// Lookup table of kernel_product over agreement patterns, for samplers that
// test many pairs. Values are bit-identical to pair_affinity.
class PairKernelTable {
  public:
    PairKernelTable(const AffinityMatrix& q, int length) : length_(length) {
        values_.resize(std::size_t(length + 1) * std::size_t(length + 1), 0.0);
        max_value_ = 0.0;
        for (int j11 = 0; j11 <= length; ++j11) {
            for (int j00 = 0; j00 + j11 <= length; ++j00) {
                const double v = kernel_product({j11, length - j11 - j00, j00}, q);
                values_[index(j11, j00)] = v;
                if (v > max_value_) max_value_ = v;
            }
        }
    }

    double value(int j11, int j00) const { return values_[index(j11, j00)]; }
    double value(const PairType& t) const { return value(t.j11, t.j00); }
    // Upper bound over all patterns (attained), used by the thinned census walk.
    double max_value() const { return max_value_; }
    int length() const { return length_; }

  private:
    std::size_t index(int j11, int j00) const {
        return std::size_t(j11) * std::size_t(length_ + 1) + std::size_t(j00);
    }

    int length_;
    double max_value_;
    std::vector<double> values_;
};

}  // namespace maglab
