#pragma once

// Counter-based random streams (Philox4x32-10).
//
// Every uniform is addressed by (seed, stream, index): the seed is the Philox
// key, the stream id occupies the high counter words and the draw index the
// low ones. Draws can therefore be consumed in any order, skipped, or split
// across threads without changing the realization, which is the property the sampler
// and the Monte Carlo harness rely on for reproducibility.

#include <array>
#include <cstdint>

namespace maglab {

namespace detail {
inline constexpr uint32_t lo32(uint64_t x) { return static_cast<uint32_t>(x); }
inline constexpr uint32_t hi32(uint64_t x) { return static_cast<uint32_t>(x >> 32); }
}  // namespace detail

// splitmix64 finalizer; used to derive well-separated stream ids.
inline uint64_t mix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

struct Philox4x32 {
    static constexpr uint32_t kMul0 = 0xD2511F53u;
    static constexpr uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr uint32_t kWeyl1 = 0xBB67AE85u;

    // 10-round block function; key is the 64-bit seed split into two words.
    static std::array<uint32_t, 4> block(uint64_t key, std::array<uint32_t, 4> ctr) {
        uint32_t k0 = detail::lo32(key);
        uint32_t k1 = detail::hi32(key);
        for (int round = 0;; ++round) {
            const uint64_t p0 = uint64_t(kMul0) * ctr[0];
            const uint64_t p1 = uint64_t(kMul1) * ctr[2];
            ctr = {detail::hi32(p1) ^ ctr[1] ^ k0, detail::lo32(p1),
                   detail::hi32(p0) ^ ctr[3] ^ k1, detail::lo32(p0)};
            if (round == 9) break;
            k0 += kWeyl0;
            k1 += kWeyl1;
        }
        return ctr;
    }
};

// Random-access stream of doubles in the open interval (0,1).
class UniformStream {
  public:
    UniformStream(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {}

    // Each Philox block yields two 64-bit lanes; index selects block and lane.
    double uniform(uint64_t index) const {
        double lanes[2];
        uniform_block(index >> 1, lanes);
        return lanes[index & 1];
    }

    // Both lanes of one block: lanes[j] == uniform(2*block + j).
    void uniform_block(uint64_t block, double lanes[2]) const {
        const auto w = Philox4x32::block(seed_, {detail::lo32(block), detail::hi32(block),
                                                 detail::lo32(stream_), detail::hi32(stream_)});
        const uint64_t b0 = (uint64_t(w[0]) << 32) | w[1];
        const uint64_t b1 = (uint64_t(w[2]) << 32) | w[3];
        lanes[0] = (double(b0 >> 11) + 0.5) * 0x1.0p-53;
        lanes[1] = (double(b1 >> 11) + 0.5) * 0x1.0p-53;
    }

    uint64_t seed() const { return seed_; }
    uint64_t stream() const { return stream_; }

  private:
    uint64_t seed_;
    uint64_t stream_;
};

// Forward-only view over a stream consuming indices 0,1,2,...; computes each
// Philox block once. Values equal stream.uniform(k) for the k-th call.
class SequentialUniforms {
  public:
    explicit SequentialUniforms(const UniformStream& stream) : stream_(stream) {}

    double next() {
        const uint64_t block = index_ >> 1;
        if (block != cached_block_) {
            stream_.uniform_block(block, lanes_);
            cached_block_ = block;
        }
        return lanes_[index_++ & 1];
    }

  private:
    UniformStream stream_;
    uint64_t index_ = 0;
    uint64_t cached_block_ = ~uint64_t(0);
    double lanes_[2] = {0.0, 0.0};
};

// Stream purposes; replications of a given purpose never collide.
enum class StreamPurpose : uint64_t {
    Realization = 0x52EA1,   // attribute + pair uniforms of one sampled graph
    ThinningJump = 0x90B5,   // geometric gap draws of the thinned census walk
};

inline uint64_t substream_id(StreamPurpose purpose, uint64_t index) {
    return mix64(static_cast<uint64_t>(purpose) * 0x9E3779B97F4A7C15ULL ^ mix64(index));
}

inline UniformStream replication_stream(uint64_t seed, uint64_t replication) {
    return UniformStream(seed, substream_id(StreamPurpose::Realization, replication));
}

inline UniformStream jump_stream(uint64_t seed, uint64_t replication) {
    return UniformStream(seed, substream_id(StreamPurpose::ThinningJump, replication));
}

// Deterministic per-row seed derivation for sweep tables.
inline uint64_t derived_seed(uint64_t seed, uint64_t index) { return mix64(seed ^ mix64(index + 1)); }

}  // namespace maglab
