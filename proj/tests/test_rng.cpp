#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <set>

#include "maglab/rng.hpp"

using namespace maglab;

TEST_CASE("philox4x32-10 matches the published known-answer vectors") {
    // Reference vectors from the Random123 distribution (kat_vectors).
    const std::array<uint32_t, 4> zero =
        Philox4x32::block(0, {0x00000000u, 0x00000000u, 0x00000000u, 0x00000000u});
    CHECK(zero == std::array<uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});

    const std::array<uint32_t, 4> ones = Philox4x32::block(
        0xffffffffffffffffULL, {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu});
    CHECK(ones == std::array<uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});

    const uint64_t pi_key = (uint64_t(0x299f31d0u) << 32) | 0xa4093822u;
    const std::array<uint32_t, 4> pi =
        Philox4x32::block(pi_key, {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u});
    CHECK(pi == std::array<uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("uniforms live strictly inside (0,1) and are reproducible") {
    UniformStream s(42, 1);
    for (uint64_t i = 0; i < 4096; ++i) {
        const double u = s.uniform(i);
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        CHECK(u == s.uniform(i));
    }
}

TEST_CASE("uniform mean and coverage are sane") {
    UniformStream s(7, 99);
    const int n = 200000;
    double sum = 0.0;
    int low = 0;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform(uint64_t(i));
        sum += u;
        if (u < 0.5) ++low;
    }
    // 3-sigma bands for mean 0.5, sd 1/sqrt(12n) and for the halves count.
    CHECK(std::abs(sum / n - 0.5) < 3.0 / std::sqrt(12.0 * n));
    CHECK(std::abs(double(low) / n - 0.5) < 3.0 * 0.5 / std::sqrt(double(n)));
}

TEST_CASE("distinct seeds and substreams decorrelate") {
    UniformStream a(1, substream_id(StreamPurpose::Realization, 0));
    UniformStream b(2, substream_id(StreamPurpose::Realization, 0));
    UniformStream c(1, substream_id(StreamPurpose::Realization, 1));
    UniformStream d(1, substream_id(StreamPurpose::ThinningJump, 0));

    int same_ab = 0, same_ac = 0, same_ad = 0;
    for (uint64_t i = 0; i < 1000; ++i) {
        same_ab += a.uniform(i) == b.uniform(i);
        same_ac += a.uniform(i) == c.uniform(i);
        same_ad += a.uniform(i) == d.uniform(i);
    }
    CHECK(same_ab == 0);
    CHECK(same_ac == 0);
    CHECK(same_ad == 0);
}

TEST_CASE("derived seeds are distinct across row indices") {
    std::set<uint64_t> seen;
    for (uint64_t i = 0; i < 1000; ++i) seen.insert(derived_seed(7, i));
    CHECK(seen.size() == 1000);
}
