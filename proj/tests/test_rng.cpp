#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "doctest.h"
#include "ntci/rng.hpp"

using namespace ntci;

TEST_CASE("philox4x32-10 known-answer vectors") {
    // Reference vectors from the Random123 known-answer tests
    // (Salmon et al., SC 2011).
    {
        auto out = rng::philox4x32({0, 0, 0, 0}, {0, 0});
        CHECK(out.words[0] == 0x6627e8d5u);
        CHECK(out.words[1] == 0xe169c58du);
        CHECK(out.words[2] == 0xbc57ac4cu);
        CHECK(out.words[3] == 0x9b00dbd8u);
    }
    {
        auto out = rng::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                   {0xffffffffu, 0xffffffffu});
        CHECK(out.words[0] == 0x408f276du);
        CHECK(out.words[1] == 0x41c83b0eu);
        CHECK(out.words[2] == 0xa20bc7c6u);
        CHECK(out.words[3] == 0x6d5451fdu);
    }
    {
        auto out = rng::philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                   {0xa4093822u, 0x299f31d0u});
        CHECK(out.words[0] == 0xd16cfe09u);
        CHECK(out.words[1] == 0x94fdccebu);
        CHECK(out.words[2] == 0x5001e420u);
        CHECK(out.words[3] == 0x24126ea1u);
    }
}

TEST_CASE("gaussian stream is a pure function of (seed, stream, step, component)") {
    rng::GaussianStream a(1234, 7);
    rng::GaussianStream b(1234, 7);
    for (std::uint64_t step : {0ull, 3ull, 1000ull})
        for (std::uint32_t c : {0u, 1u, 2u, 5u})
            CHECK(a.normal(step, c) == b.normal(step, c));

    rng::GaussianStream other_stream(1234, 8);
    rng::GaussianStream other_seed(1235, 7);
    CHECK(a.normal(0, 0) != other_stream.normal(0, 0));
    CHECK(a.normal(0, 0) != other_seed.normal(0, 0));
}

TEST_CASE("gaussian stream moments") {
    rng::GaussianStream s(99, 0);
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = s.normal(static_cast<std::uint64_t>(i), static_cast<std::uint32_t>(i % 4));
        sum += z;
        sum_sq += z * z;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 6.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("noise plan increments have variance dt") {
    const double dt = 1.0 / 128.0;
    NoisePlan plan(42, 3, 2, dt);
    const int n = 100000;
    double sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double w = plan.increment(static_cast<std::uint64_t>(i), i % 2);
        sum_sq += w * w;
    }
    const double var = sum_sq / n;
    CHECK(var == doctest::Approx(dt).epsilon(0.05));
}

TEST_CASE("derived seeds differ from the base seed") {
    std::set<std::uint64_t> seen;
    seen.insert(777);
    for (std::uint64_t salt = 0; salt < 8; ++salt) {
        const std::uint64_t derived = rng::derive_seed(777, salt);
        CHECK(seen.insert(derived).second);
    }
}
