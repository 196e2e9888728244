#include <doctest.h>

#include <cmath>

#include "extqv/rng.hpp"

using namespace extqv;

TEST_CASE("philox4x32-10 known-answer vectors") {
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("same (seed, stream) reproduces the draws") {
    auto a = make_rng(7, 0);
    auto b = make_rng(7, 0);
    for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
}

TEST_CASE("distinct streams and seeds differ") {
    auto a = make_rng(7, 0);
    auto b = make_rng(7, 1);
    auto c = make_rng(8, 0);
    const double x = a.normal();
    CHECK(x != b.normal());
    CHECK(x != c.normal());
}

TEST_CASE("normal draws have unit variance and zero mean") {
    constexpr int N = 1'000'000;
    for (std::uint64_t stream : {0ull, 12345ull}) {
        auto r = make_rng(2024, stream);
        double s = 0.0, s2 = 0.0;
        for (int i = 0; i < N; ++i) {
            const double z = r.normal();
            s += z;
            s2 += z * z;
        }
        const double mean = s / N;
        const double var = s2 / N - mean * mean;
        CHECK(std::abs(mean) <= 4.0 / std::sqrt(double(N)));
        CHECK(std::abs(var - 1.0) <= 0.01);
    }
}

TEST_CASE("uniform stays in [0,1)") {
    auto r = make_rng(1, 1);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK(lo < 1e-3);
    CHECK(hi > 1.0 - 1e-3);
}
