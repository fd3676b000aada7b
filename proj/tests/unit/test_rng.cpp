#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "fbgraph/rng.hpp"

using fbgraph::Philox4x64;

// Known-answer vector published with the Random123 reference implementation.
TEST(Philox, ZeroCounterZeroKey) {
    const auto r = Philox4x64::block({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(r[0], 0x16554d9eca36314cULL);
    EXPECT_EQ(r[1], 0xdb20fe9d672d0fdcULL);
    EXPECT_EQ(r[2], 0xd7e772cee186176bULL);
    EXPECT_EQ(r[3], 0x7e68b68aec7ba23bULL);
}

// Reference values produced by numpy.random.Philox (which increments the
// counter before generating a block).
TEST(Philox, MatchesNumpyBlocks) {
    const auto r = Philox4x64::block({1, 0, 0, 0}, {0, 0});
    EXPECT_EQ(r[0], 0x02f4ba6408e4d89bULL);
    EXPECT_EQ(r[1], 0x3dd62b0b9ca8c5b2ULL);
    EXPECT_EQ(r[2], 0x1c8667a55d902e79ULL);
    EXPECT_EQ(r[3], 0x907d7a052fd5b4dcULL);
    const auto s = Philox4x64::block({6, 0, 7, 9}, {0x0123456789abcdefULL, 0xfedcba9876543210ULL});
    EXPECT_EQ(s[0], 0x3e2133f408e43d07ULL);
    EXPECT_EQ(s[1], 0x84e8e6af332ff2e8ULL);
    EXPECT_EQ(s[2], 0x1de9a9e23f81b6ceULL);
    EXPECT_EQ(s[3], 0x96b0dd9dabb9ae7bULL);
}

TEST(Philox, StreamsAreReproducibleAndDistinct) {
    Philox4x64 a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        EXPECT_EQ(x, b());
        seen.insert(x);
        seen.insert(c());
        seen.insert(d());
    }
    EXPECT_EQ(seen.size(), 300u);
}

TEST(Philox, UniformMoments) {
    Philox4x64 g(1, 0);
    const int n = 200000;
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = g.uniform01();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        s += u;
        s2 += u * u;
    }
    EXPECT_NEAR(s / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
    EXPECT_NEAR(s2 / n, 1.0 / 3, 0.003);
}

TEST(Philox, DiscardSkipsOutputs) {
    Philox4x64 a(5, 1), b(5, 1);
    a.discard(9);
    for (int i = 0; i < 9; ++i) b();
    EXPECT_EQ(a(), b());
}
