#include <gtest/gtest.h>

#include <cmath>

#include "fbgraph/fbm_sampler.hpp"

using namespace fbgraph;

namespace {

// Checks the empirical covariance of B at a few grid indices against the exact
// covariance, with a 5-standard-error tolerance for each entry.
void check_covariance(const FbmSampler& s, int n_pairs, std::uint64_t seed) {
    const auto& g = s.grid();
    const std::vector<std::size_t> idx{g.size() / 7, g.size() / 2, g.size() - 1};
    std::vector<std::vector<double>> acc(idx.size(), std::vector<double>(idx.size(), 0.0));
    auto ws = s.make_workspace();
    std::vector<double> a, b;
    for (int p = 0; p < n_pairs; ++p) {
        s.sample_pair(seed, p, ws, a, b);
        ASSERT_EQ(a[0], 0.0);
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < idx.size(); ++j) acc[i][j] += a[idx[i]] * a[idx[j]] + b[idx[i]] * b[idx[j]];
    }
    const double n = 2.0 * n_pairs;
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) {
            const double ti = g[idx[i]], tj = g[idx[j]];
            const double c = fbm_covariance(s.hurst(), ti, tj);
            const double se = std::sqrt((std::pow(ti, 2 * s.hurst()) * std::pow(tj, 2 * s.hurst()) + c * c) / n);
            EXPECT_NEAR(acc[i][j] / n, c, 5 * se) << "H=" << s.hurst() << " i=" << i << " j=" << j;
        }
}

} // namespace

TEST(Sampler, CholeskyCovariance) {
    for (double H : {0.1, 0.3, 0.5, 0.75}) {
        SamplerOptions o;
        o.method = SamplingMethod::cholesky;
        FbmSampler s(H, TimeGrid::uniform(50), o);
        EXPECT_EQ(s.method(), SamplingMethod::cholesky);
        check_covariance(s, 10000, 11);
    }
}

TEST(Sampler, CirculantCovariance) {
    for (double H : {0.1, 0.3, 0.5, 0.75}) {
        SamplerOptions o;
        o.method = SamplingMethod::circulant;
        FbmSampler s(H, TimeGrid::uniform(256, 2.0), o);
        EXPECT_EQ(s.method(), SamplingMethod::circulant);
        EXPECT_TRUE(s.warnings().empty());
        check_covariance(s, 10000, 12);
    }
}

TEST(Sampler, CirculantPairHalvesAreUncorrelated) {
    SamplerOptions o;
    o.method = SamplingMethod::circulant;
    FbmSampler s(0.3, TimeGrid::uniform(128), o);
    auto ws = s.make_workspace();
    std::vector<double> a, b;
    double cross = 0.0;
    const int n = 20000;
    for (int p = 0; p < n; ++p) {
        s.sample_pair(5, p, ws, a, b);
        cross += a.back() * b.back();
    }
    EXPECT_NEAR(cross / n, 0.0, 5.0 / std::sqrt(n));
}

TEST(Sampler, IncrementVarianceOnFineGrid) {
    // Var(B_{t+d} - B_t) = d^{2H}: average the squared increments along paths.
    const double H = 0.2;
    SamplerOptions o;
    o.method = SamplingMethod::circulant;
    FbmSampler s(H, TimeGrid::uniform(1 << 12), o);
    auto ws = s.make_workspace();
    std::vector<double> a, b;
    double acc = 0.0;
    std::size_t cnt = 0;
    for (int p = 0; p < 50; ++p) {
        s.sample_pair(9, p, ws, a, b);
        for (std::size_t k = 1; k < a.size(); ++k) {
            acc += (a[k] - a[k - 1]) * (a[k] - a[k - 1]);
            ++cnt;
        }
    }
    EXPECT_NEAR(acc / cnt / std::pow(s.grid().step(), 2 * H), 1.0, 0.02);
}

TEST(Sampler, ReproducibleAndIndexAddressable) {
    FbmSampler s(0.3, TimeGrid::uniform(1 << 13));
    EXPECT_EQ(s.method(), SamplingMethod::circulant);
    const auto p5 = s.sample(77, 5);
    const auto p5b = s.sample(77, 5);
    const auto p4 = s.sample(77, 4);
    EXPECT_EQ(p5.values, p5b.values);
    EXPECT_NE(p5.values, p4.values);
    EXPECT_NE(s.sample(78, 5).values, p5.values);
}

TEST(Sampler, AutomaticSelection) {
    FbmSampler small(0.3, TimeGrid::uniform(1024));
    EXPECT_EQ(small.method(), SamplingMethod::cholesky);
    FbmSampler big(0.3, TimeGrid::uniform(8192));
    EXPECT_EQ(big.method(), SamplingMethod::circulant);
    FbmSampler irregular(0.3, TimeGrid({0.0, 0.1, 0.15, 0.9}));
    EXPECT_EQ(irregular.method(), SamplingMethod::cholesky);
}

TEST(Sampler, Limits) {
    SamplerOptions o;
    o.method = SamplingMethod::cholesky;
    EXPECT_THROW(FbmSampler(0.3, TimeGrid::uniform(5000), o), ResourceError);
    EXPECT_THROW(FbmSampler(1.2, TimeGrid::uniform(16)), DomainError);
    o.method = SamplingMethod::circulant;
    EXPECT_THROW(FbmSampler(0.3, TimeGrid({0.0, 0.1, 0.5}), o), DomainError);
}
