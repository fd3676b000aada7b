#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fbgraph/g_analytics.hpp"

using namespace fbgraph;

namespace {

// Oracle: g = -sum_ij a_i a_j cov(s_i, s_j) in extended precision, with an
// optional pinned term at T.
long double g_ref(const GaConfig& c, const std::vector<long double>& s) {
    std::vector<long double> t(s), a(c.a.begin(), c.a.end());
    if (c.pinned_T_coef != 0.0) {
        t.push_back(c.horizon);
        a.push_back(c.pinned_T_coef);
    }
    const long double h2 = 2.0L * c.H;
    long double v = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = 0; j < t.size(); ++j)
            v += a[i] * a[j] * 0.5L * (powl(t[i], h2) + powl(t[j], h2) - powl(fabsl(t[i] - t[j]), h2));
    return -v;
}

long double fexp(const GaConfig& c, const std::vector<long double>& s) { return expl(3.14159265358979323846L * g_ref(c, s)); }

// Mixed central difference over distinct indices.
template <class F>
long double fd_mixed(F f, const GaConfig& c, const std::vector<int>& idx, long double h) {
    const int m = static_cast<int>(idx.size());
    long double acc = 0;
    for (int mask = 0; mask < (1 << m); ++mask) {
        std::vector<long double> s(c.s.begin(), c.s.end());
        int sign = 1;
        for (int k = 0; k < m; ++k) {
            const bool plus = (mask >> k) & 1;
            s[idx[k] - 1] += plus ? h : -h;
            if (!plus) sign = -sign;
        }
        acc += sign * f(c, s);
    }
    return acc / powl(2 * h, m);
}

GaConfig random_config(std::mt19937_64& rng, int I, double H, bool balanced, bool pinned) {
    GaConfig c;
    c.H = H;
    std::uniform_real_distribution<double> U(0.05, 1.0);
    std::uniform_int_distribution<int> A(-3, 3);
    double t = 0.0;
    for (int i = 0; i < I; ++i) {
        t += U(rng);
        c.s.push_back(t);
        int x = 0;
        while (x == 0) x = A(rng);
        c.a.push_back(x);
    }
    if (balanced) {
        double sum = 0;
        for (int i = 0; i + 1 < I; ++i) sum += c.a[i];
        c.a[I - 1] = -sum;
        if (c.a[I - 1] == 0) { // keep every coefficient nonzero
            c.a[I - 1] = 0.5;
            c.a[I - 2] -= 0.5;
        }
    }
    if (pinned) {
        c.horizon = t + U(rng);
        c.pinned_T_coef = 2.0;
    }
    return c;
}

} // namespace

TEST(GValue, MatchesVariance) {
    GaConfig c{0.3, {1, -1}, {0.2, 0.7}};
    EXPECT_NEAR(g_value(c), -std::pow(0.5, 0.6), 1e-14);
    GaConfig d{0.3, {-1}, {0.4}};
    EXPECT_NEAR(g_value(d), -std::pow(0.4, 0.6), 1e-14);
}

TEST(Gradient, FiniteDifferences) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        const double H = 0.05 + 0.9 * (trial % 10) / 10.0;
        const int I = 2 + trial % 6;
        const auto c = random_config(rng, I, H, trial % 2 == 0, trial % 3 == 0);
        const auto g = grad_g(c);
        for (int i = 1; i <= I; ++i) {
            const double fd = static_cast<double>(fd_mixed(g_ref, c, {i}, 1e-6L));
            EXPECT_NEAR(g[i - 1], fd, 1e-7 * (1 + std::abs(fd))) << "trial " << trial << " i " << i;
        }
    }
}

TEST(Gradient, BalancedClosedFormAgrees) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const auto c = random_config(rng, 2 + trial % 7, 0.1 + 0.8 * (trial % 5) / 5.0, true, false);
        const auto g = grad_g(c), h = grad_g_balanced(c);
        for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(g[i], h[i], 1e-11 * (1 + std::abs(g[i])));
    }
    GaConfig unbalanced{0.3, {1, 1}, {0.1, 0.3}};
    EXPECT_THROW(grad_g_balanced(unbalanced), DomainError);
}

TEST(Hessian, FiniteDifferences) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        const double H = 0.05 + 0.9 * (trial % 10) / 10.0;
        const int I = 2 + trial % 5;
        const auto c = random_config(rng, I, H, trial % 2 == 0, trial % 3 == 1);
        const auto h = hess_g(c);
        for (int i = 1; i <= I; ++i)
            for (int j = i + 1; j <= I; ++j) {
                const double fd = static_cast<double>(fd_mixed(g_ref, c, {i, j}, 1e-5L));
                EXPECT_NEAR(h[i - 1][j - 1], fd, 1e-6 * (1 + std::abs(fd)));
                EXPECT_DOUBLE_EQ(h[i - 1][j - 1], h[j - 1][i - 1]);
                const double closed =
                    2 * H * (1 - 2 * H) * c.a[i - 1] * c.a[j - 1] * std::pow(c.s[j - 1] - c.s[i - 1], 2 * H - 2);
                EXPECT_NEAR(h[i - 1][j - 1], closed, 1e-12 * (1 + std::abs(closed)));
            }
        // Diagonal: second central difference.
        for (int i = 1; i <= I; ++i) {
            std::vector<long double> sp(c.s.begin(), c.s.end()), sm = sp, s0 = sp;
            const long double d = 1e-5L;
            sp[i - 1] += d;
            sm[i - 1] -= d;
            const double fd = static_cast<double>((g_ref(c, sp) - 2 * g_ref(c, s0) + g_ref(c, sm)) / (d * d));
            EXPECT_NEAR(h[i - 1][i - 1], fd, 1e-5 * (1 + std::abs(fd)));
        }
    }
}

TEST(MixedPartial, OrderThreeVanishes) {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        const auto c = random_config(rng, 5, 0.3, true, false);
        EXPECT_EQ(mixed_partial(c, {1, 3, 5}), 0.0);
        const double fd = static_cast<double>(fd_mixed(g_ref, c, {1, 3, 5}, 1e-3L));
        EXPECT_NEAR(fd, 0.0, 1e-6);
        EXPECT_NEAR(mixed_partial(c, {2}), grad_g(c)[1], 1e-15);
        EXPECT_NEAR(mixed_partial(c, {4, 2}), hess_g(c)[1][3], 1e-15);
    }
}

TEST(FaaDiBruno, FiniteDifferencesOfExponential) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const double H = 0.1 + 0.35 * (trial % 4) / 3.0;
        const auto c = random_config(rng, 5, H, true, trial % 2 == 0);
        for (const std::vector<int>& J : {std::vector<int>{2}, {1, 3}, {1, 3, 5}, {2, 4}}) {
            const double v = faa_di_bruno_mixed(c, J);
            const long double h = J.size() == 3 ? 1e-4L : 1e-5L;
            const double fd = static_cast<double>(fd_mixed(fexp, c, J, h));
            EXPECT_NEAR(v, fd, 2e-5 * (1e-3 + std::abs(fd))) << "trial " << trial << " |J|=" << J.size();
        }
        EXPECT_NEAR(faa_di_bruno_mixed(c, {}), std::exp(M_PI * g_value(c)), 1e-15);
    }
}

TEST(Bounds, DerivativeBoundsHoldOnRandomConfigs) {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> L(-6.0, 0.5);
    for (int trial = 0; trial < 3000; ++trial) {
        const int I = 2 + trial % 7;
        const double H = 0.02 + 0.47 * (trial % 13) / 13.0;
        GaConfig c;
        c.H = H;
        double t = 0.0;
        std::uniform_int_distribution<int> A(-3, 3);
        int sum = 0;
        for (int i = 0; i < I; ++i) {
            t += std::exp(L(rng));
            c.s.push_back(t);
            int x = 0;
            while (x == 0) x = A(rng);
            if (i == I - 1) x = -sum;
            sum += x;
            c.a.push_back(x);
        }
        if (c.a.back() == 0) continue;
        const auto b = derivative_bounds(c);
        const auto g = grad_g(c);
        const auto h = hess_g(c);
        for (int i = 0; i < I; ++i) {
            EXPECT_LE(std::abs(g[i]), b.grad[i] * (1 + 1e-12));
            for (int j = 0; j < I; ++j)
                if (j != i) EXPECT_LE(std::abs(h[i][j]), b.hess[i][j] * (1 + 1e-12));
        }
    }
}

TEST(Domain, Guards) {
    GaConfig close{0.3, {1, -1}, {0.5, 0.5 + 1e-13}};
    EXPECT_THROW(g_value(close), DomainError);
    GaConfig ok{0.3, {1, -1}, {0.5, 0.6}};
    EXPECT_THROW(mixed_partial(ok, {1, 1}), DomainError);
    EXPECT_THROW(mixed_partial(ok, {3}), DomainError);
    GaConfig big{0.7, {1, -1}, {0.5, 0.6}};
    EXPECT_THROW(derivative_bounds(big), DomainError);
}

TEST(SlndExp, SuffixSupport) {
    EXPECT_EQ(suffix_support({-1, 1, 1, -1}), (std::vector<int>{2, 4}));
    EXPECT_EQ(suffix_support({1, -1}), (std::vector<int>{2}));
    const double v = slnd_exp_bound(0.3, {1, -1}, {0.2, 0.7}, 0.5, 2);
    EXPECT_NEAR(v, std::exp(-0.25 * std::pow(0.5, 0.6)), 1e-15);
}
