#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fbgraph/verification.hpp"

using namespace fbgraph;

namespace {

constexpr double pi = std::numbers::pi;

UIntegralSpec spec(int I, PairPartition P, std::vector<int> jstar, ThetaVector theta) {
    UIntegralSpec s;
    s.I = I;
    s.P = std::move(P);
    s.jstar = std::move(jstar);
    s.theta = std::move(theta);
    s.H = 0.3;
    s.K = 0.9;
    s.q = 2;
    return s;
}

} // namespace

TEST(Identity, QEqualsOnePasses) {
    for (int e1 : {1, -1}) {
        const auto r = check_ibp_identity(1, {e1, -e1}, 0.3, 1.5, 1.2, 1e-8);
        EXPECT_EQ(r.verdict, Verdict::pass);
        EXPECT_TRUE(r.converged);
        EXPECT_EQ(r.terms, 3);
        EXPECT_LT(r.abs_gap, 1e-8);
    }
}

TEST(Identity, Domain) {
    EXPECT_THROW(check_ibp_identity(1, {1, -1}, 0.3, 0.0, 1.0, 1e-8), DomainError);
    EXPECT_THROW(check_ibp_identity(5, {1, -1, 1, -1, 1, -1, 1, -1, 1, -1}, 0.3, 1.0, 1.0, 1e-8), DomainError);
}

TEST(Verdicts, CombineOrder) {
    EXPECT_EQ(combine(Verdict::pass, Verdict::fail), Verdict::fail);
    EXPECT_EQ(combine(Verdict::fail, Verdict::inconclusive), Verdict::inconclusive);
    EXPECT_EQ(combine(Verdict::pass, Verdict::pass), Verdict::pass);
}

TEST(Tracer, PairedExampleDropsToExponentTwo) {
    const auto c = trace_U_recursion(spec(4, {{1, 3}}, {2, 4}, {0, 0, 0, 0}));
    EXPECT_EQ(c.ell, 2);
    EXPECT_EQ(c.claimed_T_exponent, 2);
    std::vector<std::string> labels;
    for (const auto& s : c.case_trace) labels.push_back(s.label);
    EXPECT_EQ(labels, (std::vector<std::string>{"4b", "2b", "last"}));
}

TEST(Tracer, NoPairsGivesFullPower) {
    const auto c = trace_U_recursion(spec(3, {}, {3}, {0, 0, 0}));
    EXPECT_EQ(c.ell, 0);
    EXPECT_EQ(c.claimed_T_exponent, 3);
}

TEST(Tracer, EveryConfigurationUpToQThree) {
    const auto all = enumerate_u_specs(3, 0.3, 0.9);
    EXPECT_EQ(all.size(), 141u);
    for (const auto& e : all) {
        const auto c = trace_U_recursion(e.spec);
        EXPECT_EQ(c.claimed_T_exponent, e.spec.I - c.ell) << nlohmann::json(to_json(c)).dump();
        EXPECT_GE(c.ell, 0);
    }
}

TEST(Slnd, SinglePointIsOne) { EXPECT_DOUBLE_EQ(slnd_ratio(0.3, {2.0}, {0.7}), 1.0); }

TEST(Slnd, BrownianRatioEqualsN) {
    // H = 1/2: independent increments, Var = sum (tail sum)^2 gap, so the ratio is n exactly.
    Philox4x64 eng(11, 0);
    std::uniform_real_distribution<double> U(-1, 1), G(0.01, 2);
    for (int n = 2; n <= 6; ++n) {
        std::vector<double> a(n), t(n);
        double s = 0;
        for (int k = 0; k < n; ++k) {
            a[k] = U(eng);
            s += G(eng);
            t[k] = s;
        }
        EXPECT_NEAR(slnd_ratio(0.5, a, t), n, 1e-9 * n);
    }
}

TEST(Slnd, CalibrationAndHoldout) {
    const auto cal = calibrate_slnd(0.3, 5, 2000, 7, 2, 100);
    EXPECT_GT(cal.C_H, 0.0);
    EXPECT_LE(cal.C_H, kMaxC);
    EXPECT_GT(cal.K, 0.0);
    EXPECT_LE(cal.K, kMaxK);
    // n = 2 has a closed-form minimum: 2 (1 - |2^{2H-1} - 1|).
    EXPECT_GE(cal.C_candidate_by_n[2], 2 * (1 - std::abs(std::pow(2.0, 2 * 0.3 - 1) - 1)) - 1e-9);
    const auto h = validate_slnd(cal, 2000, 8);
    EXPECT_EQ(h.violations_C, 0);
    EXPECT_EQ(h.violations_K, 0);
    EXPECT_EQ(h.verdict, Verdict::pass);
}

TEST(Derivatives, SuitePasses) {
    const auto r = check_derivative_suite(0.3, 60, 5, 2000);
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_LT(r.grad_max_rel, kDerivativeRelTol);
    EXPECT_LT(r.hess_max_rel, kDerivativeRelTol);
    EXPECT_TRUE(r.third_exact_zero);
    EXPECT_EQ(r.bound_violations, 0);
}

TEST(Stats, FitLine) {
    const auto f = fit_line({1, 2, 3}, {2, 4, 6});
    EXPECT_NEAR(f.slope, 2, 1e-14);
    EXPECT_NEAR(f.intercept, 0, 1e-14);
    EXPECT_NEAR(f.r_squared, 1, 1e-14);
    EXPECT_THROW(fit_line({1, 1, 1}, {1, 2, 3}), DomainError);
    EXPECT_THROW(fit_line({1}, {1}), DomainError);
    EXPECT_THROW(fit_loglog({1, 0}, {1, 1}), DomainError);
}

TEST(KeyEstimate, QEqualsOne) {
    const auto r = check_key_estimate(1, 0.3, {1, 2, 4}, {4, 8});
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_LE(r.growth.slope, 1 + kGrowthSlack);
    EXPECT_LE(r.max_ratio, kBandFactor);
}

TEST(UGrowth, UndampedPairGrowsFasterThanClaimed) {
    // One pair, damping negligible: U is homogeneous of degree I - l + 2H
    // while the recursion claims I - l = 2.
    auto s = spec(4, {{1, 3}}, {2, 4}, {0, 0, 0, 0});
    s.K = 1e-6;
    s.q = 1;
    UGrowthOptions o;
    o.u.rel_tol = 2e-3;
    const auto r = u_growth(s, o);
    ASSERT_TRUE(r.trace_ok) << r.error_message;
    EXPECT_EQ(r.cert.claimed_T_exponent, 2);
    EXPECT_NEAR(r.cert.fitted_exponent, 2 + 2 * 0.3, 0.02);
    EXPECT_FALSE(r.growth_ok);
}
