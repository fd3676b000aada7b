#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "fbgraph/simplex_integrals.hpp"

using namespace fbgraph;
using cd = std::complex<double>;
using GK = boost::math::quadrature::gauss_kronrod<double, 61>;

namespace {

constexpr double pi = std::numbers::pi;

// Gauss-Kronrod on int_0^T w(r) dr after r = v^m, which turns the r^{2H-1}
// and r^{2H} endpoint behaviour into something smooth when m = 1/(2H).
template <class W>
cd gk_sub(double T, double m, W w) {
    auto re = [&](double v) { return (w(std::pow(v, m)) * m * std::pow(v, m - 1)).real(); };
    auto im = [&](double v) { return (w(std::pow(v, m)) * m * std::pow(v, m - 1)).imag(); };
    const double b = std::pow(T, 1.0 / m);
    return {GK::integrate(re, 0.0, b, 20, 1e-13), GK::integrate(im, 0.0, b, 20, 1e-13)};
}

// q = 1 reduction: int_0^T (T - r) e^{2 pi i lambda s r} f(r) dr.
template <class F>
cd gk_q1(double T, double lambda, int s, double H, F f) {
    return gk_sub(T, 1.0 / (2 * H), [&](double r) {
        return (T - r) * std::polar(1.0, 2 * pi * lambda * s * r) * f(r);
    });
}

QuadratureOptions tight() {
    QuadratureOptions o;
    o.abs_tol = 1e-10;
    o.rel_tol = 1e-9;
    o.max_level = 6;
    return o;
}

} // namespace

TEST(IFull, BrownianClosedForm) {
    const auto r = eval_I_full(0.5, {1, -1}, 0.0, 1.0, tight());
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value.real(), 1 / pi - (1 - std::exp(-pi)) / (pi * pi), 1e-10);
    EXPECT_NEAR(r.value.imag(), 0.0, 1e-14);
}

TEST(IFull, QEqualsOneAgainstGaussKronrod) {
    for (double H : {0.1, 0.3, 0.45})
        for (double lambda : {0.5, 3.0})
            for (double T : {0.5, 2.0}) {
                for (int e1 : {1, -1}) {
                    const auto r = eval_I_full(H, {e1, -e1}, lambda, T, tight());
                    // <eps,u> = e1 (u1 - u2) = -e1 r
                    const cd ref = gk_q1(T, lambda, e1, H, [H](double x) { return std::exp(-pi * std::pow(x, 2 * H)); });
                    EXPECT_TRUE(r.converged);
                    EXPECT_NEAR(std::abs(r.value - ref), 0.0, 1e-8) << H << " " << lambda << " " << T;
                }
            }
}

TEST(ISigma, QEqualsOneTerms) {
    const double H = 0.3, lambda = 1.7, T = 1.4;
    const SignVector eps{1, -1};
    // Phi_1^+: u1 pinned to u2, coefficient collapses to 0, sign -1.
    auto plus = eval_I_sigma(H, eps, {Op::plus}, lambda, T, tight());
    EXPECT_NEAR(plus.value.real(), -T, 1e-12);
    EXPECT_NEAR(plus.value.imag(), 0.0, 1e-12);
    // Phi_1^-: u1 pinned to 0, leaving int_0^T e^{2 pi i lambda u} e^{-pi u^{2H}} du.
    auto minus = eval_I_sigma(H, eps, {Op::minus}, lambda, T, tight());
    const cd ref_m = gk_sub(T, 1.0 / (2 * H), [&](double u) {
        return std::polar(1.0, 2 * pi * lambda * u) * std::exp(-pi * std::pow(u, 2 * H));
    });
    EXPECT_NEAR(std::abs(minus.value - ref_m), 0.0, 1e-9);
    // d_1: derivative of exp(-pi r^{2H}) in u1 is 2 pi H r^{2H-1} exp(-pi r^{2H}).
    auto del = eval_I_sigma(H, eps, {Op::del}, lambda, T, tight());
    const cd ref_d = gk_q1(T, lambda, 1, H, [H](double r) {
        return 2 * pi * H * std::pow(r, 2 * H - 1) * std::exp(-pi * std::pow(r, 2 * H));
    });
    EXPECT_NEAR(std::abs(del.value - ref_d), 0.0, 1e-8);
}

TEST(ISigma, IntegrationByPartsAtQEqualsOne) {
    for (double H : {0.1, 0.3, 0.45})
        for (int e1 : {1, -1}) {
            const double lambda = 2.3, T = 1.1;
            const SignVector eps{e1, -e1};
            const cd lhs = eval_I_full(H, eps, lambda, T, tight()).value;
            cd sum = 0;
            for (const auto& s : enumerate_Sigma(1)) sum += eval_I_sigma(H, eps, s, lambda, T, tight()).value;
            const cd rhs = sum / (2.0 * pi * cd(0, 1) * lambda * static_cast<double>(e1));
            EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-8) << "H=" << H;
        }
}

TEST(ISigma, AlphaAndSignMatchVectorAction) {
    const SignVector eps{1, -1, -1, -1, 1, 1, 1, -1};
    const OperatorTuple sigma{Op::plus, Op::del, Op::minus, Op::del};
    PinnedIntegrand f(0.3, eps, sigma, 1.0);
    EXPECT_EQ(f.alpha(), apply_sigma(eps, sigma));
    EXPECT_EQ(f.dimension(), 6);
    EXPECT_EQ(f.sign(), -1);
    EXPECT_EQ(f.derivative_count(), 2);
}

TEST(ISigma, Domain) {
    EXPECT_THROW(eval_I_sigma(0.3, {1, -1}, {Op::del}, 70.0, 1.0), DomainError);
    EXPECT_THROW(eval_I_full(0.3, {1, 1}, 1.0, 1.0), StructuralError);
    EXPECT_THROW(eval_I_full(1.3, {1, -1}, 1.0, 1.0), DomainError);
}

TEST(U, UndampedClosedFormAgainstQuadrature) {
    // With K^q negligible the damping disappears and the Dirichlet normalizer is exact.
    UIntegralSpec s;
    s.I = 4;
    s.P = {{1, 3}};
    s.jstar = {2, 4};
    s.theta = {0, 0, 0, 0};
    s.H = 0.3;
    s.K = 1e-6;
    s.q = 3;
    s.T = 2.0;
    UOptions o;
    o.method = UMethod::quadrature;
    o.quad.rel_tol = 1e-7;
    const auto r = eval_U(s, o);
    EXPECT_NEAR(r.value, u_undamped(s), 1e-5 * u_undamped(s));
    // exponent I - l + 2H (pairs + singletons) = 4 - 2 + 0.6
    EXPECT_NEAR(r.undamped_exponent, 2.6, 1e-12);
}

TEST(U, ImportanceSamplingAgreesWithQuadrature) {
    UIntegralSpec s;
    s.I = 4;
    s.P = {{1, 3}};
    s.jstar = {2, 4};
    s.theta = {0, 0, 0, 0};
    s.H = 0.3;
    s.K = 0.8;
    s.q = 2;
    s.T = 2.0;
    UOptions mc;
    mc.rel_tol = 2e-4;
    mc.max_samples = 2'000'000;
    const auto a = eval_U(s, mc);
    UOptions qd;
    qd.method = UMethod::quadrature;
    qd.quad.rel_tol = 1e-3;
    const auto b = eval_U(s, qd);
    EXPECT_TRUE(b.converged);
    EXPECT_FALSE(a.variance_flag);
    EXPECT_NEAR(a.value, b.value, 3 * a.error + b.error);
}

TEST(U, SingletonFactorsAgainstPlainMonteCarlo) {
    UIntegralSpec s;
    s.I = 3;
    s.P = {{1}, {3}};
    s.jstar = {1, 3};
    s.theta = {1, 0, -1};
    s.H = 0.4;
    s.K = 0.7;
    s.q = 1;
    s.T = 1.5;
    const auto a = eval_U(s, {});
    UOptions qd;
    qd.method = UMethod::quadrature;
    const auto b = eval_U(s, qd);
    EXPECT_NEAR(a.value, b.value, 4 * a.error + b.error);
    // Sorted-uniform Monte Carlo as a second, unweighted estimator.
    auto f = [&](const std::vector<double>& u) {
        const double g[4] = {u[0], u[1] - u[0], u[2] - u[1], s.T - u[2]};
        return u_integrand(s, g);
    };
    const auto c = mc_simplex_integrate(f, 3, s.T, 400000, 3);
    EXPECT_NEAR(c.value, b.value, 5 * c.stderr_ + b.error);
}

TEST(U, Validation) {
    UIntegralSpec s;
    s.I = 3;
    s.P = {{1, 2}};
    s.theta = {0, 0, 0};
    EXPECT_THROW(eval_U(s), StructuralError);
    s.P = {{2}};
    s.theta = {0, 0, 1};
    EXPECT_THROW(eval_U(s), StructuralError);
    s.theta = {0, 1, 0};
    s.H = 0.6;
    EXPECT_THROW(eval_U(s), DomainError);
    s.H = 0.3;
    s.I = 0;
    s.P = {};
    s.theta = {};
    EXPECT_DOUBLE_EQ(eval_U(s).value, 1.0);
}
