#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "fbgraph/tanh_sinh.hpp"

using namespace fbgraph;

TEST(TanhSinh, RuleIntegratesPolynomialsOnUnitInterval) {
    for (int level = 1; level <= 5; ++level) {
        double s0 = 0, s3 = 0;
        for (const auto& n : tanh_sinh_rule(level)) {
            EXPECT_NEAR(n.left + n.right, 1.0, 1e-15);
            s0 += n.weight;
            s3 += n.weight * n.left * n.left * n.left;
        }
        const double tol = level == 1 ? 1e-3 : level == 2 ? 1e-10 : 1e-14;
        EXPECT_NEAR(s0, 1.0, tol);
        EXPECT_NEAR(s3, 0.25, tol);
    }
}

TEST(TanhSinh, EndpointSingularityOneDim) {
    // int_0^T x^{-0.8} dx = 5 T^{0.2}
    auto f = [](const double* g) { return std::complex<double>(std::pow(g[0], -0.8), 0.0); };
    const auto r = integrate_simplex_gaps(f, 1, 2.0, {});
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value.real(), 5 * std::pow(2.0, 0.2), 1e-9);
}

TEST(TanhSinh, SimplexVolumes) {
    auto one = [](const double*) { return std::complex<double>(1.0, 0.0); };
    for (int D = 1; D <= 4; ++D) {
        const double T = 1.5;
        double vol = std::pow(T, D);
        for (int k = 2; k <= D; ++k) vol /= k;
        const auto r = integrate_simplex_gaps(one, D, T, {});
        EXPECT_TRUE(r.converged);
        EXPECT_NEAR(r.value.real(), vol, 1e-12 * vol);
    }
}

// 2-D singular kernel checked against Boost's adaptive Gauss-Kronrod on the
// equivalent 1-D form int_0^T (T - r) r^{-0.9} cos(3 r) dr, with r = v^10
// removing the singularity before Gauss-Kronrod sees it.
TEST(TanhSinh, TwoDimSingularKernelAgainstGaussKronrod) {
    const double T = 1.3;
    auto f = [](const double* g) { return std::complex<double>(std::pow(g[1], -0.9) * std::cos(3 * g[1]), 0.0); };
    const auto r = integrate_simplex_gaps(f, 2, T, {});
    auto h = [T](double v) {
        const double x = std::pow(v, 10.0);
        return (T - x) * 10.0 * std::cos(3 * x);
    };
    const double ref =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(h, 0.0, std::pow(T, 0.1), 15, 1e-13);
    EXPECT_TRUE(r.converged);
    EXPECT_NEAR(r.value.real(), ref, 1e-7 * std::abs(ref));
}

TEST(TanhSinh, BudgetAndDimensionCap) {
    auto one = [](const double*) { return std::complex<double>(1.0, 0.0); };
    QuadratureOptions o;
    o.max_evaluations = 100;
    const auto r = integrate_simplex_gaps(one, 3, 1.0, o);
    EXPECT_FALSE(r.converged);
    EXPECT_THROW(integrate_simplex_gaps(one, 7, 1.0, {}), ResourceError);
    EXPECT_THROW(integrate_simplex_gaps(one, 2, 0.0, {}), DomainError);
}
