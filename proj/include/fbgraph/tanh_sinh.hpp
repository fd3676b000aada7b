#pragma once

// Iterated tanh-sinh quadrature over the ordered simplex
//   0 < u_1 < ... < u_D < T
// written in gap coordinates g_k = u_k - u_{k-1} (g_{D+1} = T - u_D is the slack).
// Each node of the 1-D rule carries both distances to the interval ends, so
// gaps of order 1e-100 are represented exactly and endpoint power singularities
// are integrated without cancellation.

#include <cmath>
#include <complex>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "fbgraph/errors.hpp"

namespace fbgraph {

struct QuadratureOptions {
    double abs_tol = 1e-8;
    double rel_tol = 1e-6;
    int min_level = 1;            // step h = 2^-level
    int max_level = 10;          // high levels only reachable in low dimension (budget)
    std::int64_t max_evaluations = 400'000'000;
    int max_dimension = 6;
};

struct QuadratureResult {
    std::complex<double> value{};
    double error = 0.0;             // |I_L - I_{L-1}| of the last two levels
    bool converged = false;
    std::int64_t evaluations = 0;
    int level = 0;
    std::string method = "tanh-sinh";
};

struct TanhSinhNode {
    double left;   // distance to 0 on [0,1]
    double right;  // distance to 1 on [0,1]
    double weight;
};

inline constexpr double kTanhSinhTmax = 5.0; // smallest node distance ~ 1e-101

inline const std::vector<TanhSinhNode>& tanh_sinh_rule(int level) {
    static std::mutex mu;
    static std::vector<std::vector<TanhSinhNode>> cache;
    std::lock_guard<std::mutex> lock(mu);
    if (static_cast<int>(cache.size()) <= level) cache.resize(level + 1);
    auto& rule = cache[level];
    if (!rule.empty()) return rule;
    const double h = std::ldexp(1.0, -level);
    const int kmax = static_cast<int>(std::floor(kTanhSinhTmax / h));
    const double half_pi = 0.5 * std::numbers::pi;
    for (int k = -kmax; k <= kmax; ++k) {
        const double t = k * h;
        const double u = half_pi * std::sinh(t);
        const double e = std::exp(-2.0 * std::abs(u)); // in (0,1]
        const double near = e / (1.0 + e);
        const double far = 1.0 / (1.0 + e);
        // dx/dt = (pi/2) cosh t / (2 cosh^2 u), cosh^2 u = (1+e)^2 / (4e)
        const double w = h * half_pi * std::cosh(t) * 2.0 * e / ((1.0 + e) * (1.0 + e));
        rule.push_back(u < 0 ? TanhSinhNode{near, far, w} : TanhSinhNode{far, near, w});
    }
    return rule;
}

namespace detail {

template <class F>
struct SimplexGapIntegrator {
    F& f;
    int D;
    const std::vector<TanhSinhNode>* rule;
    std::vector<double> gaps;
    std::int64_t evals = 0;

    // gaps[d..D] are chosen with remaining length R.
    std::complex<double> level(int d, double R) {
        std::complex<double> sum = 0.0;
        if (!(R > 0.0)) return sum;
        for (const auto& nd : *rule) {
            const double g = R * nd.left;
            const double rest = R * nd.right;
            if (!(g > 0.0) || !(rest > 0.0)) continue;
            gaps[d] = g;
            std::complex<double> v;
            if (d == D - 1) {
                gaps[D] = rest;
                v = f(gaps.data());
                ++evals;
            } else {
                v = level(d + 1, rest);
            }
            if (std::isfinite(v.real()) && std::isfinite(v.imag())) sum += (R * nd.weight) * v;
        }
        return sum;
    }
};

} // namespace detail

inline std::int64_t tanh_sinh_cost(int D, int level) {
    const auto n = static_cast<std::int64_t>(tanh_sinh_rule(level).size());
    std::int64_t c = 1;
    for (int d = 0; d < D; ++d) c *= n;
    return c;
}

// f(const double* gaps) -> std::complex<double>; gaps has D+1 entries (last = slack).
template <class F>
QuadratureResult integrate_simplex_gaps(F&& f, int D, double T, const QuadratureOptions& opt = {}) {
    detail::require_domain(T > 0.0, "simplex horizon T must be positive");
    detail::require_resource(D <= opt.max_dimension, "deterministic simplex quadrature limited to dimension " +
                                                         std::to_string(opt.max_dimension) + ", requested " +
                                                         std::to_string(D));
    QuadratureResult res;
    if (D == 0) {
        double g = T;
        res.value = f(&g);
        res.converged = true;
        res.evaluations = 1;
        return res;
    }
    std::complex<double> prev;
    bool have_prev = false;
    for (int L = opt.min_level; L <= opt.max_level; ++L) {
        if (res.evaluations + tanh_sinh_cost(D, L) > opt.max_evaluations) break;
        detail::SimplexGapIntegrator<std::remove_reference_t<F>> integ{f, D, &tanh_sinh_rule(L),
                                                                       std::vector<double>(D + 1, 0.0)};
        const auto v = integ.level(0, T);
        res.evaluations += integ.evals;
        res.level = L;
        res.value = v;
        if (have_prev) {
            res.error = std::abs(v - prev);
            if (res.error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(v))) {
                res.converged = true;
                return res;
            }
        } else {
            res.error = std::abs(v);
        }
        prev = v;
        have_prev = true;
    }
    return res;
}

} // namespace fbgraph
