#pragma once

// Numerical certification suites:
//  * the integration-by-parts identity I[eps,G] = (2 pi i lambda)^-q prod(1/eps_odd) sum_sigma I[sigma;eps,G]
//  * growth of max |I[sigma;eps,G]| in T and of |I[eps,G]| in lambda
//  * calibration and holdout validation of the SLND constants C_H and K
//  * derivative formulas and bounds for g_a
//  * a literal replay of the case analysis bounding U(I,P,J*,theta) by T^{I-l}

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbgraph/combinatorics.hpp"
#include "fbgraph/errors.hpp"
#include "fbgraph/fbm_core.hpp"
#include "fbgraph/g_analytics.hpp"
#include "fbgraph/parallel.hpp"
#include "fbgraph/rng.hpp"
#include "fbgraph/simplex_integrals.hpp"
#include "fbgraph/stats.hpp"

namespace fbgraph {

enum class Verdict { pass, fail, inconclusive };

inline std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "inconclusive";
    }
}

// Worst of a set of verdicts: inconclusive dominates fail dominates pass.
inline Verdict combine(Verdict a, Verdict b) {
    if (a == Verdict::inconclusive || b == Verdict::inconclusive) return Verdict::inconclusive;
    if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
    return Verdict::pass;
}

// ---- integration-by-parts identity ----------------------------------------

struct IdentityReport {
    int q = 0;
    SignVector eps;
    double H = 0, lambda = 0, T = 0, tol = 0;
    std::complex<double> lhs, rhs;
    double lhs_error = 0, rhs_error = 0;
    double abs_gap = 0;
    bool converged = false;
    int terms = 0;
    std::int64_t evaluations = 0;
    Verdict verdict = Verdict::inconclusive;
};

inline IdentityReport check_ibp_identity(int q, const SignVector& eps, double H, double lambda, double T, double tol,
                                         QuadratureOptions quad = {}, unsigned workers = 1) {
    detail::require_domain(q == 1 || q == 2, "identity checks are limited to q in {1,2}, requested q=" +
                                                  std::to_string(q));
    detail::require_domain(lambda != 0.0, "identity check needs lambda != 0 (prefactor 1/lambda)");
    detail::require_domain(tol > 0.0, "tolerance must be positive");
    detail::check_hurst(H);
    detail::check_sign_vector(eps);
    detail::require_structure(static_cast<int>(eps.size()) == 2 * q, "sign vector length must be 2q");
    detail::check_lambda_T(lambda, T);

    std::complex<double> pref = std::pow(1.0 / (2.0 * std::numbers::pi * std::complex<double>(0.0, 1.0) * lambda), q);
    for (int j = 0; j < q; ++j) pref /= static_cast<double>(eps[2 * j]);
    const auto sigmas = enumerate_Sigma(q);

    IdentityReport rep;
    rep.q = q;
    rep.eps = eps;
    rep.H = H;
    rep.lambda = lambda;
    rep.T = T;
    rep.tol = tol;
    rep.terms = static_cast<int>(sigmas.size());

    // Error budget: a quarter of tol for each side.
    QuadratureOptions ql = quad, qr = quad;
    ql.abs_tol = 0.25 * tol;
    ql.rel_tol = 0.0;
    qr.abs_tol = 0.25 * tol / std::max(1e-300, std::abs(pref) * static_cast<double>(sigmas.size()));
    qr.rel_tol = 0.0;

    std::vector<QuadratureResult> res(sigmas.size() + 1);
    parallel_chunks(res.size(), workers, [&](unsigned, std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k)
            res[k] = k == 0 ? eval_I_full(H, eps, lambda, T, ql) : eval_I_sigma(H, eps, sigmas[k - 1], lambda, T, qr);
    });

    rep.converged = true;
    rep.lhs = res[0].value;
    rep.lhs_error = res[0].error;
    std::complex<double> sum = 0.0;
    double err = 0.0;
    for (std::size_t k = 0; k < res.size(); ++k) {
        rep.converged = rep.converged && res[k].converged;
        rep.evaluations += res[k].evaluations;
        if (k > 0) {
            sum += res[k].value;
            err += res[k].error;
        }
    }
    rep.rhs = pref * sum;
    rep.rhs_error = std::abs(pref) * err;
    rep.abs_gap = std::abs(rep.lhs - rep.rhs);
    const double combined = rep.lhs_error + rep.rhs_error;
    if (!rep.converged || combined > tol) rep.verdict = Verdict::inconclusive;
    else rep.verdict = rep.abs_gap <= combined + tol ? Verdict::pass : Verdict::fail;
    return rep;
}

// ---- key estimate -----------------------------------------------------------

struct KeyEstimateReport {
    int q = 0;
    double H = 0;
    std::vector<double> T_list, lambda_list;
    std::vector<double> max_sigma;  // max over (lambda, eps, sigma) of |I[sigma;eps,G]| per T
    double C_q = 0;                 // anchored at the smallest T
    double max_ratio = 0;           // max_T max_sigma(T) / (C_q T^q)
    LineFit growth;                 // log max_sigma vs log T
    double band_T = 0;
    std::vector<double> lambda_scaled; // max_eps |I[eps,G]| |lambda|^q / T^q at band_T
    double lambda_band = 0;            // max / min of lambda_scaled
    bool converged = true;
    Verdict verdict = Verdict::inconclusive;
};

inline constexpr double kGrowthSlack = 0.1;
inline constexpr double kBandFactor = 2.0;

inline KeyEstimateReport check_key_estimate(int q, double H, std::vector<double> T_list, std::vector<double> lambda_list,
                                            QuadratureOptions quad = {}, unsigned workers = 1) {
    detail::require_domain(q == 1 || q == 2, "key-estimate checks are limited to q <= 2");
    detail::check_hurst(H);
    detail::require_domain(T_list.size() >= 2, "need at least two horizons for a growth fit");
    detail::require_domain(!lambda_list.empty(), "need at least one lambda");
    std::sort(T_list.begin(), T_list.end());
    for (double l : lambda_list) detail::require_domain(l != 0.0, "lambda must be nonzero");

    KeyEstimateReport rep;
    rep.q = q;
    rep.H = H;
    rep.T_list = T_list;
    rep.lambda_list = lambda_list;
    const auto A = enumerate_A(q);
    const auto S = enumerate_Sigma(q);

    struct Job {
        int t;      // index in T_list, -1 for band jobs
        double lambda, T;
        const SignVector* eps;
        const OperatorTuple* sigma; // null for I[eps,G]
    };
    std::vector<Job> jobs;
    for (std::size_t t = 0; t < T_list.size(); ++t)
        for (double l : lambda_list) {
            if (std::abs(l) * T_list[t] > kMaxLambdaT) continue;
            for (const auto& e : A)
                for (const auto& s : S) jobs.push_back({static_cast<int>(t), l, T_list[t], &e, &s});
        }
    rep.band_T = T_list.front();
    for (double l : lambda_list) {
        detail::check_lambda_T(l, rep.band_T);
        for (const auto& e : A) jobs.push_back({-1, l, rep.band_T, &e, nullptr});
    }
    std::vector<QuadratureResult> res(jobs.size());
    parallel_chunks(jobs.size(), workers, [&](unsigned, std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            const auto& j = jobs[k];
            res[k] = j.sigma ? eval_I_sigma(H, *j.eps, *j.sigma, j.lambda, j.T, quad)
                             : eval_I_full(H, *j.eps, j.lambda, j.T, quad);
        }
    });

    rep.max_sigma.assign(T_list.size(), 0.0);
    std::map<double, double> band;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        rep.converged = rep.converged && res[k].converged;
        const double v = std::abs(res[k].value);
        if (jobs[k].t >= 0) rep.max_sigma[jobs[k].t] = std::max(rep.max_sigma[jobs[k].t], v);
        else band[jobs[k].lambda] = std::max(band[jobs[k].lambda], v);
    }
    for (std::size_t t = 0; t < T_list.size(); ++t)
        detail::require_domain(rep.max_sigma[t] > 0.0, "no admissible lambda for T=" + std::to_string(T_list[t]) +
                                                           " (|lambda| T must stay <= 64)");
    rep.C_q = rep.max_sigma[0] / std::pow(T_list[0], q);
    for (std::size_t t = 0; t < T_list.size(); ++t)
        rep.max_ratio = std::max(rep.max_ratio, rep.max_sigma[t] / (rep.C_q * std::pow(T_list[t], q)));
    rep.growth = fit_loglog(T_list, rep.max_sigma);

    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double l : lambda_list) {
        const double s = band[l] * std::pow(std::abs(l), q) / std::pow(rep.band_T, q);
        rep.lambda_scaled.push_back(s);
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    rep.lambda_band = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();

    if (!rep.converged) rep.verdict = Verdict::inconclusive;
    else
        rep.verdict = (rep.growth.slope <= q + kGrowthSlack && rep.max_ratio <= kBandFactor &&
                       rep.lambda_band <= kBandFactor)
                          ? Verdict::pass
                          : Verdict::fail;
    return rep;
}

// ---- SLND calibration -------------------------------------------------------

namespace detail {

struct SlndTrial {
    std::vector<double> a;
    std::vector<double> t;
};

// Gaps log-uniform on [1e-3, 10]; coefficients from one of four families
// (real, small integers, balanced integers, prescribed tail sums with zeros).
inline SlndTrial random_slnd_trial(Philox4x64& eng, int n) {
    std::uniform_real_distribution<double> LG(std::log(1e-3), std::log(10.0));
    std::normal_distribution<double> N(0.0, 1.0);
    std::uniform_int_distribution<int> Z(-3, 3), F(0, 3);
    SlndTrial tr;
    double t = 0.0;
    for (int j = 0; j < n; ++j) {
        t += std::exp(LG(eng));
        tr.t.push_back(t);
    }
    const int fam = F(eng);
    tr.a.assign(n, 0.0);
    if (fam == 0) {
        for (auto& x : tr.a) x = N(eng);
    } else if (fam == 1 || fam == 2) {
        for (auto& x : tr.a) {
            int v = 0;
            while (v == 0) v = Z(eng);
            x = v;
        }
        if (fam == 2 && n >= 2) {
            double s = 0.0;
            for (int j = 0; j + 1 < n; ++j) s += tr.a[j];
            tr.a[n - 1] = -s;
        }
    } else {
        std::vector<double> tail(n + 1, 0.0);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        for (int j = 0; j < n; ++j) tail[j] = U(eng) < 0.3 ? 0.0 : N(eng);
        for (int j = 0; j < n; ++j) tr.a[j] = tail[j] - tail[j + 1];
    }
    return tr;
}

inline double tail_weighted_sum(double H, const std::vector<double>& a, const std::vector<double>& t) {
    double tail = 0.0, sum = 0.0;
    for (std::size_t j = a.size(); j-- > 0;) {
        tail += a[j];
        const double prev = j == 0 ? 0.0 : t[j - 1];
        sum += tail * tail * std::pow(t[j] - prev, 2.0 * H);
    }
    return sum;
}

// pi Var / sum_{J*} gap^{2H}; +inf when J* is empty.
inline double slnd_k_ratio(double H, const std::vector<double>& a, const std::vector<double>& t) {
    double den = 0.0;
    for (int i : suffix_support(a)) {
        const double prev = i >= 2 ? t[i - 2] : 0.0;
        den += std::pow(t[i - 1] - prev, 2.0 * H);
    }
    if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
    return std::numbers::pi * var_linear_comb(H, {a, t}) / den;
}

// Random local search that lowers `score` starting from a trial.
template <class Score>
SlndTrial refine_trial(SlndTrial tr, Score score, Philox4x64& eng, int steps, bool move_coefficients) {
    std::normal_distribution<double> N(0.0, 1.0);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int n = static_cast<int>(tr.t.size());
    std::vector<double> gaps(n);
    for (int j = 0; j < n; ++j) gaps[j] = tr.t[j] - (j ? tr.t[j - 1] : 0.0);
    double best = score(tr);
    for (int s = 0; s < steps; ++s) {
        auto g2 = gaps;
        auto a2 = tr.a;
        const int j = std::min(n - 1, static_cast<int>(U(eng) * n));
        if (!move_coefficients || U(eng) < 0.5) g2[j] = std::clamp(g2[j] * std::exp(0.4 * N(eng)), 1e-6, 1e3);
        else a2[j] += 0.3 * N(eng) * (1.0 + std::abs(a2[j]));
        SlndTrial cand;
        cand.a = a2;
        double t = 0.0;
        for (int k = 0; k < n; ++k) {
            t += g2[k];
            cand.t.push_back(t);
        }
        const double v = score(cand);
        if (v < best) {
            best = v;
            tr = cand;
            gaps = g2;
        }
    }
    return tr;
}

} // namespace detail

// Var / ((1/n) sum (tail sum)^2 gap^{2H}); exactly 1 when n = 1.
inline double slnd_ratio(double H, const std::vector<double>& a, const std::vector<double>& t) {
    detail::check_hurst(H);
    detail::require_domain(a.size() == t.size() && !a.empty(), "SLND ratio needs matching nonempty inputs");
    if (a.size() == 1) return 1.0;
    const double den = detail::tail_weighted_sum(H, a, t) / static_cast<double>(a.size());
    detail::require_domain(den > 0.0, "degenerate SLND configuration (all tail sums vanish)");
    return var_linear_comb(H, {a, t}) / den;
}

inline constexpr double kCalibrationSafety = 0.99;
// Both constants are kept strictly inside (0,1); shrinking either only weakens the bound.
inline constexpr double kMaxC = 0.99;
inline constexpr double kMaxK = 0.99;

struct SlndCalibration {
    double H = 0;
    int n_max = 0;
    int q_max = 0;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    double C_H = kMaxC;
    double K = kMaxK;
    std::vector<double> C_candidate_by_n; // index n; min ratio^{1/(n-1)} (NaN for n < 2)
    std::vector<double> K_candidate_by_q; // index q; min (pi Var / sum_{J*} gap^{2H})^{1/q}
    std::int64_t skipped = 0;
    int refine_steps = 0;
};


inline SlndCalibration calibrate_slnd(double H, int n_max, std::int64_t trials, std::uint64_t seed, int q_max = 3,
                                      int refine_steps = 400) {
    detail::check_hurst(H);
    detail::require_domain(n_max >= 1 && n_max <= 8, "n_max must lie in 1..8");
    detail::require_domain(q_max >= 1 && q_max <= 4, "q_max must lie in 1..4");
    detail::require_domain(trials >= 1, "need at least one trial");
    SlndCalibration cal;
    cal.C_H = kMaxC;
    cal.H = H;
    cal.n_max = n_max;
    cal.q_max = q_max;
    cal.trials = trials;
    cal.seed = seed;
    cal.refine_steps = refine_steps;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    // C_H from random configurations.
    cal.C_candidate_by_n.assign(n_max + 1, nan);
    Philox4x64 eng(seed, 1);
    constexpr int kWorst = 8;
    std::vector<std::vector<std::pair<double, detail::SlndTrial>>> worst(n_max + 1);
    auto c_score = [H](const detail::SlndTrial& tr) {
        const int n = static_cast<int>(tr.a.size());
        const double den = detail::tail_weighted_sum(H, tr.a, tr.t) / n;
        if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
        return std::pow(var_linear_comb(H, {tr.a, tr.t}) / den, 1.0 / (n - 1));
    };
    if (n_max >= 2) {
        std::uniform_int_distribution<int> Nn(2, n_max);
        for (std::int64_t k = 0; k < trials; ++k) {
            auto tr = detail::random_slnd_trial(eng, Nn(eng));
            const double c = c_score(tr);
            if (!std::isfinite(c)) {
                ++cal.skipped;
                continue;
            }
            const int n = static_cast<int>(tr.a.size());
            auto& w = worst[n];
            w.push_back({c, std::move(tr)});
            std::sort(w.begin(), w.end(), [](auto& x, auto& y) { return x.first < y.first; });
            if (w.size() > kWorst) w.pop_back();
        }
        Philox4x64 reng(seed, 2);
        for (int n = 2; n <= n_max; ++n) {
            double m = std::numeric_limits<double>::infinity();
            for (auto& [c, tr] : worst[n]) {
                const auto better = detail::refine_trial(tr, c_score, reng, refine_steps, true);
                m = std::min({m, c, c_score(better)});
            }
            cal.C_candidate_by_n[n] = m;
            if (std::isfinite(m)) cal.C_H = std::min(cal.C_H, kCalibrationSafety * m);
        }
    }

    // K from the coefficient vectors produced by reduce() for q <= q_max.
    cal.K_candidate_by_q.assign(q_max + 1, nan);
    Philox4x64 keng(seed, 3), kreng(seed, 4);
    std::uniform_real_distribution<double> LG(std::log(1e-3), std::log(10.0));
    double kmin = std::numeric_limits<double>::infinity();
    for (int q = 1; q <= q_max; ++q) {
        std::set<std::vector<int>> coeffs;
        for (const auto& e : enumerate_A(q))
            for (const auto& s : enumerate_Sigma(q)) coeffs.insert(reduce(e, s).a);
        const std::int64_t per = std::max<std::int64_t>(20, trials / static_cast<std::int64_t>(coeffs.size()));
        auto k_score = [H, q](const detail::SlndTrial& tr) {
            return std::pow(detail::slnd_k_ratio(H, tr.a, tr.t), 1.0 / q);
        };
        double m = std::numeric_limits<double>::infinity();
        for (const auto& c : coeffs) {
            if (c.empty()) continue;
            std::pair<double, detail::SlndTrial> w{std::numeric_limits<double>::infinity(), {}};
            for (std::int64_t k = 0; k < per; ++k) {
                detail::SlndTrial tr;
                tr.a.assign(c.begin(), c.end());
                double t = 0.0;
                for (std::size_t j = 0; j < c.size(); ++j) {
                    t += std::exp(LG(keng));
                    tr.t.push_back(t);
                }
                const double v = k_score(tr);
                if (!std::isfinite(v)) {
                    ++cal.skipped;
                    break;
                }
                if (v < w.first) w = {v, tr};
            }
            if (!std::isfinite(w.first)) continue;
            const auto better = detail::refine_trial(w.second, k_score, kreng, refine_steps / 4, false);
            m = std::min({m, w.first, k_score(better)});
        }
        cal.K_candidate_by_q[q] = m;
        kmin = std::min(kmin, m);
    }
    cal.K = std::min(kMaxK, kCalibrationSafety * kmin);
    return cal;
}

struct SlndHoldout {
    std::int64_t checked_C = 0, violations_C = 0;
    std::int64_t checked_K = 0, violations_K = 0;
    std::int64_t skipped = 0;
    double min_margin_C = std::numeric_limits<double>::infinity(); // min Var / slnd_rhs
    double min_margin_K = std::numeric_limits<double>::infinity(); // min pi Var / (K^q sum)
    Verdict verdict = Verdict::inconclusive;
};

// Fresh configurations (independent stream) checked against calibrated constants.
inline SlndHoldout validate_slnd(const SlndCalibration& cal, std::int64_t trials, std::uint64_t seed) {
    SlndHoldout h;
    const double H = cal.H;
    Philox4x64 eng(seed, 11);
    if (cal.n_max >= 2) {
        std::uniform_int_distribution<int> Nn(1, cal.n_max);
        for (std::int64_t k = 0; k < trials; ++k) {
            const auto tr = detail::random_slnd_trial(eng, Nn(eng));
            if (!(detail::tail_weighted_sum(H, tr.a, tr.t) > 0.0)) {
                ++h.skipped;
                continue;
            }
            const double rhs = slnd_rhs(H, cal.C_H, tr.a, tr.t);
            const double var = var_linear_comb(H, {tr.a, tr.t});
            ++h.checked_C;
            h.min_margin_C = std::min(h.min_margin_C, var / rhs);
            if (var < rhs * (1.0 - 1e-12)) ++h.violations_C;
        }
    }
    std::vector<std::pair<int, std::vector<int>>> coeffs;
    for (int q = 1; q <= cal.q_max; ++q) {
        std::set<std::vector<int>> seen;
        for (const auto& e : enumerate_A(q))
            for (const auto& s : enumerate_Sigma(q)) seen.insert(reduce(e, s).a);
        for (const auto& c : seen)
            if (!c.empty()) coeffs.push_back({q, c});
    }
    Philox4x64 keng(seed, 12);
    std::uniform_real_distribution<double> LG(std::log(1e-3), std::log(10.0));
    std::uniform_int_distribution<std::size_t> pick(0, coeffs.size() - 1);
    for (std::int64_t k = 0; k < trials && !coeffs.empty(); ++k) {
        const auto& [q, c] = coeffs[pick(keng)];
        GaConfig cfg;
        cfg.H = H;
        cfg.a.assign(c.begin(), c.end());
        double t = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) {
            t += std::exp(LG(keng));
            cfg.s.push_back(t);
        }
        // Compare exponents: pi g_a(s) <= -K^q sum_{J*} gap^{2H}.
        const double lhs = std::numbers::pi * g_value(cfg);
        const double rhs = std::log(slnd_exp_bound(H, cfg.a, cfg.s, cal.K, q));
        const double bound_sum = -rhs;
        ++h.checked_K;
        if (bound_sum > 0.0) h.min_margin_K = std::min(h.min_margin_K, -lhs / bound_sum);
        if (std::isfinite(rhs) && lhs > rhs + 1e-12 * std::abs(rhs)) ++h.violations_K;
    }
    h.verdict = (h.violations_C == 0 && h.violations_K == 0) ? Verdict::pass : Verdict::fail;
    return h;
}

// ---- derivative suite ---------------------------------------------------------

struct DerivativeSuiteReport {
    double H = 0;
    int trials = 0;
    std::uint64_t seed = 0;
    double grad_max_rel = 0, hess_max_rel = 0;
    double third_fd_max = 0;        // |finite-difference third mixed| relative to the Hessian scale
    bool third_exact_zero = true;   // the library value for distinct triples is exactly 0
    std::int64_t bound_checks = 0, bound_violations = 0;
    Verdict verdict = Verdict::inconclusive;
};

inline constexpr double kDerivativeRelTol = 1e-4;

namespace detail {

// Central-difference mixed partial over distinct indices (0-based) of
// g = -sum_{k,l} a_k a_l cov(s_k, s_l). The stencil is applied term by term so
// terms untouched by the perturbation cancel exactly instead of adding rounding.
inline long double fd_mixed_long(double H, const std::vector<double>& a, const std::vector<double>& s,
                                 const std::vector<int>& idx, long double h) {
    const int m = static_cast<int>(idx.size());
    const long double h2 = 2.0L * H;
    const int n = static_cast<int>(s.size());
    long double acc = 0.0L;
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
            bool touched = false;
            for (int x : idx) touched = touched || x == k || x == l;
            if (!touched) continue;
            long double term = 0.0L;
            for (int mask = 0; mask < (1 << m); ++mask) {
                long double sk = s[k], sl = s[l];
                int sign = 1;
                for (int r = 0; r < m; ++r) {
                    const bool plus = (mask >> r) & 1;
                    const long double d = plus ? h : -h;
                    if (idx[r] == k) sk += d;
                    if (idx[r] == l) sl += d;
                    if (!plus) sign = -sign;
                }
                term += sign * 0.5L * (std::pow(sk, h2) + std::pow(sl, h2) - std::pow(std::abs(sk - sl), h2));
            }
            acc -= static_cast<long double>(a[k]) * a[l] * term;
        }
    return acc / std::pow(2.0L * h, m);
}

// Balanced configuration with I in 2..8 and all gaps >= 1e-2.
inline GaConfig random_balanced_config(Philox4x64& eng, double H) {
    std::uniform_int_distribution<int> In(2, 8), Z(-3, 3), F(0, 1);
    std::uniform_real_distribution<double> LG(std::log(1e-2), 0.0);
    std::normal_distribution<double> N(0.0, 1.0);
    GaConfig c;
    c.H = H;
    const int I = In(eng);
    const bool integer = F(eng) == 0;
    for (;;) {
        c.a.clear();
        c.s.clear();
        double t = 0.0, sum = 0.0;
        for (int i = 0; i < I; ++i) {
            t += std::exp(LG(eng));
            c.s.push_back(t);
            double x = 0;
            if (integer)
                while (x == 0) x = Z(eng);
            else
                x = N(eng);
            if (i + 1 == I) x = -sum;
            sum += x;
            c.a.push_back(x);
        }
        if (std::abs(c.a.back()) > 1e-3) return c;
    }
}

} // namespace detail

inline DerivativeSuiteReport check_derivative_suite(double H, int trials, std::uint64_t seed,
                                                    std::int64_t bound_trials = 10'000) {
    detail::check_hurst(H);
    detail::require_domain(trials >= 1, "need at least one trial");
    DerivativeSuiteReport rep;
    rep.H = H;
    rep.trials = trials;
    rep.seed = seed;
    Philox4x64 eng(seed, 21);
    for (int k = 0; k < trials; ++k) {
        const auto c = detail::random_balanced_config(eng, H);
        const int I = static_cast<int>(c.a.size());
        double min_gap = c.s[0];
        for (int i = 1; i < I; ++i) min_gap = std::min(min_gap, c.s[i] - c.s[i - 1]);
        // Step sizes balance truncation against rounding for first and second differences.
        const long double h = 1e-5L * min_gap, hh = 1e-3L * min_gap;
        const auto g = grad_g(c);
        std::vector<double> fd(I);
        double scale = 0.0;
        for (int i = 0; i < I; ++i) {
            fd[i] = static_cast<double>(detail::fd_mixed_long(H, c.a, c.s, {i}, h));
            scale = std::max(scale, std::abs(fd[i]));
        }
        // Relative to the entry, floored at 1e-6 of the vector scale so exact cancellations do not divide by 0.
        for (int i = 0; i < I; ++i)
            rep.grad_max_rel = std::max(rep.grad_max_rel, std::abs(g[i] - fd[i]) / std::max(std::abs(fd[i]), 1e-6 * scale));
        const auto hs = hess_g(c);
        double hscale = 0.0;
        for (int i = 0; i < I; ++i)
            for (int j = i + 1; j < I; ++j) {
                const double f2 = static_cast<double>(detail::fd_mixed_long(H, c.a, c.s, {i, j}, hh));
                hscale = std::max(hscale, std::abs(f2));
                rep.hess_max_rel = std::max(rep.hess_max_rel, std::abs(hs[i][j] - f2) / std::max(std::abs(f2), 1e-300));
            }
        if (I >= 3) {
            std::vector<int> idx{0, I / 2, I - 1};
            if (mixed_partial(c, {idx[0] + 1, idx[1] + 1, idx[2] + 1}) != 0.0) rep.third_exact_zero = false;
            const long double h3 = 0.25L * min_gap;
            const double f3 = static_cast<double>(detail::fd_mixed_long(H, c.a, c.s, idx, h3));
            rep.third_fd_max = std::max(rep.third_fd_max, std::abs(f3) / std::max(1.0, hscale));
        }
    }
    if (H < 0.5) {
        Philox4x64 beng(seed, 22);
        for (std::int64_t k = 0; k < bound_trials; ++k) {
            const auto c = detail::random_balanced_config(beng, H);
            const auto b = derivative_bounds(c);
            const auto g = grad_g(c);
            const auto hs = hess_g(c);
            const int I = static_cast<int>(c.a.size());
            for (int i = 0; i < I; ++i) {
                ++rep.bound_checks;
                if (std::abs(g[i]) > b.grad[i] * (1 + 1e-12)) ++rep.bound_violations;
                for (int j = 0; j < I; ++j) {
                    if (j == i) continue;
                    ++rep.bound_checks;
                    if (std::abs(hs[i][j]) > b.hess[i][j] * (1 + 1e-12)) ++rep.bound_violations;
                }
            }
        }
    }
    const bool ok = rep.grad_max_rel <= kDerivativeRelTol && rep.hess_max_rel <= kDerivativeRelTol &&
                    rep.third_exact_zero && rep.third_fd_max <= 1e-6 && rep.bound_violations == 0;
    rep.verdict = ok ? Verdict::pass : Verdict::fail;
    return rep;
}

// ---- U recursion tracer -------------------------------------------------------

struct TraceStep {
    int k = 0;           // 0 for the s_I step, then 1..iterations, then the final single variable
    int i = 0;           // highest variable integrated in this step
    std::string label;   // "4a", "4b", "1a", "1b", "2a", "2b", "3", "last"
    std::string detail;  // which inequality / J* branch was used
    bool cond_i2plus = false; // {i-2} in P and theta_{i-2} = 1 before the step
    int ell_k = 0;
    int t_exponent = 0;
    int I_after = 0;
    PairPartition P_after;
    std::vector<int> jstar_after;
    ThetaVector theta_after;
};

struct BoundCertificate {
    UIntegralSpec config;
    int ell = 0;
    int pairs = 0, singletons = 0;
    int iterations = 0;          // two-variable rounds
    int claimed_T_exponent = 0;  // I - l
    int raw_T_exponent = 0;      // sum of the per-step exponents (I - l or I - l - 1)
    std::vector<TraceStep> case_trace;
    double fitted_exponent = std::numeric_limits<double>::quiet_NaN();
    double fit_r_squared = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline int block_of(const PairPartition& P, int x) {
    for (std::size_t b = 0; b < P.size(); ++b)
        if (std::find(P[b].begin(), P[b].end(), x) != P[b].end()) return static_cast<int>(b);
    return -1;
}

inline bool has(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

inline std::vector<int> jstar_upto(const std::vector<int>& J, int n) {
    std::vector<int> out;
    for (int j : J)
        if (j <= n) out.push_back(j);
    return out;
}

[[noreturn]] inline void trace_fail(int k, int i, const std::string& why) {
    throw StructuralError("U recursion, iteration " + std::to_string(k) + " (i=" + std::to_string(i) + "): " + why);
}

} // namespace detail

inline BoundCertificate trace_U_recursion(const UIntegralSpec& spec) {
    detail::validate_u_spec(spec);
    const int I = spec.I;
    BoundCertificate cert;
    cert.config = spec;
    std::vector<bool> tau(I + 2, false);
    for (const auto& b : spec.P) {
        for (int x : b) tau[x] = true;
        (b.size() == 2 ? cert.pairs : cert.singletons)++;
    }
    for (int x = 1; x <= I; ++x) cert.ell += tau[x] ? 1 : 0;
    cert.claimed_T_exponent = I - cert.ell;
    if (I == 0) return cert;

    // Step for s_I.
    if (tau[I]) detail::trace_fail(0, I, "the last variable is a differentiation variable");
    if (!detail::has(spec.jstar, I)) detail::trace_fail(0, I, "I is not in J*");
    PairPartition P = spec.P;
    ThetaVector theta = spec.theta;
    std::vector<int> J = spec.jstar;
    {
        TraceStep st;
        st.k = 0;
        st.i = I;
        const bool a = I >= 2 && tau[I - 1] && is_singleton_in(P, I - 1) && theta[I - 2] == 1;
        st.label = a ? "4a" : "4b";
        st.detail = a ? "int s^{2H-1} exp(-K^q s^{2H}) ds <= C^q" : "int exp(-K^q s^{2H}) ds <= C^q";
        const bool last_plus = I >= 2 && theta[I - 2] == 1;
        theta.resize(I - 1);
        if (last_plus) theta.back() = 0;
        J = detail::jstar_upto(J, I - 1);
        st.I_after = I - 1;
        st.P_after = P;
        st.jstar_after = J;
        st.theta_after = theta;
        cert.case_trace.push_back(st);
    }
    int cur = I - 1;
    cert.iterations = cur / 2;
    int ell_sum = 0;
    for (int k = 1; k <= cert.iterations; ++k) {
        const int i = cur;
        TraceStep st;
        st.k = k;
        st.i = i;
        st.cond_i2plus = i >= 3 && is_singleton_in(P, i - 2) && theta[i - 3] == 1;
        const bool d1 = tau[i - 1], d2 = tau[i];
        int add_e = 0; // j receiving theta_j += 1
        auto in_jstar = [&](int x) { return detail::has(J, x); };
        auto jstar_branch = [&]() -> std::string {
            if (in_jstar(i)) return "i in J*";
            if (in_jstar(i - 1)) return "i-1 in J*";
            detail::trace_fail(k, i, "neither i nor i-1 lies in J*");
        };
        if (d1 && d2) detail::trace_fail(k, i, "two adjacent differentiation variables");
        if (d1) {
            st.ell_k = 1;
            const auto& B = P[detail::block_of(P, i - 1)];
            if (B.size() == 1) {
                st.label = "1a";
                st.detail = jstar_branch();
            } else {
                const int j = B[0] == i - 1 ? B[1] : B[0];
                if (!(j < i - 2)) detail::trace_fail(k, i, "case 1b partner j=" + std::to_string(j) + " is not < i-2");
                st.label = "1b";
                st.detail = "partner j=" + std::to_string(j) + ", theta_j += 1";
                add_e = j;
            }
        } else if (d2) {
            st.ell_k = 1;
            const auto& B = P[detail::block_of(P, i)];
            if (B.size() == 1) {
                if (theta[i - 1] == 1) detail::trace_fail(k, i, "case 2a with theta_i = +1");
                st.label = "2a";
                st.detail = jstar_branch();
            } else {
                const int j = B[0] == i ? B[1] : B[0];
                if (j > i) detail::trace_fail(k, i, "pair partner beyond the remaining variables");
                if (j == i - 1) detail::trace_fail(k, i, "pair of adjacent variables");
                if (st.cond_i2plus && !(j < i - 2)) detail::trace_fail(k, i, "case 2b under (i-2:+) with j >= i-2");
                st.label = "2b";
                if (j < i - 2) {
                    st.detail = "partner j=" + std::to_string(j) + " < i-2, theta_j += 1";
                    add_e = j;
                } else {
                    st.detail = "partner j=i-2, diagonal avoided";
                }
            }
        } else {
            st.ell_k = 0;
            st.label = "3";
            st.detail = st.cond_i2plus ? "(s_{i-1}-s_{i-2})^{2H-1} integrated" : "plain volume";
        }
        if (st.cond_i2plus && st.label == "2a") st.detail += ", (i-2:+)";
        if (st.cond_i2plus && st.label == "2b") st.detail += ", (i-2:+)";
        st.t_exponent = 2 - st.ell_k;
        ell_sum += st.ell_k;

        // Parameter update.
        const int next = i - 2;
        const bool last_plus = next >= 1 && theta[next - 1] == 1;
        ThetaVector th(theta.begin(), theta.begin() + next);
        if (last_plus) th.back() = 0;
        if (add_e) {
            if (th[add_e - 1] != 0) detail::trace_fail(k, i, "theta_j already nonzero for the partner j");
            th[add_e - 1] = 1;
        }
        PairPartition P2;
        for (const auto& B : P) {
            Block nb;
            for (int x : B)
                if (x < i - 1) nb.push_back(x);
                else if (x > i) detail::trace_fail(k, i, "block index beyond remaining variables");
            if (!nb.empty()) P2.push_back(nb);
        }
        P = P2;
        theta = th;
        J = detail::jstar_upto(J, next);
        cur = next;
        st.I_after = cur;
        st.P_after = P;
        st.jstar_after = J;
        st.theta_after = theta;
        cert.case_trace.push_back(st);
    }
    if (cur == 1) {
        if (theta[0] != 0) detail::trace_fail(cert.iterations + 1, 1, "singular factor left on the last variable");
        TraceStep st;
        st.k = cert.iterations + 1;
        st.i = 1;
        st.label = "last";
        st.detail = "int_0^T ds <= T";
        st.t_exponent = 1;
        st.I_after = 0;
        cert.case_trace.push_back(st);
        if (tau[1]) ++ell_sum;
    }
    if (ell_sum != cert.ell) detail::trace_fail(-1, 0, "differentiation count mismatch in the ell_k sums");
    for (const auto& st : cert.case_trace) cert.raw_T_exponent += st.t_exponent;
    if (cert.raw_T_exponent > cert.claimed_T_exponent || cert.raw_T_exponent < cert.claimed_T_exponent - 1)
        detail::trace_fail(-1, 0, "accumulated exponent " + std::to_string(cert.raw_T_exponent) +
                                      " inconsistent with I - l = " + std::to_string(cert.claimed_T_exponent));
    return cert;
}

// ---- U enumeration and growth -------------------------------------------------

struct EnumeratedU {
    UIntegralSpec spec;
    SignVector eps;        // first (eps, sigma) producing this spec
    OperatorTuple sigma;
    int multiplicity = 0;  // number of (eps, sigma, P, theta) tuples producing it
};

// Every distinct U(I, P, J*, theta) arising from eps in A_2q, sigma in Sigma(q), q <= q_max.
inline std::vector<EnumeratedU> enumerate_u_specs(int q_max, double H, double K) {
    detail::require_domain(q_max >= 1 && q_max <= 4, "U enumeration supports q <= 4");
    std::vector<EnumeratedU> out;
    std::map<std::string, std::size_t> index;
    for (int q = 1; q <= q_max; ++q)
        for (const auto& e : enumerate_A(q))
            for (const auto& s : enumerate_Sigma(q)) {
                const auto r = reduce(e, s);
                for (const auto& P : partitions_p2(r.p))
                    for (const auto& th : theta_set(P, r.I())) {
                        UIntegralSpec u;
                        u.I = r.I();
                        u.P = P;
                        u.jstar = r.jstar;
                        u.theta = th;
                        u.H = H;
                        u.K = K;
                        u.q = q;
                        u.T = 1.0;
                        auto key = to_json(u).dump();
                        auto it = index.find(key);
                        if (it == index.end()) {
                            index[key] = out.size();
                            out.push_back({u, e, s, 1});
                        } else {
                            ++out[it->second].multiplicity;
                        }
                    }
            }
    return out;
}

struct UGrowthRecord {
    BoundCertificate cert;
    std::vector<double> T, value, error;
    bool trace_ok = false;
    bool growth_ok = false;     // fitted exponent <= I - l + slack over the fit horizons
    bool invariant_ok = false;  // U(T)/T^{I-l} <= 2 U(1) on every horizon >= 1
    bool small_T_ok = false;    // U(T) <= U(1) T^{I-l} for T < 1
    bool converged = true;
    std::string error_message;
};

struct UGrowthOptions {
    std::vector<double> fit_T{1, 2, 4, 8};
    std::vector<double> extra_T{16};
    std::vector<double> small_T{0.25, 0.5};
    double slack = 0.15;
    UOptions u{};
};

inline UGrowthRecord u_growth(const UIntegralSpec& spec, const UGrowthOptions& opt) {
    UGrowthRecord rec;
    try {
        rec.cert = trace_U_recursion(spec);
        rec.trace_ok = rec.cert.claimed_T_exponent == spec.I - rec.cert.ell;
    } catch (const StructuralError& e) {
        rec.cert.config = spec;
        rec.error_message = e.what();
        return rec;
    }
    std::vector<double> Ts = opt.small_T;
    Ts.insert(Ts.end(), opt.fit_T.begin(), opt.fit_T.end());
    Ts.insert(Ts.end(), opt.extra_T.begin(), opt.extra_T.end());
    std::sort(Ts.begin(), Ts.end());
    Ts.erase(std::unique(Ts.begin(), Ts.end()), Ts.end());
    detail::require_domain(std::find(Ts.begin(), Ts.end(), 1.0) != Ts.end(), "growth checks need T = 1");
    for (double T : Ts) {
        auto s = spec;
        s.T = T;
        // Same seed on every horizon: the proposal is scale free, so the draws are shared.
        const auto r = eval_U(s, opt.u);
        rec.T.push_back(T);
        rec.value.push_back(r.value);
        rec.error.push_back(r.error);
        rec.converged = rec.converged && r.converged && !r.variance_flag;
    }
    const int e = rec.cert.claimed_T_exponent;
    std::vector<double> fx, fy;
    double u1 = 0, e1 = 0;
    for (std::size_t k = 0; k < rec.T.size(); ++k) {
        if (rec.T[k] == 1.0) {
            u1 = rec.value[k];
            e1 = rec.error[k];
        }
        if (std::find(opt.fit_T.begin(), opt.fit_T.end(), rec.T[k]) != opt.fit_T.end()) {
            fx.push_back(rec.T[k]);
            fy.push_back(rec.value[k]);
        }
    }
    const auto fit = fit_loglog(fx, fy);
    rec.cert.fitted_exponent = fit.slope;
    rec.cert.fit_r_squared = fit.r_squared;
    rec.growth_ok = rec.trace_ok && fit.slope <= e + opt.slack;
    rec.invariant_ok = true;
    rec.small_T_ok = true;
    for (std::size_t k = 0; k < rec.T.size(); ++k) {
        const double T = rec.T[k], v = rec.value[k];
        const double noise = 3.0 * (rec.error[k] + e1 * std::pow(T, e));
        if (T >= 1.0 && v / std::pow(T, e) > 2.0 * u1 + noise / std::pow(T, e)) rec.invariant_ok = false;
        if (T < 1.0 && v > u1 * std::pow(T, e) + noise) rec.small_T_ok = false;
    }
    return rec;
}

struct UGrowthSuite {
    int q_max = 0;
    double H = 0, K = 0;
    std::vector<EnumeratedU> specs;
    std::vector<UGrowthRecord> records;
    int trace_failures = 0, growth_failures = 0, invariant_failures = 0, small_T_failures = 0, unconverged = 0;
    double worst_excess = -std::numeric_limits<double>::infinity(); // max(fitted - (I - l))
    Verdict verdict = Verdict::inconclusive;
};

inline UGrowthSuite run_u_growth_suite(int q_max, double H, double K, const UGrowthOptions& opt = {},
                                       unsigned workers = 1) {
    UGrowthSuite suite;
    suite.q_max = q_max;
    suite.H = H;
    suite.K = K;
    suite.specs = enumerate_u_specs(q_max, H, K);
    suite.records.resize(suite.specs.size());
    parallel_chunks(suite.specs.size(), workers, [&](unsigned, std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
            auto o = opt;
            o.u.seed = opt.u.seed + k;
            suite.records[k] = u_growth(suite.specs[k].spec, o);
        }
    });
    for (const auto& r : suite.records) {
        if (!r.trace_ok) ++suite.trace_failures;
        // A growth failure only counts when the estimates behind it converged.
        if (r.trace_ok && r.converged && !r.growth_ok) ++suite.growth_failures;
        if (!r.invariant_ok) ++suite.invariant_failures;
        if (!r.small_T_ok) ++suite.small_T_failures;
        if (!r.converged) ++suite.unconverged;
        if (r.trace_ok)
            suite.worst_excess = std::max(suite.worst_excess, r.cert.fitted_exponent - r.cert.claimed_T_exponent);
    }
    if (suite.trace_failures > 0 || suite.growth_failures > 0) suite.verdict = Verdict::fail;
    else suite.verdict = suite.unconverged > 0 ? Verdict::inconclusive : Verdict::pass;
    return suite;
}

// ---- JSON ---------------------------------------------------------------------

inline nlohmann::json complex_json(std::complex<double> z) { return {{"re", z.real()}, {"im", z.imag()}}; }

inline nlohmann::json to_json(const IdentityReport& r) {
    return {{"q", r.q},
            {"eps", r.eps},
            {"H", r.H},
            {"lambda", r.lambda},
            {"T", r.T},
            {"tol", r.tol},
            {"lhs", complex_json(r.lhs)},
            {"lhs_error", r.lhs_error},
            {"rhs", complex_json(r.rhs)},
            {"rhs_error", r.rhs_error},
            {"abs_gap", r.abs_gap},
            {"converged", r.converged},
            {"terms", r.terms},
            {"evaluations", r.evaluations},
            {"verdict", to_string(r.verdict)}};
}

inline nlohmann::json to_json(const LineFit& f) {
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}, {"n", f.n}};
}

inline nlohmann::json to_json(const KeyEstimateReport& r) {
    return {{"q", r.q},
            {"H", r.H},
            {"T", r.T_list},
            {"lambda", r.lambda_list},
            {"max_abs_I_sigma", r.max_sigma},
            {"C_q", r.C_q},
            {"max_ratio", r.max_ratio},
            {"growth", to_json(r.growth)},
            {"band_T", r.band_T},
            {"lambda_scaled", r.lambda_scaled},
            {"lambda_band", r.lambda_band},
            {"converged", r.converged},
            {"verdict", to_string(r.verdict)}};
}

inline nlohmann::json to_json(const SlndCalibration& c) {
    auto clean = [](const std::vector<double>& v) {
        nlohmann::json j = nlohmann::json::array();
        for (double x : v) j.push_back(std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr));
        return j;
    };
    return {{"H", c.H},
            {"n_max", c.n_max},
            {"q_max", c.q_max},
            {"trials", c.trials},
            {"seed", c.seed},
            {"C_H", c.C_H},
            {"K", c.K},
            {"C_candidate_by_n", clean(c.C_candidate_by_n)},
            {"K_candidate_by_q", clean(c.K_candidate_by_q)},
            {"skipped", c.skipped},
            {"refine_steps", c.refine_steps}};
}

inline nlohmann::json to_json(const SlndHoldout& h) {
    auto fin = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
    return {{"checked_C", h.checked_C},
            {"violations_C", h.violations_C},
            {"checked_K", h.checked_K},
            {"violations_K", h.violations_K},
            {"skipped", h.skipped},
            {"min_margin_C", fin(h.min_margin_C)},
            {"min_margin_K", fin(h.min_margin_K)},
            {"verdict", to_string(h.verdict)}};
}

inline nlohmann::json to_json(const DerivativeSuiteReport& r) {
    return {{"H", r.H},
            {"trials", r.trials},
            {"seed", r.seed},
            {"grad_max_rel", r.grad_max_rel},
            {"hess_max_rel", r.hess_max_rel},
            {"third_fd_max", r.third_fd_max},
            {"third_exact_zero", r.third_exact_zero},
            {"bound_checks", r.bound_checks},
            {"bound_violations", r.bound_violations},
            {"verdict", to_string(r.verdict)}};
}

inline nlohmann::json to_json(const TraceStep& s) {
    return {{"k", s.k},
            {"i", s.i},
            {"case", s.label},
            {"detail", s.detail},
            {"cond_i2plus", s.cond_i2plus},
            {"ell_k", s.ell_k},
            {"t_exponent", s.t_exponent},
            {"I_after", s.I_after},
            {"P_after", s.P_after},
            {"jstar_after", s.jstar_after},
            {"theta_after", s.theta_after}};
}

inline nlohmann::json to_json(const BoundCertificate& c) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : c.case_trace) steps.push_back(to_json(s));
    auto fin = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
    return {{"config", to_json(c.config)},
            {"ell", c.ell},
            {"pairs", c.pairs},
            {"singletons", c.singletons},
            {"iterations", c.iterations},
            {"claimed_T_exponent", c.claimed_T_exponent},
            {"raw_T_exponent", c.raw_T_exponent},
            {"case_trace", steps},
            {"fitted_exponent", fin(c.fitted_exponent)},
            {"fit_r_squared", fin(c.fit_r_squared)}};
}

inline nlohmann::json to_json(const UGrowthRecord& r) {
    return {{"certificate", to_json(r.cert)},
            {"T", r.T},
            {"value", r.value},
            {"error", r.error},
            {"trace_ok", r.trace_ok},
            {"growth_ok", r.growth_ok},
            {"invariant_ok", r.invariant_ok},
            {"small_T_ok", r.small_T_ok},
            {"converged", r.converged},
            {"error_message", r.error_message}};
}

inline nlohmann::json to_json(const UGrowthSuite& s) {
    nlohmann::json recs = nlohmann::json::array();
    for (std::size_t k = 0; k < s.records.size(); ++k) {
        auto j = to_json(s.records[k]);
        j["eps"] = s.specs[k].eps;
        j["sigma"] = sigma_to_json(s.specs[k].sigma);
        j["multiplicity"] = s.specs[k].multiplicity;
        recs.push_back(j);
    }
    return {{"q_max", s.q_max},
            {"H", s.H},
            {"K", s.K},
            {"configurations", s.records.size()},
            {"trace_failures", s.trace_failures},
            {"growth_failures", s.growth_failures},
            {"invariant_failures", s.invariant_failures},
            {"small_T_failures", s.small_T_failures},
            {"unconverged", s.unconverged},
            {"worst_excess", s.worst_excess},
            {"records", recs},
            {"verdict", to_string(s.verdict)}};
}

} // namespace fbgraph
