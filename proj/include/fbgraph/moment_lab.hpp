#pragma once

// Fourier moments of the graph measure mu_G and the image measure nu of an
// fBm path on [0,1]:
//   mu_hat(xi) = int_0^1 exp(-2 pi i (xi1 t + xi2 B_t)) dt,   nu_hat(xi2) = mu_hat(0, xi2).
// Monte Carlo estimates of E|mu_hat|^{2q}, the exact value through the simplex
// integrals, decay fits and the resulting Fourier-dimension bound.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbgraph/combinatorics.hpp"
#include "fbgraph/errors.hpp"
#include "fbgraph/fbm_core.hpp"
#include "fbgraph/fbm_sampler.hpp"
#include "fbgraph/parallel.hpp"
#include "fbgraph/simplex_integrals.hpp"
#include "fbgraph/stats.hpp"
#include "fbgraph/verification.hpp"

namespace fbgraph {

struct FrequencyPair {
    double xi1 = 0.0;
    double xi2 = 0.0;
};

enum class MomentKind { graph, image };

inline std::string to_string(MomentKind k) { return k == MomentKind::graph ? "graph" : "image"; }

inline MomentKind parse_moment_kind(const std::string& s) {
    if (s == "graph") return MomentKind::graph;
    if (s == "image") return MomentKind::image;
    throw DomainError("unknown moment kind '" + s + "' (expected graph or image)");
}

// ---- discretization guard -------------------------------------------------

struct GridGuard {
    bool ok = true;
    std::size_t required_steps = 0; // smallest power of two meeting every rule
    std::vector<std::string> reasons;
};

// Correlation length of exp(-2 pi i xi2 B): E e^{-2 pi i xi2 (B_t - B_s)} = exp(-2 pi^2 xi2^2 |t-s|^{2H}).
inline double correlation_length(double H, double xi2) {
    if (xi2 == 0.0) return std::numeric_limits<double>::infinity();
    return std::pow(2.0 * std::numbers::pi * std::numbers::pi * xi2 * xi2, -1.0 / (2.0 * H));
}

namespace detail {

inline std::vector<std::string> guard_violations(double H, const FrequencyPair& xi, double step) {
    std::vector<std::string> out;
    const double steps = 1.0 / step;
    const double need = 64.0 * (1.0 + std::abs(xi.xi1) + std::abs(xi.xi2) * std::pow(step, H));
    if (steps < need) out.push_back("grid below 64 (1 + |xi1| + |xi2| step^H)");
    if (std::abs(xi.xi1) * step > 1.0 / 64.0) out.push_back("fewer than 64 points per horizontal period");
    // Trapezoid bias stays near 1% once the step is a quarter of the correlation length.
    if (step > 0.25 * correlation_length(H, xi.xi2)) out.push_back("step exceeds a quarter of the correlation length");
    return out;
}

} // namespace detail

inline GridGuard discretization_guard(double H, const FrequencyPair& xi, std::size_t steps) {
    detail::check_hurst(H);
    detail::require_domain(steps >= 1, "grid needs at least one step");
    GridGuard g;
    g.reasons = detail::guard_violations(H, xi, 1.0 / static_cast<double>(steps));
    g.ok = g.reasons.empty();
    g.required_steps = 1;
    while (!detail::guard_violations(H, xi, 1.0 / static_cast<double>(g.required_steps)).empty()) {
        detail::require_resource(g.required_steps < (std::size_t{1} << 40), "discretization guard unbounded");
        g.required_steps *= 2;
    }
    return g;
}

inline std::size_t required_grid_steps(double H, const FrequencyPair& xi) {
    return discretization_guard(H, xi, 1).required_steps;
}

// ---- single path ----------------------------------------------------------

struct MuHat {
    std::complex<double> value;
    bool guard_ok = true;
};

// Trapezoid rule on the path's own grid.
inline MuHat path_mu_hat(const FbmPath& path, const FrequencyPair& xi, double H = 0.5) {
    detail::require_domain(path.grid != nullptr && path.grid->size() == path.values.size(),
                           "path values do not match the grid");
    detail::require_domain(std::abs(path.grid->horizon() - 1.0) < 1e-12, "mu_hat needs a path on [0,1]");
    const auto& t = path.grid->points();
    const double tp = 2.0 * std::numbers::pi;
    MuHat r;
    double max_step = 0.0;
    std::complex<double> sum = 0.0;
    auto f = [&](std::size_t k) { return std::polar(1.0, -tp * (xi.xi1 * t[k] + xi.xi2 * path.values[k])); };
    for (std::size_t k = 1; k < t.size(); ++k) {
        const double h = t[k] - t[k - 1];
        max_step = std::max(max_step, h);
        sum += 0.5 * h * (f(k - 1) + f(k));
    }
    r.value = sum;
    r.guard_ok = detail::guard_violations(H, xi, max_step).empty();
    return r;
}

// ---- Monte Carlo moments --------------------------------------------------

struct MomentEstimate {
    double H = 0;
    int q = 1;
    FrequencyPair xi;
    double value = 0;
    double stderr_ = 0;
    std::int64_t n_paths = 0;
    std::size_t grid_size = 0; // steps on [0,1]
    MomentKind kind = MomentKind::graph;
    std::uint64_t seed = 0;
    bool guard_ok = true;
    std::size_t required_grid = 0;
    std::string sampling_method;
};

struct MomentRunOptions {
    unsigned workers = 1;
    bool antithetic = true;           // average over B and -B within each path
    SamplerOptions sampler{};
    double max_path_points = 1e10;    // n_paths * steps budget
};

inline constexpr std::int64_t kMinPaths = 100;

namespace detail {

struct MomentAccumulator {
    std::vector<long double> sum, sumsq; // index [xi * nq + q]
};

} // namespace detail

// Every (xi, q) pair is estimated from the same n_paths paths. Result order: xi major, q minor.
inline std::vector<MomentEstimate> estimate_moments(double H, const std::vector<int>& qs,
                                                    const std::vector<FrequencyPair>& xis, std::int64_t n_paths,
                                                    std::size_t steps, std::uint64_t seed, MomentKind kind,
                                                    const MomentRunOptions& opt = {}) {
    detail::check_hurst(H);
    detail::require_domain(n_paths >= kMinPaths, "estimate_moment needs at least " + std::to_string(kMinPaths) +
                                                     " paths for a meaningful standard error");
    detail::require_domain(!qs.empty() && !xis.empty(), "estimate_moment needs q and xi values");
    for (int q : qs) detail::require_domain(q >= 1 && q <= kMaxQ, "moment order q must lie in 1.." + std::to_string(kMaxQ));
    detail::require_domain(steps >= 1, "grid needs at least one step");
    detail::require_resource(static_cast<double>(n_paths) * static_cast<double>(steps) <= opt.max_path_points,
                             "moment run exceeds the path-point budget");
    std::vector<FrequencyPair> xv = xis;
    if (kind == MomentKind::image)
        for (auto& x : xv) x.xi1 = 0.0;

    FbmSampler sampler(H, TimeGrid::uniform(steps), opt.sampler);
    const std::size_t N = steps;
    const double delta = 1.0 / static_cast<double>(N);
    const double tp = 2.0 * std::numbers::pi;

    // Weighted horizontal phases w_k e^{-2 pi i xi1 t_k}, one table per distinct xi1.
    std::map<double, std::size_t> x1_index, x2_index;
    for (const auto& x : xv) {
        x1_index.emplace(x.xi1, x1_index.size());
        x2_index.emplace(x.xi2, x2_index.size());
    }
    std::vector<std::vector<std::complex<double>>> table(x1_index.size());
    for (const auto& [x1, j] : x1_index) {
        auto& tb = table[j];
        tb.resize(N + 1);
        for (std::size_t k = 0; k <= N; ++k) {
            const double w = (k == 0 || k == N) ? 0.5 * delta : delta;
            // Reduce the phase before scaling so large xi1 k stays exact.
            const double ph = std::fmod(x1 * static_cast<double>(k), static_cast<double>(N)) * delta;
            tb[k] = std::polar(w, -tp * ph);
        }
    }
    // Group the requested xi by xi2 so each path pays one sincos per point per xi2.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> by_x2(x2_index.size()); // (xi slot, table)
    for (std::size_t s = 0; s < xv.size(); ++s)
        by_x2[x2_index.at(xv[s].xi2)].push_back({s, x1_index.at(xv[s].xi1)});
    std::vector<double> x2_of(x2_index.size());
    for (const auto& [x2, j] : x2_index) x2_of[j] = x2;

    const std::size_t nq = qs.size(), nxi = xv.size();
    const auto pairs = static_cast<std::size_t>((n_paths + 1) / 2);
    const unsigned W = std::max(1u, opt.workers);
    std::vector<detail::MomentAccumulator> acc(W);
    parallel_chunks(pairs, W, [&](unsigned w, std::size_t b, std::size_t e) {
        auto& a = acc[w];
        a.sum.assign(nxi * nq, 0.0L);
        a.sumsq.assign(nxi * nq, 0.0L);
        auto ws = sampler.make_workspace();
        std::vector<double> p[2];
        std::vector<double> s_ac, s_bs, s_bc, s_as;
        for (std::size_t pr = b; pr < e; ++pr) {
            sampler.sample_pair(seed, pr, ws, p[0], p[1]);
            for (int h = 0; h < 2; ++h) {
                if (static_cast<std::int64_t>(2 * pr + h) >= n_paths) break;
                const auto& B = p[h];
                for (std::size_t g = 0; g < by_x2.size(); ++g) {
                    const auto& slots = by_x2[g];
                    const std::size_t m = slots.size();
                    s_ac.assign(m, 0.0);
                    s_bs.assign(m, 0.0);
                    s_bc.assign(m, 0.0);
                    s_as.assign(m, 0.0);
                    const double f2 = tp * x2_of[g];
                    for (std::size_t k = 0; k <= N; ++k) {
                        const double c = std::cos(f2 * B[k]);
                        const double s = std::sin(f2 * B[k]);
                        for (std::size_t i = 0; i < m; ++i) {
                            const auto z = table[slots[i].second][k];
                            s_ac[i] += z.real() * c;
                            s_bs[i] += z.imag() * s;
                            s_bc[i] += z.imag() * c;
                            s_as[i] += z.real() * s;
                        }
                    }
                    for (std::size_t i = 0; i < m; ++i) {
                        // (a + ib)(c - is) for B, (a + ib)(c + is) for -B.
                        const std::complex<double> plus(s_ac[i] + s_bs[i], s_bc[i] - s_as[i]);
                        const std::complex<double> minus(s_ac[i] - s_bs[i], s_bc[i] + s_as[i]);
                        const double m2p = std::norm(plus), m2m = std::norm(minus);
                        const std::size_t slot = slots[i].first;
                        for (std::size_t iq = 0; iq < nq; ++iq) {
                            const double v = opt.antithetic
                                                 ? 0.5 * (std::pow(m2p, qs[iq]) + std::pow(m2m, qs[iq]))
                                                 : std::pow(m2p, qs[iq]);
                            a.sum[slot * nq + iq] += v;
                            a.sumsq[slot * nq + iq] += static_cast<long double>(v) * v;
                        }
                    }
                }
            }
        }
    });
    std::vector<MomentEstimate> out;
    for (std::size_t s = 0; s < nxi; ++s) {
        const auto guard = discretization_guard(H, xv[s], N);
        for (std::size_t iq = 0; iq < nq; ++iq) {
            long double S = 0, S2 = 0;
            for (const auto& a : acc) { // worker order: reproducible for a fixed worker count
                if (a.sum.empty()) continue;
                S += a.sum[s * nq + iq];
                S2 += a.sumsq[s * nq + iq];
            }
            const auto n = static_cast<long double>(n_paths);
            const long double mean = S / n;
            const long double var = std::max(0.0L, (S2 - n * mean * mean) / (n - 1));
            MomentEstimate m;
            m.H = H;
            m.q = qs[iq];
            m.xi = xv[s];
            m.value = static_cast<double>(mean);
            m.stderr_ = static_cast<double>(std::sqrt(var / n));
            m.n_paths = n_paths;
            m.grid_size = N;
            m.kind = kind;
            m.seed = seed;
            m.guard_ok = guard.ok;
            m.required_grid = guard.required_steps;
            m.sampling_method = to_string(sampler.method());
            out.push_back(m);
        }
    }
    return out;
}

inline MomentEstimate estimate_moment(double H, int q, const FrequencyPair& xi, std::int64_t n_paths,
                                      std::size_t steps, std::uint64_t seed, MomentKind kind,
                                      const MomentRunOptions& opt = {}) {
    return estimate_moments(H, {q}, {xi}, n_paths, steps, seed, kind, opt).front();
}

// ---- exact moment ---------------------------------------------------------

struct ExactMoment {
    double H = 0;
    int q = 1;
    FrequencyPair xi;
    double value = 0;
    double error = 0;
    double imag_residual = 0;
    double lambda = 0, T = 0, prefactor = 0;
    bool converged = false;
    std::int64_t evaluations = 0;
};

// With s = u/T the covariance factor exp(-2 pi^2 xi2^2 |t-s|^{2H}) becomes the
// simplex weight exp(-pi Var) exactly when T^{2H} = 2 pi xi2^2.
// Default tolerances: q = 1 is cheap; at q = 2 the weight concentrates near the
// diagonal of a 3-simplex with T ~ 20 and level 4 exceeds the evaluation budget.
inline QuadratureOptions exact_moment_quadrature(int q) {
    QuadratureOptions o;
    o.abs_tol = 0.0;
    o.rel_tol = q == 1 ? 1e-9 : 1e-3;
    return o;
}

inline ExactMoment exact_moment(double H, int q, const FrequencyPair& xi,
                                std::optional<QuadratureOptions> quad_opt = std::nullopt, unsigned workers = 1) {
    detail::check_hurst(H);
    detail::require_domain(q == 1 || q == 2, "exact_moment supports q in {1,2} (quadrature dimension cap)");
    const QuadratureOptions quad = quad_opt.value_or(exact_moment_quadrature(q));
    detail::require_domain(xi.xi2 != 0.0, "exact_moment needs xi2 != 0");
    ExactMoment r;
    r.H = H;
    r.q = q;
    r.xi = xi;
    r.T = std::pow(2.0 * std::numbers::pi, 1.0 / (2.0 * H)) * std::pow(std::abs(xi.xi2), 1.0 / H);
    r.lambda = xi.xi1 / r.T;
    const double qf = q == 1 ? 1.0 : 2.0;
    r.prefactor = qf * qf / std::pow(r.T, 2 * q);
    const auto eps = enumerate_A(q);
    std::vector<QuadratureResult> res(eps.size());
    parallel_chunks(eps.size(), workers, [&](unsigned, std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) res[k] = eval_I_full(H, eps[k], r.lambda, r.T, quad);
    });
    std::complex<double> sum = 0.0;
    double err = 0.0;
    r.converged = true;
    for (const auto& x : res) {
        sum += x.value;
        err += x.error;
        r.converged = r.converged && x.converged;
        r.evaluations += x.evaluations;
    }
    r.value = r.prefactor * sum.real();
    r.error = r.prefactor * err;
    r.imag_residual = r.prefactor * std::abs(sum.imag());
    return r;
}

// q = 1, H = 1/2, xi1 = 0: int int exp(-c |t-s|) ds dt with c = 2 pi^2 xi2^2.
inline double brownian_closed_form(double xi2) {
    const double c = 2.0 * std::numbers::pi * std::numbers::pi * xi2 * xi2;
    if (c == 0.0) return 1.0;
    return 2.0 * (1.0 / c - (1.0 - std::exp(-c)) / (c * c));
}

// ---- decay fits -----------------------------------------------------------

enum class DecayDirection { horizontal, vertical };

inline std::string to_string(DecayDirection d) { return d == DecayDirection::horizontal ? "horizontal" : "vertical"; }

struct EstimatorParams {
    std::int64_t n_paths = 100'000;
    std::size_t grid_steps = std::size_t{1} << 14;
    bool auto_grid = true; // raise the grid per point to the guard's requirement
    std::uint64_t seed = 1;
    MomentRunOptions run{};
};

inline constexpr double kDecayRelWindow = 0.15;
inline constexpr double kDecayMinR2 = 0.95;
inline constexpr double kMaxRelStderr = 0.20;
inline constexpr int kMinFitPoints = 4;

struct DecayFit {
    double H = 0;
    int q = 1;
    MomentKind kind = MomentKind::graph;
    DecayDirection direction = DecayDirection::horizontal;
    std::vector<MomentEstimate> estimates;
    std::vector<std::pair<double, double>> points; // (log|xi|, log moment) kept for the fit
    std::vector<std::string> dropped;
    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double r_squared = std::numeric_limits<double>::quiet_NaN();
    double target = 0;
    bool usable = false; // enough points and r^2 >= 0.95
    Verdict verdict = Verdict::inconclusive;
};

inline DecayDirection schedule_direction(const std::vector<FrequencyPair>& schedule) {
    detail::require_domain(schedule.size() >= static_cast<std::size_t>(kMinFitPoints),
                           "decay schedule needs at least " + std::to_string(kMinFitPoints) + " points");
    bool same1 = true, same2 = true;
    for (const auto& x : schedule) {
        same1 = same1 && x.xi1 == schedule.front().xi1;
        same2 = same2 && x.xi2 == schedule.front().xi2;
    }
    std::vector<double> absc;
    for (const auto& x : schedule) absc.push_back(same2 ? std::abs(x.xi1) : std::abs(x.xi2));
    std::sort(absc.begin(), absc.end());
    detail::require_domain(absc.front() != absc.back(), "degenerate schedule: all frequencies equal");
    detail::require_domain(same1 != same2, "schedule must vary exactly one of xi1, xi2");
    if (same2) {
        for (const auto& x : schedule) detail::require_domain(x.xi1 != 0.0, "horizontal schedule needs xi1 != 0");
        return DecayDirection::horizontal;
    }
    for (const auto& x : schedule) detail::require_domain(x.xi2 != 0.0, "vertical schedule needs xi2 != 0");
    return DecayDirection::vertical;
}

inline DecayFit fit_decay(double H, int q, MomentKind kind, const std::vector<FrequencyPair>& schedule,
                          const EstimatorParams& params = {}) {
    detail::check_hurst(H);
    DecayFit f;
    f.H = H;
    f.q = q;
    f.kind = kind;
    f.direction = schedule_direction(schedule);
    detail::require_domain(!(kind == MomentKind::image && f.direction == DecayDirection::horizontal),
                           "the image measure has no horizontal frequency");
    f.target = f.direction == DecayDirection::horizontal ? -q : -q / H;
    // Points sharing a grid share their paths.
    std::map<std::size_t, std::vector<std::size_t>> by_grid;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        std::size_t steps = params.grid_steps;
        if (params.auto_grid) steps = std::max(steps, required_grid_steps(H, schedule[k]));
        by_grid[steps].push_back(k);
    }
    f.estimates.resize(schedule.size());
    for (const auto& [steps, idx] : by_grid) {
        std::vector<FrequencyPair> xs;
        for (auto k : idx) xs.push_back(schedule[k]);
        const auto est = estimate_moments(H, {q}, xs, params.n_paths, steps, params.seed, kind, params.run);
        for (std::size_t i = 0; i < idx.size(); ++i) f.estimates[idx[i]] = est[i];
    }
    std::vector<double> lx, ly;
    for (const auto& e : f.estimates) {
        const double x = f.direction == DecayDirection::horizontal ? std::abs(e.xi.xi1) : std::abs(e.xi.xi2);
        std::ostringstream why;
        if (!(e.value > 0.0) || e.stderr_ > kMaxRelStderr * e.value) {
            why << "xi=(" << e.xi.xi1 << "," << e.xi.xi2 << ") dropped: value " << e.value << ", stderr " << e.stderr_;
            f.dropped.push_back(why.str());
            continue;
        }
        lx.push_back(std::log(x));
        ly.push_back(std::log(e.value));
        f.points.push_back({lx.back(), ly.back()});
    }
    if (static_cast<int>(lx.size()) < kMinFitPoints) return f; // inconclusive
    const auto fit = fit_line(lx, ly);
    f.slope = fit.slope;
    f.intercept = fit.intercept;
    f.r_squared = fit.r_squared;
    f.usable = fit.r_squared >= kDecayMinR2;
    const bool in_window = std::abs(f.slope - f.target) <= kDecayRelWindow * std::abs(f.target);
    f.verdict = (in_window && f.usable) ? Verdict::pass : Verdict::fail;
    return f;
}

inline std::vector<FrequencyPair> geometric_schedule(DecayDirection d, double start, int points, double fixed,
                                                     double ratio = 2.0) {
    detail::require_domain(points >= 1 && start != 0.0 && ratio > 0.0, "invalid geometric schedule");
    std::vector<FrequencyPair> s;
    double x = start;
    for (int k = 0; k < points; ++k, x *= ratio)
        s.push_back(d == DecayDirection::horizontal ? FrequencyPair{x, fixed} : FrequencyPair{fixed, x});
    return s;
}

// ---- dimension report -----------------------------------------------------

inline constexpr double kImpliedFloor = 0.85;

struct DimensionReport {
    double H = 0;
    double gamma1 = std::numeric_limits<double>::quiet_NaN(); // horizontal: moment <= C |xi1|^{-gamma1 q}
    double gamma2 = std::numeric_limits<double>::quiet_NaN(); // vertical:   moment <= C |xi2|^{-gamma2 q}
    double gamma2_times_H = std::numeric_limits<double>::quiet_NaN(); // 1 when the vertical rate is -q/H
    double implied_lower_bound = std::numeric_limits<double>::quiet_NaN(); // min(gamma1, gamma2, 1)
    double theoretical = 1.0;
    int horizontal_fits = 0, vertical_fits = 0;
    std::vector<std::string> notes;
    Verdict verdict = Verdict::inconclusive;
};

inline DimensionReport dimension_report(double H, const std::vector<DecayFit>& fits) {
    detail::check_hurst(H);
    DimensionReport r;
    r.H = H;
    bool all_usable = true;
    double g1 = std::numeric_limits<double>::infinity(), g2 = g1;
    for (const auto& f : fits) {
        if (f.H != H) throw DomainError("dimension_report: fit at a different H");
        const bool hz = f.direction == DecayDirection::horizontal;
        (hz ? r.horizontal_fits : r.vertical_fits)++;
        if (!f.usable) {
            all_usable = false;
            r.notes.push_back(to_string(f.direction) + " fit at q=" + std::to_string(f.q) + " is not usable");
            continue;
        }
        (hz ? g1 : g2) = std::min(hz ? g1 : g2, -f.slope / f.q);
        if (f.verdict != Verdict::pass)
            r.notes.push_back(to_string(f.direction) + " slope " + std::to_string(f.slope) + " outside 15% of target " +
                              std::to_string(f.target));
    }
    if (std::isfinite(g1)) r.gamma1 = g1;
    if (std::isfinite(g2)) {
        r.gamma2 = g2;
        r.gamma2_times_H = g2 * H;
    }
    // dim_F G <= 1 for continuous paths, so the bound is capped there.
    if (std::isfinite(g1) && std::isfinite(g2)) r.implied_lower_bound = std::min({g1, g2, 1.0});
    if (H < 0.5) r.notes.push_back("theory: dim_F G(B) = 1 almost surely for H < 1/2");
    else r.notes.push_back("H >= 1/2 lies outside the theorem; reported as a baseline");
    r.notes.push_back("the lower bound needs the moment bounds for every q; only the fitted q are supported empirically");
    if (r.horizontal_fits == 0 || r.vertical_fits == 0) {
        r.notes.push_back("need at least one horizontal and one vertical fit");
        r.verdict = Verdict::inconclusive;
    } else if (!all_usable || !std::isfinite(r.implied_lower_bound)) {
        r.verdict = Verdict::inconclusive;
    } else {
        r.verdict = r.implied_lower_bound >= kImpliedFloor ? Verdict::pass : Verdict::fail;
    }
    return r;
}

// ---- output ---------------------------------------------------------------

inline std::string moments_csv_header() { return "H,q,kind,xi1,xi2,value,stderr,n_paths,grid_size,seed"; }

inline std::string moments_csv_row(const MomentEstimate& m) {
    std::ostringstream os;
    os.precision(17);
    os << m.H << ',' << m.q << ',' << to_string(m.kind) << ',' << m.xi.xi1 << ',' << m.xi.xi2 << ',' << m.value << ','
       << m.stderr_ << ',' << m.n_paths << ',' << m.grid_size << ',' << m.seed;
    return os.str();
}

inline std::string plot_data(const DecayFit& f) {
    std::ostringstream os;
    os.precision(17);
    for (const auto& [x, y] : f.points) os << x << ' ' << y << '\n';
    return os.str();
}

inline nlohmann::json to_json(const FrequencyPair& x) { return {x.xi1, x.xi2}; }

inline nlohmann::json to_json(const MomentEstimate& m) {
    return {{"H", m.H},
            {"q", m.q},
            {"xi", to_json(m.xi)},
            {"value", m.value},
            {"stderr", m.stderr_},
            {"n_paths", m.n_paths},
            {"grid_size", m.grid_size},
            {"kind", to_string(m.kind)},
            {"seed", m.seed},
            {"guard_ok", m.guard_ok},
            {"required_grid", m.required_grid},
            {"sampling_method", m.sampling_method}};
}

inline nlohmann::json to_json(const ExactMoment& e) {
    return {{"H", e.H},         {"q", e.q},           {"xi", to_json(e.xi)},
            {"value", e.value}, {"error", e.error},   {"imag_residual", e.imag_residual},
            {"lambda", e.lambda}, {"T", e.T},         {"prefactor", e.prefactor},
            {"converged", e.converged}, {"evaluations", e.evaluations}};
}

inline nlohmann::json to_json(const DecayFit& f) {
    auto fin = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
    nlohmann::json est = nlohmann::json::array();
    for (const auto& e : f.estimates) est.push_back(to_json(e));
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& [x, y] : f.points) pts.push_back({x, y});
    return {{"H", f.H},
            {"q", f.q},
            {"kind", to_string(f.kind)},
            {"direction", to_string(f.direction)},
            {"slope", fin(f.slope)},
            {"intercept", fin(f.intercept)},
            {"r_squared", fin(f.r_squared)},
            {"target", f.target},
            {"usable", f.usable},
            {"verdict", to_string(f.verdict)},
            {"points", pts},
            {"dropped", f.dropped},
            {"estimates", est}};
}

inline nlohmann::json to_json(const DimensionReport& r) {
    auto fin = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
    return {{"H", r.H},
            {"gamma1", fin(r.gamma1)},
            {"gamma2", fin(r.gamma2)},
            {"gamma2_times_H", fin(r.gamma2_times_H)},
            {"implied_lower_bound", fin(r.implied_lower_bound)},
            {"theoretical", r.theoretical},
            {"horizontal_fits", r.horizontal_fits},
            {"vertical_fits", r.vertical_fits},
            {"notes", r.notes},
            {"verdict", to_string(r.verdict)}};
}

} // namespace fbgraph
