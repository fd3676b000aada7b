#pragma once

// Integrals over the ordered simplex {0 < u_1 < ... < u_n < T}:
//  * I[eps, G]        = int exp(-2 pi i lambda <eps,u>) G_eps(u) du
//  * I[sigma; eps, G] = (-1)^{#J2} int exp(-2 pi i lambda <alpha,u>) d_{J3} G_alpha du
//  * U(I, P, J*, theta), the singular integrals that dominate the latter.
// G_eps(u) = exp(-pi Var(sum eps_j B_{u_j})).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbgraph/combinatorics.hpp"
#include "fbgraph/errors.hpp"
#include "fbgraph/g_analytics.hpp"
#include "fbgraph/rng.hpp"
#include "fbgraph/tanh_sinh.hpp"

namespace fbgraph {

inline constexpr double kMaxLambdaT = 64.0;

// The integrand of I[sigma; eps, G] after literally applying the function
// actions: Phi_j^- pins u_j to u_{j-1} (to 0 when j = 1), Phi_j^+ pins u_j to
// u_{j+1} (to T when j = 2q), d_j differentiates in u_j.
class PinnedIntegrand {
  public:
    // No operators: the plain integrand of I[eps, G].
    PinnedIntegrand(double H, const SignVector& eps, double lambda) : PinnedIntegrand(H, eps, {}, lambda, false) {}

    PinnedIntegrand(double H, const SignVector& eps, const OperatorTuple& sigma, double lambda)
        : PinnedIntegrand(H, eps, sigma, lambda, true) {}

    int dimension() const { return static_cast<int>(free_pos_.size()); }
    int sign() const { return sign_; }
    const ExtendedVector& alpha() const { return alpha_; }
    int derivative_count() const { return static_cast<int>(deriv_.size()); }

    // gaps: dimension()+1 entries, the last one is the slack T - u_D.
    std::complex<double> operator()(const double* gaps) const {
        const int D = dimension();
        std::array<double, kMaxPoints> pc{}, pg{};
        int n = 0;
        double run = 0.0, u = 0.0, phase = 0.0;
        for (int k = 0; k < D; ++k) {
            run += gaps[k];
            u += gaps[k];
            phase += alpha_free_[k] * u;
            if (point_of_var_[k] >= 0) {
                pc[n] = alpha_free_[k];
                pg[n] = run;
                run = 0.0;
                ++n;
            }
        }
        if (t_coef_ != 0) {
            pc[n] = t_coef_;
            pg[n] = run + gaps[D];
            ++n;
        }
        Geometry geo;
        geo.assign(H_, pc.data(), pg.data(), n, n - (t_coef_ != 0 ? 1 : 0));
        const double val = geo.dexp(deriv_.data(), static_cast<int>(deriv_.size()));
        const double ang = -2.0 * std::numbers::pi * lambda_ * phase;
        return static_cast<double>(sign_) * val * std::complex<double>(std::cos(ang), std::sin(ang));
    }

  private:
    enum Slot : int { kZero = -1, kT = -2 };

    PinnedIntegrand(double H, const SignVector& eps, const OperatorTuple& sigma, double lambda, bool with_ops)
        : H_(H), lambda_(lambda) {
        detail::check_hurst(H);
        detail::check_sign_vector(eps);
        const int n = static_cast<int>(eps.size());
        detail::require_resource(n / 2 <= kMaxQ, "q exceeds the supported maximum");
        OperatorTuple ops = with_ops ? sigma : OperatorTuple{};
        if (with_ops)
            detail::require_structure(static_cast<int>(sigma.size()) * 2 == n,
                                      "sigma length must be half the sign vector length");
        // slot[j]: variable index (0-based position) that B_{u_j} is evaluated at.
        std::vector<int> slot(n);
        for (int j = 0; j < n; ++j) slot[j] = j;
        std::vector<bool> starred(n, false), derived(n, false);
        int plus_count = 0;
        for (std::size_t k = 0; k < ops.size(); ++k) {
            const int j = static_cast<int>(2 * k); // 0-based odd index 2k+1
            if (ops[k] == Op::del) {
                derived[j] = true;
                continue;
            }
            starred[j] = true;
            if (ops[k] == Op::minus) {
                slot[j] = j == 0 ? kZero : slot[j - 1];
            } else {
                ++plus_count;
                slot[j] = j == n - 1 ? kT : slot[j + 1];
            }
        }
        sign_ = plus_count % 2 == 0 ? 1 : -1;
        std::vector<int> coef(n, 0);
        for (int j = 0; j < n; ++j) {
            if (slot[j] >= 0) coef[slot[j]] += eps[j];
            else if (slot[j] == kT) t_coef_ += eps[j];
        }
        alpha_.assign(n, STAR);
        for (int j = 0; j < n; ++j)
            if (!starred[j]) alpha_[j] = coef[j];
        if (with_ops)
            detail::require_structure(alpha_ == apply_sigma(eps, sigma),
                                      "function action and vector action of sigma disagree");
        int points = 0;
        for (int j = 0; j < n; ++j) {
            if (starred[j]) continue;
            free_pos_.push_back(j);
            alpha_free_.push_back(coef[j]);
            if (coef[j] != 0) {
                if (derived[j]) deriv_.push_back(points);
                point_of_var_.push_back(points++);
            } else {
                detail::require_structure(!derived[j], "differentiated variable has zero coefficient");
                point_of_var_.push_back(-1);
            }
        }
    }

    double H_, lambda_;
    int sign_ = 1;
    int t_coef_ = 0;
    ExtendedVector alpha_;
    std::vector<int> free_pos_;
    std::vector<int> alpha_free_;
    std::vector<int> point_of_var_;
    std::vector<int> deriv_;
};

namespace detail {

inline void check_lambda_T(double lambda, double T) {
    require_domain(T > 0.0, "horizon T must be positive");
    require_domain(std::isfinite(lambda), "lambda must be finite");
    require_domain(std::abs(lambda) * T <= kMaxLambdaT,
                   "|lambda| T = " + std::to_string(std::abs(lambda) * T) + " exceeds the supported maximum 64");
}

} // namespace detail

inline QuadratureResult eval_I_full(double H, const SignVector& eps, double lambda, double T,
                                    const QuadratureOptions& opt = {}) {
    detail::check_lambda_T(lambda, T);
    PinnedIntegrand f(H, eps, lambda);
    return integrate_simplex_gaps(f, f.dimension(), T, opt);
}

inline QuadratureResult eval_I_sigma(double H, const SignVector& eps, const OperatorTuple& sigma, double lambda,
                                     double T, const QuadratureOptions& opt = {}) {
    detail::check_lambda_T(lambda, T);
    PinnedIntegrand f(H, eps, sigma, lambda);
    return integrate_simplex_gaps(f, f.dimension(), T, opt);
}

// ---- Plain Monte Carlo on the simplex --------------------------------------

// Uniform point of {0 < u_1 < ... < u_n < T} (sorted uniforms).
template <class Engine>
void sample_ordered(int n, double T, Engine& eng, std::vector<double>& u) {
    std::uniform_real_distribution<double> U(0.0, T);
    u.resize(n);
    for (auto& x : u) x = U(eng);
    std::sort(u.begin(), u.end());
}

struct McResult {
    double value = 0.0;
    double stderr_ = 0.0;
    std::int64_t samples = 0;
};

// Plain Monte Carlo estimate of int_{simplex} f(u) du using sorted uniforms.
template <class F>
McResult mc_simplex_integrate(F&& f, int n, double T, std::int64_t samples, std::uint64_t seed) {
    Philox4x64 eng(seed, 0);
    std::vector<double> u;
    double vol = std::pow(T, n);
    for (int k = 2; k <= n; ++k) vol /= k;
    double mean = 0.0, m2 = 0.0;
    for (std::int64_t s = 1; s <= samples; ++s) {
        sample_ordered(n, T, eng, u);
        const double x = vol * f(u);
        const double d = x - mean;
        mean += d / static_cast<double>(s);
        m2 += d * (x - mean);
    }
    McResult r;
    r.value = mean;
    r.samples = samples;
    r.stderr_ = samples > 1 ? std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples)) : 0.0;
    return r;
}

// ---- U integrals -----------------------------------------------------------

struct UIntegralSpec {
    int I = 0;
    PairPartition P;
    std::vector<int> jstar;
    ThetaVector theta; // theta_i != 0 only on singletons; 0 there means "no factor"
    double H = 0.3;
    double K = 0.5;
    int q = 1;
    double T = 1.0;
};

enum class UMethod { monte_carlo, quadrature };

struct UOptions {
    UMethod method = UMethod::monte_carlo;
    std::int64_t max_samples = 1'000'000;
    std::int64_t min_samples = 20'000;
    double rel_tol = 1e-3;
    std::uint64_t seed = 20240901;
    QuadratureOptions quad{};
};

struct UResult {
    double value = 0.0;
    double error = 0.0; // standard error (MC) or level difference (quadrature)
    bool converged = false;
    bool variance_flag = false; // heavy-tailed weights detected
    std::int64_t samples = 0;
    std::string method;
    double undamped = 0.0;          // exact value with the damping removed (laminar pairs only)
    double undamped_exponent = 0.0; // undamped value is proportional to T^exponent
};

namespace detail {

inline void validate_u_spec(const UIntegralSpec& s) {
    check_hurst(s.H);
    require_domain(s.H < 0.5, "U integrals are defined for H < 1/2");
    require_domain(s.T > 0.0, "U horizon must be positive");
    require_domain(s.K > 0.0 && s.K < 1.0, "K must lie in (0,1)");
    require_domain(s.q >= 1, "q must be positive");
    require_structure(s.I >= 0, "I must be nonnegative");
    require_structure(static_cast<int>(s.theta.size()) == s.I, "theta must have length I");
    std::vector<int> seen(s.I + 1, 0);
    for (const auto& b : s.P) {
        require_structure(b.size() == 1 || b.size() == 2, "blocks must have size 1 or 2");
        for (int i : b) {
            require_structure(i >= 1 && i <= s.I, "block index outside 1..I");
            require_structure(++seen[i] == 1, "blocks must be disjoint");
        }
        if (b.size() == 2) {
            require_structure(std::abs(b[1] - b[0]) >= 2, "paired indices must differ by at least 2");
        }
    }
    for (int i = 1; i <= s.I; ++i) {
        const int th = s.theta[i - 1];
        require_structure(th >= -1 && th <= 1, "theta entries lie in {-1,0,1}");
        if (th != 0) {
            require_structure(is_singleton_in(s.P, i), "theta may be nonzero only on singletons");
            require_structure(!(i == 1 && th == -1) && !(i == s.I && th == 1), "theta points outside 1..I");
        }
    }
    for (int j : s.jstar) require_structure(j >= 1 && j <= s.I, "J* index outside 1..I");
}

// Dirichlet tree: leaves are gaps 1..I (plus the slack); internal nodes are
// laminar pair blocks covering gaps (j+1 .. i).
struct UTree {
    struct Node {
        int lo = 0, hi = 0;          // gap range [lo, hi] (1-based); root covers 1..I+1
        double beta = 0.0;           // exponent + 1 as seen by the parent
        double pair_exp = 0.0;       // 2H-2 for pair nodes
        std::vector<int> children;   // node ids
        std::vector<double> child_beta;
        bool leaf = false;
        int gap = 0;
    };
    std::vector<Node> nodes;
    int root = -1;
    double log_norm = 0.0;   // log of the exact undamped integral
    double exponent = 0.0;   // T-exponent of the undamped integral
    std::vector<std::pair<int, int>> crossing; // pairs not represented in the tree (lo gap, hi gap)
};

inline UTree build_u_tree(const UIntegralSpec& s) {
    const double h2 = 2.0 * s.H;
    UTree tr;
    std::vector<double> leaf_exp(s.I + 2, 0.0);
    for (int i = 1; i <= s.I; ++i) {
        const int th = s.theta[i - 1];
        if (th == -1) leaf_exp[i] += h2 - 1.0;
        if (th == 1) leaf_exp[i + 1] += h2 - 1.0;
    }
    // Pair intervals, laminar subset chosen greedily by increasing length.
    std::vector<std::pair<int, int>> ivs;
    for (const auto& b : s.P)
        if (b.size() == 2) {
            const int j = std::min(b[0], b[1]), i = std::max(b[0], b[1]);
            ivs.push_back({j + 1, i});
        }
    std::sort(ivs.begin(), ivs.end(), [](auto x, auto y) { return x.second - x.first < y.second - y.first; });
    std::vector<std::pair<int, int>> kept;
    for (auto iv : ivs) {
        bool ok = true;
        for (auto k : kept) {
            const bool disjoint = iv.second < k.first || k.second < iv.first;
            const bool nested = (k.first >= iv.first && k.second <= iv.second);
            if (!disjoint && !nested) ok = false;
        }
        if (ok) kept.push_back(iv);
        else tr.crossing.push_back(iv);
    }
    // Leaves.
    std::vector<int> owner(s.I + 2, -1); // current top node containing each gap
    for (int g = 1; g <= s.I + 1; ++g) {
        UTree::Node nd;
        nd.leaf = true;
        nd.gap = g;
        nd.lo = nd.hi = g;
        nd.beta = (g == s.I + 1) ? 1.0 : leaf_exp[g] + 1.0;
        require_domain(nd.beta > 0.0, "U integral diverges: gap " + std::to_string(g) + " has exponent <= -1");
        tr.nodes.push_back(nd);
        owner[g] = static_cast<int>(tr.nodes.size()) - 1;
    }
    // Internal pair nodes (kept is sorted by length, so children exist before parents).
    for (auto iv : kept) {
        UTree::Node nd;
        nd.lo = iv.first;
        nd.hi = iv.second;
        nd.pair_exp = h2 - 2.0;
        double sum = 0.0;
        std::vector<int> ids;
        for (int g = iv.first; g <= iv.second; ++g)
            if (ids.empty() || ids.back() != owner[g]) ids.push_back(owner[g]);
        for (int id : ids) {
            nd.children.push_back(id);
            nd.child_beta.push_back(tr.nodes[id].beta);
            sum += tr.nodes[id].beta;
        }
        nd.beta = sum + nd.pair_exp;
        require_domain(nd.beta > 0.0, "U integral diverges at a pair block");
        double ln = -std::lgamma(sum);
        for (double b : nd.child_beta) ln += std::lgamma(b);
        tr.log_norm += ln;
        tr.nodes.push_back(nd);
        const int me = static_cast<int>(tr.nodes.size()) - 1;
        for (int g = iv.first; g <= iv.second; ++g) owner[g] = me;
    }
    UTree::Node root;
    root.lo = 1;
    root.hi = s.I + 1;
    double sum = 0.0;
    std::vector<int> ids;
    for (int g = 1; g <= s.I + 1; ++g)
        if (ids.empty() || ids.back() != owner[g]) ids.push_back(owner[g]);
    for (int id : ids) {
        root.children.push_back(id);
        root.child_beta.push_back(tr.nodes[id].beta);
        sum += tr.nodes[id].beta;
    }
    double ln = -std::lgamma(sum);
    for (double b : root.child_beta) ln += std::lgamma(b);
    tr.log_norm += ln;
    tr.exponent = sum - 1.0;
    tr.nodes.push_back(root);
    tr.root = static_cast<int>(tr.nodes.size()) - 1;
    return tr;
}

// Fills `len` (indexed by gap 1..I+1) with one draw from the tree proposal.
template <class Engine>
void sample_u_tree(const UTree& tr, double T, Engine& eng, std::vector<double>& len) {
    std::vector<std::pair<int, double>> stack{{tr.root, T}};
    std::vector<double> draws;
    while (!stack.empty()) {
        auto [id, L] = stack.back();
        stack.pop_back();
        const auto& nd = tr.nodes[id];
        if (nd.leaf) {
            len[nd.gap] = L;
            continue;
        }
        draws.resize(nd.children.size());
        double sum = 0.0;
        do {
            sum = 0.0;
            for (std::size_t c = 0; c < nd.children.size(); ++c) {
                std::gamma_distribution<double> G(nd.child_beta[c], 1.0);
                draws[c] = G(eng);
                sum += draws[c];
            }
        } while (!(sum > 0.0));
        for (std::size_t c = 0; c < nd.children.size(); ++c) stack.push_back({nd.children[c], L * draws[c] / sum});
    }
}

} // namespace detail

// Integrand of U in gap coordinates (gaps[0..I-1] = s_1 - s_0, ..., gaps[I] = slack).
inline double u_integrand(const UIntegralSpec& s, const double* gaps) {
    const double h2 = 2.0 * s.H;
    double damp = 0.0;
    for (int i : s.jstar) damp += std::pow(gaps[i - 1], h2);
    double v = std::exp(-std::pow(s.K, s.q) * damp);
    for (const auto& b : s.P) {
        if (b.size() == 2) {
            const int j = std::min(b[0], b[1]), i = std::max(b[0], b[1]);
            double lag = 0.0;
            for (int g = j + 1; g <= i; ++g) lag += gaps[g - 1];
            v *= std::pow(lag, h2 - 2.0);
        } else {
            const int i = b[0];
            const int th = s.theta[i - 1];
            if (th == -1) v *= std::pow(gaps[i - 1], h2 - 1.0);
            if (th == 1) v *= std::pow(gaps[i], h2 - 1.0);
        }
    }
    return v;
}

// Exact value of U with the exponential damping removed (laminar pairs only).
inline double u_undamped(const UIntegralSpec& s) {
    detail::validate_u_spec(s);
    const auto tr = detail::build_u_tree(s);
    detail::require_domain(tr.crossing.empty(), "closed form needs nested or disjoint pair blocks");
    return std::exp(tr.log_norm) * std::pow(s.T, tr.exponent);
}

inline UResult eval_U(const UIntegralSpec& s, const UOptions& opt = {}) {
    detail::validate_u_spec(s);
    UResult r;
    const auto tr = detail::build_u_tree(s);
    r.undamped_exponent = tr.exponent;
    r.undamped = tr.crossing.empty() ? std::exp(tr.log_norm) * std::pow(s.T, tr.exponent) : 0.0;
    if (s.I == 0) {
        r.value = 1.0;
        r.converged = true;
        r.method = "trivial";
        return r;
    }
    if (opt.method == UMethod::quadrature) {
        r.method = "tanh-sinh";
        auto f = [&](const double* gaps) { return std::complex<double>(u_integrand(s, gaps), 0.0); };
        const auto q = integrate_simplex_gaps(f, s.I, s.T, opt.quad);
        r.value = q.value.real();
        r.error = q.error;
        r.converged = q.converged;
        r.samples = q.evaluations;
        return r;
    }
    r.method = "importance-mc";
    // Weight = Z * exp(-K^q sum_{J*} gap^{2H}) * (crossing pair factors); the
    // laminar singular factors are absorbed exactly by the proposal density.
    const double Z = std::exp(tr.log_norm) * std::pow(s.T, tr.exponent);
    const double kq = std::pow(s.K, s.q);
    const double h2 = 2.0 * s.H;
    Philox4x64 eng(opt.seed, 0x55aa);
    std::vector<double> len(s.I + 2, 0.0);
    double mean = 0.0, m2 = 0.0;
    double m2_first = 0.0;
    std::int64_t n = 0;
    auto stderr_now = [&]() { return n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0; };
    while (n < opt.max_samples) {
        detail::sample_u_tree(tr, s.T, eng, len);
        double damp = 0.0;
        for (int i : s.jstar) damp += std::pow(len[i], h2);
        double w = Z * std::exp(-kq * damp);
        for (auto [lo, hi] : tr.crossing) {
            double lag = 0.0;
            for (int g = lo; g <= hi; ++g) lag += len[g];
            w *= std::pow(lag, h2 - 2.0);
        }
        ++n;
        const double d = w - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (w - mean);
        if (n == opt.max_samples / 2) m2_first = m2 / static_cast<double>(n - 1);
        if (n >= opt.min_samples && n % 10'000 == 0 && stderr_now() <= opt.rel_tol * std::abs(mean)) {
            r.converged = true;
            break;
        }
    }
    r.value = mean;
    r.error = stderr_now();
    r.samples = n;
    if (!r.converged) r.converged = r.error <= opt.rel_tol * std::abs(mean);
    // Sample variance that keeps growing with n signals an infinite-variance estimator.
    if (m2_first > 0.0 && n == opt.max_samples) {
        const double v_full = m2 / static_cast<double>(n - 1);
        r.variance_flag = v_full > 4.0 * m2_first;
    }
    if (!tr.crossing.empty() && !r.converged) r.variance_flag = true;
    return r;
}

inline nlohmann::json to_json(const UIntegralSpec& s) {
    nlohmann::json j;
    j["I"] = s.I;
    j["P"] = s.P;
    j["jstar"] = s.jstar;
    j["theta"] = s.theta;
    j["H"] = s.H;
    j["K"] = s.K;
    j["q"] = s.q;
    j["T"] = s.T;
    return j;
}

inline UIntegralSpec u_spec_from_json(const nlohmann::json& j) {
    UIntegralSpec s;
    s.I = j.at("I").get<int>();
    s.P = j.at("P").get<PairPartition>();
    s.jstar = j.at("jstar").get<std::vector<int>>();
    s.theta = j.at("theta").get<ThetaVector>();
    s.H = j.value("H", 0.3);
    s.K = j.value("K", 0.5);
    s.q = j.value("q", 1);
    s.T = j.value("T", 1.0);
    return s;
}

} // namespace fbgraph
