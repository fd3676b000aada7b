#pragma once

// g_a(s) = -Var(sum_i a_i B_{s_i}) and its derivatives in the free times,
// the Faa di Bruno expansion of d_J exp(pi g), and the bounds these satisfy
// for H < 1/2.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "fbgraph/combinatorics.hpp"
#include "fbgraph/errors.hpp"

namespace fbgraph {

inline constexpr int kMaxPoints = 17;

// Points 0..n-1 ordered in time, described by gaps (t_k - t_{k-1}, t_{-1} = 0)
// so that short lags are never obtained by subtracting large times. The last
// point may be fixed (a term pinned at the horizon); the others are free.
class Geometry {
  public:
    // gaps[k] > 0 for k >= 1; gaps[0] >= 0.
    void assign(double H, const double* coef, const double* gaps, int n, int n_free) {
        H_ = H;
        h2_ = 2.0 * H;
        n_ = n;
        n_free_ = n_free;
        total_ = 0.0;
        double t = 0.0;
        for (int k = 0; k < n; ++k) {
            c_[k] = coef[k];
            total_ += coef[k];
            t += gaps[k];
            t_[k] = t;
        }
        for (int j = 1; j < n; ++j) {
            double lag = 0.0;
            for (int i = j - 1; i >= 0; --i) {
                lag += gaps[i + 1];
                lag_[i][j] = lag;
                pw_[i][j] = std::pow(lag, h2_);
            }
        }
        if (total_ != 0.0)
            for (int k = 0; k < n; ++k) tp_[k] = std::pow(t_[k], h2_);
    }

    int size() const { return n_; }
    int free_count() const { return n_free_; }
    double coef_sum() const { return total_; }
    double time(int k) const { return t_[k]; }
    double lag(int i, int j) const { return i < j ? lag_[i][j] : lag_[j][i]; }

    double var() const {
        double cross = 0.0;
        for (int j = 1; j < n_; ++j)
            for (int i = 0; i < j; ++i) cross += c_[i] * c_[j] * pw_[i][j];
        double v = -cross;
        if (total_ != 0.0) {
            double w = 0.0;
            for (int k = 0; k < n_; ++k) w += c_[k] * tp_[k];
            v += total_ * w;
        }
        return std::max(0.0, v);
    }

    double g() const { return -var(); }

    // d g / d t_k.
    double grad(int k) const {
        double s = 0.0;
        for (int j = 0; j < n_; ++j) {
            if (j == k) continue;
            const int lo = std::min(j, k), hi = std::max(j, k);
            const double term = c_[j] * pw_[lo][hi] / lag_[lo][hi];
            s += j < k ? term : -term;
        }
        double d = h2_ * c_[k] * s;
        if (total_ != 0.0) d -= h2_ * total_ * c_[k] * tp_[k] / t_[k];
        return d;
    }

    // d^2 g / d t_k d t_l.
    double hess(int k, int l) const {
        if (k != l) {
            const int lo = std::min(k, l), hi = std::max(k, l);
            const double L = lag_[lo][hi];
            return h2_ * (1.0 - h2_) * c_[k] * c_[l] * pw_[lo][hi] / (L * L);
        }
        double s = 0.0;
        for (int j = 0; j < n_; ++j) {
            if (j == k) continue;
            const int lo = std::min(j, k), hi = std::max(j, k);
            const double L = lag_[lo][hi];
            s += c_[j] * pw_[lo][hi] / (L * L);
        }
        double d = -h2_ * (h2_ - 1.0) * c_[k] * s;
        if (total_ != 0.0) d += h2_ * (h2_ - 1.0) * total_ * c_[k] * tp_[k] / (t_[k] * t_[k]);
        return -d;
    }

    // Mixed derivative over distinct indices; orders >= 3 vanish identically.
    double mixed(const int* idx, int m) const {
        if (m == 0) return g();
        if (m == 1) return grad(idx[0]);
        if (m == 2) return hess(idx[0], idx[1]);
        return 0.0;
    }

    // d_J exp(pi g) for distinct indices J, via partitions into blocks of size <= 2.
    double dexp(const int* idx, int m) const {
        const double base = std::exp(std::numbers::pi * g());
        if (m == 0) return base;
        return base * partition_sum(idx, m, 0u);
    }

  private:
    double partition_sum(const int* idx, int m, unsigned used) const {
        int first = 0;
        while (first < m && (used >> first & 1u)) ++first;
        if (first == m) return 1.0;
        used |= 1u << first;
        const double pi = std::numbers::pi;
        double s = pi * grad(idx[first]) * partition_sum(idx, m, used);
        for (int k = first + 1; k < m; ++k) {
            if (used >> k & 1u) continue;
            s += pi * hess(idx[first], idx[k]) * partition_sum(idx, m, used | (1u << k));
        }
        return s;
    }

    double H_ = 0.5, h2_ = 1.0, total_ = 0.0;
    int n_ = 0, n_free_ = 0;
    std::array<double, kMaxPoints> c_{}, t_{}, tp_{};
    std::array<std::array<double, kMaxPoints>, kMaxPoints> lag_{}, pw_{};
};

// sum_i a_i B_{s_i} (+ c_T B_T) with free times 0 < s_1 < ... < s_I (< T).
struct GaConfig {
    double H = 0.5;
    std::vector<double> a;
    std::vector<double> s;
    double pinned_T_coef = 0.0;
    double horizon = 0.0;
};

inline constexpr double kCoincidenceGuard = 1e-12;

namespace detail {

inline Geometry make_geometry(const GaConfig& cfg) {
    check_hurst(cfg.H);
    const int I = static_cast<int>(cfg.a.size());
    require_domain(cfg.s.size() == cfg.a.size(), "coefficients and times differ in length");
    const bool pinned = cfg.pinned_T_coef != 0.0;
    const int n = I + (pinned ? 1 : 0);
    require_resource(n <= kMaxPoints, "at most " + std::to_string(kMaxPoints) + " points supported");
    std::array<double, kMaxPoints> c{}, gaps{};
    double prev = 0.0;
    for (int i = 0; i < I; ++i) {
        const double gap = cfg.s[i] - prev;
        require_domain(gap >= kCoincidenceGuard,
                       "times must satisfy 0 < s_1 < ... with separation >= 1e-12 (index " + std::to_string(i + 1) +
                           ")");
        gaps[i] = gap;
        c[i] = cfg.a[i];
        prev = cfg.s[i];
    }
    if (pinned) {
        const double gap = cfg.horizon - prev;
        require_domain(gap >= kCoincidenceGuard, "free times must stay below the horizon T");
        gaps[I] = gap;
        c[I] = cfg.pinned_T_coef;
    }
    Geometry geo;
    geo.assign(cfg.H, c.data(), gaps.data(), n, I);
    return geo;
}

inline void check_indices(const GaConfig& cfg, const std::vector<int>& idx) {
    const int I = static_cast<int>(cfg.a.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        require_domain(idx[k] >= 1 && idx[k] <= I, "derivative index outside 1..I");
        for (std::size_t l = 0; l < k; ++l)
            require_domain(idx[k] != idx[l], "repeated derivative indices are not supported");
    }
}

} // namespace detail

inline double g_value(const GaConfig& cfg) { return detail::make_geometry(cfg).g(); }

// Gradient in the free times (general form, valid for any coefficient sum).
inline std::vector<double> grad_g(const GaConfig& cfg) {
    const auto geo = detail::make_geometry(cfg);
    std::vector<double> d(cfg.a.size());
    for (int k = 0; k < static_cast<int>(d.size()); ++k) d[k] = geo.grad(k);
    return d;
}

// Closed form 2H sum_{j<i} a_i a_j (s_i-s_j)^{2H-1} - 2H sum_{j>i} a_i a_j (s_j-s_i)^{2H-1},
// valid for balanced coefficients only.
inline std::vector<double> grad_g_balanced(const GaConfig& cfg) {
    detail::check_hurst(cfg.H);
    double sum = 0.0;
    for (double x : cfg.a) sum += x;
    detail::require_domain(std::abs(sum) < 1e-12, "closed-form gradient needs sum(a) = 0");
    detail::require_domain(cfg.pinned_T_coef == 0.0, "closed-form gradient has no pinned terms");
    (void)detail::make_geometry(cfg);
    const std::size_t I = cfg.a.size();
    const double h2 = 2.0 * cfg.H;
    std::vector<double> d(I, 0.0);
    for (std::size_t i = 0; i < I; ++i) {
        for (std::size_t j = 0; j < i; ++j) d[i] += h2 * cfg.a[i] * cfg.a[j] * std::pow(cfg.s[i] - cfg.s[j], h2 - 1.0);
        for (std::size_t j = i + 1; j < I; ++j)
            d[i] -= h2 * cfg.a[i] * cfg.a[j] * std::pow(cfg.s[j] - cfg.s[i], h2 - 1.0);
    }
    return d;
}

// Full Hessian in the free times (row-major I x I).
inline std::vector<std::vector<double>> hess_g(const GaConfig& cfg) {
    const auto geo = detail::make_geometry(cfg);
    const int I = static_cast<int>(cfg.a.size());
    std::vector<std::vector<double>> h(I, std::vector<double>(I));
    for (int k = 0; k < I; ++k)
        for (int l = 0; l < I; ++l) h[k][l] = geo.hess(k, l);
    return h;
}

// d_{s_i1} ... d_{s_ik} g for distinct 1-based indices.
inline double mixed_partial(const GaConfig& cfg, const std::vector<int>& idx) {
    detail::check_indices(cfg, idx);
    const auto geo = detail::make_geometry(cfg);
    std::vector<int> z(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) z[k] = idx[k] - 1;
    return geo.mixed(z.data(), static_cast<int>(z.size()));
}

// sum over P in P2(J) of pi^{#P} exp(pi g) prod_{B in P} g^{(B)}.
inline double faa_di_bruno_mixed(const GaConfig& cfg, const std::vector<int>& idx) {
    detail::check_indices(cfg, idx);
    detail::require_resource(idx.size() <= 16, "at most 16 derivative indices supported");
    const auto geo = detail::make_geometry(cfg);
    std::vector<int> z(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) z[k] = idx[k] - 1;
    return geo.dexp(z.data(), static_cast<int>(z.size()));
}

struct DerivativeBounds {
    std::vector<double> grad;               // bound on |d_i g|
    std::vector<std::vector<double>> hess;  // bound on |d_i d_j g|, i != j
};

// Upper bounds valid for H < 1/2 and balanced coefficients.
inline DerivativeBounds derivative_bounds(const GaConfig& cfg) {
    detail::require_domain(cfg.H > 0.0 && cfg.H < 0.5, "derivative bounds need H in (0, 1/2)");
    double sum = 0.0, amax = 0.0;
    for (double x : cfg.a) {
        sum += x;
        amax = std::max(amax, std::abs(x));
    }
    detail::require_domain(std::abs(sum) < 1e-12, "derivative bounds need sum(a) = 0");
    (void)detail::make_geometry(cfg);
    const int I = static_cast<int>(cfg.a.size());
    const double h2 = 2.0 * cfg.H;
    DerivativeBounds b;
    b.grad.assign(I, 0.0);
    b.hess.assign(I, std::vector<double>(I, 0.0));
    for (int i = 0; i < I; ++i) {
        double v = 0.0;
        if (i >= 1) v += std::pow(cfg.s[i] - cfg.s[i - 1], h2 - 1.0);
        if (i + 1 < I) v += std::pow(cfg.s[i + 1] - cfg.s[i], h2 - 1.0);
        b.grad[i] = amax * amax * I * v;
        for (int j = 0; j < I; ++j)
            if (j != i) b.hess[i][j] = amax * amax * std::pow(std::abs(cfg.s[j] - cfg.s[i]), h2 - 2.0);
    }
    return b;
}

// Indices i (1-based) whose suffix sum a_i + ... + a_I is nonzero.
inline std::vector<int> suffix_support(const std::vector<double>& a) {
    std::vector<int> out;
    double tail = 0.0;
    for (int i = static_cast<int>(a.size()); i >= 1; --i) {
        tail += a[i - 1];
        if (std::abs(tail) > 1e-12) out.push_back(i);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

// exp(-K^q sum_{i in J*} (s_i - s_{i-1})^{2H}), s_0 = 0.
inline double slnd_exp_bound(double H, const std::vector<double>& a, const std::vector<double>& s, double K, int q) {
    detail::check_hurst(H);
    detail::require_domain(K > 0.0 && K < 1.0, "K must lie in (0,1)");
    detail::require_domain(a.size() == s.size(), "coefficients and times differ in length");
    double sum = 0.0;
    for (int i : suffix_support(a)) {
        const double prev = i >= 2 ? s[i - 2] : 0.0;
        sum += std::pow(s[i - 1] - prev, 2.0 * H);
    }
    return std::exp(-std::pow(K, q) * sum);
}

} // namespace fbgraph
