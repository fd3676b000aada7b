#pragma once

// Fractional Brownian motion: covariance, Gram matrices, variances of
// linear combinations and the strong local nondeterminism lower bound.

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fbgraph/errors.hpp"

namespace fbgraph {

class HurstParam {
  public:
    explicit HurstParam(double H) : H_(H) { detail::check_hurst(H); }
    double value() const { return H_; }
    operator double() const { return H_; }

  private:
    double H_;
};

// Strictly increasing time points on [0, horizon]; t[0] is the origin.
class TimeGrid {
  public:
    TimeGrid() = default;

    explicit TimeGrid(std::vector<double> t) : t_(std::move(t)) {
        detail::require_domain(t_.size() >= 2, "time grid needs at least two points");
        detail::require_domain(t_.front() == 0.0, "time grid must start at 0");
        for (std::size_t k = 1; k < t_.size(); ++k)
            detail::require_domain(t_[k] > t_[k - 1], "time grid must be strictly increasing");
        uniform_ = false;
    }

    // steps+1 equispaced points on [0, horizon].
    static TimeGrid uniform(std::size_t steps, double horizon = 1.0) {
        detail::require_domain(steps >= 1, "uniform grid needs at least one step");
        detail::require_domain(horizon > 0.0, "grid horizon must be positive");
        TimeGrid g;
        g.t_.resize(steps + 1);
        for (std::size_t k = 0; k <= steps; ++k)
            g.t_[k] = horizon * static_cast<double>(k) / static_cast<double>(steps);
        g.t_.back() = horizon;
        g.uniform_ = true;
        return g;
    }

    std::size_t size() const { return t_.size(); }
    std::size_t steps() const { return t_.size() - 1; }
    double operator[](std::size_t k) const { return t_[k]; }
    double horizon() const { return t_.back(); }
    bool is_uniform() const { return uniform_; }
    double step() const { return horizon() / static_cast<double>(steps()); }
    const std::vector<double>& points() const { return t_; }

  private:
    std::vector<double> t_;
    bool uniform_ = false;
};

struct FbmPath {
    std::shared_ptr<const TimeGrid> grid;
    std::vector<double> values; // values[0] == 0
};

// Sum_j a_j B_{t_j}.
struct LinearCombination {
    std::vector<double> coefficients;
    std::vector<double> times;
};

inline double fbm_covariance(double H, double s, double t) {
    detail::check_hurst(H);
    detail::require_domain(s >= 0.0 && t >= 0.0, "fBm covariance needs nonnegative times");
    const double h2 = 2.0 * H;
    return 0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(t - s), h2));
}

inline Eigen::MatrixXd gram_matrix(double H, const std::vector<double>& t) {
    detail::check_hurst(H);
    const auto n = static_cast<Eigen::Index>(t.size());
    const double h2 = 2.0 * H;
    Eigen::VectorXd p(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        detail::require_domain(t[i] >= 0.0, "Gram matrix needs nonnegative times");
        p[i] = std::pow(t[i], h2);
    }
    Eigen::MatrixXd G(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        G(i, i) = p[i];
        for (Eigen::Index j = 0; j < i; ++j) {
            const double c = 0.5 * (p[i] + p[j] - std::pow(std::abs(t[i] - t[j]), h2));
            G(i, j) = c;
            G(j, i) = c;
        }
    }
    return G;
}

// Var(sum a_j B_{t_j}) = (sum a)(sum a_j t_j^{2H}) - sum_{i<j} a_i a_j |t_i - t_j|^{2H}.
inline double var_linear_comb(double H, const LinearCombination& lc) {
    detail::check_hurst(H);
    const auto& a = lc.coefficients;
    const auto& t = lc.times;
    detail::require_domain(a.size() == t.size(), "coefficients and times differ in length");
    // Extended precision: the three sums cancel heavily for balanced coefficients.
    const long double h2 = 2.0L * H;
    long double total = 0.0L, weighted = 0.0L, cross = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) {
        detail::require_domain(t[i] >= 0.0, "variance needs nonnegative times");
        total += a[i];
        weighted += a[i] * std::pow(static_cast<long double>(t[i]), h2);
        for (std::size_t j = 0; j < i; ++j)
            cross += static_cast<long double>(a[i]) * a[j] *
                     std::pow(std::abs(static_cast<long double>(t[i]) - t[j]), h2);
    }
    return std::max(0.0, static_cast<double>(total * weighted - cross));
}

// C^{n-1}/n * sum_j (a_j + ... + a_n)^2 (t_j - t_{j-1})^{2H}, t_0 = 0.
inline double slnd_rhs(double H, double C, const std::vector<double>& a, const std::vector<double>& t) {
    detail::check_hurst(H);
    detail::require_domain(C > 0.0 && C <= 1.0, "SLND constant must lie in (0,1]");
    detail::require_domain(a.size() == t.size() && !a.empty(), "SLND bound needs matching nonempty inputs");
    const std::size_t n = a.size();
    double sum = 0.0, tail = 0.0;
    for (std::size_t j = n; j-- > 0;) {
        tail += a[j];
        const double prev = j == 0 ? 0.0 : t[j - 1];
        detail::require_domain(t[j] > prev, "SLND bound needs 0 < t_1 < ... < t_n");
        sum += tail * tail * std::pow(t[j] - prev, 2.0 * H);
    }
    return std::pow(C, static_cast<double>(n - 1)) / static_cast<double>(n) * sum;
}

} // namespace fbgraph
