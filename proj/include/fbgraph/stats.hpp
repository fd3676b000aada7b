#pragma once

// Least-squares line fits (used for log-log growth and decay exponents).

#include <cmath>
#include <limits>
#include <vector>

#include "fbgraph/errors.hpp"

namespace fbgraph {

struct LineFit {
    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    double r_squared = std::numeric_limits<double>::quiet_NaN();
    int n = 0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    detail::require_structure(x.size() == y.size(), "fit_line: size mismatch");
    detail::require_domain(x.size() >= 2, "fit_line: need at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    detail::require_domain(sxx > 1e-12 * (1.0 + mx * mx), "fit_line: degenerate abscissa (all x equal)");
    LineFit f;
    f.n = static_cast<int>(x.size());
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

inline LineFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < x.size(); ++k) {
        detail::require_domain(x[k] > 0 && y[k] > 0, "log-log fit needs positive data");
        lx.push_back(std::log(x[k]));
        ly.push_back(std::log(y[k]));
    }
    return fit_line(lx, ly);
}

} // namespace fbgraph
