#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fbgraph/moment_lab.hpp"

using namespace fbgraph;

namespace {

constexpr double pi = std::numbers::pi;

FbmPath flat_path(std::size_t steps) {
    auto g = std::make_shared<const TimeGrid>(TimeGrid::uniform(steps));
    return FbmPath{g, std::vector<double>(steps + 1, 0.0)};
}

double combined(double a, double b) { return std::sqrt(a * a + b * b); }

// E|mu_hat|^2 at q = 1 as a 1-D integral, by composite Simpson after r = v^{1/(2H)}.
double moment_q1_oracle(double H, double xi1, double xi2) {
    const double m = 1.0 / (2 * H);
    const double c = 2 * pi * pi * xi2 * xi2;
    auto f = [&](double v) {
        const double r = std::pow(v, m);
        return 2 * (1 - r) * std::cos(2 * pi * xi1 * r) * std::exp(-c * std::pow(r, 2 * H)) * m * std::pow(v, m - 1);
    };
    const int n = 200000;
    const double h = 1.0 / n;
    double s = f(0) + f(1);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4 : 2) * f(k * h);
    return s * h / 3;
}

} // namespace

TEST(MuHat, TrivialCases) {
    FbmSampler s(0.3, TimeGrid::uniform(512));
    const auto p = s.sample(4, 0);
    EXPECT_NEAR(std::abs(path_mu_hat(p, {0, 0}).value - 1.0), 0.0, 1e-14);
    // Integer horizontal frequency with xi2 = 0 integrates to zero.
    EXPECT_NEAR(std::abs(path_mu_hat(p, {3, 0}).value), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(path_mu_hat(flat_path(64), {0, 5}).value - 1.0), 0.0, 1e-14);
    EXPECT_FALSE(path_mu_hat(p, {0, 50}, 0.3).guard_ok);
}

TEST(Guard, RequiredGridMatchesRules) {
    // Independent restatement: smallest 2^p with step <= r_c / 4 and the 64-point rules.
    for (double H : {0.3, 0.5})
        for (double x2 : {1.0, 2.0, 16.0}) {
            const double rc = std::pow(2 * pi * pi * x2 * x2, -1 / (2 * H));
            std::size_t n = 1;
            while (1.0 / n > rc / 4 || n < 64 * (1 + 4 + x2 * std::pow(1.0 / n, H)) || 4.0 / n > 1.0 / 64) n *= 2;
            EXPECT_EQ(required_grid_steps(H, {4, x2}), n) << H << " " << x2;
        }
    EXPECT_EQ(required_grid_steps(0.3, {0, 16}), std::size_t{1} << 23);
    EXPECT_FALSE(discretization_guard(0.3, {0, 16}, 1 << 14).ok);
}

TEST(Estimate, RefusesFewPaths) {
    EXPECT_THROW(estimate_moment(0.3, 1, {1, 1}, 99, 256, 1, MomentKind::graph), DomainError);
    EXPECT_THROW(estimate_moment(1.2, 1, {1, 1}, 200, 256, 1, MomentKind::graph), DomainError);
}

TEST(Estimate, ZeroFrequency) {
    const auto m = estimate_moment(0.3, 1, {0, 0}, 100, 256, 1, MomentKind::graph);
    EXPECT_NEAR(m.value, 1.0, 1e-12);
    EXPECT_NEAR(m.stderr_, 0.0, 1e-12);
}

TEST(Estimate, BrownianClosedForm) {
    const double ref = brownian_closed_form(1.0);
    // Independent: 2 int_0^1 (1-r) e^{-c r} dr.
    const double c = 2 * pi * pi;
    EXPECT_NEAR(ref, 2 * (1 / c - (1 - std::exp(-c)) / (c * c)), 1e-15);
    EXPECT_NEAR(ref, moment_q1_oracle(0.5, 0, 1), 1e-9);
    const auto m = estimate_moment(0.5, 1, {0, 1}, 4000, 4096, 2, MomentKind::image);
    EXPECT_NEAR(m.value, ref, 4 * m.stderr_);
    EXPECT_TRUE(m.guard_ok);
}

TEST(Exact, MatchesOneDimensionalOracle) {
    for (double H : {0.3, 0.5})
        for (FrequencyPair x : {FrequencyPair{4, 1}, FrequencyPair{8, 1}, FrequencyPair{0, 1}, FrequencyPair{2, 0.5}}) {
            const auto e = exact_moment(H, 1, x);
            EXPECT_TRUE(e.converged);
            EXPECT_NEAR(e.value, moment_q1_oracle(H, x.xi1, x.xi2), 1e-8) << H << " " << x.xi1 << " " << x.xi2;
            EXPECT_LE(e.imag_residual, 1e-6 * e.value);
        }
    EXPECT_NEAR(exact_moment(0.5, 1, {0, 1}).value, brownian_closed_form(1), 1e-10);
}

TEST(Exact, Domain) {
    EXPECT_THROW(exact_moment(0.3, 3, {1, 1}), DomainError);
    EXPECT_THROW(exact_moment(0.3, 1, {1, 0}), DomainError);
    EXPECT_THROW(exact_moment(0.3, 1, {65, 1}), DomainError); // lambda T = xi1 above the oscillation cap
}

TEST(Exact, AgreesWithMonteCarloAtQOne) {
    const auto e = exact_moment(0.3, 1, {8, 1});
    const auto m = estimate_moment(0.3, 1, {8, 1}, 4000, 8192, 5, MomentKind::graph);
    EXPECT_NEAR(m.value, e.value, 4 * combined(m.stderr_, e.error));
}

TEST(Exact, AgreesWithMonteCarloAtQTwo) {
    const auto e = exact_moment(0.3, 2, {4, 1});
    EXPECT_TRUE(e.converged);
    const auto m = estimate_moment(0.3, 2, {4, 1}, 6000, 4096, 6, MomentKind::graph);
    EXPECT_NEAR(m.value, e.value, 4 * combined(m.stderr_, e.error));
}

TEST(Estimate, Properties) {
    MomentRunOptions o;
    o.antithetic = false;
    const auto v = estimate_moments(0.3, {1, 2, 3}, {{4, 1}, {-4, 1}, {0, 2}}, 2000, 2048, 9, MomentKind::graph, o);
    ASSERT_EQ(v.size(), 9u);
    for (const auto& m : v) {
        EXPECT_GE(m.value + 3 * m.stderr_, 0.0);
        EXPECT_LE(m.value - 3 * m.stderr_, 1.0);
    }
    for (int s = 0; s < 3; ++s) {
        // |mu_hat| <= 1 per path, so higher moments are smaller path by path.
        EXPECT_LE(v[3 * s + 1].value, v[3 * s].value);
        EXPECT_LE(v[3 * s + 2].value, v[3 * s + 1].value);
    }
    EXPECT_NEAR(v[0].value, v[3].value, 4 * combined(v[0].stderr_, v[3].stderr_));
}

TEST(Estimate, ReproducibleForFixedWorkers) {
    MomentRunOptions o;
    o.workers = 2;
    const auto a = estimate_moment(0.3, 1, {4, 1}, 300, 1024, 3, MomentKind::graph, o);
    const auto b = estimate_moment(0.3, 1, {4, 1}, 300, 1024, 3, MomentKind::graph, o);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.stderr_, b.stderr_);
    o.workers = 1;
    const auto c = estimate_moment(0.3, 1, {4, 1}, 300, 1024, 3, MomentKind::graph, o);
    EXPECT_NEAR(a.value, c.value, 1e-12 * a.value); // same paths, different summation order
}

TEST(Decay, ScheduleValidation) {
    EXPECT_THROW(fit_decay(0.3, 1, MomentKind::graph, {{4, 1}, {4, 1}, {4, 1}, {4, 1}}), DomainError);
    EXPECT_THROW(fit_decay(0.3, 1, MomentKind::graph, {{4, 1}, {8, 1}, {16, 1}}), DomainError);
    EXPECT_THROW(fit_decay(0.3, 1, MomentKind::graph, {}), DomainError);
    EXPECT_THROW(fit_decay(0.3, 1, MomentKind::graph, {{4, 1}, {8, 2}, {16, 4}, {32, 8}}), DomainError);
    EXPECT_THROW(fit_decay(0.3, 1, MomentKind::image, geometric_schedule(DecayDirection::horizontal, 4, 4, 1)),
                 DomainError);
    EXPECT_THROW(fit_decay(0.3, 1, MomentKind::graph, {{0, 1}, {1, 1}, {2, 1}, {4, 1}}), DomainError);
}

TEST(Decay, BrownianVerticalSlope) {
    EstimatorParams p;
    p.n_paths = 600;
    p.grid_steps = 1024;
    const auto f = fit_decay(0.5, 1, MomentKind::image, geometric_schedule(DecayDirection::vertical, 1, 4, 0), p);
    EXPECT_EQ(f.direction, DecayDirection::vertical);
    EXPECT_DOUBLE_EQ(f.target, -2.0);
    EXPECT_EQ(f.points.size(), 4u);
    EXPECT_EQ(f.verdict, Verdict::pass) << f.slope << " r2 " << f.r_squared;
    for (const auto& e : f.estimates) EXPECT_TRUE(e.guard_ok);
}

TEST(Report, VerdictLogic) {
    DecayFit h, v;
    h.H = v.H = 0.3;
    h.direction = DecayDirection::horizontal;
    v.direction = DecayDirection::vertical;
    h.usable = v.usable = true;
    h.verdict = v.verdict = Verdict::pass;
    h.slope = -0.92;
    v.slope = -3.3;
    const auto r = dimension_report(0.3, {h, v});
    EXPECT_NEAR(r.gamma1, 0.92, 1e-12);
    EXPECT_NEAR(r.gamma2, 3.3, 1e-12);
    EXPECT_NEAR(r.gamma2_times_H, 0.99, 1e-12);
    EXPECT_NEAR(r.implied_lower_bound, 0.92, 1e-12);
    EXPECT_EQ(r.verdict, Verdict::pass);
    EXPECT_EQ(dimension_report(0.3, {h}).verdict, Verdict::inconclusive);
    h.slope = -1.8;
    EXPECT_DOUBLE_EQ(dimension_report(0.3, {h, v}).implied_lower_bound, 1.0);
    h.slope = -0.5;
    EXPECT_EQ(dimension_report(0.3, {h, v}).verdict, Verdict::fail);
    h.usable = false;
    EXPECT_EQ(dimension_report(0.3, {h, v}).verdict, Verdict::inconclusive);
}

TEST(Output, CsvColumns) {
    EXPECT_EQ(moments_csv_header(), "H,q,kind,xi1,xi2,value,stderr,n_paths,grid_size,seed");
    MomentEstimate m;
    m.H = 0.3;
    m.q = 2;
    m.xi = {4, 1};
    m.value = 0.5;
    m.stderr_ = 0.25;
    m.n_paths = 100;
    m.grid_size = 64;
    m.seed = 7;
    EXPECT_EQ(moments_csv_row(m), "0.29999999999999999,2,graph,4,1,0.5,0.25,100,64,7");
}
