#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ch3/diagnostics.hpp"
#include "ch3/dynamics.hpp"
#include "ch3/waves.hpp"

using namespace ch3;

namespace {
double max_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}
}  // namespace

TEST_CASE("peakon_field samples the ansatz") {
    auto g = make_grid(512, 40.0);
    PeakonAnsatz single{{0.0}, {1.0}, {0.0}, {0.0}};
    StateTriple z = peakon_field(single, g);
    Field expected = sample_function(g, [](double x) { return std::exp(-std::abs(x)); });
    CHECK(max_diff(z.u, expected) < 1e-15);
    CHECK(max_abs(z.v) == 0.0);
    CHECK(max_abs(z.w) == 0.0);

    PeakonAnsatz mirrored{{-3.0, 3.0}, {0.7, 0.7}, {0.2, 0.2}, {0.0, 0.0}};
    StateTriple m = peakon_field(mirrored, g);
    const std::size_t n = g->size();
    double asym = 0.0;
    for (std::size_t i = 1; i < n; ++i) asym = std::max(asym, std::abs(m.u[n - i] - m.u[i]));
    CHECK(asym < 1e-14);

    PeakonAnsatz zero{{1.0, 2.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
    CHECK(max_abs(peakon_field(zero, g).u) == 0.0);

    PeakonAnsatz bad{{0.0, 1.0}, {1.0}, {0.0}, {0.0}};
    CHECK_THROWS_AS(peakon_field(bad, g), std::invalid_argument);
}

TEST_CASE("mollify preserves constants, symmetry, and converges in H1") {
    auto g = make_grid(2048, 40.0);
    Field c = sample_function(g, [](double) { return 1.7; });
    CHECK(max_diff(mollify(c, 0.2), c) < 1e-14);

    Field peak = sample_function(g, [](double x) { return std::exp(-std::abs(x)); });
    Field smooth = mollify(peak, 0.1);
    CHECK(max_abs(smooth) < 1.0);  // the crest is rounded down
    const std::size_t n = g->size();
    double asym = 0.0;
    for (std::size_t i = 1; i < n; ++i)
        asym = std::max(asym, std::abs(smooth[n - i] - smooth[i]));
    CHECK(asym < 1e-14);

    // H1 distance decays like sqrt(eps) for kinked data; measure the trend.
    auto h1_dist = [&](double eps) {
        Field d = mollify(peak, eps) - peak;
        Field dx = diff(d);
        return std::sqrt(inner(d, d) + inner(dx, dx));
    };
    const double d4 = h1_dist(0.4), d2 = h1_dist(0.2), d1 = h1_dist(0.1);
    CHECK(d2 < d4);
    CHECK(d1 < d2);
    CHECK(d1 < 0.3);
    Field l2 = mollify(peak, 0.1) - peak;
    CHECK(std::sqrt(inner(l2, l2)) < 0.02);

    CHECK_THROWS_AS(mollify(peak, 0.5 * g->spacing()), std::invalid_argument);
}

TEST_CASE("ch_npeakon_rhs evaluates the interaction sums") {
    {
        std::array<double, 1> q{1.0}, p{2.5};
        auto rates = ch_npeakon_rhs(q, p);
        CHECK(rates.dq[0] == doctest::Approx(2.5).epsilon(1e-15));  // travels at its amplitude
        CHECK(rates.dp[0] == 0.0);                                  // sgn(0) = 0
    }
    {
        std::array<double, 2> q{-1.0, 1.0}, p{1.0, 1.0};
        auto rates = ch_npeakon_rhs(q, p);
        CHECK(rates.dq[0] == doctest::Approx(1.0 + std::exp(-2.0)).epsilon(1e-15));
        CHECK(rates.dq[1] == doctest::Approx(1.0 + std::exp(-2.0)).epsilon(1e-15));
        CHECK(rates.dp[0] == doctest::Approx(-std::exp(-2.0)).epsilon(1e-15));
        CHECK(rates.dp[1] == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    }
    {
        std::array<double, 3> q{-1.0, 0.0, 2.0}, p{0.0, 0.0, 0.0};
        auto rates = ch_npeakon_rhs(q, p);
        for (double v : rates.dq) CHECK(v == 0.0);
        for (double v : rates.dp) CHECK(v == 0.0);
    }
    std::array<double, 2> q{0.0, 1.0};
    std::array<double, 1> p{1.0};
    CHECK_THROWS_AS(ch_npeakon_rhs(q, p), std::invalid_argument);
}

TEST_CASE("the two-peakon flow conserves the amplitude sum") {
    // RK4 on the 4-dimensional peakon ODE; d(p1+p2)/dt vanishes identically.
    std::vector<double> q{-2.0, 2.0}, p{1.2, 0.8};
    const double sum0 = p[0] + p[1];
    const double dt = 0.01;
    auto f = [](const std::vector<double>& q_, const std::vector<double>& p_) {
        return ch_npeakon_rhs(q_, p_);
    };
    for (int step = 0; step < 500; ++step) {
        auto k1 = f(q, p);
        std::vector<double> q2(2), p2(2), q3(2), p3(2), q4(2), p4(2);
        for (int i = 0; i < 2; ++i) { q2[i] = q[i] + 0.5 * dt * k1.dq[i]; p2[i] = p[i] + 0.5 * dt * k1.dp[i]; }
        auto k2 = f(q2, p2);
        for (int i = 0; i < 2; ++i) { q3[i] = q[i] + 0.5 * dt * k2.dq[i]; p3[i] = p[i] + 0.5 * dt * k2.dp[i]; }
        auto k3 = f(q3, p3);
        for (int i = 0; i < 2; ++i) { q4[i] = q[i] + dt * k3.dq[i]; p4[i] = p[i] + dt * k3.dp[i]; }
        auto k4 = f(q4, p4);
        for (int i = 0; i < 2; ++i) {
            q[i] += dt / 6.0 * (k1.dq[i] + 2 * k2.dq[i] + 2 * k3.dq[i] + k4.dq[i]);
            p[i] += dt / 6.0 * (k1.dp[i] + 2 * k2.dp[i] + 2 * k3.dp[i] + k4.dp[i]);
        }
    }
    CHECK(std::abs(p[0] + p[1] - sum0) < 1e-8);
    CHECK(q[0] < q[1]);  // ordering preserved along this orbit
}

TEST_CASE("steep_front_data reports the breaking hypothesis quantities") {
    auto g = make_grid(2048, 20.0);
    auto mild = steep_front_data(g, 1.0, 1.0, 5.0);
    CHECK(mild.Q0 < 0.0);
    CHECK(mild.resolved);
    CHECK_FALSE(mild.hypothesis_met);

    // Halving the width quadruples |Q0| but grows E0^{3/2} slower.
    auto half = steep_front_data(g, 1.0, 0.5, 5.0);
    const double q_ratio = half.Q0 / mild.Q0;
    CHECK(q_ratio > 3.0);
    CHECK(q_ratio < 5.0);
    CHECK(half.margin > mild.margin);

    auto zero = steep_front_data(g, 0.0, 1.0, 5.0);
    CHECK(max_abs(zero.state.u) == 0.0);
    CHECK(zero.Q0 == 0.0);
    CHECK(zero.threshold == 0.0);
    CHECK_FALSE(zero.hypothesis_met);

    auto coarse = steep_front_data(g, 1.0, 2.0 * g->spacing(), 5.0);
    CHECK_FALSE(coarse.resolved);
    CHECK_THROWS_AS(steep_front_data(g, 1.0, 0.0, 5.0), std::invalid_argument);
}

TEST_CASE("symmetry_axis locates reflection axes") {
    auto g = make_grid(1024, 40.0);
    StateTriple z = make_state(g);
    z.u = sample_function(g, [](double x) { return std::exp(-x * x / 4.0); });
    z.v = sample_function(g, [](double x) { return 0.5 * std::exp(-x * x / 9.0); });
    z.w = sample_function(g, [](double x) { return 0.25 / std::cosh(x); });

    auto even = symmetry_axis(z);
    CHECK_FALSE(even.degenerate);
    CHECK(std::abs(even.b) < 1e-6);
    CHECK(even.mismatch < 1e-10);

    StateTriple moved = z;
    moved.u = shift(z.u, 3.7);
    moved.v = shift(z.v, 3.7);
    moved.w = shift(z.w, 3.7);
    auto ax = symmetry_axis(moved);
    CHECK(std::abs(ax.b - 3.7) < g->spacing() / 10.0);

    CHECK(symmetry_axis(make_state(g)).degenerate);

    StateTriple flat = make_state(g);
    flat.u = sample_function(g, [](double) { return 0.8; });
    CHECK(symmetry_axis(flat).degenerate);
}

TEST_CASE("symmetry_axis is translation-equivariant") {
    auto g = make_grid(1024, 40.0);
    StateTriple z = make_state(g);
    z.u = sample_function(g, [](double x) { return std::exp(-(x - 1) * (x - 1) / 3.0); });
    z.v = sample_function(g, [](double x) { return 0.4 * std::exp(-(x - 1) * (x - 1) / 6.0); });
    const double b0 = symmetry_axis(z).b;
    StateTriple moved = z;
    moved.u = shift(z.u, -2.3);
    moved.v = shift(z.v, -2.3);
    CHECK(std::abs(symmetry_axis(moved).b - (b0 - 2.3)) < g->spacing() / 10.0);
}

TEST_CASE("standard test functions are compactly supported inside 0.8 L") {
    const auto set = standard_test_functions(40.0);
    CHECK(set.size() == 12);
    for (const auto& phi : set) {
        CHECK(phi.eval(33.0) == 0.0);
        CHECK(phi.eval(-33.0) == 0.0);
    }
}

TEST_CASE("weak_residual vanishes on zero and constant profiles") {
    auto g = make_grid(1024, 40.0);
    const auto tests = standard_test_functions(40.0);

    WaveProfile zero;
    zero.U = make_field(g);
    zero.V = make_field(g);
    zero.W = make_field(g);
    zero.c = 1.0;
    auto rz = weak_residual(zero, tests);
    CHECK(rz.max_u == 0.0);
    CHECK(rz.max_v == 0.0);
    CHECK(rz.max_w == 0.0);

    WaveProfile constant;
    constant.U = sample_function(g, [](double) { return 0.7; });
    constant.V = constant.U;
    constant.W = constant.U;
    constant.c = 1.3;
    auto rc = weak_residual(constant, tests);
    CHECK(rc.max_u < 1e-12);
    CHECK(rc.max_v < 1e-12);
    CHECK(rc.max_w < 1e-12);
}

TEST_CASE("the exact CH peakon is a weak traveling solution") {
    auto g = make_grid(2048, 40.0);
    const auto profile = ch_peakon_profile(g, 1.0, 0.0);
    const auto report = weak_residual(profile, standard_test_functions(40.0));
    CHECK(report.max_u < 1e-6);
    CHECK(report.max_v < 1e-6);
    CHECK(report.max_w < 1e-6);
}

TEST_CASE("weak_residual is linear in the test function") {
    auto g = make_grid(1024, 40.0);
    WaveProfile prof;
    prof.U = sample_function(g, [](double x) { return 0.8 * std::exp(-x * x / 6.0); });
    prof.V = sample_function(g, [](double x) { return 0.3 * std::exp(-x * x / 4.0); });
    prof.W = make_field(g);
    prof.c = 0.9;

    const auto base = standard_test_functions(40.0);
    std::vector<TestFunction> phi1{base[0]}, phi2{base[1]};
    std::vector<TestFunction> sum{
        {"sum", [&](double x) { return base[0].eval(x) + base[1].eval(x); }}};
    const double r1 = weak_residual(prof, phi1).entries[0].raw_u;
    const double r2 = weak_residual(prof, phi2).entries[0].raw_u;
    const double rs = weak_residual(prof, sum).entries[0].raw_u;
    CHECK(rs == doctest::Approx(r1 + r2).epsilon(1e-12));
}

TEST_CASE("weak_residual is translation-covariant") {
    auto g = make_grid(1024, 40.0);
    const double a = 2.35;
    WaveProfile prof;
    prof.U = sample_function(g, [](double x) { return 0.8 * std::exp(-x * x / 6.0); });
    prof.V = sample_function(g, [](double x) { return 0.3 * std::exp(-x * x / 4.0); });
    prof.W = make_field(g);
    prof.c = 1.1;
    WaveProfile moved;
    moved.U = sample_function(g, [&](double x) { return 0.8 * std::exp(-(x - a) * (x - a) / 6.0); });
    moved.V = sample_function(g, [&](double x) { return 0.3 * std::exp(-(x - a) * (x - a) / 4.0); });
    moved.W = make_field(g);
    moved.c = 1.1;

    const auto base = standard_test_functions(40.0);
    for (std::size_t k : {0u, 4u, 9u}) {
        std::vector<TestFunction> phi{base[k]};
        std::vector<TestFunction> phi_moved{
            {"moved", [&, k](double x) { return base[k].eval(x - a); }}};
        const double r = weak_residual(prof, phi).entries[0].raw_u;
        const double rm = weak_residual(moved, phi_moved).entries[0].raw_u;
        CHECK(rm == doctest::Approx(r).epsilon(1e-10));
    }
}

TEST_CASE("traveling_check recovers synthetic exact translations") {
    auto g = make_grid(1024, 40.0);
    StateTriple base = make_state(g);
    base.u = sample_function(g, [](double x) { return std::exp(-x * x / 4.0); });
    base.v = sample_function(g, [](double x) { return 0.5 * std::exp(-x * x / 7.0); });
    base.w = sample_function(g, [](double x) { return 0.2 * std::exp(-x * x / 3.0); });

    std::vector<StateTriple> traj;
    for (int i = 0; i <= 8; ++i) {
        StateTriple s = base;
        s.t = 0.25 * i;
        s.u = shift(base.u, 2.0 * s.t);
        s.v = shift(base.v, 2.0 * s.t);
        s.w = shift(base.w, 2.0 * s.t);
        traj.push_back(std::move(s));
    }
    const auto report = traveling_check(traj);
    CHECK_FALSE(report.degenerate);
    CHECK(report.speed == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(report.r_squared > 0.999999);
    CHECK(report.max_shape_error < 1e-10);

    std::vector<StateTriple> zeros(6, make_state(g));
    CHECK(traveling_check(zeros).degenerate);

    std::vector<StateTriple> few(3, base);
    CHECK_THROWS_AS(traveling_check(few), std::invalid_argument);
}
