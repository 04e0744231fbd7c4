#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ch3/state.hpp"
#include "ch3/waves.hpp"

using namespace ch3;

namespace {
double max_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}
}  // namespace

TEST_CASE("potentials applies 1 - dxx componentwise") {
    auto g = make_grid(256, 40.0);
    const double k = g->wavenumbers()[4];
    StateTriple z = make_state(g);
    z.u = sample_function(g, [&](double x) { return std::cos(k * x); });
    z.v = sample_function(g, [](double) { return 1.5; });
    auto p = potentials(z);
    Field expected = (1.0 + k * k) * z.u;
    CHECK(max_diff(p.m, expected) < 1e-12);
    CHECK(max_diff(p.n, z.v) < 1e-13);  // constants are fixed points
    CHECK(max_abs(p.l) == 0.0);
}

TEST_CASE("potentials round-trips through helmholtz_inverse") {
    auto g = make_grid(512, 40.0);
    StateTriple z = make_state(g);
    z.u = sample_function(g, [](double x) { return std::exp(-x * x / 16.0) * std::sin(0.7 * x); });
    z.v = sample_function(g, [](double x) { return std::exp(-x * x / 9.0); });
    z.w = sample_function(g, [](double x) { return 0.3 * std::cos(0.4 * x) * std::exp(-x * x / 25.0); });
    auto p = potentials(z);
    CHECK(max_diff(helmholtz_inverse(p.m), z.u) < 1e-12);
    CHECK(max_diff(helmholtz_inverse(p.n), z.v) < 1e-12);
    CHECK(max_diff(helmholtz_inverse(p.l), z.w) < 1e-12);
}

TEST_CASE("energy of the zero state vanishes and is additive over equal components") {
    auto g = make_grid(256, 40.0);
    StateTriple z = make_state(g);
    CHECK(energy(z) == 0.0);

    Field s = sample_function(g, [](double x) { return std::exp(-x * x / 4.0); });
    z.u = s;
    const double single = energy(z);
    z.v = s;
    z.w = s;
    CHECK(energy(z) == doctest::Approx(3.0 * single).epsilon(1e-14));
}

TEST_CASE("energy of a mollified unit peakon approaches 2") {
    // For e^{-|x|} on the line, ||u||_H1^2 = 2 exactly; mollification at
    // radius 0.1 removes O(sqrt(eps)) of the kink's derivative energy.
    auto g = make_grid(2048, 40.0);
    Field peak = sample_function(g, [](double x) { return std::exp(-std::abs(x)); });
    StateTriple z = make_state(g);
    z.u = mollify(peak, 0.1);
    const double E = energy(z);
    CHECK(E < 2.0);
    CHECK(E == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("sup_norm_bound_check enforces the conservation-law bound") {
    auto g = make_grid(2048, 40.0);
    StateTriple z = make_state(g);
    auto zero = sup_norm_bound_check(z, 1.0);
    CHECK(zero.value == 0.0);
    CHECK(zero.bound == 0.5);
    CHECK(zero.pass);

    // Mollified peakon sits at the Sobolev equality case sup^2 = E/2.
    Field peak = sample_function(g, [](double x) { return std::exp(-std::abs(x)); });
    z.u = mollify(peak, 0.1);
    const double E0 = energy(z);
    auto check = sup_norm_bound_check(z, E0);
    CHECK(check.pass);
    CHECK(check.value == doctest::Approx(0.5 * E0).epsilon(0.02));

    CHECK_THROWS_AS(sup_norm_bound_check(z, 0.0), std::invalid_argument);
}

TEST_CASE("permuting components permutes potentials and preserves energy") {
    auto g = make_grid(256, 30.0);
    StateTriple z = make_state(g);
    z.u = sample_function(g, [](double x) { return std::exp(-x * x / 4.0); });
    z.v = sample_function(g, [](double x) { return 0.5 * std::sin(0.6 * x) * std::exp(-x * x / 9.0); });
    z.w = sample_function(g, [](double x) { return 0.25 * std::cos(0.3 * x) * std::exp(-x * x / 16.0); });

    StateTriple swapped = z;
    std::swap(swapped.u, swapped.v);
    auto p = potentials(z);
    auto ps = potentials(swapped);
    CHECK(max_diff(ps.m, p.n) == 0.0);  // identical arithmetic, bitwise equal
    CHECK(max_diff(ps.n, p.m) == 0.0);
    CHECK(max_diff(ps.l, p.l) == 0.0);
    CHECK(energy(swapped) == energy(z));
}
