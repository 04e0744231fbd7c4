#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "ch3/grid.hpp"

using namespace ch3;

namespace {

double max_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Band-limited random field: a handful of low modes under a decaying envelope.
Field random_band_limited(GridPtr g, unsigned seed, bool even = false) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    Field f = make_field(g);
    const double L = g->half_width();
    for (int m = 1; m <= 6; ++m) {
        const double a = amp(rng), b = even ? 0.0 : amp(rng);
        const double k = std::numbers::pi * m / L;
        for (std::size_t i = 0; i < g->size(); ++i) {
            const double x = g->node(i);
            f[i] += a * std::cos(k * x) + b * std::sin(k * x);
        }
    }
    return f;
}

}  // namespace

TEST_CASE("make_grid validates its arguments") {
    CHECK_THROWS_AS(make_grid(15, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(8, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(256, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(256, -3.0), std::invalid_argument);
    CHECK_NOTHROW(make_grid(16, std::numbers::pi));
}

TEST_CASE("grid geometry and wavenumbers") {
    auto g = make_grid(16, std::numbers::pi);
    CHECK(g->spacing() == doctest::Approx(2.0 * std::numbers::pi / 16).epsilon(1e-15));
    CHECK(g->node(0) == doctest::Approx(-std::numbers::pi).epsilon(1e-15));
    CHECK(g->spacing() * static_cast<double>(g->size()) ==
          doctest::Approx(2.0 * g->half_width()).epsilon(1e-15));

    auto g2 = make_grid(256, 40.0);
    CHECK(g2->wavenumbers()[1] == doctest::Approx(std::numbers::pi / 40.0).epsilon(1e-15));
    CHECK(g2->wavenumbers()[0] == 0.0);
}

TEST_CASE("diff is exact on a pure Fourier mode") {
    auto g = make_grid(64, std::numbers::pi);
    Field f = sample_function(g, [](double x) { return std::sin(x); });
    Field d = diff(f);
    Field expected = sample_function(g, [](double x) { return std::cos(x); });
    CHECK(max_diff(d, expected) < 1e-13);
}

TEST_CASE("diff of a constant vanishes") {
    auto g = make_grid(64, 5.0);
    Field f = sample_function(g, [](double) { return 3.25; });
    CHECK(max_abs(diff(f)) < 1e-14);
}

TEST_CASE("diff matches the analytic derivative of a Gaussian") {
    auto g = make_grid(1024, 40.0);
    Field f = sample_function(g, [](double x) { return std::exp(-x * x); });
    Field d = diff(f);
    Field expected = sample_function(g, [](double x) { return -2.0 * x * std::exp(-x * x); });
    CHECK(max_diff(d, expected) < 1e-10);
}

TEST_CASE("diff maps even fields to odd fields") {
    auto g = make_grid(256, 10.0);
    Field f = random_band_limited(g, 7, /*even=*/true);
    Field d = diff(f);
    // Odd: d(-x) = -d(x); node n-i is the mirror of node i.
    double violation = 0.0;
    const std::size_t n = g->size();
    for (std::size_t i = 1; i < n; ++i)
        violation = std::max(violation, std::abs(d[n - i] + d[i]));
    CHECK(violation < 1e-12);
}

TEST_CASE("diff error collapses faster than any fixed power of dx") {
    double err[3];
    int idx = 0;
    for (std::size_t n : {256u, 512u, 1024u}) {
        auto g = make_grid(n, 40.0);
        Field f = sample_function(g, [](double x) { return std::exp(-x * x); });
        Field d = diff(f);
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            e = std::max(e, std::abs(d[i] + 2.0 * g->node(i) * std::exp(-g->node(i) * g->node(i))));
        err[idx++] = e;
    }
    CHECK(err[0] / err[1] > 1024.0);  // beats a 10th-order scheme on the first halving
    CHECK(err[1] < 1e-12);            // already at the rounding floor
    CHECK(err[2] < 1e-12);
}

TEST_CASE("helmholtz_inverse fixes constants and scales eigenmodes") {
    auto g = make_grid(128, 40.0);
    Field c = sample_function(g, [](double) { return 2.5; });
    CHECK(max_diff(helmholtz_inverse(c), c) < 1e-13);

    const double k = g->wavenumbers()[5];
    Field mode = sample_function(g, [&](double x) { return std::cos(k * x); });
    Field expected = (1.0 / (1.0 + k * k)) * mode;
    CHECK(max_diff(helmholtz_inverse(mode), expected) < 1e-14);
}

TEST_CASE("helmholtz round trip is the identity on band-limited fields") {
    auto g = make_grid(512, 40.0);
    Field f = random_band_limited(g, 11);
    CHECK(max_diff(helmholtz_apply(helmholtz_inverse(f)), f) < 1e-12);
    CHECK(max_diff(helmholtz_inverse(helmholtz_apply(f)), f) < 1e-12);
}

TEST_CASE("green_convolve agrees with the direct quadrature oracle") {
    auto g = make_grid(1024, 40.0);
    Field f = sample_function(g, [](double x) { return std::exp(-x * x); });
    CHECK(max_diff(green_convolve(f), quadrature_convolve(f)) < 1e-8);
    CHECK(max_diff(green_convolve(f, true), quadrature_convolve(f, true)) < 1e-8);
}

TEST_CASE("green_convolve of zero is zero and of even data is even/odd") {
    auto g = make_grid(512, 40.0);
    CHECK(max_abs(green_convolve(make_field(g))) == 0.0);

    Field f = sample_function(g, [](double x) { return std::exp(-0.5 * x * x); });
    Field smooth = green_convolve(f);
    Field anti = green_convolve(f, true);
    const std::size_t n = g->size();
    double even_violation = 0.0, odd_violation = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        even_violation = std::max(even_violation, std::abs(smooth[n - i] - smooth[i]));
        odd_violation = std::max(odd_violation, std::abs(anti[n - i] + anti[i]));
    }
    CHECK(even_violation < 1e-12);
    CHECK(odd_violation < 1e-12);
}

TEST_CASE("green_convolve warns when the data does not decay") {
    auto g = make_grid(64, 10.0);
    Field f = sample_function(g, [](double) { return 1.0; });
    bool warned = false;
    green_convolve(f, false, &warned);
    CHECK(warned);

    Field ok = sample_function(g, [](double x) { return std::exp(-2.0 * x * x); });
    warned = true;
    green_convolve(ok, false, &warned);
    CHECK_FALSE(warned);
}

TEST_CASE("quadrature_convolve reproduces the kernel self-convolution at zero") {
    // G*G(0) = 1/4; the input itself is kinked at a node, which costs the
    // oracle its smooth-integrand corrections, hence the loose tolerance.
    auto g = make_grid(4096, 40.0);
    Field f = sample_function(g, [](double x) { return 0.5 * std::exp(-std::abs(x)); });
    Field q = quadrature_convolve(f);
    CHECK(std::abs(q[g->size() / 2] - 0.25) < 1e-4);
    CHECK(max_abs(quadrature_convolve(make_field(g))) == 0.0);
}

TEST_CASE("dealias removes the top third of the spectrum and fixes low modes") {
    auto g = make_grid(256, 10.0);
    const double k_keep = g->wavenumbers()[3];
    const double k_cut = g->wavenumbers()[g->dealias_cutoff() + 2];
    Field f = sample_function(g, [&](double x) { return std::sin(k_keep * x) + std::sin(k_cut * x); });
    Field expected = sample_function(g, [&](double x) { return std::sin(k_keep * x); });
    CHECK(max_diff(dealias(f), expected) < 1e-13);
}

TEST_CASE("integration and inner products are trapezoid sums") {
    auto g = make_grid(512, 40.0);
    Field f = sample_function(g, [](double x) { return std::exp(-x * x); });
    CHECK(integrate(f) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
    CHECK(inner(f, f) ==
          doctest::Approx(std::sqrt(std::numbers::pi / 2.0)).epsilon(1e-12));
}

TEST_CASE("shift translates the band-limited interpolant") {
    auto g = make_grid(512, 40.0);
    Field f = sample_function(g, [](double x) { return std::exp(-0.25 * x * x); });
    Field moved = shift(f, 3.7);
    Field expected =
        sample_function(g, [](double x) { return std::exp(-0.25 * (x - 3.7) * (x - 3.7)); });
    CHECK(max_diff(moved, expected) < 1e-12);
}

TEST_CASE("reflect evaluates the interpolant at 2b - x") {
    auto g = make_grid(512, 40.0);
    Field f = sample_function(g, [](double x) { return std::exp(-0.25 * (x - 1.0) * (x - 1.0)); });
    Field reflected = reflect(f, 2.0);
    Field expected =
        sample_function(g, [](double x) { return std::exp(-0.25 * (3.0 - x) * (3.0 - x)); });
    CHECK(max_diff(reflected, expected) < 1e-12);
}

TEST_CASE("field arithmetic rejects mixed grids") {
    auto a = make_grid(64, 10.0);
    auto b = make_grid(64, 12.0);
    Field fa = make_field(a), fb = make_field(b);
    CHECK_THROWS_AS(fa + fb, std::invalid_argument);
    CHECK_THROWS_AS(inner(fa, fb), std::invalid_argument);
}
