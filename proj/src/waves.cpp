#include "ch3/waves.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

namespace ch3 {

namespace {

double peakon_shape(double x) { return std::exp(-std::abs(x)); }

void require_triple(const PeakonAnsatz& a) {
    if (a.positions.size() != a.p.size() || a.positions.size() != a.r.size() ||
        a.positions.size() != a.s.size())
        throw std::invalid_argument("peakon ansatz lists must have equal lengths");
}

}  // namespace

StateTriple peakon_field(const PeakonAnsatz& ansatz, GridPtr grid) {
    require_triple(ansatz);
    PeakonAnsatz a = ansatz;
    std::vector<std::size_t> order(a.positions.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a.positions[i] < a.positions[j]; });

    StateTriple z = make_state(grid);
    for (std::size_t site = 0; site < order.size(); ++site) {
        const std::size_t k = order[site];
        for (std::size_t i = 0; i < grid->size(); ++i) {
            const double e = peakon_shape(grid->node(i) - a.positions[k]);
            z.u[i] += a.p[k] * e;
            z.v[i] += a.r[k] * e;
            z.w[i] += a.s[k] * e;
        }
    }
    return z;
}

Field mollify(const Field& f, double epsilon) {
    const double dx = f.grid->spacing();
    if (!(epsilon >= 2.0 * dx))
        throw std::invalid_argument("mollify: epsilon must be at least 2 dx");
    const long J = static_cast<long>(std::floor(epsilon / dx));
    std::vector<double> bump(2 * J + 1, 0.0);
    double mass = 0.0;
    for (long j = -J; j <= J; ++j) {
        const double t = static_cast<double>(j) * dx / epsilon;
        const double w = std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0;
        bump[static_cast<std::size_t>(j + J)] = w;
        mass += w;
    }
    for (double& w : bump) w /= mass;  // unit discrete mass: constants pass through

    const long n = static_cast<long>(f.size());
    Field out = make_field(f.grid);
    for (long i = 0; i < n; ++i) {
        double acc = 0.0;
        for (long j = -J; j <= J; ++j) {
            long k = (i - j) % n;
            if (k < 0) k += n;
            acc += bump[static_cast<std::size_t>(j + J)] * f[static_cast<std::size_t>(k)];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

PeakonRates ch_npeakon_rhs(std::span<const double> q, std::span<const double> p) {
    if (q.size() != p.size())
        throw std::invalid_argument("ch_npeakon_rhs: positions/amplitudes length mismatch");
    const std::size_t n = q.size();
    PeakonRates rates;
    rates.dq.assign(n, 0.0);
    rates.dp.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            const double d = q[j] - q[k];
            const double e = std::exp(-std::abs(d));
            const double sgn = d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0);
            rates.dq[j] += p[k] * e;
            rates.dp[j] += p[j] * p[k] * sgn * e;
        }
    }
    return rates;
}

SteepFrontData steep_front_data(GridPtr grid, double amplitude, double width, double envelope) {
    if (!(width > 0.0) || !(envelope > 0.0))
        throw std::invalid_argument("steep_front_data: width and envelope must be positive");
    SteepFrontData data;
    data.resolved = width > 4.0 * grid->spacing();

    auto front = [&](double x) {
        return -amplitude * std::tanh(x / width) * std::exp(-x * x / (envelope * envelope));
    };
    data.state = make_state(grid);
    data.state.u = sample_function(grid, front);
    data.state.v = data.state.u;
    data.state.w = data.state.u;

    data.E0 = energy(data.state);
    {
        Field sx = diff(data.state.u);
        double q3 = 0.0;
        for (double s : sx.values) q3 += 27.0 * s * s * s;  // slopes sum to 3 u_x
        data.Q0 = q3 * grid->spacing();
    }
    if (data.E0 > 0.0) {
        data.threshold = -9.0 * data.E0 * std::sqrt(2.0 * data.E0);
        data.margin = data.Q0 / data.threshold;
        data.hypothesis_met = data.Q0 < data.threshold;
    }
    return data;
}

StateTriple gaussian_triple(GridPtr grid, const std::array<double, 3>& amplitudes,
                            const std::array<double, 3>& centers,
                            const std::array<double, 3>& widths) {
    StateTriple z = make_state(grid);
    auto gauss = [&](int c, double x) {
        const double t = (x - centers[static_cast<std::size_t>(c)]) /
                         widths[static_cast<std::size_t>(c)];
        return amplitudes[static_cast<std::size_t>(c)] * std::exp(-t * t);
    };
    z.u = sample_function(grid, [&](double x) { return gauss(0, x); });
    z.v = sample_function(grid, [&](double x) { return gauss(1, x); });
    z.w = sample_function(grid, [&](double x) { return gauss(2, x); });
    return z;
}

StateTriple sech_triple(GridPtr grid, const std::array<double, 3>& amplitudes, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("sech_triple: alpha must be positive");
    StateTriple z = make_state(grid);
    auto profile = [&](double a, double x) { return a / std::cosh(alpha * x); };
    z.u = sample_function(grid, [&](double x) { return profile(amplitudes[0], x); });
    z.v = sample_function(grid, [&](double x) { return profile(amplitudes[1], x); });
    z.w = sample_function(grid, [&](double x) { return profile(amplitudes[2], x); });
    return z;
}

StateTriple potential_sech_triple(GridPtr grid, const std::array<double, 3>& amplitudes,
                                  double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("potential_sech_triple: rate must be positive");
    StateTriple z = make_state(grid);
    auto momentum = [&](double a, double x) { return a / std::cosh(rate * x); };
    z.u = helmholtz_inverse(sample_function(grid, [&](double x) { return momentum(amplitudes[0], x); }));
    z.v = helmholtz_inverse(sample_function(grid, [&](double x) { return momentum(amplitudes[1], x); }));
    z.w = helmholtz_inverse(sample_function(grid, [&](double x) { return momentum(amplitudes[2], x); }));
    return z;
}

// ---------------------------------------------------------------------------
// Symmetry axis
// ---------------------------------------------------------------------------

namespace {

// Spectral evaluation of reflection/translation correlations. With the raw
// transform X_j of a real field the Parseval pairing against its reflection
// about b is (2L/n^2) [X_0^2 + 2 Re sum_j X_j^2 e^{2 i k_j (b+L)}].
struct SpectralCorrelator {
    double two_L;
    double inv_n2;
    std::vector<double> k;
    std::vector<std::complex<double>> terms;  // component-summed X_j^2 (reflection)

    double reflection(double b) const {
        const std::complex<double> step =
            std::exp(std::complex<double>(0.0, 2.0 * k[1] * b));
        std::complex<double> phase(1.0, 0.0);
        double acc = terms[0].real();
        for (std::size_t j = 1; j + 1 < terms.size(); ++j) {
            phase *= step;
            acc += 2.0 * (terms[j] * phase).real();
        }
        return two_L * inv_n2 * acc;
    }
};

SpectralCorrelator reflection_correlator(const StateTriple& z) {
    const Grid& g = *z.u.grid;
    SpectralCorrelator c;
    c.two_L = 2.0 * g.half_width();
    c.inv_n2 = 1.0 / (static_cast<double>(g.size()) * static_cast<double>(g.size()));
    auto kk = g.wavenumbers();
    c.k.assign(kk.begin(), kk.end());
    c.terms.assign(g.spectrum_size(), {0.0, 0.0});
    for (const Field* f : {&z.u, &z.v, &z.w}) {
        auto spec = g.forward(f->values);
        // Phase referenced to the first node x = -L.
        for (std::size_t j = 0; j + 1 < spec.size(); ++j) {
            const std::complex<double> shifted =
                spec[j] * std::exp(std::complex<double>(0.0, kk[j] * g.half_width()));
            c.terms[j] += shifted * shifted;
        }
    }
    return c;
}

double golden_min(const std::function<double(double)>& f, double a, double b, double tol_x) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol_x) {
        if (f1 > f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

SymmetryAxis symmetry_axis(const StateTriple& z) {
    SymmetryAxis out;
    const Grid& g = *z.u.grid;
    const double norm2 = inner(z.u, z.u) + inner(z.v, z.v) + inner(z.w, z.w);
    if (norm2 < 1e-28) {
        out.degenerate = true;
        return out;
    }

    // H^1 energy centroid as the seed.
    Field ux = diff(z.u), vx = diff(z.v), wx = diff(z.w);
    double mass = 0.0, moment = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double rho = z.u[i] * z.u[i] + z.v[i] * z.v[i] + z.w[i] * z.w[i] +
                           ux[i] * ux[i] + vx[i] * vx[i] + wx[i] * wx[i];
        mass += rho;
        moment += rho * g.node(i);
    }
    const double centroid = moment / mass;

    const SpectralCorrelator corr = reflection_correlator(z);
    auto mismatch_sq = [&](double b) { return 2.0 * (norm2 - corr.reflection(b)); };

    const double half = 0.5 * g.half_width();
    const int coarse = 128;
    double best_b = centroid, best_v = mismatch_sq(centroid);
    double worst_v = best_v;
    for (int i = 0; i <= coarse; ++i) {
        const double b = centroid - half + (2.0 * half * i) / coarse;
        const double v = mismatch_sq(b);
        if (v < best_v) {
            best_v = v;
            best_b = b;
        }
        worst_v = std::max(worst_v, v);
    }
    if (worst_v - best_v < 1e-13 * std::max(norm2, 1e-30)) {
        out.degenerate = true;  // flat objective, e.g. a constant state
        out.b = centroid;
        out.mismatch = std::sqrt(std::max(0.0, best_v));
        return out;
    }

    // The spectral objective carries a ~||z||^2 eps cancellation floor, which
    // caps how precisely it can place the minimum; refine with the
    // physical-space objective, whose near-zero values subtract cleanly.
    auto mismatch_sq_physical = [&](double b) {
        double mm = 0.0;
        for (const Field* f : {&z.u, &z.v, &z.w}) {
            Field d = *f - reflect(*f, b);
            mm += inner(d, d);
        }
        return mm;
    };
    const double cell = 2.0 * half / coarse;
    out.b = golden_min(mismatch_sq_physical, best_b - cell, best_b + cell,
                       1e-12 * g.half_width());
    out.mismatch = std::sqrt(mismatch_sq_physical(out.b));
    return out;
}

// ---------------------------------------------------------------------------
// Weak residual
// ---------------------------------------------------------------------------

WaveProfile ch_peakon_profile(GridPtr grid, double c, double x0) {
    // Snap the crest to the nearest node so the kink sits on the grid.
    const double dx = grid->spacing();
    const double L = grid->half_width();
    std::size_t crest = static_cast<std::size_t>(std::llround((x0 + L) / dx));
    crest = std::min(crest, grid->size() - 1);
    const double snapped = grid->node(crest);

    WaveProfile prof;
    prof.U = sample_function(grid, [&](double x) { return c * peakon_shape(x - snapped); });
    prof.V = make_field(grid);
    prof.W = make_field(grid);
    prof.c = c;
    prof.kink_nodes = {crest};
    return prof;
}

std::vector<TestFunction> standard_test_functions(double half_width) {
    // C-infinity cutoff: 1 inside 0.7 L, 0 outside 0.8 L.
    const double L = half_width;
    auto glue = [](double t) {
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        const double a = std::exp(-1.0 / t);
        const double b = std::exp(-1.0 / (1.0 - t));
        return a / (a + b);
    };
    auto cutoff = [=](double x) { return glue((0.8 * L - std::abs(x)) / (0.1 * L)); };

    struct Shape {
        double center, width;
        int poly;  // 0: 1, 1: t, 2: t^2-1, 3: t^3
    };
    const Shape shapes[12] = {{0.0, 3.0, 0},  {0.0, 3.0, 1},  {0.0, 3.0, 2}, {0.0, 3.0, 3},
                              {4.0, 2.0, 0},  {4.0, 2.0, 1},  {-5.0, 2.5, 0}, {-5.0, 2.5, 1},
                              {2.0, 5.0, 2},  {-2.0, 4.0, 3}, {7.0, 1.5, 0}, {-8.0, 2.0, 2}};

    std::vector<TestFunction> set;
    int index = 0;
    for (const Shape& s : shapes) {
        ++index;
        auto eval = [=](double x) {
            const double t = (x - s.center) / s.width;
            double poly = 1.0;
            switch (s.poly) {
                case 1: poly = t; break;
                case 2: poly = t * t - 1.0; break;
                case 3: poly = t * t * t; break;
                default: break;
            }
            return poly * std::exp(-t * t) * cutoff(x);
        };
        set.push_back({"phi" + std::to_string(index), eval});
    }
    return set;
}

namespace {

// Fornberg finite-difference weights: weight of f(xs[j]) in the m-th
// derivative at x0.
std::vector<double> fd_weights(double x0, std::span<const double> xs, int m) {
    const int nn = static_cast<int>(xs.size());
    std::vector<std::vector<double>> c(static_cast<std::size_t>(nn),
                                       std::vector<double>(static_cast<std::size_t>(m + 1), 0.0));
    double c1 = 1.0;
    double c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < nn; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        double c5 = c4;
        c4 = xs[static_cast<std::size_t>(i)] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                        c1 *
                        (k * c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k - 1)] -
                         c5 * c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)]) /
                        c2;
                c[static_cast<std::size_t>(i)][0] =
                    -c1 * c5 * c[static_cast<std::size_t>(i - 1)][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] =
                    (c4 * c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] -
                     k * c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k - 1)]) /
                    c3;
            c[static_cast<std::size_t>(j)][0] = c4 * c[static_cast<std::size_t>(j)][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> out(static_cast<std::size_t>(nn));
    for (int j = 0; j < nn; ++j)
        out[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)];
    return out;
}

// m-th derivative of samples at index i, with the stencil confined to
// [lo, hi] (inclusive). Stencil width 7 where the piece allows it.
double confined_derivative(std::span<const double> values, std::size_t lo, std::size_t hi,
                           std::size_t i, double h, int m) {
    const std::size_t len = hi - lo + 1;
    const std::size_t width = std::min<std::size_t>(7, len);
    std::size_t start = i >= 3 ? i - 3 : 0;
    start = std::max(start, lo);
    if (start + width - 1 > hi) start = hi - width + 1;
    std::vector<double> xs(width);
    for (std::size_t j = 0; j < width; ++j)
        xs[j] = h * static_cast<double>(start + j);
    const std::vector<double> wts = fd_weights(h * static_cast<double>(i), xs, m);
    double acc = 0.0;
    for (std::size_t j = 0; j < width; ++j) acc += wts[j] * values[start + j];
    return acc;
}

// Piecewise-smooth derivative of a profile component: spectral when there are
// no kinks, otherwise confined finite differences inside each smooth piece.
// Returns per-node values plus, at each kink node, the one-sided value from
// the left (the global array carries the right-sided value there).
struct PiecewiseDerivative {
    std::vector<double> values;                 // right-sided at kinks
    std::vector<double> left_at_kink;           // parallel to kinks
};

PiecewiseDerivative piecewise_derivative(const Field& f, std::span<const std::size_t> kinks) {
    PiecewiseDerivative out;
    if (kinks.empty()) {
        out.values = diff(f).values;
        return out;
    }
    const double h = f.grid->spacing();
    const std::size_t n = f.size();
    std::vector<std::size_t> cuts(kinks.begin(), kinks.end());
    std::sort(cuts.begin(), cuts.end());
    out.values.assign(n, 0.0);
    out.left_at_kink.assign(cuts.size(), 0.0);

    // Each piece [lo..hi] writes its own one-sided values; the kink node first
    // receives the left-piece value (recorded), then the next piece overwrites
    // it with the right-piece value, which the global array keeps.
    std::size_t lo = 0;
    for (std::size_t c = 0; c <= cuts.size(); ++c) {
        const std::size_t hi = c < cuts.size() ? cuts[c] : n - 1;
        if (hi > lo) {
            for (std::size_t i = lo; i <= hi; ++i)
                out.values[i] = confined_derivative(f.values, lo, hi, i, h, 1);
            if (c < cuts.size()) out.left_at_kink[c] = out.values[hi];
        }
        lo = hi;
    }
    return out;
}

// Integrate samples over [x_lo(piece), x_hi(piece)] pieces split at kinks:
// trapezoid plus Euler-Maclaurin end corrections from one-sided derivative
// estimates. values_left supplies the integrand's left-limit at kink nodes.
double integrate_piecewise(std::span<const double> values,
                           std::span<const std::size_t> kinks,
                           std::span<const double> left_at_kink, double h) {
    const std::size_t n = values.size();
    if (kinks.empty()) {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc * h;  // periodic trapezoid
    }
    double total = 0.0;
    std::size_t lo = 0;
    double lo_value = values[0];
    std::vector<double> piece;
    for (std::size_t c = 0; c <= kinks.size(); ++c) {
        const std::size_t hi = c < kinks.size() ? kinks[c] : n - 1;
        if (hi <= lo) continue;
        piece.assign(values.begin() + static_cast<long>(lo),
                     values.begin() + static_cast<long>(hi) + 1);
        piece.front() = lo_value;
        if (c < kinks.size()) piece.back() = left_at_kink[c];

        double acc = 0.5 * (piece.front() + piece.back());
        for (std::size_t i = 1; i + 1 < piece.size(); ++i) acc += piece[i];
        double integral = acc * h;

        if (piece.size() >= 7) {
            std::vector<double> xs(7);
            for (int j = 0; j < 7; ++j) xs[static_cast<std::size_t>(j)] = h * j;
            const auto w1l = fd_weights(0.0, xs, 1);
            const auto w3l = fd_weights(0.0, xs, 3);
            const auto w1r = fd_weights(h * 6.0, xs, 1);
            const auto w3r = fd_weights(h * 6.0, xs, 3);
            double d1a = 0.0, d3a = 0.0, d1b = 0.0, d3b = 0.0;
            const std::size_t m = piece.size();
            for (std::size_t j = 0; j < 7; ++j) {
                d1a += w1l[j] * piece[j];
                d3a += w3l[j] * piece[j];
                d1b += w1r[j] * piece[m - 7 + j];
                d3b += w3r[j] * piece[m - 7 + j];
            }
            integral += -(h * h / 12.0) * (d1b - d1a) +
                        (h * h * h * h / 720.0) * (d3b - d3a);
        }
        total += integral;
        lo = hi;
        lo_value = values[lo];  // right-limit value enters the next piece
    }
    return total;
}

struct PhiDerivatives {
    std::vector<double> phi, x1, x2, x3;  // phi and its first three derivatives
    double scale = 0.0;                   // ||phi||_H3
};

PhiDerivatives phi_tables(const Grid& g, const TestFunction& phi) {
    PhiDerivatives t;
    t.phi.resize(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) t.phi[i] = phi.eval(g.node(i));
    auto spec = g.forward(t.phi);
    auto k = g.wavenumbers();

    double h3 = 0.0;
    const double two_L = 2.0 * g.half_width();
    const double inv_n2 = 1.0 / (static_cast<double>(g.size()) * static_cast<double>(g.size()));
    for (std::size_t j = 0; j < spec.size(); ++j) {
        const double mag2 = std::norm(spec[j]);
        const double weight = (j == 0 || j + 1 == spec.size()) ? 1.0 : 2.0;
        const double k2 = 1.0 + k[j] * k[j];
        h3 += weight * k2 * k2 * k2 * mag2;
    }
    t.scale = std::sqrt(h3 * two_L * inv_n2);

    auto derive = [&](int order) {
        auto s = spec;
        for (std::size_t j = 0; j < s.size(); ++j) {
            std::complex<double> ik(0.0, k[j]);
            std::complex<double> mult = 1.0;
            for (int o = 0; o < order; ++o) mult *= ik;
            s[j] *= mult;
        }
        if (order % 2 == 1) s.back() = 0.0;
        return g.inverse(s);
    };
    t.x1 = derive(1);
    t.x2 = derive(2);
    t.x3 = derive(3);
    return t;
}

}  // namespace

WeakResidualReport weak_residual(const WaveProfile& profile,
                                 std::span<const TestFunction> test_set) {
    if (profile.U.grid != profile.V.grid || profile.U.grid != profile.W.grid)
        throw std::invalid_argument("weak_residual: profile components on different grids");
    const Grid& g = *profile.U.grid;
    const std::size_t n = g.size();
    const double h = g.spacing();

    std::vector<std::size_t> kinks(profile.kink_nodes.begin(), profile.kink_nodes.end());
    std::sort(kinks.begin(), kinks.end());
    kinks.erase(std::unique(kinks.begin(), kinks.end()), kinks.end());
    for (std::size_t k : kinks)
        if (k == 0 || k + 1 >= n)
            throw std::invalid_argument("weak_residual: kink node on the domain seam");

    const PiecewiseDerivative Ux = piecewise_derivative(profile.U, kinks);
    const PiecewiseDerivative Vx = piecewise_derivative(profile.V, kinks);
    const PiecewiseDerivative Wx = piecewise_derivative(profile.W, kinks);

    // Steady weak-form integrand for one equation; `a` is the equation's own
    // component, `b`/`cc` the other two.
    auto assemble = [&](const Field& a, const Field& b, const Field& cc,
                        const PhiDerivatives& t, std::size_t i, double ax_i, double bx_i,
                        double cx_i) {
        const double others = b[i] + cc[i];
        const double others_x = bx_i + cx_i;
        const double quad = 1.5 * a[i] * a[i] + 0.5 * ax_i * ax_i + a[i] * others +
                            ax_i * others_x +
                            0.5 * (b[i] * b[i] + cc[i] * cc[i] - bx_i * bx_i - cx_i * cx_i);
        return -profile.c * a[i] * (t.x1[i] - t.x3[i]) + ax_i * others * t.x2[i] -
               0.5 * a[i] * a[i] * t.x3[i] + quad * t.x1[i];
    };

    WeakResidualReport report;
    for (const TestFunction& phi : test_set) {
        const PhiDerivatives t = phi_tables(g, phi);
        WeakResidualEntry entry;
        entry.name = phi.name;
        entry.scale = t.scale;

        std::vector<double> wu(n), wv(n), ww(n);
        std::vector<double> wu_left(kinks.size()), wv_left(kinks.size()), ww_left(kinks.size());
        for (std::size_t i = 0; i < n; ++i) {
            wu[i] = assemble(profile.U, profile.V, profile.W, t, i, Ux.values[i],
                             Vx.values[i], Wx.values[i]);
            wv[i] = assemble(profile.V, profile.U, profile.W, t, i, Vx.values[i],
                             Ux.values[i], Wx.values[i]);
            ww[i] = assemble(profile.W, profile.U, profile.V, t, i, Wx.values[i],
                             Ux.values[i], Vx.values[i]);
        }
        for (std::size_t c = 0; c < kinks.size(); ++c) {
            const std::size_t i = kinks[c];
            wu_left[c] = assemble(profile.U, profile.V, profile.W, t, i, Ux.left_at_kink[c],
                                  Vx.left_at_kink[c], Wx.left_at_kink[c]);
            wv_left[c] = assemble(profile.V, profile.U, profile.W, t, i, Vx.left_at_kink[c],
                                  Ux.left_at_kink[c], Wx.left_at_kink[c]);
            ww_left[c] = assemble(profile.W, profile.U, profile.V, t, i, Wx.left_at_kink[c],
                                  Ux.left_at_kink[c], Vx.left_at_kink[c]);
        }

        entry.raw_u = integrate_piecewise(wu, kinks, wu_left, h);
        entry.raw_v = integrate_piecewise(wv, kinks, wv_left, h);
        entry.raw_w = integrate_piecewise(ww, kinks, ww_left, h);
        report.max_u = std::max(report.max_u, std::abs(entry.raw_u) / entry.scale);
        report.max_v = std::max(report.max_v, std::abs(entry.raw_v) / entry.scale);
        report.max_w = std::max(report.max_w, std::abs(entry.raw_w) / entry.scale);
        report.entries.push_back(std::move(entry));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Traveling propagation check
// ---------------------------------------------------------------------------

TravelingReport traveling_check(std::span<const StateTriple> trajectory) {
    if (trajectory.size() < 5)
        throw std::invalid_argument("traveling_check: need at least 5 samples");

    TravelingReport report;
    const StateTriple& z0 = trajectory[0];
    const Grid& g = *z0.u.grid;
    const double norm0_sq = inner(z0.u, z0.u) + inner(z0.v, z0.v) + inner(z0.w, z0.w);
    if (norm0_sq < 1e-28) {
        report.degenerate = true;
        return report;
    }

    // Translation correlator against the first sample.
    const double two_L = 2.0 * g.half_width();
    const double inv_n2 = 1.0 / (static_cast<double>(g.size()) * static_cast<double>(g.size()));
    auto k = g.wavenumbers();
    std::array<std::vector<std::complex<double>>, 3> base;
    {
        int c = 0;
        for (const Field* f : {&z0.u, &z0.v, &z0.w}) base[static_cast<std::size_t>(c++)] = g.forward(f->values);
    }

    double b0 = 0.0;
    bool first = true;
    for (const StateTriple& z : trajectory) {
        const SymmetryAxis ax = symmetry_axis(z);
        if (ax.degenerate) report.degenerate = true;

        TravelingSample sample;
        sample.t = z.t;
        sample.b = ax.b;
        sample.mismatch = ax.mismatch;

        if (!report.degenerate) {
            const double normt_sq = inner(z.u, z.u) + inner(z.v, z.v) + inner(z.w, z.w);
            std::array<std::vector<std::complex<double>>, 3> cur;
            int c = 0;
            for (const Field* f : {&z.u, &z.v, &z.w}) cur[static_cast<std::size_t>(c++)] = g.forward(f->values);
            // Cross-correlation sum_j X_t conj(X_0) e^{i k_j s}, components added.
            std::vector<std::complex<double>> cross(g.spectrum_size(), {0.0, 0.0});
            for (std::size_t comp = 0; comp < 3; ++comp)
                for (std::size_t j = 0; j + 1 < cross.size(); ++j)
                    cross[j] += cur[comp][j] * std::conj(base[comp][j]);
            auto distance_sq = [&](double s) {
                const std::complex<double> step = std::exp(std::complex<double>(0.0, k[1] * s));
                std::complex<double> phase(1.0, 0.0);
                double acc = cross[0].real();
                for (std::size_t j = 1; j + 1 < cross.size(); ++j) {
                    phase *= step;
                    acc += 2.0 * (cross[j] * phase).real();
                }
                const double corr = two_L * inv_n2 * acc;
                return normt_sq + norm0_sq - 2.0 * corr;
            };
            if (first) b0 = ax.b;
            const double seed = ax.b - b0;
            double best_s = seed, best_v = distance_sq(seed);
            const double span = std::max(2.0, 0.1 * g.half_width());
            for (int i = 0; i <= 64; ++i) {
                const double s = seed - span + (2.0 * span * i) / 64.0;
                const double v = distance_sq(s);
                if (v < best_v) {
                    best_v = v;
                    best_s = s;
                }
            }
            // Refine with the physical-space distance; the spectral objective
            // cannot resolve the optimum below its cancellation floor.
            auto distance_sq_physical = [&](double s) {
                double dist = 0.0;
                int comp = 0;
                for (const Field* f : {&z.u, &z.v, &z.w}) {
                    const Field* base_field = comp == 0 ? &z0.u : (comp == 1 ? &z0.v : &z0.w);
                    Field d = *f - shift(*base_field, s);
                    dist += inner(d, d);
                    ++comp;
                }
                return dist;
            };
            const double cell = 2.0 * span / 64.0;
            const double s_star = golden_min(distance_sq_physical, best_s - cell,
                                             best_s + cell, 1e-12 * g.half_width());
            sample.shape_error = std::sqrt(distance_sq_physical(s_star) / norm0_sq);
        }
        report.samples.push_back(sample);
        first = false;
    }
    if (report.degenerate) return report;

    // Least-squares line through b(t).
    const std::size_t m = report.samples.size();
    double st = 0.0, sb = 0.0;
    for (const auto& s : report.samples) {
        st += s.t;
        sb += s.b;
    }
    const double mt = st / static_cast<double>(m), mb = sb / static_cast<double>(m);
    double stt = 0.0, stb = 0.0, sbb = 0.0;
    for (const auto& s : report.samples) {
        stt += (s.t - mt) * (s.t - mt);
        stb += (s.t - mt) * (s.b - mb);
        sbb += (s.b - mb) * (s.b - mb);
    }
    report.speed = stt > 0.0 ? stb / stt : 0.0;
    if (stt > 0.0 && sbb > 0.0) {
        double ss_res = 0.0;
        for (const auto& s : report.samples) {
            const double r = s.b - (mb + report.speed * (s.t - mt));
            ss_res += r * r;
        }
        report.r_squared = std::max(0.0, 1.0 - ss_res / sbb);
    }
    for (const auto& s : report.samples)
        report.max_shape_error = std::max(report.max_shape_error, s.shape_error);
    return report;
}

}  // namespace ch3
