#include "ch3/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ch3 {

double q_functional(const StateTriple& z) {
    Field sx = diff(z.u) + diff(z.v) + diff(z.w);
    double acc = 0.0;
    for (double s : sx.values) acc += s * s * s;
    return acc * sx.grid->spacing();
}

double slope_quartic(const StateTriple& z) {
    Field sx = diff(z.u) + diff(z.v) + diff(z.w);
    double acc = 0.0;
    for (double s : sx.values) acc += s * s * s * s;
    return acc * sx.grid->spacing();
}

double blowup_threshold(double E0) {
    if (!(E0 > 0.0)) throw std::invalid_argument("blowup_threshold: E0 must be positive");
    return -9.0 * E0 * std::sqrt(2.0 * E0);
}

std::optional<double> lifespan_bound(double Q0, double E0) {
    if (!(E0 > 0.0)) throw std::invalid_argument("lifespan_bound: E0 must be positive");
    const double a = 9.0 * E0 * std::sqrt(2.0 * E0);
    if (!(Q0 < -a)) return std::nullopt;  // theorem hypothesis requires strict inequality
    const double ratio = (Q0 - a) / (Q0 + a);
    return std::sqrt(2.0) / (3.0 * std::sqrt(E0)) * std::log(ratio);
}

DiagnosticsRecord diagnose(const StateTriple& z, std::span<const WeightedRequest> weighted) {
    DiagnosticsRecord rec;
    rec.t = z.t;

    const Grid& g = *z.u.grid;
    const std::size_t n = z.u.size();
    const double dx = g.spacing();

    // One forward transform per component serves both the spectral derivative
    // and the band-edge resolution indicator: the slope-spectrum amplitude
    // k |u_hat| near the dealias cutoff relative to its peak.
    auto k = g.wavenumbers();
    const std::size_t cutoff = g.dealias_cutoff();
    auto derivative_and_fraction = [&](const Field& f, Field& out) {
        auto spec = g.forward(f.values);
        double peak = 0.0, edge = 0.0;
        for (std::size_t j = 0; j <= cutoff; ++j) {
            const double m = k[j] * std::abs(spec[j]);
            peak = std::max(peak, m);
            if (j + cutoff / 10 >= cutoff) edge = std::max(edge, m);
        }
        if (peak > 0.0)
            rec.band_edge_fraction = std::max(rec.band_edge_fraction, edge / peak);
        for (std::size_t j = 0; j < spec.size(); ++j)
            spec[j] *= std::complex<double>(0.0, k[j]);
        spec.back() = 0.0;
        out.grid = f.grid;
        out.values = g.inverse(spec);
    };
    Field ux, vx, wx;
    derivative_and_fraction(z.u, ux);
    derivative_and_fraction(z.v, vx);
    derivative_and_fraction(z.w, wx);

    double e = 0.0, q3 = 0.0, q4 = 0.0;
    double min_ux = 0.0, min_vx = 0.0, min_wx = 0.0;
    double su = 0.0, sv = 0.0, sw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        e += z.u[i] * z.u[i] + z.v[i] * z.v[i] + z.w[i] * z.w[i];
        e += ux[i] * ux[i] + vx[i] * vx[i] + wx[i] * wx[i];
        const double s = ux[i] + vx[i] + wx[i];
        q3 += s * s * s;
        q4 += s * s * s * s;
        min_ux = std::min(min_ux, ux[i]);
        min_vx = std::min(min_vx, vx[i]);
        min_wx = std::min(min_wx, wx[i]);
        su = std::max(su, std::abs(z.u[i]));
        sv = std::max(sv, std::abs(z.v[i]));
        sw = std::max(sw, std::abs(z.w[i]));
    }
    rec.E = e * dx;
    rec.Q = q3 * dx;
    rec.slope_quartic = q4 * dx;
    rec.min_ux = min_ux;
    rec.min_vx = min_vx;
    rec.min_wx = min_wx;
    rec.sup_sq_sum = su * su + sv * sv + sw * sw;

    for (const auto& req : weighted)
        rec.weighted[req.name] = weighted_sup(z.u, req.spec) + weighted_sup(z.v, req.spec) +
                                 weighted_sup(z.w, req.spec);
    return rec;
}

RiccatiReport riccati_monitor(std::span<const DiagnosticsRecord> samples, double E0) {
    if (!(E0 > 0.0)) throw std::invalid_argument("riccati_monitor: E0 must be positive");
    RiccatiReport report;
    if (samples.size() < 3) return report;  // inconclusive
    report.conclusive = true;

    const double q_scale = E0 * std::sqrt(E0);
    const double E_ref = samples.front().E;
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
        const auto& a = samples[i - 1];
        const auto& b = samples[i];
        const auto& c = samples[i + 1];
        // Near breaking, Q changes by orders of magnitude within one cadence
        // interval; centered differences stop meaning anything there. Losing
        // the conservation law is the other sign that the discrete trajectory
        // has stopped tracking the strong solution the inequality is about.
        if (std::abs(c.Q - a.Q) > 0.5 * (std::abs(b.Q) + q_scale)) break;
        if (std::abs(c.E - E_ref) > 1e-6 * std::abs(E_ref)) break;
        if (c.band_edge_fraction > 1e-3) break;

        const double hm = b.t - a.t, hp = c.t - b.t;
        if (!(hm > 0.0) || !(hp > 0.0)) throw std::invalid_argument("riccati_monitor: non-increasing sample times");
        // Three-point derivative at the middle node, valid for unequal gaps.
        const double dqdt = (hm * hm * c.Q + (hp * hp - hm * hm) * b.Q - hp * hp * a.Q) /
                            (hm * hp * (hm + hp));

        const double tol = 1e-3 * (1.0 + b.Q * b.Q / (6.0 * E0));
        const double weak = -b.Q * b.Q / (6.0 * E0) + 27.0 * E0 * E0 + tol;
        const double strong = -0.5 * b.slope_quartic + 27.0 * E0 * E0 + tol;
        if (dqdt > weak) report.violations.push_back({i, b.t, dqdt, weak, false});
        if (dqdt > strong) report.violations.push_back({i, b.t, dqdt, strong, true});
        ++report.samples_checked;
    }
    return report;
}

namespace {

struct FitData {
    std::vector<double> x, y;
};

struct LineFit {
    double slope = 0.0, intercept = 0.0, r_squared = 0.0;
};

LineFit least_squares(const FitData& d) {
    const std::size_t m = d.x.size();
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sx += d.x[i];
        sy += d.y[i];
    }
    const double mx = sx / static_cast<double>(m), my = sy / static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (d.x[i] - mx) * (d.x[i] - mx);
        sxy += (d.x[i] - mx) * (d.y[i] - my);
        syy += (d.y[i] - my) * (d.y[i] - my);
    }
    LineFit fit;
    if (sxx <= 0.0 || syy <= 0.0) return fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = d.y[i] - (fit.intercept + fit.slope * d.x[i]);
        ss_res += r * r;
    }
    fit.r_squared = std::max(0.0, 1.0 - ss_res / syy);
    return fit;
}

}  // namespace

DecayFit decay_fit(const Field& f, TailSide side) {
    DecayFit out;
    out.side = side;

    const std::size_t n = f.size();
    const double L = f.grid->half_width();
    const double peak = max_abs(f);
    if (peak <= 0.0) {
        out.note = "zero field";
        return out;
    }

    std::size_t i_peak = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(f[i]) > std::abs(f[i_peak])) i_peak = i;

    const long dir = side == TailSide::right ? 1 : -1;
    auto idx = [&](long k) { return static_cast<std::size_t>(k); };

    // Walk outward from the peak to the 1e-2 shoulder, then to the effective
    // support edge at 1e-10 of the peak.
    long i_start = -1;
    long i = static_cast<long>(i_peak);
    while (i + dir >= 0 && i + dir < static_cast<long>(n)) {
        i += dir;
        if (std::abs(f[idx(i)]) <= 1e-2 * peak) {
            i_start = i;
            break;
        }
    }
    if (i_start < 0) {
        out.note = "no 1e-2 shoulder inside the domain";
        return out;
    }
    // The fit extends to where |f| reaches 1e-10 of the peak; the window also
    // stays inside 0.9 L and keeps a 5-unit margin from the effective support
    // edge, i.e. where the samples die numerically.
    long i_fit_end = -1, i_dead = -1;
    for (long j = i_start; j >= 0 && j < static_cast<long>(n); j += dir) {
        const double a = std::abs(f[idx(j)]);
        if (i_fit_end < 0 && a <= 1e-10 * peak) i_fit_end = j;
        if (a < 1e-300) {
            i_dead = j;
            break;
        }
    }

    double x_outer = i_fit_end >= 0 ? f.grid->node(idx(i_fit_end))
                                    : (dir > 0 ? 0.9 * L : -0.9 * L);
    if (dir > 0) {
        x_outer = std::min(x_outer, 0.9 * L);
        if (i_dead >= 0) x_outer = std::min(x_outer, f.grid->node(idx(i_dead)) - 5.0);
    } else {
        x_outer = std::max(x_outer, -0.9 * L);
        if (i_dead >= 0) x_outer = std::max(x_outer, f.grid->node(idx(i_dead)) + 5.0);
    }

    FitData data;
    std::vector<std::size_t> window;
    for (long j = i_start; j >= 0 && j < static_cast<long>(n); j += dir) {
        const double x = f.grid->node(idx(j));
        if (dir > 0 && x > x_outer) break;
        if (dir < 0 && x < x_outer) break;
        window.push_back(idx(j));
    }
    if (window.size() < 20) {
        out.note = "window shorter than 20 grid points";
        return out;
    }
    out.x_lo = std::min(f.grid->node(window.front()), f.grid->node(window.back()));
    out.x_hi = std::max(f.grid->node(window.front()), f.grid->node(window.back()));

    bool sign_change = false;
    for (std::size_t k = 1; k < window.size(); ++k)
        if (f[window[k]] * f[window[k - 1]] <= 0.0) sign_change = true;

    if (!sign_change) {
        for (std::size_t k : window) {
            const double a = std::abs(f[k]);
            if (a < 1e-300) continue;
            data.x.push_back(f.grid->node(k));
            data.y.push_back(std::log(a));
        }
    } else {
        // Oscillating tail: fit the envelope through local maxima of |f|.
        for (std::size_t k = 1; k + 1 < window.size(); ++k) {
            const double a = std::abs(f[window[k]]);
            if (a < 1e-300) continue;
            if (a >= std::abs(f[window[k - 1]]) && a > std::abs(f[window[k + 1]])) {
                data.x.push_back(f.grid->node(window[k]));
                data.y.push_back(std::log(a));
            }
        }
        out.note = "sign-changing tail; fitted envelope maxima";
        if (data.x.size() < 5) {
            out.note = "sign-changing tail with too few envelope maxima";
            return out;
        }
    }
    if (data.x.size() < 2) {
        out.note = "too few usable points above 1e-300";
        return out;
    }

    const LineFit fit = least_squares(data);
    out.alpha_hat = side == TailSide::right ? -fit.slope : fit.slope;
    out.r_squared = fit.r_squared;
    out.conclusive = true;
    out.reliable = fit.r_squared >= 0.999;
    if (!out.reliable && out.note.empty()) out.note = "r^2 below 0.999; decay not exponential";
    return out;
}

double weighted_sup(const Field& f, const WeightSpec& spec) {
    validate(spec);
    if (!(static_cast<double>(spec.N) < 0.9 * f.grid->half_width()))
        throw std::invalid_argument("weighted_sup: N must satisfy N < 0.9 L");
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        m = std::max(m, weight_eval(spec, f.grid->node(i)) * std::abs(f[i]));
    return m;
}

namespace {

// One component of the e^{(1+lambda)|x|}-weighted L^{2p} norm, computed in log
// space so large weights cannot overflow.
struct ComponentNorm {
    double value;
    bool truncated;
};

ComponentNorm weighted_lp(const Field& f, double lambda, int p_exponent) {
    const std::size_t n = f.size();
    const double L = f.grid->half_width();
    const double dx = f.grid->spacing();
    const double rate = 1.0 + lambda;

    std::vector<double> logw(n, -INFINITY);
    double max_log = -INFINITY;
    double max_log_window = -INFINITY;  // restricted to |x| <= 0.9 L
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::abs(f[i]);
        if (a < 1e-300) continue;
        const double x = f.grid->node(i);
        logw[i] = std::log(a) + rate * std::abs(x);
        max_log = std::max(max_log, logw[i]);
        if (std::abs(x) <= 0.9 * L) max_log_window = std::max(max_log_window, logw[i]);
    }
    if (!std::isfinite(max_log)) return {0.0, false};

    // Edge audit: weighted integrand at the nodes nearest +-0.9 L against its
    // maximum inside that window.
    bool truncated = false;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = f.grid->node(i);
        if (std::abs(std::abs(x) - 0.9 * L) <= 0.5 * dx && std::isfinite(logw[i])) {
            const double ratio_log = logw[i] - max_log_window;
            const double per_sample = p_exponent > 0
                                          ? 2.0 * static_cast<double>(p_exponent) * ratio_log
                                          : ratio_log;
            if (per_sample > std::log(1e-12)) truncated = true;
        }
    }

    if (p_exponent <= 0) return {std::exp(max_log), truncated};  // sup norm

    const double tp = 2.0 * static_cast<double>(p_exponent);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (std::isfinite(logw[i])) acc += std::exp(tp * (logw[i] - max_log));
    const double value = std::exp(max_log + std::log(acc * dx) / tp);
    return {value, truncated};
}

}  // namespace

PotentialNormResult potential_weighted_norm(const PotentialTriple& p, double lambda,
                                            int p_exponent) {
    if (lambda < 0.0) throw std::invalid_argument("potential_weighted_norm: lambda must be >= 0");
    PotentialNormResult out;
    for (const Field* f : {&p.m, &p.n, &p.l}) {
        const ComponentNorm c = weighted_lp(*f, lambda, p_exponent);
        out.value += c.value;
        out.truncated = out.truncated || c.truncated;
    }
    return out;
}

}  // namespace ch3
