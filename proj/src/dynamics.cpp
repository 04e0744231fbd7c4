#include "ch3/dynamics.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace ch3 {

namespace {

enum class Multiplier { none, green, green_derivative };

// One spectral pass: forward transform, zero bins above the 2/3 cutoff, apply
// the requested multiplier, transform back.
Field masked_transform(const Field& f, Multiplier m) {
    const Grid& g = *f.grid;
    auto spec = g.forward(f.values);
    auto k = g.wavenumbers();
    const std::size_t cutoff = g.dealias_cutoff();
    for (std::size_t j = 0; j < spec.size(); ++j) {
        if (j > cutoff) {
            spec[j] = 0.0;
            continue;
        }
        switch (m) {
            case Multiplier::none:
                break;
            case Multiplier::green:
                spec[j] /= 1.0 + k[j] * k[j];
                break;
            case Multiplier::green_derivative:
                spec[j] *= std::complex<double>(0.0, k[j]) / (1.0 + k[j] * k[j]);
                break;
        }
    }
    Field out;
    out.grid = f.grid;
    out.values = g.inverse(spec);
    return out;
}

SourceTriple sources_from(const Field& u, const Field& v, const Field& w,
                          const Field& ux, const Field& vx, const Field& wx) {
    const std::size_t n = u.size();
    SourceTriple s;
    s.f = make_field(u.grid);
    s.g = make_field(u.grid);
    s.h = make_field(u.grid);
    for (std::size_t i = 0; i < n; ++i) {
        const double u2 = u[i] * u[i], v2 = v[i] * v[i], w2 = w[i] * w[i];
        const double ux2 = ux[i] * ux[i], vx2 = vx[i] * vx[i], wx2 = wx[i] * wx[i];
        s.f[i] = u2 + 0.5 * ux2 + ux[i] * vx[i] + ux[i] * wx[i] + 0.5 * v2 - 0.5 * vx2 +
                 0.5 * w2 - 0.5 * wx2;
        s.g[i] = v2 + 0.5 * vx2 + ux[i] * vx[i] + wx[i] * vx[i] + 0.5 * u2 - 0.5 * ux2 +
                 0.5 * w2 - 0.5 * wx2;
        s.h[i] = w2 + 0.5 * wx2 + ux[i] * wx[i] + vx[i] * wx[i] + 0.5 * u2 - 0.5 * ux2 +
                 0.5 * v2 - 0.5 * vx2;
    }
    return s;
}

struct StepInfo {
    double max_speed = 0.0;  // max |u+v+w|
    double min_slope = 0.0;  // min over components of min_x component_x
};

StepInfo probe(const StateTriple& z) {
    Field ux = diff(z.u), vx = diff(z.v), wx = diff(z.w);
    StepInfo info;
    for (std::size_t i = 0; i < z.u.size(); ++i) {
        info.max_speed = std::max(info.max_speed, std::abs(z.u[i] + z.v[i] + z.w[i]));
        info.min_slope = std::min({info.min_slope, ux[i], vx[i], wx[i]});
    }
    return info;
}

Tendency rhs_impl(const StateTriple& z, ConvolutionPath path) {
    if (z.u.grid != z.v.grid || z.u.grid != z.w.grid)
        throw std::invalid_argument("rhs: state components live on different grids");
    const std::size_t n = z.u.size();

    Field ux = diff(z.u), vx = diff(z.v), wx = diff(z.w);

    // Transport products (u+v+w) * component_x and convolution arguments.
    Field tu = make_field(z.u.grid), tv = make_field(z.u.grid), tw = make_field(z.u.grid);
    Field au = make_field(z.u.grid), av = make_field(z.u.grid), aw = make_field(z.u.grid);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = z.u[i] + z.v[i] + z.w[i];
        tu[i] = s * ux[i];
        tv[i] = s * vx[i];
        tw[i] = s * wx[i];
        au[i] = z.u[i] * (vx[i] + wx[i]);
        av[i] = z.v[i] * (ux[i] + wx[i]);
        aw[i] = z.w[i] * (ux[i] + vx[i]);
    }
    SourceTriple src = sources_from(z.u, z.v, z.w, ux, vx, wx);

    tu = masked_transform(tu, Multiplier::none);
    tv = masked_transform(tv, Multiplier::none);
    tw = masked_transform(tw, Multiplier::none);

    Field cu, cv, cw, dfu, dfv, dfw;
    if (path == ConvolutionPath::spectral) {
        cu = masked_transform(au, Multiplier::green);
        cv = masked_transform(av, Multiplier::green);
        cw = masked_transform(aw, Multiplier::green);
        dfu = masked_transform(src.f, Multiplier::green_derivative);
        dfv = masked_transform(src.g, Multiplier::green_derivative);
        dfw = masked_transform(src.h, Multiplier::green_derivative);
    } else {
        cu = quadrature_convolve(masked_transform(au, Multiplier::none));
        cv = quadrature_convolve(masked_transform(av, Multiplier::none));
        cw = quadrature_convolve(masked_transform(aw, Multiplier::none));
        dfu = quadrature_convolve(masked_transform(src.f, Multiplier::none), true);
        dfv = quadrature_convolve(masked_transform(src.g, Multiplier::none), true);
        dfw = quadrature_convolve(masked_transform(src.h, Multiplier::none), true);
    }

    Tendency out;
    out.du = make_field(z.u.grid);
    out.dv = make_field(z.u.grid);
    out.dw = make_field(z.u.grid);
    for (std::size_t i = 0; i < n; ++i) {
        out.du[i] = -(tu[i] + cu[i] + dfu[i]);
        out.dv[i] = -(tv[i] + cv[i] + dfv[i]);
        out.dw[i] = -(tw[i] + cw[i] + dfw[i]);
    }
    return out;
}

}  // namespace

SourceTriple nonlocal_sources(const StateTriple& z) {
    return sources_from(z.u, z.v, z.w, diff(z.u), diff(z.v), diff(z.w));
}

Tendency rhs(const StateTriple& z, ConvolutionPath path) { return rhs_impl(z, path); }

Tendency rhs_potential_form(const PotentialTriple& p, const StateTriple& z) {
    const std::size_t n = z.u.size();
    Field ux = diff(z.u), vx = diff(z.v), wx = diff(z.w);
    Field mx = diff(p.m), nx = diff(p.n), lx = diff(p.l);

    // (m(v+w))_x and analogs with the product dealiased first.
    Field mvw = make_field(z.u.grid), nuw = make_field(z.u.grid), luv = make_field(z.u.grid);
    for (std::size_t i = 0; i < n; ++i) {
        mvw[i] = p.m[i] * (z.v[i] + z.w[i]);
        nuw[i] = p.n[i] * (z.u[i] + z.w[i]);
        luv[i] = p.l[i] * (z.u[i] + z.v[i]);
    }
    Field dmvw = diff(masked_transform(mvw, Multiplier::none));
    Field dnuw = diff(masked_transform(nuw, Multiplier::none));
    Field dluv = diff(masked_transform(luv, Multiplier::none));

    Tendency out;
    out.du = make_field(z.u.grid);
    out.dv = make_field(z.u.grid);
    out.dw = make_field(z.u.grid);
    for (std::size_t i = 0; i < n; ++i) {
        out.du[i] = -z.u[i] * mx[i] - 2.0 * p.m[i] * ux[i] - dmvw[i] - p.n[i] * vx[i] -
                    p.l[i] * wx[i];
        out.dv[i] = -z.v[i] * nx[i] - 2.0 * p.n[i] * vx[i] - dnuw[i] - p.m[i] * ux[i] -
                    p.l[i] * wx[i];
        out.dw[i] = -z.w[i] * lx[i] - 2.0 * p.l[i] * wx[i] - dluv[i] - p.m[i] * ux[i] -
                    p.n[i] * vx[i];
    }
    return out;
}

StateTriple rk4_step(const StateTriple& z, double dt, ConvolutionPath path) {
    if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be positive");
    auto advance = [&](const StateTriple& base, double a, const Tendency& k) {
        StateTriple y = base;
        axpy(y.u, a, k.du);
        axpy(y.v, a, k.dv);
        axpy(y.w, a, k.dw);
        y.t = base.t + a;
        return y;
    };
    Tendency k1 = rhs_impl(z, path);
    StateTriple y2 = advance(z, 0.5 * dt, k1);
    Tendency k2 = rhs_impl(y2, path);
    StateTriple y3 = advance(z, 0.5 * dt, k2);
    Tendency k3 = rhs_impl(y3, path);
    StateTriple y4 = advance(z, dt, k3);
    Tendency k4 = rhs_impl(y4, path);

    StateTriple out = z;
    const double c = dt / 6.0;
    for (std::size_t i = 0; i < z.u.size(); ++i) {
        out.u[i] += c * (k1.du[i] + 2.0 * k2.du[i] + 2.0 * k3.du[i] + k4.du[i]);
        out.v[i] += c * (k1.dv[i] + 2.0 * k2.dv[i] + 2.0 * k3.dv[i] + k4.dv[i]);
        out.w[i] += c * (k1.dw[i] + 2.0 * k2.dw[i] + 2.0 * k3.dw[i] + k4.dw[i]);
    }
    out.t = z.t + dt;
    return out;
}

StateTriple step(const StateTriple& z, const StepControl& control, ConvolutionPath path) {
    return rk4_step(z, control.dt, path);
}

const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::reached_t_end: return "reached_t_end";
        case StopReason::wave_breaking: return "wave_breaking";
        case StopReason::nonfinite: return "nonfinite";
        case StopReason::dt_underflow: return "dt_underflow";
    }
    return "unknown";
}

TerminationReport run(const StateTriple& initial, const StepControl& control, double t_end,
                      double cadence, const SampleCallback& on_sample, ConvolutionPath path) {
    if (!(control.dt > 0.0) || !(control.dt_min > 0.0) || control.dt_min >= control.dt)
        throw std::invalid_argument("run: need 0 < dt_min < dt");
    if (!(control.cfl_target > 0.0) || control.cfl_target > 1.0)
        throw std::invalid_argument("run: cfl_target must lie in (0, 1]");
    if (!(cadence > 0.0)) throw std::invalid_argument("run: cadence must be positive");
    if (!(t_end >= initial.t)) throw std::invalid_argument("run: t_end precedes initial time");

    // Project the data onto the dealiased band once; tendencies stay inside it.
    StateTriple z = initial;
    z.u = dealias(initial.u);
    z.v = dealias(initial.v);
    z.w = dealias(initial.w);

    const double E0 = energy(z);
    const double slope_threshold =
        control.slope_threshold > 0.0 ? control.slope_threshold : 50.0 * std::sqrt(E0);

    TerminationReport report;
    report.slope_threshold_used = slope_threshold;
    report.reason = StopReason::reached_t_end;

    const double t0 = z.t;
    const double dx = z.u.grid->spacing();
    const double time_eps = 1e-12 * std::max(1.0, std::abs(t_end));

    std::size_t sample_index = 0;
    double last_emitted = -1.0;
    auto emit = [&](const StateTriple& s) {
        if (on_sample) on_sample(s);
        last_emitted = s.t;
    };
    emit(z);
    ++sample_index;

    auto slope_plunging = [&]() {
        const auto& h = report.min_slope_history;
        if (h.size() < 3) return false;
        const std::size_t m = h.size();
        return h[m - 1].min_slope < h[m - 2].min_slope &&
               h[m - 2].min_slope < h[m - 3].min_slope;
    };

    while (z.t < t_end - time_eps) {
        const StepInfo info = probe(z);
        report.min_slope_history.push_back({z.t, info.min_slope});

        // Transport CFL plus a slope channel that resolves the collapse
        // timescale 1/|min_slope| with ~25/cfl steps per e-fold. The breaking
        // check watches the slope channel alone: the transport step scales
        // with dx and would mask the slope signal on fine grids.
        const double neg_slope = std::max(0.0, -info.min_slope);
        const double dt_slope = control.cfl_target / (25.0 * neg_slope + 1e-300);
        double dt = std::min(control.dt, dt_slope);
        dt = std::min(dt, control.cfl_target * dx / (info.max_speed + 1e-300));

        if (dt_slope < control.dt_min) {
            if (info.min_slope < -slope_threshold && slope_plunging())
                report.reason = StopReason::wave_breaking;
            else
                report.reason = StopReason::dt_underflow;
            report.t_final = z.t;
            if (z.t != last_emitted) emit(z);
            return report;
        }

        const double next_sample = t0 + static_cast<double>(sample_index) * cadence;
        const double next_event = std::min(next_sample, t_end);
        if (z.t + dt > next_event - time_eps) dt = next_event - z.t;

        z = rk4_step(z, dt, path);

        if (!state_finite(z)) {
            report.reason = StopReason::nonfinite;
            report.t_final = z.t;
            return report;
        }
        if (z.t >= next_sample - time_eps) {
            emit(z);
            ++sample_index;
        }
    }

    report.reason = StopReason::reached_t_end;
    report.t_final = z.t;
    if (z.t != last_emitted) emit(z);
    return report;
}

RunResult run_collect(const StateTriple& initial, const StepControl& control, double t_end,
                      double cadence, ConvolutionPath path) {
    RunResult result;
    result.report = run(
        initial, control, t_end, cadence,
        [&](const StateTriple& s) { result.samples.push_back(s); }, path);
    return result;
}

}  // namespace ch3
