#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ch3/state.hpp"

namespace ch3 {

/// The quadratic source terms feeding the nonlocal part of the evolution.
/// They satisfy f+g+h = 2(u^2+v^2+w^2) - (ux^2+vx^2+wx^2)/2
///                      + 2(ux*vx + ux*wx + vx*wx) pointwise.
struct SourceTriple {
    Field f, g, h;
};

SourceTriple nonlocal_sources(const StateTriple& z);

/// Which convolution backend evaluates G* and dG/dx* inside the tendencies.
/// The quadrature path exists so the fast spectral path can be checked against
/// an independent computation.
enum class ConvolutionPath { spectral, quadrature };

struct Tendency {
    Field du, dv, dw;
};

/// Time derivative of (u, v, w):
///   u_t = -(u+v+w) u_x - G*(u v_x + u w_x) - dG/dx * f   (and cyclic analogs).
/// Quadratic products are dealiased by the 2/3 rule before the convolutions.
Tendency rhs(const StateTriple& z, ConvolutionPath path = ConvolutionPath::spectral);

/// Time derivative of the momenta in the local form
///   m_t = -u m_x - 2 m u_x - (m(v+w))_x - n v_x - l w_x   (and cyclic analogs),
/// used as a cross-check: applying (1 - dxx) to rhs() must reproduce these on
/// smooth states.
Tendency rhs_potential_form(const PotentialTriple& p, const StateTriple& z);

/// Classical four-stage Runge-Kutta step of size dt.
StateTriple rk4_step(const StateTriple& z, double dt,
                     ConvolutionPath path = ConvolutionPath::spectral);

struct StepControl {
    double dt = 0.01;              // largest step taken
    double cfl_target = 0.5;       // Courant number for transport and slope limits
    double dt_min = 1e-6;          // floor; reaching it triggers the breaking check
    double slope_threshold = 0.0;  // negative-slope magnitude for the breaking
                                   // check; <= 0 selects 50*sqrt(E0)
};

StateTriple step(const StateTriple& z, const StepControl& control,
                 ConvolutionPath path = ConvolutionPath::spectral);

enum class StopReason { reached_t_end, wave_breaking, nonfinite, dt_underflow };
const char* to_string(StopReason r);

struct SlopeSample {
    double t;
    double min_slope;  // min over x and over components of u_x, v_x, w_x
};

struct TerminationReport {
    StopReason reason = StopReason::reached_t_end;
    double t_final = 0.0;
    std::vector<SlopeSample> min_slope_history;  // one entry per accepted step
    double slope_threshold_used = 0.0;
};

using SampleCallback = std::function<void(const StateTriple&)>;

/// Integrate from the initial state until t_end or a termination trigger,
/// invoking on_sample at t = 0, every cadence interval, t_end, and the final
/// state of an aborted run. The step size adapts to the transport CFL and to
/// a slope channel cfl/(25 |min_slope|) that keeps ~25/cfl steps per slope
/// e-fold. Wave breaking is declared only on three simultaneous signals: the
/// slope-channel step underflows dt_min, the slope is beyond the threshold,
/// and it is still falling.
TerminationReport run(const StateTriple& initial, const StepControl& control,
                      double t_end, double cadence, const SampleCallback& on_sample,
                      ConvolutionPath path = ConvolutionPath::spectral);

struct RunResult {
    std::vector<StateTriple> samples;
    TerminationReport report;
};

RunResult run_collect(const StateTriple& initial, const StepControl& control,
                      double t_end, double cadence,
                      ConvolutionPath path = ConvolutionPath::spectral);

}  // namespace ch3
