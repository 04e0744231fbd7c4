#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ch3/kernels.hpp"
#include "ch3/state.hpp"

namespace ch3 {

/// Q = Int (u_x + v_x + w_x)^3 dx, the cubic slope functional driving the
/// Riccati blow-up argument.
double q_functional(const StateTriple& z);

/// Int (u_x + v_x + w_x)^4 dx, needed by the strong Riccati form and the
/// Hoelder consistency check.
double slope_quartic(const StateTriple& z);

/// -9 E0 sqrt(2 E0); initial data with Q(0) below this forces finite-time
/// breaking. Rejects E0 <= 0.
double blowup_threshold(double E0);

/// Upper bound on the lifespan, sqrt(2)/(3 sqrt(E0)) * ln((Q0-a)/(Q0+a)) with
/// a = 9 E0 sqrt(2 E0); absent unless Q0 lies strictly below the threshold.
std::optional<double> lifespan_bound(double Q0, double E0);

struct WeightedRequest {
    std::string name;
    WeightSpec spec;
};

struct DiagnosticsRecord {
    double t = 0.0;
    double E = 0.0;
    double Q = 0.0;
    double min_ux = 0.0, min_vx = 0.0, min_wx = 0.0;
    double sup_sq_sum = 0.0;       // sup|u|^2 + sup|v|^2 + sup|w|^2
    double slope_quartic = 0.0;    // Int (u_x+v_x+w_x)^4 dx
    // Slope-spectrum amplitude (k |u_hat|) near the dealias cutoff relative
    // to its peak; the slope functionals are spectrally resolved while this
    // stays small.
    double band_edge_fraction = 0.0;
    std::map<std::string, double> weighted;
};

/// All per-sample scalars in one pass (one spectral derivative per component).
/// Weighted norms are sums over the three components of the weighted sup.
DiagnosticsRecord diagnose(const StateTriple& z,
                           std::span<const WeightedRequest> weighted = {});

// ---------------------------------------------------------------------------
// Riccati monitor
// ---------------------------------------------------------------------------

struct RiccatiViolation {
    std::size_t index;
    double t;
    double dq_dt;
    double bound;
    bool strong_form;  // true: quartic bound, false: -Q^2/(6E0) + 27 E0^2
};

struct RiccatiReport {
    bool conclusive = false;
    std::size_t samples_checked = 0;  // interior samples with resolvable dQ/dt
    std::vector<RiccatiViolation> violations;
};

/// Centered-difference check of dQ/dt <= -Q^2/(6 E0) + 27 E0^2 + tol and of
/// the stronger quartic form, with tol = 1e-3 (1 + Q^2/(6 E0)). The audit
/// stops at the last resolvable sample: when Q moves by more than half its
/// magnitude per interval, when the conservation law drifts past 1e-6, or
/// when the slope-spectrum band-edge fraction exceeds the audit's own 1e-3
/// relative tolerance (the slope functionals are then no longer resolved).
RiccatiReport riccati_monitor(std::span<const DiagnosticsRecord> samples, double E0);

// ---------------------------------------------------------------------------
// Decay-rate fitting
// ---------------------------------------------------------------------------

enum class TailSide { left, right };

struct DecayFit {
    double alpha_hat = 0.0;  // fitted decay exponent, tails ~ e^{-alpha |x|}
    double x_lo = 0.0, x_hi = 0.0;
    double r_squared = 0.0;
    TailSide side = TailSide::right;
    bool conclusive = false;  // enough window points to fit at all
    bool reliable = false;    // conclusive and r^2 >= 0.999 (exponential-like)
    std::string note;
};

/// Least-squares fit of ln|f| over an automatically chosen tail window: from
/// where |f| falls below 1e-2 of its peak out to where it reaches 1e-10 of the
/// peak, capped at 0.9 L, minus a 5-unit margin. Windows shorter than 20 grid
/// points are inconclusive; sign-changing tails are fitted through the local
/// maxima of |f|.
DecayFit decay_fit(const Field& f, TailSide side);

// ---------------------------------------------------------------------------
// Weighted norms
// ---------------------------------------------------------------------------

/// max_i weight(x_i) |f(x_i)| with the weight evaluated exactly from its
/// piecewise definition. Requires N < 0.9 L.
double weighted_sup(const Field& f, const WeightSpec& spec);

struct PotentialNormResult {
    double value = 0.0;
    bool truncated = false;  // weighted integrand not negligible at +-0.9 L
};

/// Sum over components of || component * e^{(1+lambda)|x|} ||_{L^{2p}} with
/// trapezoid quadrature in log space; p <= 0 selects the weighted sup norm.
PotentialNormResult potential_weighted_norm(const PotentialTriple& p, double lambda,
                                            int p_exponent);

}  // namespace ch3
