#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ch3/state.hpp"

namespace ch3 {

// ---------------------------------------------------------------------------
// Initial-data library
// ---------------------------------------------------------------------------

/// Sum-of-peakons ansatz: u = sum p_i e^{-|x-q_i|} and likewise v with r_i,
/// w with s_i. Positions are kept sorted ascending.
struct PeakonAnsatz {
    std::vector<double> positions;
    std::vector<double> p, r, s;
};

StateTriple peakon_field(const PeakonAnsatz& ansatz, GridPtr grid);

/// Convolution with an even compactly supported bump of support radius
/// epsilon and unit discrete mass (constants pass through exactly). Needed to
/// place peakon data inside the H^s, s > 3/2 hypothesis class before running
/// the solver. Requires epsilon >= 2 dx.
Field mollify(const Field& f, double epsilon);

/// Positions/amplitudes rates of the CH n-peakon ODE
///   dq_j = sum_k p_k e^{-|q_j-q_k|},
///   dp_j = p_j sum_k p_k sgn(q_j-q_k) e^{-|q_j-q_k|},  sgn(0) = 0.
struct PeakonRates {
    std::vector<double> dq, dp;
};
PeakonRates ch_npeakon_rhs(std::span<const double> q, std::span<const double> p);

/// Steepening front u0 = v0 = w0 = -A tanh(x/delta) e^{-x^2/sigma^2}.
/// Shrinking delta at fixed A, sigma drives Q(0)/E0^{3/2} to -infinity, which
/// is how the breaking hypothesis is reached (amplitude scaling alone cannot
/// cross the threshold since both sides scale as the cube).
struct SteepFrontData {
    StateTriple state;
    double E0 = 0.0;
    double Q0 = 0.0;
    double threshold = 0.0;  // -9 E0 sqrt(2 E0), 0 for zero data
    double margin = 0.0;     // Q0 / threshold; hypothesis met when > 1
    bool hypothesis_met = false;
    bool resolved = true;  // delta > 4 dx
};
SteepFrontData steep_front_data(GridPtr grid, double amplitude, double width, double envelope);

// Smooth generator triples used by the experiment commands.
StateTriple gaussian_triple(GridPtr grid, const std::array<double, 3>& amplitudes,
                            const std::array<double, 3>& centers,
                            const std::array<double, 3>& widths);
StateTriple sech_triple(GridPtr grid, const std::array<double, 3>& amplitudes, double alpha);
/// Builds (m0, n0, l0) = a_i sech(rate x) and returns the velocities
/// u = (1-dxx)^{-1} m0 etc., so the momenta carry the prescribed tail rate.
StateTriple potential_sech_triple(GridPtr grid, const std::array<double, 3>& amplitudes,
                                  double rate);

// ---------------------------------------------------------------------------
// Symmetry-axis tracking
// ---------------------------------------------------------------------------

struct SymmetryAxis {
    double b = 0.0;
    double mismatch = 0.0;  // || z - z(2b - .) ||_L2 over the three components
    bool degenerate = false;
};

/// Least-mismatch reflection axis, seeded at the H^1-energy centroid and
/// refined by golden section; the reflection is evaluated spectrally.
SymmetryAxis symmetry_axis(const StateTriple& z);

// ---------------------------------------------------------------------------
// Traveling-wave weak residuals
// ---------------------------------------------------------------------------

/// Candidate traveling profile (U, V, W) with speed c. kink_nodes lists grid
/// indices where the profile's derivative jumps (peakon crests); quadrature
/// and profile derivatives are then handled piecewise.
struct WaveProfile {
    Field U, V, W;
    double c = 0.0;
    std::vector<std::size_t> kink_nodes;
};

/// Single CH peakon profile U = c e^{-|x-x0|}, V = W = 0, with the crest
/// snapped to the nearest grid node.
WaveProfile ch_peakon_profile(GridPtr grid, double c, double x0);

struct TestFunction {
    std::string name;
    std::function<double(double)> eval;
};

/// The documented fixed set of 12 smooth test functions: Gaussians times low
/// polynomials under a C-infinity cutoff supported inside [-0.8L, 0.8L].
std::vector<TestFunction> standard_test_functions(double half_width);

struct WeakResidualEntry {
    std::string name;
    double raw_u = 0.0, raw_v = 0.0, raw_w = 0.0;  // pairing values
    double scale = 0.0;                            // ||phi||_H3
};

struct WeakResidualReport {
    std::vector<WeakResidualEntry> entries;
    double max_u = 0.0, max_v = 0.0, max_w = 0.0;  // max |raw| / scale
};

/// Steady weak-form pairings of the traveling ansatz against each test
/// function: for the u-equation
///   <-cU, (1-dxx) phi_x> + <U_x(V+W), phi_xx> - 1/2 <U^2, phi_xxx>
///   + <(3/2)U^2 + 1/2 U_x^2 + U(V+W) + U_x(V+W)_x
///      + 1/2 (V^2+W^2-V_x^2-W_x^2), phi_x>
/// and the two cyclic analogs. Test-function derivatives are spectral; the
/// profile is differentiated only once, piecewise across its kinks.
WeakResidualReport weak_residual(const WaveProfile& profile,
                                 std::span<const TestFunction> test_set);

// ---------------------------------------------------------------------------
// Traveling propagation check
// ---------------------------------------------------------------------------

struct TravelingSample {
    double t = 0.0;
    double b = 0.0;
    double mismatch = 0.0;
    double shape_error = 0.0;  // min_s ||z(t) - z0(. - s)|| / ||z0||
};

struct TravelingReport {
    std::vector<TravelingSample> samples;
    double speed = 0.0;      // least-squares slope of b(t)
    double r_squared = 0.0;  // linearity of b(t)
    double max_shape_error = 0.0;
    bool degenerate = false;
};

/// Fits the symmetry axis per sample, the drift speed b'(t) by least squares,
/// and the translation-matched shape error against the first sample. Requires
/// at least 5 samples.
TravelingReport traveling_check(std::span<const StateTriple> trajectory);

}  // namespace ch3
