#pragma once

#include "ch3/grid.hpp"

namespace ch3 {

/// The three velocity components (u, v, w) at one time instant.
struct StateTriple {
    Field u, v, w;
    double t = 0.0;
};

/// The momenta (m, n, l) = (1 - d^2/dx^2)(u, v, w).
struct PotentialTriple {
    Field m, n, l;
    double t = 0.0;
};

StateTriple make_state(GridPtr grid, double t = 0.0);
bool state_finite(const StateTriple& z);

/// Component-wise (1 - d^2/dx^2), evaluated spectrally.
PotentialTriple potentials(const StateTriple& z);

/// E = ||u||_H1^2 + ||v||_H1^2 + ||w||_H1^2 with spectral derivatives and
/// trapezoid quadrature. Conserved along smooth trajectories.
double energy(const StateTriple& z);

/// sup|u|^2 + sup|v|^2 + sup|w|^2 against the conservation-law bound E0/2.
struct SupBoundCheck {
    double value;      // sum of squared sup norms
    double bound;      // E0 / 2
    double tolerance;  // 1e-8 * E0
    bool pass;
};
SupBoundCheck sup_norm_bound_check(const StateTriple& z, double E0);

}  // namespace ch3
