#include "ch3/state.hpp"

#include <stdexcept>

namespace ch3 {

StateTriple make_state(GridPtr grid, double t) {
    StateTriple z;
    z.u = make_field(grid);
    z.v = make_field(grid);
    z.w = make_field(grid);
    z.t = t;
    return z;
}

bool state_finite(const StateTriple& z) {
    return all_finite(z.u) && all_finite(z.v) && all_finite(z.w);
}

PotentialTriple potentials(const StateTriple& z) {
    PotentialTriple p;
    p.m = helmholtz_apply(z.u);
    p.n = helmholtz_apply(z.v);
    p.l = helmholtz_apply(z.w);
    p.t = z.t;
    return p;
}

namespace {
double h1_norm_sq(const Field& f) {
    Field fx = diff(f);
    return inner(f, f) + inner(fx, fx);
}
}  // namespace

double energy(const StateTriple& z) {
    return h1_norm_sq(z.u) + h1_norm_sq(z.v) + h1_norm_sq(z.w);
}

SupBoundCheck sup_norm_bound_check(const StateTriple& z, double E0) {
    if (!(E0 > 0.0)) throw std::invalid_argument("sup_norm_bound_check: E0 must be positive");
    const double su = max_abs(z.u);
    const double sv = max_abs(z.v);
    const double sw = max_abs(z.w);
    SupBoundCheck c;
    c.value = su * su + sv * sv + sw * sw;
    c.bound = 0.5 * E0;
    c.tolerance = 1e-8 * E0;
    c.pass = c.value <= c.bound + c.tolerance;
    return c;
}

}  // namespace ch3
