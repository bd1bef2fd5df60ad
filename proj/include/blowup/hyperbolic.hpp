#pragma once

#include "blowup/mesh.hpp"

namespace blowup {

// Interior difference quotients plus the two end-interval slopes
// v_left = u_first / h_minus and v_right = -u_last / h_plus.
SlopeField compute_slopes(const NodalField& field);

// Largest dt with (dt/h) |v|_inf <= m/2; +infinity for a flat field.
double cfl_max_dt(const SlopeField& slopes, double m);

struct HyperbolicStepResult {
    NodalField field_half;  // u^{n+1/2} on the enlarged grid
    double s_minus_new;
    double s_plus_new;
    bool new_node_left;
    bool new_node_right;
};

// Exact nodal evolution of u_t = (1/m) u_x^2 over dt via the Hopf-Lax
// formula. Fronts move by -(dt/m) v_right and +(dt/m) v_left; at most one
// node is added per side. Throws CflViolation when dt exceeds the stability
// bound.
HyperbolicStepResult hopf_lax_step(const NodalField& field, double dt, double m);

// Variational reference value max_y [u(y) - m (x-y)^2 / (4 dt)], computed
// by dense sampling followed by golden-section refinement on every linear
// piece. Independent of the nodal update formulas.
double hopf_lax_oracle(const NodalField& field, double dt, double m, double x);

}  // namespace blowup
