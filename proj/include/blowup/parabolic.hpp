#pragma once

#include <vector>

#include "blowup/mesh.hpp"

namespace blowup {

// Lumped-mass quadrature weights: (h_minus + h)/2 at the leftmost node,
// h inside, (h + h_plus)/2 at the rightmost node. A single-node grid gets
// the integral of its hat function, (h_minus + h_plus)/2.
std::vector<double> lumped_weights(const MovingGrid& grid);

double lumped_inner_product(const NodalField& a, const NodalField& b);

// u^q with the continuous extension 0^q = 0.
double pow_q(double u, double q);

// True iff m q dt |u|_inf^q < 1.
bool existence_condition(const NodalField& field_half, double dt, double m, double q);

/// Tridiagonal system indexed by interior nodes. sub[0] and super.back()
/// are unused and kept at zero.
struct TridiagonalSystem {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> super;
    std::vector<double> rhs;

    std::size_t size() const { return diag.size(); }
};

// Nodal equations of the linearized backward-Euler, mass-lumped P1 step
// for u_t - u u_xx = m u^{q+1}. Throws ExistenceViolation when the
// existence condition fails.
TridiagonalSystem assemble(const NodalField& field_half, double dt, double m, double q);

// Elimination without pivoting; requires a nonsingular leading sequence
// (guaranteed by strict diagonal dominance). Throws std::logic_error on a
// zero pivot.
std::vector<double> solve(const TridiagonalSystem& system);

NodalField parabolic_step(const NodalField& field_half, double dt, double m, double q);

}  // namespace blowup
