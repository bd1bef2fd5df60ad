#pragma once

#include <optional>

#include "blowup/mesh.hpp"

namespace blowup {

// Parabolic cap max(0, 1 - x^2/a^2).
double theta(double x, double a);

/**
 * Self-similar blow-up profile used as a discrete subsolution:
 *
 *   u_hat(t, x) = lambda (T-t)^{-1/q} theta_h((x - center) / zeta(t)),
 *   zeta(t) = (T-t)^{(q-1)/(2q)},
 *
 * with support (center - a zeta, center + a zeta), which widens as t -> T.
 */
struct SubsolutionParams {
    double lambda = 1;
    double a = 1;
    double T = 1;
    double m = 1;
    double q = 0.5;
    double h = 0.01;
    double center = 0;

    double kappa() const { return lambda / (a * a); }
    double zeta(double t) const;
    // delta = h / (a zeta(0)); bounds mu_n and the midpoint corrections.
    double delta() const;
    // mu_n = (4 lambda / (m a^2)) dt / (T - t).
    double mu(double t, double dt) const;
    double amplitude(double t) const;
};

// Grid of the profile support at time t; throws when t >= T or when the
// support holds no lattice node.
MovingGrid subsolution_grid(const SubsolutionParams& params, double t);

// Nodal interpolate of the profile on `grid` (zero beyond the profile support).
NodalField subsolution_field(const SubsolutionParams& params, double t, const MovingGrid& grid);
NodalField subsolution_field(const SubsolutionParams& params, double t);

/// Coefficients of Phi(y) = A lambda^q y^{q+1} + C - B y and the verdict.
struct FeasibilityReport {
    double A = 0;
    double B = 0;
    double C = 0;
    double y0 = 0;        // C / B
    double phi_min = 0;   // min of Phi over [0, 1]
    double delta = 0;
    double lambda_q = 0;  // lambda^q
    double lambda_q_required = 0;  // (B - C) / (A y0^{q+1}), +inf when C <= 0
    // Right-hand sides of the closed-form sufficient condition on lambda^q,
    // with 1 + 2 lambda/(m a^2) (as printed) and 1 + 2 lambda/a^2 in the
    // denominator; +inf when that denominator is not positive.
    double rhs_printed = 0;
    double rhs_algebraic = 0;
    bool c_positive = false;
    bool lambda_above_lambda0 = false;  // lambda^q > 1 / (m q)
    // C > 0 and lambda^q >= lambda_q_required: Phi >= 0 on (0, 1).
    bool pass = false;
    // pass, lambda above lambda0, and lambda^q above both closed-form
    // right-hand sides. Certificates require this.
    bool certified = false;
};

// Upper bound on (zeta_{n+1}^2 / zeta_n^2 - 1)(T - t_n) / dt_n over steps
// with dt_n / (T - t_n) <= step_ratio. Tends to (1-q)/q as the ratio -> 0
// and exceeds it for every positive ratio.
double zeta_term_bound(double step_ratio, double q);

// Conservative, step-independent certificate using mu_n <= mu_bound,
// A >= m q (1-mu_bound)^q and the lower bound on C. Throws
// std::invalid_argument when delta >= 1.
FeasibilityReport feasibility(const SubsolutionParams& params, double mu_bound);
FeasibilityReport feasibility_bounds(double lambda, double kappa, double m, double q,
                                     double delta, double mu_bound);

// Sharp per-step coefficients A, B, C of Phi_n for the step [t, t + dt].
FeasibilityReport step_phi(const SubsolutionParams& params, double t, double dt);

// Smallest lambda passing feasibility_bounds at fixed lambda/a^2 and delta
// (the condition is monotone in lambda). +inf when no lambda works.
double min_feasible_lambda(double kappa, double m, double q, double delta);

// T* = max((lambda/eps)^q, (a/rho)^{2q/(1-q)}).
double blowup_time_bound(double lambda, double a, double q, double eps, double rho);

struct Plateau {
    double x0 = 0;
    double eps = 0;
    double rho = 0;
};

// An interval |x - x0| < rho on which the field is >= eps, chosen to
// maximize eps * rho over a set of candidate levels. Throws on a zero field.
Plateau find_plateau(const NodalField& field);

// sub(x) <= field(x) at every breakpoint of both functions (exact for
// piecewise-linear functions). `rel_tol` scales with max(field).
bool domination_check(const NodalField& sub, const NodalField& field, double rel_tol = 0);

// Step cap under which the subsolution argument applies: the Hopf-Lax
// stability bound for u_hat, mu_n <= delta and the existence condition for
// u_hat, each scaled by `safety`.
double subsolution_dt_limit(const SubsolutionParams& params, double t, double safety = 0.9);

struct Certificate {
    Plateau plateau;
    SubsolutionParams params;
    double t_star = 0;
    FeasibilityReport report;
};

struct CertifyResult {
    std::optional<Certificate> certificate;
    Plateau plateau;
    // Smallest delta met during the search (reported when none is found).
    double best_delta = 0;
};

// Searches lambda/a^2 ratios and amplitudes lambda for a feasible
// subsolution lying below `initial`, with T = T*. Returns the certificate
// with the smallest T*.
CertifyResult certify(const NodalField& initial, double m, double q);

}  // namespace blowup
