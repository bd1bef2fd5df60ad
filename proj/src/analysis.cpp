#include "blowup/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "blowup/hyperbolic.hpp"

namespace blowup {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Minimum of the convex function A l y^{q+1} + C - B y over [0, 1].
double phi_minimum(double a_lq, double b, double c, double q) {
    auto phi = [&](double y) { return a_lq * std::pow(y, q + 1) + c - b * y; };
    double best = std::min(phi(0.0), phi(1.0));
    if (a_lq > 0 && b > 0) {
        const double y_star = std::pow(b / (a_lq * (q + 1)), 1 / q);
        if (y_star > 0 && y_star < 1) best = std::min(best, phi(y_star));
    }
    return best;
}

}  // namespace

double zeta_term_bound(double step_ratio, double q) {
    const double alpha = (1 - q) / q;
    if (!(step_ratio > 0)) return alpha;
    if (!(step_ratio < 1)) return kInf;
    // ((1-x)^{-alpha} - 1) / x, increasing in x, written to avoid cancellation.
    return std::expm1(-alpha * std::log1p(-step_ratio)) / step_ratio;
}

namespace {

void finish_report(FeasibilityReport& r, double lambda, double q) {
    r.lambda_q = std::pow(lambda, q);
    r.y0 = r.C / r.B;
    r.c_positive = r.C > 0;
    r.lambda_q_required = r.c_positive ? (r.B - r.C) / (r.A * std::pow(r.y0, q + 1)) : kInf;
    r.phi_min = phi_minimum(r.A * r.lambda_q, r.B, r.C, q);
    r.pass = r.c_positive && r.lambda_q >= r.lambda_q_required;
}

}  // namespace

double theta(double x, double a) { return std::max(0.0, 1 - x * x / (a * a)); }

double SubsolutionParams::zeta(double t) const {
    return std::pow(T - t, (q - 1) / (2 * q));
}

double SubsolutionParams::delta() const { return h / (a * zeta(0.0)); }

double SubsolutionParams::mu(double t, double dt) const {
    return 4 * lambda / (m * a * a) * dt / (T - t);
}

double SubsolutionParams::amplitude(double t) const { return lambda * std::pow(T - t, -1 / q); }

MovingGrid subsolution_grid(const SubsolutionParams& params, double t) {
    if (!(t < params.T)) throw std::invalid_argument("subsolution_grid: requires t < T");
    const double half_width = params.a * params.zeta(t);
    return MovingGrid::with_support(half_width - params.center, half_width + params.center,
                                    params.h);
}

NodalField subsolution_field(const SubsolutionParams& params, double t, const MovingGrid& grid) {
    if (!(t < params.T)) throw std::invalid_argument("subsolution_field: requires t < T");
    const double amp = params.amplitude(t);
    const double z = params.zeta(t);
    std::vector<double> values(grid.node_count());
    for (std::size_t k = 0; k < values.size(); ++k) {
        values[k] = amp * theta((grid.node(k) - params.center) / z, params.a);
    }
    return NodalField(grid, std::move(values));
}

NodalField subsolution_field(const SubsolutionParams& params, double t) {
    return subsolution_field(params, t, subsolution_grid(params, t));
}

FeasibilityReport feasibility_bounds(double lambda, double kappa, double m, double q,
                                     double delta, double mu_bound) {
    if (!(delta < 1)) throw std::invalid_argument("feasibility: delta >= 1, mesh too coarse");
    FeasibilityReport r;
    r.delta = delta;
    const double k4 = 4 * kappa / m;
    r.A = m * q * std::pow(1 - mu_bound, q);
    r.B = 1 + k4 + 2 * kappa;
    r.C = (k4 - mu_bound * (1 + 2 * kappa)) * (1 - delta) -
          zeta_term_bound(mu_bound * m / (4 * kappa), q);
    finish_report(r, lambda, q);

    const double lead = (1 / q + 2 * kappa + k4 * delta) / (m * q * std::pow(1 - delta, q));
    auto closed_form = [&](double denom) {
        return denom > 0 ? lead * std::pow(r.B / denom, q + 1) : kInf;
    };
    r.rhs_printed = closed_form(k4 * (1 - delta) - delta * (1 + 2 * kappa / m) - (1 - q) / q);
    r.rhs_algebraic = closed_form(k4 * (1 - delta) - delta * (1 + 2 * kappa) - (1 - q) / q);
    r.lambda_above_lambda0 = r.lambda_q > 1 / (m * q);
    r.certified = r.pass && r.lambda_above_lambda0 &&
                  r.lambda_q >= std::max(r.rhs_printed, r.rhs_algebraic);
    return r;
}

FeasibilityReport feasibility(const SubsolutionParams& params, double mu_bound) {
    return feasibility_bounds(params.lambda, params.kappa(), params.m, params.q, params.delta(),
                              mu_bound);
}

FeasibilityReport step_phi(const SubsolutionParams& params, double t, double dt) {
    const double m = params.m, q = params.q, kappa = params.kappa();
    const double mu = params.mu(t, dt);
    const double delta = params.delta();
    const double z0 = params.zeta(t), z1 = params.zeta(t + dt);
    const double ratio = z1 * z1 / (z0 * z0);

    FeasibilityReport r;
    r.delta = delta;
    r.A = m * std::pow(1 - mu, q) * (q + (1 - q) * (1 - mu) * (params.T - t - dt) / (params.T - t));
    r.B = 1 + 4 * kappa / m + 2 * kappa - mu * (1 + 2 * kappa);
    r.C = (4 * kappa / m - mu * (1 + 2 * kappa)) * (1 - delta) - (ratio - 1) * (params.T - t) / dt;
    finish_report(r, params.lambda, q);
    r.lambda_above_lambda0 = r.lambda_q > 1 / (m * q);
    r.certified = r.pass;
    return r;
}

double min_feasible_lambda(double kappa, double m, double q, double delta) {
    // Every requirement depends on lambda only through lambda^q.
    const FeasibilityReport r = feasibility_bounds(1.0, kappa, m, q, delta, delta);
    const double need = std::max({r.lambda_q_required, r.rhs_printed, r.rhs_algebraic,
                                  (1 / (m * q)) * (1 + 1e-12)});
    if (!std::isfinite(need)) return kInf;
    double lambda = std::pow(need, 1 / q);
    // Nudge past roundoff so the returned value passes the check itself.
    while (!feasibility_bounds(lambda, kappa, m, q, delta, delta).certified) {
        lambda = std::nextafter(lambda, kInf) * (1 + 1e-15);
    }
    return lambda;
}

double blowup_time_bound(double lambda, double a, double q, double eps, double rho) {
    if (!(eps > 0) || !(rho > 0)) {
        throw std::invalid_argument("blowup_time_bound: eps and rho must be positive");
    }
    return std::max(std::pow(lambda / eps, q), std::pow(a / rho, 2 * q / (1 - q)));
}

Plateau find_plateau(const NodalField& field) {
    const double top = field.sup_norm();
    if (!(top > 0)) throw std::invalid_argument("find_plateau: field is identically zero");

    const MovingGrid& g = field.grid();
    std::vector<double> xs{-g.s_minus()}, us{0.0};
    for (std::size_t k = 0; k < field.size(); ++k) {
        xs.push_back(g.node(k));
        us.push_back(field.value(k));
    }
    xs.push_back(g.s_plus());
    us.push_back(0.0);

    std::vector<double> levels(field.values().begin(), field.values().end());
    for (int j = 1; j < 16; ++j) levels.push_back(top * j / 16.0);

    auto crossing = [&](std::size_t j, double level) {
        // Point in [xs[j-1], xs[j]] where the linear piece equals level.
        const double w = (level - us[j - 1]) / (us[j] - us[j - 1]);
        return xs[j - 1] + w * (xs[j] - xs[j - 1]);
    };

    Plateau best;
    for (double level : levels) {
        if (!(level > 0)) continue;
        bool inside = false;
        double start = 0;
        for (std::size_t j = 1; j < xs.size(); ++j) {
            const bool above = us[j] >= level;
            if (above && !inside) {
                inside = true;
                start = us[j - 1] >= level ? xs[j - 1] : crossing(j, level);
            } else if (!above && inside) {
                inside = false;
                const double end = crossing(j, level);
                const double rho = 0.5 * (end - start) * (1 - 1e-9);
                if (level * rho > best.eps * best.rho) {
                    best = {0.5 * (start + end), level, rho};
                }
            }
        }
    }
    if (!(best.rho > 0)) {
        throw std::invalid_argument("find_plateau: no interval of positive width found");
    }
    return best;
}

bool domination_check(const NodalField& sub, const NodalField& field, double rel_tol) {
    const double tol = rel_tol * field.sup_norm();
    auto check_on = [&](const MovingGrid& g) {
        if (sub(-g.s_minus()) > field(-g.s_minus()) + tol) return false;
        if (sub(g.s_plus()) > field(g.s_plus()) + tol) return false;
        for (std::size_t k = 0; k < g.node_count(); ++k) {
            const double x = g.node(k);
            if (sub(x) > field(x) + tol) return false;
        }
        return true;
    };
    return check_on(sub.grid()) && check_on(field.grid());
}

double subsolution_dt_limit(const SubsolutionParams& params, double t, double safety) {
    if (!(t < params.T)) return 0.0;
    const double remaining = params.T - t;
    const NodalField sub = subsolution_field(params, t);
    const double cfl = cfl_max_dt(compute_slopes(sub), params.m);
    const double mu_cap = params.delta() * params.m * params.a * params.a * remaining /
                          (4 * params.lambda);
    const double existence =
        remaining / (params.m * params.q * std::pow(params.lambda, params.q));
    return safety * std::min({cfl, mu_cap, existence});
}

CertifyResult certify(const NodalField& initial, double m, double q) {
    CertifyResult result;
    result.plateau = find_plateau(initial);
    const Plateau& pl = result.plateau;
    const double h = initial.grid().h();
    result.best_delta = kInf;

    const double kappa_min = m * (1 - q) / (4 * q);
    const double lambda_start = std::pow(1 / (m * q), 1 / q) * 1.01;
    for (double factor : {1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0}) {
        const double kappa = factor * kappa_min;
        // T* grows with lambda, so the first feasible lambda is the best one
        // for this ratio.
        for (double lambda = lambda_start; lambda < 1e15; lambda *= 1.1) {
            SubsolutionParams sp;
            sp.lambda = lambda;
            sp.a = std::sqrt(lambda / kappa);
            sp.m = m;
            sp.q = q;
            sp.h = h;
            sp.center = pl.x0;
            sp.T = blowup_time_bound(lambda, sp.a, q, pl.eps, pl.rho);
            const double delta = sp.delta();
            result.best_delta = std::min(result.best_delta, delta);
            if (!(delta < 1)) continue;
            const FeasibilityReport rep = feasibility(sp, delta);
            if (!rep.certified) continue;
            if (!domination_check(subsolution_field(sp, 0.0), initial)) continue;
            if (!result.certificate || sp.T < result.certificate->t_star) {
                result.certificate = Certificate{pl, sp, sp.T, rep};
            }
            break;
        }
    }
    return result;
}

}  // namespace blowup
