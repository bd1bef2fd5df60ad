#include "blowup/driver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "blowup/errors.hpp"
#include "blowup/hyperbolic.hpp"
#include "blowup/parabolic.hpp"

namespace blowup {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// (bound - value) / bound, with 0/0 read as an exact match.
double relative_slack(double bound, double value) {
    if (bound == kInf) return 1.0;
    if (bound == 0) return value == 0 ? 0.0 : -kInf;
    return (bound - value) / bound;
}

bool within(double value, double bound, double tol) {
    return value <= bound + tol * std::max(1.0, std::abs(bound));
}

}  // namespace

double derive_q(double m, double p) {
    if (!(m > 0) || !std::isfinite(m)) {
        throw std::invalid_argument("m must be positive");
    }
    if (!(p > 1 && p < m + 1)) {
        std::ostringstream msg;
        msg << "p = " << p << " is outside the finite-time blow-up range (1, m+1) = (1, " << m + 1
            << ")";
        throw std::invalid_argument(msg.str());
    }
    return (p - 1) / m;
}

void SchemeParams::validate() const {
    (void)q();
    if (!(cfl_safety > 0 && cfl_safety <= 1)) {
        throw std::invalid_argument("cfl_safety must lie in (0, 1]");
    }
    if (!(existence_safety > 0 && existence_safety < 1)) {
        throw std::invalid_argument("existence_safety must lie in (0, 1)");
    }
    if (!(dt_max > 0)) throw std::invalid_argument("dt_max must be positive");
    if (!(t_end > 0) || !std::isfinite(t_end)) {
        throw std::invalid_argument("t_end must be positive and finite");
    }
    if (blowup_threshold && !(*blowup_threshold > 0)) {
        throw std::invalid_argument("blowup_threshold must be positive");
    }
    if (dt_floor && !(*dt_floor > 0)) throw std::invalid_argument("dt_floor must be positive");
    if (!(monitor_tolerance >= 0)) {
        throw std::invalid_argument("monitor_tolerance must be nonnegative");
    }
}

double select_dt(const NodalField& field, const SchemeParams& params, double t, double t_stop) {
    const double m = params.m;
    const double q = params.q();
    const double cfl = params.cfl_safety * cfl_max_dt(compute_slopes(field), m);
    const double uq = pow_q(field.sup_norm(), q);
    const double existence = uq > 0 ? params.existence_safety / (m * q * uq) : kInf;
    return std::min({cfl, existence, params.dt_max, t_stop - t});
}

StepOutcome advance(const NodalField& field, const SchemeParams& params, double t, double dt) {
    const double m = params.m;
    const double q = params.q();
    const double tol = params.monitor_tolerance;

    StepReport rep;
    rep.dt = dt;
    rep.t = t + dt;

    const SlopeField slopes = compute_slopes(field);
    rep.sup_u_prev = field.sup_norm();
    rep.sup_v_prev = slopes.sup_norm();
    rep.l1_v_prev = slopes.l1_norm();

    const HyperbolicStepResult hl = hopf_lax_step(field, dt, m);
    // The Hopf-Lax nodal values are already the interpolate on the new grid.
    const NodalField half = interpolate(hl.field_half, hl.field_half.grid());
    if (!existence_condition(half, dt, m, q)) {
        throw ExistenceViolation("advance: existence condition fails after the hyperbolic step");
    }
    const SlopeField slopes_half = compute_slopes(half);
    rep.sup_u_half = half.sup_norm();
    rep.sup_v_half = slopes_half.sup_norm();
    rep.l1_v_half = slopes_half.l1_norm();
    rep.max_bound_ok = within(rep.sup_u_half, rep.sup_u_prev, tol);
    rep.contraction_ok = within(rep.sup_v_half, rep.sup_v_prev, 1e-12) &&
                         within(rep.l1_v_half, rep.l1_v_prev, 1e-12);

    NodalField next = parabolic_step(half, dt, m, q);
    const SlopeField slopes_next = compute_slopes(next);
    rep.sup_u = next.sup_norm();
    rep.sup_v = slopes_next.sup_norm();
    rep.l1_v = slopes_next.l1_norm();
    rep.s_minus = next.grid().s_minus();
    rep.s_plus = next.grid().s_plus();

    const double uq = pow_q(rep.sup_u_prev, q);
    const double denom = 1 - m * q * dt * uq;
    const double bound =
        denom > 0 ? rep.sup_u_prev * (1 + m * (1 - q) * dt * uq) / denom : kInf;
    rep.growth_slack = relative_slack(bound, rep.sup_u);
    rep.growth_ok = rep.growth_slack >= -tol;
    return {std::move(next), rep};
}

std::string_view to_string(Termination cause) {
    switch (cause) {
        case Termination::horizon: return "horizon";
        case Termination::blowup: return "blowup";
        case Termination::existence_unsatisfiable: return "existence_unsatisfiable";
        case Termination::step_floor: return "step_floor";
    }
    return "unknown";
}

RunTrace run(const NodalField& initial, const SchemeParams& params, const RunHooks& hooks) {
    params.validate();
    const double m = params.m;
    const double q = params.q();

    RunTrace trace(initial);
    trace.u0_sup = initial.sup_norm();
    const double u0q = pow_q(trace.u0_sup, q);
    trace.t1 = u0q > 0 ? 1 / (m * q * u0q) : kInf;
    trace.blowup_threshold =
        params.blowup_threshold.value_or(trace.u0_sup > 0 ? 1e6 * trace.u0_sup : kInf);
    const double floor = params.dt_floor.value_or(1e-12 * params.t_end);

    std::vector<double> stops;
    for (double s : hooks.stop_times) {
        if (s > 0 && s < params.t_end) stops.push_back(s);
    }
    stops.push_back(params.t_end);
    std::sort(stops.begin(), stops.end());

    if (hooks.observer) hooks.observer(0.0, initial, nullptr);

    NodalField u = initial;
    double t = 0;
    auto stop_it = stops.begin();
    while (true) {
        while (stop_it != stops.end() && *stop_it - t <= floor) ++stop_it;
        if (stop_it == stops.end()) {
            trace.cause = Termination::horizon;
            break;
        }
        const double t_stop = *stop_it;

        double dt = select_dt(u, params, t, t_stop);
        if (hooks.dt_limit) dt = std::min(dt, hooks.dt_limit(t, u));
        if (!(dt >= floor)) {
            trace.cause = Termination::step_floor;
            break;
        }

        std::optional<StepOutcome> out;
        int halvings = 0;
        while (dt >= floor) {
            try {
                out.emplace(advance(u, params, t, dt));
                break;
            } catch (const ExistenceViolation&) {
                dt *= 0.5;
                ++halvings;
            }
        }
        if (!out) {
            trace.cause = Termination::existence_unsatisfiable;
            break;
        }

        StepReport& rep = out->report;
        rep.halvings = halvings;
        // Land exactly on the stop time, also across roundoff slivers.
        const double t_new = std::abs(t_stop - (t + dt)) <= floor ? t_stop : t + dt;
        rep.t = t_new;

        if (t_new < trace.t1) {
            const double bound = trace.u0_sup / std::pow(1 - m * q * t_new * u0q, 1 / q);
            rep.global_slack = relative_slack(bound, rep.sup_u);
            rep.global_ok = rep.global_slack >= -params.monitor_tolerance;
            if (rep.sup_v_prev > 0) {
                trace.max_slope_growth_rate = std::max(
                    trace.max_slope_growth_rate, (rep.sup_v / rep.sup_v_prev - 1) / dt);
            }
        } else {
            rep.global_slack = std::numeric_limits<double>::quiet_NaN();
        }

        if (!rep.all_ok()) {
            ++trace.violations;
            if (params.policy == MonitorPolicy::abort) {
                std::ostringstream msg;
                msg << "monitor violation at t=" << t_new << ": growth_slack=" << rep.growth_slack
                    << " global_slack=" << rep.global_slack
                    << " contraction=" << rep.contraction_ok << " max_bound=" << rep.max_bound_ok;
                throw MonitorViolation(msg.str());
            }
        }

        u = std::move(out->field);
        t = t_new;
        trace.steps.push_back(rep);
        if (hooks.observer) hooks.observer(t, u, &trace.steps.back());

        for (std::size_t j = 0; j < kThresholdFactors.size(); ++j) {
            if (!trace.threshold_times[j] && rep.sup_u >= kThresholdFactors[j] * trace.u0_sup &&
                trace.u0_sup > 0) {
                trace.threshold_times[j] = t;
            }
        }
        if (rep.sup_u >= trace.blowup_threshold) {
            trace.cause = Termination::blowup;
            trace.blowup_time = t;
            break;
        }
    }
    trace.final_field = u;
    trace.final_time = t;
    return trace;
}

}  // namespace blowup
