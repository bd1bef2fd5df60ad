#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "blowup/mesh.hpp"

namespace blowup {

// q = (p-1)/m. Throws std::invalid_argument unless m > 0 and 1 < p < m+1.
double derive_q(double m, double p);

enum class MonitorPolicy { abort, warn };

struct SchemeParams {
    double m = 1.0;
    double p = 1.5;
    double cfl_safety = 0.9;
    double existence_safety = 0.5;
    double dt_max = 0.01;
    // Absolute level; when unset the run uses 1e6 * |u0|_inf.
    std::optional<double> blowup_threshold;
    double t_end = 10.0;
    // Absolute floor; when unset the run uses 1e-12 * t_end.
    std::optional<double> dt_floor;
    // Relative tolerance on every a priori bound check.
    double monitor_tolerance = 1e-10;
    MonitorPolicy policy = MonitorPolicy::abort;

    double q() const { return derive_q(m, p); }
    // Throws std::invalid_argument on out-of-range values.
    void validate() const;
};

// min(cfl_safety * cfl bound, existence_safety / (m q |u|^q), dt_max,
// t_stop - t). |u^n| stands in for |u^{n+1/2}|, which it bounds under CFL.
double select_dt(const NodalField& field, const SchemeParams& params, double t, double t_stop);

struct StepReport {
    double t = 0;   // time after the step
    double dt = 0;
    double sup_u = 0;
    double sup_v = 0;
    double l1_v = 0;
    double s_minus = 0;
    double s_plus = 0;

    // Quantities before the step and after the hyperbolic half step.
    double sup_u_prev = 0;
    double sup_v_prev = 0;
    double l1_v_prev = 0;
    double sup_u_half = 0;
    double sup_v_half = 0;
    double l1_v_half = 0;

    // Relative slack of the one-step growth bound (>= 0 when it holds).
    double growth_slack = 0;
    // Relative slack of the global a priori bound; NaN once t >= T1.
    double global_slack = 0;

    int halvings = 0;  // dt halvings forced by the existence recheck
    bool growth_ok = true;
    bool global_ok = true;
    bool contraction_ok = true;  // |v^{n+1/2}| <= |v^n| in both norms
    bool max_bound_ok = true;    // |u^{n+1/2}| <= |u^n|

    bool all_ok() const { return growth_ok && global_ok && contraction_ok && max_bound_ok; }
};

struct StepOutcome {
    NodalField field;
    StepReport report;
};

// One split step (slopes, Hopf-Lax, interpolation, parabolic solve) with
// the given dt. Monitors that need run history (the global bound) are left at their
// defaults. Throws CflViolation / ExistenceViolation on bad dt.
StepOutcome advance(const NodalField& field, const SchemeParams& params, double t, double dt);

enum class Termination { horizon, blowup, existence_unsatisfiable, step_floor };

std::string_view to_string(Termination cause);

// Multiples of |u0|_inf at which crossing times are recorded.
inline constexpr std::array<double, 3> kThresholdFactors{1e4, 1e5, 1e6};

struct RunTrace {
    explicit RunTrace(NodalField initial) : final_field(std::move(initial)) {}

    std::vector<StepReport> steps;
    Termination cause = Termination::horizon;
    NodalField final_field;
    double final_time = 0;
    double u0_sup = 0;
    double t1 = 0;  // guaranteed existence time 1/(m q |u0|^q)
    double blowup_threshold = 0;
    std::optional<double> blowup_time;
    std::array<std::optional<double>, 3> threshold_times;
    // sup over steps with t < T1 of (|v^{n+1}|/|v^n| - 1)/dt.
    double max_slope_growth_rate = 0;
    std::size_t violations = 0;
};

struct RunHooks {
    // Extra upper bound on dt given (t, u^n); may return +inf.
    std::function<double(double, const NodalField&)> dt_limit;
    // Called with (t, u) for the initial state and every accepted step.
    std::function<void(double, const NodalField&, const StepReport*)> observer;
    // Times the run lands on exactly (snapshot schedule).
    std::vector<double> stop_times;
};

RunTrace run(const NodalField& initial, const SchemeParams& params, const RunHooks& hooks = {});

}  // namespace blowup
