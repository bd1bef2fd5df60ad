#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "blowup/driver.hpp"
#include "blowup/errors.hpp"
#include "blowup/hyperbolic.hpp"
#include "oracles.hpp"

using namespace blowup;

namespace {

NodalField unit_hat() { return NodalField(build_initial_grid(1.0, 1), {1.0}); }

NodalField hat(double s0, int n, double peak) {
    const MovingGrid g = build_initial_grid(s0, n);
    std::vector<double> u(g.node_count());
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = peak * (1 - std::abs(g.node(k)) / s0);
    return NodalField(g, std::move(u));
}

}  // namespace

TEST_CASE("derive_q") {
    CHECK(derive_q(1.0, 1.5) == 0.5);
    CHECK(derive_q(2.0, 2.0) == 0.5);
    CHECK_THROWS_AS(derive_q(1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(derive_q(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(derive_q(0.0, 0.5), std::invalid_argument);
}

TEST_CASE("select_dt examples") {
    SchemeParams p;
    p.m = 1;
    p.p = 1.5;
    p.cfl_safety = 1;
    p.existence_safety = 0.5;
    p.dt_max = 10;
    CHECK(select_dt(unit_hat(), p, 0.0, 100.0) == 0.5);

    p.dt_max = 0.01;
    const NodalField zero = NodalField::zero(build_initial_grid(1.0, 5));
    CHECK(select_dt(zero, p, 0.0, 100.0) == 0.01);
    CHECK(select_dt(zero, p, 0.0, 0.004) == 0.004);

    // |u| = 1e6 with gentle slopes: existence controls.
    p.dt_max = 1;
    const NodalField big(MovingGrid::with_support(1e9, 1e9, 1e9), {1e6});
    CHECK(select_dt(big, p, 0.0, 100.0) == doctest::Approx(1e-3).epsilon(1e-14));
}

TEST_CASE("advance: zero field stays zero") {
    SchemeParams p;
    const NodalField zero = NodalField::zero(build_initial_grid(1.0, 4));
    const StepOutcome out = advance(zero, p, 0.0, 0.01);
    for (double v : out.field.values()) CHECK(v == 0.0);
    CHECK(out.field.grid() == zero.grid());
    CHECK(out.report.all_ok());
    CHECK(out.report.sup_u == 0.0);
}

TEST_CASE("advance: hat obeys the one-step growth bound") {
    SchemeParams p;  // m = 1, p = 1.5
    const NodalField u = hat(1.0, 20, 1.0);
    const double dt = select_dt(u, p, 0.0, 10.0);
    const StepOutcome out = advance(u, p, 0.0, dt);
    const double q = 0.5;
    const double bound = (1 + (1 - q) * dt) / (1 - q * dt);
    CHECK(out.report.sup_u <= bound);
    CHECK(out.report.growth_slack >= 0);
    CHECK(out.report.growth_slack == doctest::Approx((bound - out.report.sup_u) / bound));
    CHECK(out.report.all_ok());
    CHECK_THROWS_AS(advance(u, p, 0.0, 1.0), CflViolation);
}

TEST_CASE("run: zero data reaches the horizon") {
    SchemeParams p;
    p.t_end = 0.5;
    const RunTrace tr = run(NodalField::zero(build_initial_grid(1.0, 4)), p);
    CHECK(tr.cause == Termination::horizon);
    CHECK(tr.final_time == 0.5);
    CHECK(tr.final_field.sup_norm() == 0.0);
    CHECK(tr.steps.size() == 50);
}

TEST_CASE("run: T1 and the a priori bound for the unit hat") {
    SchemeParams p;
    p.t_end = 3;
    const RunTrace tr = run(hat(1.0, 40, 1.0), p);
    CHECK(tr.t1 == 2.0);
    int checked = 0;
    for (const StepReport& r : tr.steps) {
        if (r.t < 2) {
            const double bound = 1 / std::pow(1 - 0.5 * r.t, 2.0);
            REQUIRE(r.sup_u <= bound * (1 + 1e-10));
            REQUIRE(r.global_slack >= -1e-10);
            ++checked;
        } else {
            REQUIRE(std::isnan(r.global_slack));
        }
    }
    CHECK(checked > 0);
    CHECK(tr.violations == 0);
}

TEST_CASE("run: times increase and land on stop times") {
    SchemeParams p;
    p.t_end = 1;
    RunHooks hooks;
    hooks.stop_times = {0.123, 0.5, 2.0};
    std::vector<double> seen;
    hooks.observer = [&](double t, const NodalField&, const StepReport*) { seen.push_back(t); };
    const RunTrace tr = run(hat(2.0, 10, 0.3), p, hooks);
    CHECK(tr.cause == Termination::horizon);
    for (std::size_t i = 1; i < tr.steps.size(); ++i) REQUIRE(tr.steps[i].t > tr.steps[i - 1].t);
    CHECK(std::count(seen.begin(), seen.end(), 0.123) == 1);
    CHECK(std::count(seen.begin(), seen.end(), 0.5) == 1);
    CHECK(seen.back() == 1.0);
}

TEST_CASE("run: termination causes") {
    SchemeParams p;
    p.t_end = 100;
    p.blowup_threshold = 10.0;
    const RunTrace blow = run(hat(1.0, 20, 1.0), p);
    CHECK(blow.cause == Termination::blowup);
    REQUIRE(blow.blowup_time);
    CHECK(*blow.blowup_time == blow.final_time);
    CHECK(blow.steps.back().sup_u >= 10.0);

    SchemeParams q = p;
    q.blowup_threshold.reset();
    q.dt_floor = 1e-3;
    const RunTrace floor = run(hat(1.0, 20, 1.0), q);
    CHECK(floor.cause == Termination::step_floor);
    CHECK_FALSE(floor.blowup_time);

    RunHooks stall;
    stall.dt_limit = [](double, const NodalField&) { return 0.0; };
    CHECK(run(hat(1.0, 20, 1.0), p, stall).cause == Termination::step_floor);
}

TEST_CASE("run: invalid parameters are rejected") {
    SchemeParams p;
    p.p = 3;
    CHECK_THROWS_AS(run(unit_hat(), p), std::invalid_argument);
    p = {};
    p.cfl_safety = 0;
    CHECK_THROWS_AS(run(unit_hat(), p), std::invalid_argument);
}

TEST_CASE("run: monitored bounds hold on randomized data") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const NodalField u0 = oracle::random_field(rng, trial % 2 == 0, 5, 40);
        SchemeParams p;
        p.m = 0.5 + 3.5 * unit(rng);
        p.p = 1 + p.m * (0.05 + 0.9 * unit(rng));
        const double q = p.q();
        const double t1 = 1 / (p.m * q * std::pow(u0.sup_norm(), q));
        p.t_end = std::min(1.2 * t1, 2.0);
        p.dt_max = t1 / 50;
        p.policy = MonitorPolicy::warn;
        const RunTrace tr = run(u0, p);
        CHECK(tr.violations == 0);
        double s_minus = u0.grid().s_minus(), s_plus = u0.grid().s_plus();
        for (const StepReport& r : tr.steps) {
            REQUIRE(r.growth_slack >= -1e-10);
            if (r.t < t1) REQUIRE(r.global_slack >= -1e-10);
            REQUIRE(r.contraction_ok);
            REQUIRE(r.s_minus >= s_minus);
            REQUIRE(r.s_plus >= s_plus);
            s_minus = r.s_minus;
            s_plus = r.s_plus;
        }
        CHECK(std::isfinite(tr.max_slope_growth_rate));
    }
}
