// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "blowup/analysis.hpp"
#include "blowup/driver.hpp"
#include "blowup/hyperbolic.hpp"
#include "blowup/parabolic.hpp"
#include "oracles.hpp"

using namespace blowup;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& name, const std::string& detail) {
    std::printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", id, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* format, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

// Per-step monitors aggregated over every run of the acceptance suite.
struct MonitorTally {
    std::size_t steps = 0;
    std::size_t runs = 0;
    double worst_growth = INFINITY;     // min growth-bound slack
    double worst_global = INFINITY;     // min global-bound slack over t < T1
    std::size_t global_steps = 0;
    double worst_contraction = -INFINITY;  // max relative growth of a slope norm
    bool support_monotone = true;

    void add(const NodalField& initial, const RunTrace& tr) {
        ++runs;
        double s_minus = initial.grid().s_minus(), s_plus = initial.grid().s_plus();
        for (const StepReport& r : tr.steps) {
            ++steps;
            worst_growth = std::min(worst_growth, r.growth_slack);
            if (r.t < tr.t1) {
                worst_global = std::min(worst_global, r.global_slack);
                ++global_steps;
            }
            if (r.sup_v_prev > 0) {
                worst_contraction =
                    std::max(worst_contraction, (r.sup_v_half - r.sup_v_prev) / r.sup_v_prev);
            }
            if (r.l1_v_prev > 0) {
                worst_contraction =
                    std::max(worst_contraction, (r.l1_v_half - r.l1_v_prev) / r.l1_v_prev);
            }
            if (r.s_minus < s_minus || r.s_plus < s_plus) support_monotone = false;
            s_minus = r.s_minus;
            s_plus = r.s_plus;
        }
    }
};

MonitorTally tally;

NodalField profile(double s0, int n, double amplitude, bool cap) {
    const MovingGrid g = build_initial_grid(s0, n);
    std::vector<double> u(g.node_count());
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double x = g.node(k);
        u[k] = amplitude * (cap ? theta(x, s0) : std::max(0.0, 1 - std::abs(x) / s0));
    }
    return NodalField(g, std::move(u));
}

SchemeParams warn_params(double m, double p) {
    SchemeParams sp;
    sp.m = m;
    sp.p = p;
    sp.policy = MonitorPolicy::warn;
    return sp;
}

void hopf_lax_equivalence() {
    const auto start = Clock::now();
    std::mt19937_64 rng(1001);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const NodalField u = oracle::random_field(rng, trial % 2 == 1, 5, 100);
        const double m = 0.5 + 3.5 * unit(rng);
        const double cfl = cfl_max_dt(compute_slopes(u), m);
        // Every tenth field uses the full stability bound.
        const double dt = (trial % 10 == 0 ? 1.0 : unit(rng)) * cfl;
        const HyperbolicStepResult r = hopf_lax_step(u, dt, m);
        for (std::size_t k = 0; k < r.field_half.size(); ++k) {
            const double x = r.field_half.grid().node(k);
            worst = std::max(worst, std::abs(r.field_half.value(k) - hopf_lax_oracle(u, dt, m, x)));
        }
    }
    const double elapsed = seconds_since(start);
    report(1, worst <= 1e-6 && elapsed < 60, "Hopf-Lax step matches the variational oracle",
           fmt("1000 fields, max abs error %.3g <= 1e-6, %.1f s < 60 s", worst, elapsed));
}

void randomized_runs() {
    std::mt19937_64 rng(2002);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int nodes = std::uniform_int_distribution<int>(5, 100)(rng);
        const double s0 = 0.5 + 1.5 * unit(rng);
        const double amplitude = std::exp(std::log(0.1) + unit(rng) * std::log(100.0));
        NodalField u0 = profile(s0, (nodes + 1) / 2, amplitude, trial % 2 == 0);
        if (trial % 3 == 0) {
            // Rough data on the same grid.
            std::vector<double> v(u0.values().begin(), u0.values().end());
            for (double& x : v) x *= 0.5 + unit(rng);
            u0 = NodalField(u0.grid(), std::move(v));
        }
        SchemeParams sp = warn_params(0.5 + 3.5 * unit(rng), 0);
        sp.p = 1 + sp.m * (0.05 + 0.9 * unit(rng));
        const double q = sp.q();
        const double t1 = 1 / (sp.m * q * std::pow(u0.sup_norm(), q));
        sp.t_end = t1;
        sp.dt_max = t1 / 100;
        tally.add(u0, run(u0, sp));
    }
}

void parabolic_solves() {
    std::mt19937_64 rng(5005);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst_rel = 0;
    double min_value = INFINITY;
    for (int trial = 0; trial < 1000; ++trial) {
        const NodalField u = oracle::random_field(rng, trial % 2 == 0, 1, 200);
        const double m = 0.5 + 3.5 * unit(rng);
        const double q = 0.02 + 0.96 * unit(rng);
        // Existence condition enforced, up to its boundary.
        const double dt = 0.999 * unit(rng) / (m * q * pow_q(u.sup_norm(), q));
        const TridiagonalSystem sys = assemble(u, dt, m, q);
        const std::vector<double> x = solve(sys);
        const std::vector<double> ref = oracle::dense_solve(sys);
        double scale = 0, diff = 0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            scale = std::max(scale, std::abs(ref[k]));
            diff = std::max(diff, std::abs(x[k] - ref[k]));
            min_value = std::min(min_value, x[k]);
        }
        if (scale > 0) worst_rel = std::max(worst_rel, diff / scale);
    }
    report(5, min_value >= 0 && worst_rel <= 1e-12,
           "parabolic solves are nonnegative and match dense elimination",
           fmt("1000 systems, min value %.3g, max relative deviation %.3g <= 1e-12", min_value,
               worst_rel));
}

struct BlowupRun {
    RunTrace trace;
    double seconds;
};

BlowupRun fig1_run(int n) {
    const auto start = Clock::now();
    SchemeParams sp = warn_params(1, 1.5);
    sp.t_end = 20;
    const NodalField u0 = profile(1.0, n, 1.0, false);
    RunTrace tr = run(u0, sp);
    tally.add(u0, tr);
    return {std::move(tr), seconds_since(start)};
}

void fig1_reproduction(const BlowupRun& r) {
    const RunTrace& tr = r.trace;
    const auto& th = tr.threshold_times;
    const bool blew_up = tr.cause == Termination::blowup && tr.blowup_time.has_value();
    const bool all_times = th[0] && th[1] && th[2];
    bool increasing = false, shrinking = false;
    double d1 = NAN, d2 = NAN;
    if (all_times) {
        d1 = *th[1] - *th[0];
        d2 = *th[2] - *th[1];
        increasing = d1 > 0 && d2 > 0;
        shrinking = d2 < d1;
    }
    // Support never recedes, and grows within every window of 1% of the run.
    bool monotone = true, never_stalls = true;
    const std::size_t window = std::max<std::size_t>(1, tr.steps.size() / 100);
    for (std::size_t i = 1; i < tr.steps.size(); ++i) {
        const StepReport& a = tr.steps[i - 1];
        const StepReport& b = tr.steps[i];
        if (b.s_plus < a.s_plus || b.s_minus < a.s_minus) monotone = false;
        if (i >= window) {
            const StepReport& w = tr.steps[i - window];
            if (!(b.s_plus > w.s_plus && b.s_minus > w.s_minus)) never_stalls = false;
        }
    }
    const bool ok = blew_up && increasing && shrinking && monotone && never_stalls &&
                    r.seconds < 120;
    report(6, ok, "blow-up reproduction for m = 1, p = 1.5, hat data, N = 100",
           fmt("cause %s at t = %.10g; t(1e4) = %.10g, t(1e5) = %.10g, t(1e6) = %.10g; "
               "gaps %.4g > %.4g; support %.4g -> %.4g, monotone %s, growing in every window "
               "%s; %.1f s < 120 s",
               std::string(to_string(tr.cause)).c_str(), tr.blowup_time.value_or(NAN),
               th[0].value_or(NAN), th[1].value_or(NAN), th[2].value_or(NAN), d1, d2, 1.0,
               tr.final_field.grid().s_plus(), monotone ? "yes" : "no",
               never_stalls ? "yes" : "no", r.seconds));
}

void self_convergence(const BlowupRun& coarse, const BlowupRun& fine) {
    const auto tc = coarse.trace.blowup_time, tf = fine.trace.blowup_time;
    const double rel = (tc && tf) ? std::abs(*tc - *tf) / *tf : INFINITY;
    const double final_dt = coarse.trace.steps.empty() ? NAN : coarse.trace.steps.back().dt;
    report(8, rel < 0.05, "blow-up times agree under refinement (N = 100 vs 200)",
           fmt("t = %.10g vs %.10g, relative difference %.3g < 0.05 "
               "(absolute %.3g; coarse final dt %.3g)",
               tc.value_or(NAN), tf.value_or(NAN), rel, std::abs(tc.value_or(NAN) - tf.value_or(NAN)),
               final_dt));
}

void subsolution_induction() {
    const auto start = Clock::now();
    std::mt19937_64 rng(7007);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int certified = 0, verified = 0, draws = 0;
    double worst_ratio = 0;  // blow-up time / T*
    std::size_t checks = 0;
    while (certified < 20 && draws < 60) {
        ++draws;
        const double m = 0.5 + 3.5 * unit(rng);
        const double q = 0.4 + 0.5 * unit(rng);
        const double s0 = 0.5 + 1.5 * unit(rng);
        const int n = std::uniform_int_distribution<int>(20, 40)(rng);
        const double amplitude = 0.5 + 3.5 * unit(rng);
        const NodalField u0 = profile(s0, n, amplitude, draws % 2 == 0);
        const CertifyResult cr = certify(u0, m, q);
        if (!cr.certificate) continue;
        ++certified;
        const SubsolutionParams sub = cr.certificate->params;

        SchemeParams sp = warn_params(m, 1 + m * q);
        sp.t_end = sub.T;
        sp.dt_floor = 1e-12 * 10;
        bool dominated = true;
        RunHooks hooks;
        hooks.dt_limit = [&](double t, const NodalField&) { return subsolution_dt_limit(sub, t); };
        hooks.observer = [&](double t, const NodalField& field, const StepReport*) {
            ++checks;
            if (!(t < sub.T) || !domination_check(subsolution_field(sub, t), field)) {
                dominated = false;
            }
        };
        const RunTrace tr = run(u0, sp, hooks);
        tally.add(u0, tr);
        const bool below = tr.blowup_time && *tr.blowup_time <= cr.certificate->t_star;
        if (tr.blowup_time) worst_ratio = std::max(worst_ratio, *tr.blowup_time / sub.T);
        if (dominated && below) {
            ++verified;
        } else {
            std::printf("  draw %d: m=%.4g q=%.4g dominated=%d blowup=%.6g T*=%.6g\n", draws, m,
                        q, dominated, tr.blowup_time.value_or(NAN), sub.T);
        }
    }
    report(7, certified >= 20 && verified == certified,
           "subsolution stays below the solution and T* bounds the blow-up time",
           fmt("%d certificates from %d draws, %d verified; %zu domination checks; "
               "max blow-up time / T* = %.3g; %.1f s",
               certified, draws, verified, checks, worst_ratio, seconds_since(start)));
}

}  // namespace

int main() {
    const auto start = Clock::now();
    hopf_lax_equivalence();

    const auto runs_start = Clock::now();
    randomized_runs();
    const double runs_seconds = seconds_since(runs_start);

    parabolic_solves();

    const BlowupRun coarse = fig1_run(100);
    fig1_reproduction(coarse);
    subsolution_induction();
    const BlowupRun fine = fig1_run(200);
    self_convergence(coarse, fine);

    report(2, tally.worst_global >= -1e-10 && tally.global_steps > 0,
           "a priori bound holds for t < T1",
           fmt("%zu steps with t < T1 over all runs (100 randomized runs in %.1f s), "
               "min relative slack %.3g >= -1e-10",
               tally.global_steps, runs_seconds, tally.worst_global));
    report(3, tally.worst_growth >= -1e-10, "one-step growth bound holds",
           fmt("%zu steps in %zu runs, min relative slack %.3g >= -1e-10", tally.steps,
               tally.runs, tally.worst_growth));
    report(4, tally.worst_contraction <= 1e-12 && tally.support_monotone,
           "hyperbolic step contracts slope norms",
           fmt("%zu steps, max relative growth of sup / L1 slope norm %.3g <= 1e-12; "
               "support nondecreasing %s",
               tally.steps, tally.worst_contraction, tally.support_monotone ? "yes" : "no"));

    std::printf("%s: %d failed, %.1f s total\n", failures == 0 ? "ALL PASS" : "FAILURES",
                failures, seconds_since(start));
    return failures == 0 ? 0 : 1;
}
