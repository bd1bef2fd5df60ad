#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "blowup/experiment.hpp"
#include "blowup/hyperbolic.hpp"
#include "blowup/parabolic.hpp"

namespace blowup {

namespace {

NodalField random_field(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nodes(2, 60);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n = nodes(rng);
    const double h = 1.0 / n;
    const double s_minus = (1 + unit(rng)) * 0.5 + n * h * 0.5;
    const double s_plus = (1 + unit(rng)) * 0.5 + n * h * 0.5;
    const MovingGrid g = MovingGrid::with_support(s_minus, s_plus, h);
    std::vector<double> u(g.node_count());
    for (double& v : u) v = 2 * unit(rng);
    return NodalField(g, std::move(u));
}

}  // namespace

bool run_selftest(std::ostream& out, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    bool all = true;

    double hl_err = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const NodalField u = random_field(rng);
        const double m = 0.5 + 3 * unit(rng);
        const double dt = (0.05 + 0.95 * unit(rng)) * cfl_max_dt(compute_slopes(u), m);
        const NodalField half = hopf_lax_step(u, dt, m).field_half;
        for (std::size_t k = 0; k < half.size(); ++k) {
            const double x = half.grid().node(k);
            hl_err = std::max(hl_err, std::abs(half.value(k) - hopf_lax_oracle(u, dt, m, x)));
        }
    }
    const bool hl_ok = hl_err <= 1e-6;
    out << (hl_ok ? "PASS" : "FAIL") << "  hopf-lax nodal update vs variational oracle, max err "
        << hl_err << '\n';
    all = all && hl_ok;

    double residual = 0;
    bool nonneg = true;
    for (int trial = 0; trial < 200; ++trial) {
        const NodalField u = random_field(rng);
        const double m = 0.5 + 3 * unit(rng);
        const double q = 0.05 + 0.9 * unit(rng);
        const double dt = 0.99 * unit(rng) / (m * q * std::pow(u.sup_norm(), q));
        const TridiagonalSystem sys = assemble(u, dt, m, q);
        const std::vector<double> x = solve(sys);
        for (std::size_t k = 0; k < x.size(); ++k) {
            double r = sys.diag[k] * x[k] - sys.rhs[k];
            if (k > 0) r += sys.sub[k] * x[k - 1];
            if (k + 1 < x.size()) r += sys.super[k] * x[k + 1];
            residual = std::max(residual, std::abs(r) / (1 + std::abs(sys.rhs[k])));
            nonneg = nonneg && x[k] >= 0;
        }
    }
    const bool solve_ok = residual <= 1e-12 && nonneg;
    out << (solve_ok ? "PASS" : "FAIL")
        << "  parabolic solve residual and nonnegativity, max rel residual " << residual << '\n';
    all = all && solve_ok;
    return all;
}

}  // namespace blowup
