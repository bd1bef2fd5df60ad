#include "blowup/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "blowup/errors.hpp"

namespace blowup {

SlopeField compute_slopes(const NodalField& field) {
    const MovingGrid& g = field.grid();
    const auto u = field.values();
    const std::size_t n = u.size();
    std::vector<double> v(n + 1);
    v[0] = u[0] / g.h_minus();
    for (std::size_t k = 1; k < n; ++k) {
        v[k] = (u[k] - u[k - 1]) / g.h();
    }
    v[n] = -u[n - 1] / g.h_plus();
    return SlopeField(g, std::move(v));
}

double cfl_max_dt(const SlopeField& slopes, double m) {
    const double vmax = slopes.sup_norm();
    if (vmax == 0) return std::numeric_limits<double>::infinity();
    return 0.5 * m * slopes.grid().h() / vmax;
}

HyperbolicStepResult hopf_lax_step(const NodalField& field, double dt, double m) {
    const MovingGrid& g = field.grid();
    const SlopeField slopes = compute_slopes(field);
    const auto v = slopes.slopes();
    const auto u = field.values();
    const std::size_t n = u.size();

    if (dt * slopes.sup_norm() > 0.5 * m * g.h() * (1 + 1e-12)) {
        std::ostringstream msg;
        msg << "hopf_lax_step: dt=" << dt << " violates the stability bound "
            << cfl_max_dt(slopes, m);
        throw CflViolation(msg.str());
    }

    const double c = dt / m;
    const double s_plus_new = g.s_plus() - c * v[n];
    const double s_minus_new = g.s_minus() + c * v[0];
    const RegridResult rg = regrid(g, s_minus_new, s_plus_new);
    const MovingGrid& ng = rg.grid;
    if (ng.n_plus() > g.n_plus() + 1 || ng.n_minus() > g.n_minus() + 1) {
        throw CflViolation("hopf_lax_step: front advanced by more than one node");
    }

    std::vector<double> out(ng.node_count());
    const int offset = g.first_index() - ng.first_index();  // 0 or 1
    for (std::size_t k = 0; k < n; ++k) {
        const double up = std::max({0.0, -v[k], v[k + 1]});
        out[k + offset] = u[k] + c * up * up;
    }
    if (rg.new_node_left) {
        const double vl = v[0];
        out[0] = (1 - g.h() / g.h_minus()) * u[0] + c * vl * vl;
    }
    if (rg.new_node_right) {
        const double vr = v[n];
        out.back() = (1 - g.h() / g.h_plus()) * u[n - 1] + c * vr * vr;
    }
    return {NodalField(ng, std::move(out)), s_minus_new, s_plus_new, rg.new_node_left,
            rg.new_node_right};
}

namespace {

// Golden-section maximisation of a concave function on [a, b].
template <typename F>
double golden_max(F&& f, double a, double b) {
    constexpr double r = 0.6180339887498949;
    double x1 = b - r * (b - a);
    double x2 = a + r * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 90 && b - a > 1e-15 * (1 + std::abs(a)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    return std::max({f1, f2, f(a), f(b)});
}

}  // namespace

double hopf_lax_oracle(const NodalField& field, double dt, double m, double x) {
    const MovingGrid& g = field.grid();
    auto objective = [&](double y) { return field(y) - m * (x - y) * (x - y) / (4 * dt); };

    // y = x gives u(x) >= 0; outside the support it gives exactly 0.
    double best = std::max(0.0, field(x));

    // Breakpoints of the piecewise-linear data.
    std::vector<double> breaks;
    breaks.reserve(field.size() + 2);
    breaks.push_back(-g.s_minus());
    for (std::size_t k = 0; k < field.size(); ++k) breaks.push_back(g.node(k));
    breaks.push_back(g.s_plus());

    // Pieces farther than this cannot beat the value at y = x.
    const double reach = std::sqrt(4 * dt * field.sup_norm() / m) + g.h();
    constexpr int kSamples = 64;
    for (std::size_t j = 0; j + 1 < breaks.size(); ++j) {
        const double a = breaks[j], b = breaks[j + 1];
        if (b < x - reach || a > x + reach) continue;
        double piece_best = -std::numeric_limits<double>::infinity();
        for (int s = 0; s <= kSamples; ++s) {
            piece_best = std::max(piece_best, objective(a + (b - a) * s / kSamples));
        }
        best = std::max({best, piece_best, golden_max(objective, a, b)});
    }
    return best;
}

}  // namespace blowup
