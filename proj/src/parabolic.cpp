#include "blowup/parabolic.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "blowup/errors.hpp"

namespace blowup {

std::vector<double> lumped_weights(const MovingGrid& grid) {
    const std::size_t n = grid.node_count();
    const double h = grid.h();
    std::vector<double> w(n, h);
    if (n == 1) {
        w[0] = 0.5 * (grid.h_minus() + grid.h_plus());
        return w;
    }
    w.front() = 0.5 * (grid.h_minus() + h);
    w.back() = 0.5 * (grid.h_plus() + h);
    return w;
}

double lumped_inner_product(const NodalField& a, const NodalField& b) {
    if (!(a.grid() == b.grid())) {
        throw std::invalid_argument("lumped_inner_product: fields live on different grids");
    }
    const auto w = lumped_weights(a.grid());
    double s = 0;
    for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * a.value(k) * b.value(k);
    return s;
}

double pow_q(double u, double q) { return u > 0 ? std::pow(u, q) : 0.0; }

bool existence_condition(const NodalField& field_half, double dt, double m, double q) {
    return m * q * dt * pow_q(field_half.sup_norm(), q) < 1;
}

TridiagonalSystem assemble(const NodalField& field_half, double dt, double m, double q) {
    if (!existence_condition(field_half, dt, m, q)) {
        std::ostringstream msg;
        msg << "assemble: m q dt |u|^q = " << m * q * dt * pow_q(field_half.sup_norm(), q)
            << " >= 1";
        throw ExistenceViolation(msg.str());
    }
    const MovingGrid& g = field_half.grid();
    const auto u = field_half.values();
    const std::size_t n = u.size();
    const double h = g.h();
    const double hm = g.h_minus();
    const double hp = g.h_plus();

    TridiagonalSystem sys;
    sys.sub.assign(n, 0.0);
    sys.diag.resize(n);
    sys.super.assign(n, 0.0);
    sys.rhs.resize(n);

    for (std::size_t k = 0; k < n; ++k) {
        const double uq = pow_q(u[k], q);
        sys.diag[k] = 1 - m * q * dt * uq;
        sys.rhs[k] = u[k] + m * (1 - q) * dt * uq * u[k];

        const bool left_end = (k == 0);
        const bool right_end = (k + 1 == n);
        if (!left_end && !right_end) {
            const double d = dt * u[k] / (h * h);
            sys.diag[k] += 2 * d;
            sys.sub[k] = -d;
            sys.super[k] = -d;
            continue;
        }
        // Boundary rows; a single node carries both boundary terms.
        const double d = dt * u[k] / h;
        if (left_end) {
            sys.diag[k] += d * 2 / hm;
            if (n > 1) sys.super[k] = -d * 2 / (hm + h);
        }
        if (right_end) {
            sys.diag[k] += d * 2 / hp;
            if (n > 1) sys.sub[k] = -d * 2 / (h + hp);
        }
    }

#ifndef NDEBUG
    for (std::size_t k = 0; k < n; ++k) {
        assert(sys.diag[k] > std::abs(sys.sub[k]) + std::abs(sys.super[k]));
    }
#endif
    return sys;
}

std::vector<double> solve(const TridiagonalSystem& system) {
    const std::size_t n = system.size();
    if (system.sub.size() != n || system.super.size() != n || system.rhs.size() != n) {
        throw std::invalid_argument("solve: inconsistent tridiagonal system");
    }
    std::vector<double> c(n), x(n);
    double pivot = system.diag[0];
    for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) pivot = system.diag[k] - system.sub[k] * c[k - 1];
        if (pivot == 0) throw std::logic_error("solve: zero pivot");
        c[k] = system.super[k] / pivot;
        x[k] = (system.rhs[k] - (k > 0 ? system.sub[k] * x[k - 1] : 0.0)) / pivot;
    }
    for (std::size_t k = n - 1; k-- > 0;) {
        x[k] -= c[k] * x[k + 1];
    }
    return x;
}

NodalField parabolic_step(const NodalField& field_half, double dt, double m, double q) {
    return NodalField(field_half.grid(), solve(assemble(field_half, dt, m, q)));
}

}  // namespace blowup
