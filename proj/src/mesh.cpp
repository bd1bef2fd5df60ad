#include "blowup/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace blowup {

int end_node_count(double s, double h) {
    const double tol = kSupportTolerance * h;
    double k = std::floor(s / h);
    // Snap roundoff at exact multiples so that h <= s - (k-1)h < 2h.
    if (s - (k - 1) * h >= 2 * h - tol) {
        k += 1;
    } else if (s - (k - 1) * h < h - tol) {
        k -= 1;
    }
    return static_cast<int>(k);
}

MovingGrid MovingGrid::with_support(double s_minus, double s_plus, double h) {
    if (!(h > 0) || !std::isfinite(h)) {
        throw std::invalid_argument("mesh width must be positive and finite");
    }
    if (!std::isfinite(s_minus) || !std::isfinite(s_plus)) {
        throw std::invalid_argument("support endpoints must be finite");
    }
    MovingGrid g;
    g.h_ = h;
    g.s_minus_ = s_minus;
    g.s_plus_ = s_plus;
    g.n_minus_ = end_node_count(s_minus, h);
    g.n_plus_ = end_node_count(s_plus, h);
    g.h_minus_ = s_minus - (g.n_minus_ - 1) * h;
    g.h_plus_ = s_plus - (g.n_plus_ - 1) * h;
    if (g.n_minus_ + g.n_plus_ < 2) {
        throw std::invalid_argument("support [" + std::to_string(-s_minus) + ", " +
                                    std::to_string(s_plus) +
                                    "] contains no interior lattice node");
    }
    return g;
}

double MovingGrid::interval_width(std::size_t k) const {
    if (k == 0) return h_minus_;
    if (k == node_count()) return h_plus_;
    return h_;
}

MovingGrid build_initial_grid(double s0, int n) {
    if (!(s0 > 0) || !std::isfinite(s0)) {
        throw std::invalid_argument("initial half-width s0 must be positive");
    }
    if (n < 1) {
        throw std::invalid_argument("node count N must be at least 1");
    }
    return MovingGrid::with_support(s0, s0, s0 / n);
}

RegridResult regrid(const MovingGrid& previous, double s_minus_new, double s_plus_new) {
    const double tol = kSupportTolerance * previous.h();
    if (s_minus_new < previous.s_minus() - tol || s_plus_new < previous.s_plus() - tol) {
        throw std::invalid_argument("regrid: support may not shrink");
    }
    RegridResult r{MovingGrid::with_support(s_minus_new, s_plus_new, previous.h())};
    r.new_node_left = r.grid.n_minus() > previous.n_minus();
    r.new_node_right = r.grid.n_plus() > previous.n_plus();
    return r;
}

NodalField::NodalField(MovingGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.node_count()) {
        throw std::invalid_argument("NodalField: value count " + std::to_string(values_.size()) +
                                    " does not match node count " +
                                    std::to_string(grid_.node_count()));
    }
    for (double v : values_) {
        if (!(v >= 0) || !std::isfinite(v)) {
            throw std::invalid_argument("NodalField: values must be finite and nonnegative");
        }
    }
}

NodalField NodalField::zero(const MovingGrid& grid) {
    return NodalField(grid, std::vector<double>(grid.node_count(), 0.0));
}

double NodalField::operator()(double x) const {
    const double left = -grid_.s_minus();
    const double right = grid_.s_plus();
    if (x <= left || x >= right) return 0.0;

    const double h = grid_.h();
    const double x_first = grid_.node(0);
    const double x_last = grid_.node(values_.size() - 1);
    if (x <= x_first) {
        return values_.front() * (x - left) / (x_first - left);
    }
    if (x >= x_last) {
        return values_.back() * (right - x) / (right - x_last);
    }
    auto k = static_cast<std::size_t>(std::floor((x - x_first) / h));
    k = std::min(k, values_.size() - 2);
    const double xk = grid_.node(k);
    const double w = std::clamp((x - xk) / h, 0.0, 1.0);
    return (1 - w) * values_[k] + w * values_[k + 1];
}

double NodalField::sup_norm() const {
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

NodalField interpolate(const NodalField& field, const MovingGrid& target) {
    const MovingGrid& src = field.grid();
    const double tol = kSupportTolerance * std::max(src.h(), target.h());
    if (target.s_minus() < src.s_minus() - tol || target.s_plus() < src.s_plus() - tol) {
        throw std::invalid_argument("interpolate: target support smaller than source support");
    }
    if (target == src) return field;

    std::vector<double> values(target.node_count());
    for (std::size_t k = 0; k < values.size(); ++k) {
        values[k] = field(target.node(k));
    }
    return NodalField(target, std::move(values));
}

SlopeField::SlopeField(MovingGrid grid, std::vector<double> slopes)
    : grid_(grid), slopes_(std::move(slopes)) {
    if (slopes_.size() != grid_.node_count() + 1) {
        throw std::invalid_argument("SlopeField: one slope per interval required");
    }
}

double SlopeField::sup_norm() const {
    double s = 0;
    for (double v : slopes_) s = std::max(s, std::abs(v));
    return s;
}

double SlopeField::l1_norm() const {
    double s = 0;
    for (std::size_t k = 0; k < slopes_.size(); ++k) {
        s += std::abs(slopes_[k]) * grid_.interval_width(k);
    }
    return s;
}

}  // namespace blowup
