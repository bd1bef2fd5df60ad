#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace blowup {

/**
 * Node layout of the moving-support P1 space.
 *
 * Interior nodes sit on the fixed lattice x_i = i*h for
 * -n_minus+1 <= i <= n_plus-1. The two end intervals
 * (-s_minus, x_{-n_minus+1}) and (x_{n_plus-1}, s_plus) have widths
 * h_minus, h_plus in [h, 2h). Functions in the space vanish outside
 * (-s_minus, s_plus).
 */
class MovingGrid {
public:
    // Grid for the support [-s_minus, s_plus]. Throws std::invalid_argument
    // when the support holds no interior node.
    static MovingGrid with_support(double s_minus, double s_plus, double h);

    double h() const { return h_; }
    double s_minus() const { return s_minus_; }
    double s_plus() const { return s_plus_; }
    int n_minus() const { return n_minus_; }
    int n_plus() const { return n_plus_; }
    double h_minus() const { return h_minus_; }
    double h_plus() const { return h_plus_; }

    // Lattice index of the leftmost / rightmost interior node.
    int first_index() const { return 1 - n_minus_; }
    int last_index() const { return n_plus_ - 1; }

    std::size_t node_count() const {
        return static_cast<std::size_t>(n_minus_ + n_plus_ - 1);
    }
    // Position of the k-th stored node (k = 0 is the leftmost).
    double node(std::size_t k) const {
        return (first_index() + static_cast<int>(k)) * h_;
    }
    // Width of the k-th interval, k = 0 .. node_count(); 0 and node_count()
    // are the end intervals.
    double interval_width(std::size_t k) const;

    bool operator==(const MovingGrid&) const = default;

private:
    MovingGrid() = default;

    double h_ = 0;
    double s_minus_ = 0;
    double s_plus_ = 0;
    int n_minus_ = 0;
    int n_plus_ = 0;
    double h_minus_ = 0;
    double h_plus_ = 0;
};

// Relative tolerance (in units of h) for support comparisons.
inline constexpr double kSupportTolerance = 0x1p-40;

// Number of lattice steps N with h <= s - (N-1)h < 2h. At exact multiples
// s = k*h this gives N = k and an end width of exactly h.
int end_node_count(double s, double h);

MovingGrid build_initial_grid(double s0, int n);

struct RegridResult {
    MovingGrid grid;
    bool new_node_left = false;
    bool new_node_right = false;
};

// Grid for an enlarged support. The support must not shrink.
RegridResult regrid(const MovingGrid& previous, double s_minus_new, double s_plus_new);

/// Piecewise-linear function in the space spanned by a MovingGrid.
///
/// Values are stored at interior nodes only; the function is zero at both
/// support endpoints and outside the support. All values are finite and
/// nonnegative.
class NodalField {
public:
    NodalField(MovingGrid grid, std::vector<double> values);

    static NodalField zero(const MovingGrid& grid);

    const MovingGrid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double value(std::size_t k) const { return values_[k]; }
    std::size_t size() const { return values_.size(); }

    double operator()(double x) const;
    double sup_norm() const;

private:
    MovingGrid grid_;
    std::vector<double> values_;
};

// Lagrange interpolate of `field` on `target`. The target support must
// contain the source support.
NodalField interpolate(const NodalField& field, const MovingGrid& target);

/// Piecewise-constant derivative of a NodalField, one slope per interval
/// (left end interval first, right end interval last).
class SlopeField {
public:
    SlopeField(MovingGrid grid, std::vector<double> slopes);

    const MovingGrid& grid() const { return grid_; }
    std::span<const double> slopes() const { return slopes_; }
    double slope(std::size_t k) const { return slopes_[k]; }
    std::size_t size() const { return slopes_.size(); }

    double sup_norm() const;
    // Integral of |v| over the support (total variation of the field).
    double l1_norm() const;

private:
    MovingGrid grid_;
    std::vector<double> slopes_;
};

}  // namespace blowup
