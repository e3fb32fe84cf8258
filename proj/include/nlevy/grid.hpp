#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace nlevy {

/// Uniform axis: nodes lo + i*step for i in [0, n).
struct Axis {
    double lo = 0.0;
    double step = 1.0;
    int n = 1;

    double hi() const { return lo + step * (n - 1); }
    double node(int i) const { return lo + step * i; }
};

/// Symmetric axis [-half_width, half_width] with n nodes (n >= 2).
Axis symmetric_axis(double half_width, int n);

/// Uniform tensor grid in 1..3 coordinates. Index order: axis 0 slowest,
/// last axis fastest (contiguous).
struct Grid {
    int arity = 1;
    std::array<Axis, 3> axes{};

    std::size_t size() const {
        std::size_t s = 1;
        for (int c = 0; c < arity; ++c) s *= static_cast<std::size_t>(axes[c].n);
        return s;
    }
    std::size_t flat(std::span<const int> idx) const {
        std::size_t f = 0;
        for (int c = 0; c < arity; ++c) f = f * axes[c].n + idx[c];
        return f;
    }
    void unflat(std::size_t f, std::span<int> idx) const {
        for (int c = arity - 1; c >= 0; --c) {
            idx[c] = static_cast<int>(f % axes[c].n);
            f /= axes[c].n;
        }
    }
    void node(std::span<const int> idx, std::span<double> x) const {
        for (int c = 0; c < arity; ++c) x[c] = axes[c].node(idx[c]);
    }
    bool same_layout(const Grid& o) const;
};

/// Values of a bounded function on a uniform grid. Evaluation outside the
/// domain uses constant extension of the boundary value; inside it is
/// multilinear, which keeps evaluation monotone in the stored values.
class GridFunction {
public:
    GridFunction() = default;
    explicit GridFunction(Grid grid);
    GridFunction(Grid grid, std::vector<double> values);

    static GridFunction sample(const Grid& grid,
                               const std::function<double(std::span<const double>)>& f);

    const Grid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double& at_flat(std::size_t i) { return values_[i]; }
    double at_flat(std::size_t i) const { return values_[i]; }

    /// Multilinear interpolation with constant extension (indices clamped).
    double eval(std::span<const double> x) const;

    /// Value at the grid point nearest to the origin of each axis == exact
    /// node lookup when x hits a node; falls back to eval otherwise.
    double value_at(std::span<const double> x) const { return eval(x); }

    double sup_norm() const;
    /// Largest |difference quotient| along each axis; max over axes.
    double discrete_lipschitz() const;

private:
    Grid grid_{};
    std::vector<double> values_;
};

}  // namespace nlevy
