#include "nlevy/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nlevy/parallel.hpp"

namespace nlevy {

Axis symmetric_axis(double half_width, int n) {
    if (n < 2) throw std::invalid_argument("axis needs at least 2 nodes");
    if (!(half_width > 0)) throw std::invalid_argument("half_width must be > 0");
    Axis a;
    a.n = n;
    a.lo = -half_width;
    a.step = 2.0 * half_width / (n - 1);
    return a;
}

bool Grid::same_layout(const Grid& o) const {
    if (arity != o.arity) return false;
    for (int c = 0; c < arity; ++c) {
        if (axes[c].n != o.axes[c].n || axes[c].lo != o.axes[c].lo ||
            axes[c].step != o.axes[c].step)
            return false;
    }
    return true;
}

GridFunction::GridFunction(Grid grid) : grid_(grid), values_(grid.size(), 0.0) {}

GridFunction::GridFunction(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw std::invalid_argument("value array does not match grid size");
}

GridFunction GridFunction::sample(
    const Grid& grid, const std::function<double(std::span<const double>)>& f) {
    GridFunction g(grid);
    const std::size_t n = grid.size();
    auto* vals = g.values_.data();
    parallel_for_chunks(n, [&](std::size_t b, std::size_t e) {
        std::array<int, 3> idx{};
        std::array<double, 3> x{};
        for (std::size_t i = b; i < e; ++i) {
            grid.unflat(i, idx);
            grid.node(std::span<const int>(idx.data(), grid.arity),
                      std::span<double>(x.data(), grid.arity));
            vals[i] = f(std::span<const double>(x.data(), grid.arity));
        }
    });
    return g;
}

double GridFunction::eval(std::span<const double> x) const {
    const int a = grid_.arity;
    // Per-axis cell index and weight, clamped to the domain.
    int base_idx[3];
    double theta[3];
    for (int c = 0; c < a; ++c) {
        const Axis& ax = grid_.axes[c];
        double t = (x[c] - ax.lo) / ax.step;
        if (t <= 0.0) {
            base_idx[c] = 0;
            theta[c] = 0.0;
        } else if (t >= ax.n - 1) {
            base_idx[c] = ax.n - 2 >= 0 ? ax.n - 2 : 0;
            theta[c] = ax.n >= 2 ? 1.0 : 0.0;
        } else {
            double fl = std::floor(t);
            base_idx[c] = static_cast<int>(fl);
            theta[c] = t - fl;
        }
    }
    // Accumulate the 2^a corners in a fixed order.
    double acc = 0.0;
    const int corners = 1 << a;
    for (int m = 0; m < corners; ++m) {
        double w = 1.0;
        std::size_t f = 0;
        for (int c = 0; c < a; ++c) {
            const int up = (m >> c) & 1;
            w *= up ? theta[c] : 1.0 - theta[c];
            int ic = base_idx[c] + up;
            if (ic >= grid_.axes[c].n) ic = grid_.axes[c].n - 1;
            f = f * grid_.axes[c].n + ic;
        }
        if (w != 0.0) acc += w * values_[f];
    }
    return acc;
}

double GridFunction::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double GridFunction::discrete_lipschitz() const {
    double lip = 0.0;
    const int a = grid_.arity;
    std::array<int, 3> idx{};
    for (int c = 0; c < a; ++c) {
        const Axis& ax = grid_.axes[c];
        if (ax.n < 2) continue;
        std::size_t stride = 1;
        for (int d = c + 1; d < a; ++d) stride *= grid_.axes[d].n;
        const std::size_t n = grid_.size();
        for (std::size_t i = 0; i < n; ++i) {
            grid_.unflat(i, idx);
            if (idx[c] + 1 >= ax.n) continue;
            lip = std::max(lip, std::abs(values_[i + stride] - values_[i]) / ax.step);
        }
    }
    return lip;
}

}  // namespace nlevy
