#pragma once

#include <array>
#include <vector>

#include "nlevy/grid.hpp"
#include "nlevy/smooth.hpp"
#include "nlevy/stable_measure.hpp"
#include "nlevy/uncertainty.hpp"

namespace nlevy {

/// Explicit monotone scheme configuration. dt == 0 selects the largest step
/// allowed by the monotonicity bound times cfl_safety; a user-supplied dt
/// violating that bound raises CflError.
struct SchemeConfig {
    std::array<int, 3> nodes{201, 0, 0};
    std::array<double, 3> half_width{10, 0, 0};
    double dt = 0.0;
    double cfl_safety = 0.8;
    QuadratureConfig quad{1e-4, 2.0, 32, 0.0, 1e12};
    bool auto_inner_cut = true;  // inner cut = jump-axis step
    std::size_t max_nodes = std::size_t{1} << 24;
    std::vector<double> store_times;
    // Coverage policy: the probe window must sit at least
    //   drift reach + 6 diffusion std + jump_coverage_margin - coverage_slack
    // away from the boundary.
    double probe_half_width = 0.0;
    double jump_coverage_margin = 0.0;
    double coverage_slack = 0.0;

    void validate(int arity) const;
};

struct SolverResult {
    Grid grid;
    std::vector<double> times;
    std::vector<GridFunction> layers;
    double dt = 0.0;
    long steps = 0;
    double cfl_margin = 0.0;         // 1 - dt * operator intensity
    double tail_bound_rate = 0.0;    // dropped outer band, per unit time
    double inner_bound_rate = 0.0;   // small-jump compensation residual, per unit time
    double boundary_mass_rate = 0.0; // jump mass reaching past the domain, per unit time

    const GridFunction& final_layer() const { return layers.back(); }
    double final_time() const { return times.back(); }
    /// Value at the stored time nearest to t (must match within 1e-9 of a
    /// stored time) and point x.
    double probe(double t, std::span<const double> x) const;
    /// Reported per-run error budget from the truncation bounds.
    double reported_budget() const {
        return (tail_bound_rate + inner_bound_rate + boundary_mass_rate) * final_time();
    }
};

/// Pure-jump equation; the box must have degenerate q = Q = {0}. Supports
/// d = 1 and the separable d = 2 axis-atom case.
SolverResult solve_pure_jump(const UncertaintySetBox& box, const InitialCondition& phi,
                             double T, const SchemeConfig& cfg);

/// One spatial coordinate carrying drift (upwind), diffusion (centered) and
/// jumps at once.
SolverResult solve_combined_1d(const UncertaintySetBox& box, const InitialCondition& phi,
                               double T, const SchemeConfig& cfg);

/// Three coordinates (x,y,z): diffusion acts on x, drift on y, jumps on z.
SolverResult solve_triple(const UncertaintySetBox& box, const InitialCondition& phi,
                          double T, const SchemeConfig& cfg);

struct ScalingCheckResult {
    double lhs = 0;     // u(beta t, 0) started from phi
    double rhs = 0;     // v(t, 0) started from phi(beta^{1/alpha} .)
    double gap = 0;
    double budget = 0;  // sum of the two runs' reported budgets
};

/// Distributional scaling identity for the pure-jump equation.
ScalingCheckResult scaling_check(const UncertaintySetBox& box, const SmoothFunction& phi,
                                 double t, double beta, const SchemeConfig& cfg);

struct GeneratorLimitRow {
    double delta = 0;
    double jump_part = 0;  // short-horizon value of the jump solve at 0
    double g_part = 0;     // drift + diffusion short-horizon values at 0
    double ratio = 0;      // (jump_part + g_part) / delta
};

struct GeneratorLimitResult {
    std::vector<GeneratorLimitRow> rows;
    double target = 0;  // sup { int delta phi(0) dF + p q + A Q / 2 } by quadrature
};

/// Short-horizon ratio table versus the closed-form generator functional.
/// phi must be C^3_b with phi(0) = 0.
GeneratorLimitResult generator_limit_check(const UncertaintySetBox& box,
                                           const SmoothFunction& phi, double p, double A,
                                           const std::vector<double>& deltas,
                                           const SchemeConfig& cfg);

struct TimeContinuityRow {
    double s = 0;
    double max_increment = 0;  // sup over stored pairs of |u(t+s)-u(t)|_inf
    double envelope = 0;       // C_fit * (sqrt(s) + s + s^{1/alpha})
};

struct TimeContinuityResult {
    std::vector<TimeContinuityRow> rows;
    double c_fit = 0;
    bool dominated = false;  // increments <= envelope * (1 + slack)
};

TimeContinuityResult time_continuity_probe(const SolverResult& result, double alpha,
                                           const std::vector<double>& s_list,
                                           double slack = 0.25);

}  // namespace nlevy
