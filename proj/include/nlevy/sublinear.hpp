#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nlevy/grid.hpp"
#include "nlevy/smooth.hpp"

namespace nlevy {

/// Quadrature-node representation of one distribution on 1..3 coordinates.
struct DiscreteDistribution {
    int arity = 1;
    std::vector<std::array<double, 3>> nodes;
    std::vector<double> weights;  // nonnegative, sum to 1 within 1e-12

    void validate() const;
    double max_abs_coord(int axis) const;
};

DiscreteDistribution point_mass(std::span<const double> x);
DiscreteDistribution rademacher(double magnitude = 1.0);
DiscreteDistribution from_nodes_1d(std::vector<double> nodes, std::vector<double> weights);

/// A finite family of distributions; the sublinear expectation is the max of
/// the member expectations. An optional product factorization (one factor per
/// axis, shared across members) enables per-axis convolution in the DP.
struct DistributionFamily {
    std::vector<DiscreteDistribution> members;

    struct Factor {
        int axis = 0;
        std::vector<double> nodes;
        std::vector<double> weights;
    };
    std::vector<Factor> factors;
    // member i uses factors factored_members[i] (one id per axis, ordered by
    // axis); empty when no product form is available.
    std::vector<std::vector<int>> factored_members;

    int arity() const;
    void validate() const;
    bool has_product_form() const { return !factored_members.empty(); }

    /// Builds the general members from a product specification (per-axis
    /// factor alternatives, all combinations).
    static DistributionFamily product(const std::vector<std::vector<Factor>>& per_axis_choices);
    static DistributionFamily single(DiscreteDistribution d);
    static DistributionFamily of(std::vector<DiscreteDistribution> ds);
};

/// max over members of the weighted node sum; member reduction by max, inner
/// sums in fixed node order.
double expect(const DistributionFamily& family,
              const std::function<double(std::span<const double>)>& phi);

struct ComposeOptions {
    std::array<double, 3> scales{1, 1, 1};   // per-coordinate increment scale
    int steps = 1;
    std::array<double, 3> eval_half_width{0, 0, 0};  // window that must stay covered
    double coverage_slack = 0.0;  // allowed overshoot; infinity disables the check
};

struct ComposeResult {
    GridFunction u;
    double overshoot = 0.0;  // worst-case reach beyond the grid
};

/// Dynamic-programming composition of n i.i.d. increments:
/// u_0 = phi on the grid, u_{k+1}(x) = max_members sum_j w_j u_k(x + scale.node_j),
/// with multilinear interpolation and constant extension outside the grid.
ComposeResult iid_compose(const DistributionFamily& family, const InitialCondition& phi,
                          const Grid& grid, const ComposeOptions& opt);

/// Continues composition from an existing grid function (semigroup use).
ComposeResult iid_compose(const DistributionFamily& family, const GridFunction& u0,
                          const ComposeOptions& opt);

struct AuditViolation {
    std::string check;
    double lhs = 0, rhs = 0;
};

struct AuditReport {
    std::vector<AuditViolation> violations;
    int checks_run = 0;
    bool clean() const { return violations.empty(); }
};

/// Verifies monotonicity, constant preservation, sub-additivity, positive
/// homogeneity and |E[X]-E[Y]| <= E[|X-Y|] on the supplied test functions.
AuditReport sublinearity_audit(const DistributionFamily& family,
                               const std::vector<std::function<double(std::span<const double>)>>& phis,
                               const std::vector<double>& lambdas, double tol = 1e-9);

}  // namespace nlevy
