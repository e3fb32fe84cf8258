#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "nlevy/example_dist.hpp"
#include "nlevy/pide.hpp"
#include "nlevy/report.hpp"
#include "nlevy/sublinear.hpp"
#include "nlevy/uncertainty.hpp"

namespace nlevy {

struct RobustLimitOptions {
    std::vector<long> n_list{2, 4, 8, 16, 32, 64};
    double final_band = 5e-2;
    double trend_slack = 0.0;       // tolerance for the nonincreasing checks
    std::string roles = "xyz";      // "x" (diffusion line), "z" (jump line) or "xyz"
    double alpha = 1.5;
    SchemeConfig scheme;
    double coverage_slack = std::numeric_limits<double>::infinity();
    // With a single increment magnitude per coordinate the DP can run on
    // per-n lattice-aligned one-dimensional grids, making interpolation exact.
    bool dp_auto_grid = false;
    double dp_dx_target = 0.05;
    double reference_value = std::numeric_limits<double>::quiet_NaN();
    double solver_reference_tol = 5e-3;
    double audit_tol = 1e-9;
};

/// The headline experiment: normalized i.i.d. triple sums by dynamic
/// programming versus the solver's u(1, 0). Runs the moment audits first and
/// aborts with a diagnostic if the family violates them.
ExperimentReport robust_limit_experiment(const DistributionFamily& family,
                                         const UncertaintySetBox& box,
                                         const InitialCondition& phi,
                                         const RobustLimitOptions& opt);

struct AttractionSuiteOptions {
    std::vector<long> n_list{2, 4, 8, 16, 32, 64, 128};
    std::vector<double> s_list{0.2, 0.1, 0.05};
    std::vector<long> mz_n_list{4, 8, 16, 32, 64, 128, 256};
    CertifyOptions certify{};
    double mz_grid_half_width = 64.0;
    int mz_grid_nodes = 2049;
    double plateau_tol = 0.05;
};

/// Tail-closeness certificates plus the boundedness audit of the normalized
/// absolute sums.
ExperimentReport attraction_suite(const ParetoTailLaw& law, const MeasureClass& cls,
                                  const AttractionSuiteOptions& opt);

struct ConsistencyRateOptions {
    std::vector<double> s_list{0.2, 0.1, 0.05, 0.025};
    long n_budget = 128;
    int node_budget = 256;
    double z_half_width = 2.0;
    int z_probe_points = 17;
    SchemeConfig scheme;  // one-coordinate DP grid
    QuadratureConfig quad{};
};

/// Nested-limit probe: the one-step gap against s times the worst-case
/// generator must vanish faster than s (ratio column decreasing).
ExperimentReport consistency_rate_experiment(const ParetoTailLaw& law, const MeasureClass& cls,
                                             const ConsistencyRateOptions& opt);

struct ScalingExperimentOptions {
    std::vector<double> beta_list{0.25, 0.5};
    double t = 1.0;
    double gap_tol = 1e-2;
    SchemeConfig scheme;
};

ExperimentReport scaling_experiment(const UncertaintySetBox& box, const SmoothFunction& phi,
                                    const ScalingExperimentOptions& opt);

struct GeneratorLimitTriple {
    std::shared_ptr<const SmoothFunction> phi;  // phi(0) = 0
    double p = 0;
    double A = 0;
    std::string name;
};

struct GeneratorLimitOptions {
    std::vector<double> delta_list{0.2, 0.1, 0.05, 0.025, 0.0125};
    double last3_tol = 5e-2;
    SchemeConfig scheme;
};

ExperimentReport generator_limit_experiment(const UncertaintySetBox& box,
                                            const std::vector<GeneratorLimitTriple>& triples,
                                            const GeneratorLimitOptions& opt);

struct AuditExperimentOptions {
    int instances = 200;
    std::uint64_t seed = 20240901;
    double tol = 1e-9;
};

/// Randomized sublinear-expectation axiom audit over generated families.
ExperimentReport audit_experiment(const AuditExperimentOptions& opt);

/// Extracts the marginal family of one coordinate (projection of every
/// member onto that axis).
DistributionFamily marginal_family(const DistributionFamily& family, int axis);

}  // namespace nlevy
