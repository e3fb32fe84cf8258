#pragma once

#include <span>
#include <vector>

#include "nlevy/grid.hpp"
#include "nlevy/smooth.hpp"

namespace nlevy {

/// One spectral atom of an alpha-stable jump measure: direction sign*e_axis,
/// radial density weight * r^{-1-alpha} dr.
struct Atom {
    int axis = 0;   // 0-based coordinate the jumps act on
    int sign = 1;   // +1 or -1
    double weight = 0.0;
};

struct StableLevyMeasure {
    double alpha = 1.5;  // must lie in (1,2)
    int dim = 1;         // 1 or 2
    std::vector<Atom> atoms;

    double total_mass() const;
    void validate() const;
};

StableLevyMeasure measure_1d(double alpha, double k_minus, double k_plus);
/// Axis atoms in the order (-e1, +e1, -e2, +e2).
StableLevyMeasure measure_2d(double alpha, double k1_minus, double k1_plus,
                             double k2_minus, double k2_plus);

/// Interval of admissible weights for one atom direction.
struct WeightInterval {
    int axis = 0;
    int sign = 1;
    double lo = 0.0;
    double hi = 0.0;
};

/// Box-parametrized compact family of stable measures with a common exponent.
struct MeasureClass {
    double alpha = 1.5;
    int dim = 1;
    double lambda_lower = 0.0;  // open bounds on the total spectral mass
    double lambda_upper = 0.0;
    std::vector<WeightInterval> atoms;

    void validate() const;
    StableLevyMeasure upper_measure() const;  // all weights at hi
    StableLevyMeasure lower_measure() const;
    StableLevyMeasure vertex_measure(unsigned mask) const;  // bit i: atom i at hi
    std::size_t vertex_count() const { return std::size_t{1} << atoms.size(); }
    bool contains(const StableLevyMeasure& m) const;
};

MeasureClass class_1d(double alpha, double k_lo, double k_hi);
MeasureClass class_2d(double alpha, double k_lo, double k_hi);

/// Truncation policy for the nonlocal generator. The outer cut is treated as
/// a lower bound and doubled (powers of two) until the reported tail bound
/// meets tail_tolerance; exceeding max_outer_cut raises ToleranceError.
struct QuadratureConfig {
    double inner_cut = 1e-4;
    double outer_cut = 2.0;
    int nodes_per_decade = 64;
    double tail_tolerance = 0.0;  // 0 -> 1e-6 * sup|phi|
    double max_outer_cut = 1e12;

    void validate() const;
};

// Closed-form radial moments. Directions carry unit vectors, so |z| along an
// atom equals the radius.
double interval_mass(const StableLevyMeasure& m, double a, double b);
double atom_interval_mass(double alpha, double weight, double a, double b);
double small_second_moment(const StableLevyMeasure& m, double eps);
double tail_first_moment(const StableLevyMeasure& m, double r);
double kappa(const StableLevyMeasure& m);
double kappa(const MeasureClass& cls);

/// Geometric-cell discretization of the radial band (eps, R]: per cell the
/// exact mass of weight-1 density r^{-1-alpha} and a node at the geometric
/// midpoint. Integrating the constant 1 against the cells is exact.
struct RadialBand {
    std::vector<double> node_r;
    std::vector<double> cell_mass;  // unit-weight masses
    double total_mass = 0.0;
    double first_moment = 0.0;  // sum mass * node_r
};

RadialBand make_radial_band(double alpha, double eps, double R, int nodes_per_decade);

struct GeneratorValue {
    double value = 0.0;
    double tail_bound = 0.0;   // dropped outer part
    double inner_bound = 0.0;  // second-order compensation residual
    double outer_cut = 0.0;    // R actually used

    double reported_bound() const { return tail_bound + inner_bound; }
};

/// Approximates  int delta_lambda phi(z) F(dlambda)  with
/// delta_lambda phi(z) = phi(z+lambda) - phi(z) - <Dphi(z), lambda>.
/// Inner |lambda| <= eps uses exact second-order compensation, the middle band
/// uses the radial-cell quadrature, the outer part is dropped and bounded.
GeneratorValue apply_generator(const StableLevyMeasure& m, const SmoothFunction& phi,
                               std::span<const double> z, const QuadratureConfig& cfg);

/// Same operation for grid data; derivatives use second-order centered
/// differences (one-sided at the domain edges).
GeneratorValue apply_generator(const StableLevyMeasure& m, const GridFunction& phi,
                               std::span<const double> z, const QuadratureConfig& cfg);

/// Per-atom generator integrals at unit weight, in the atom order of cls.
std::vector<GeneratorValue> unit_generator_values(const MeasureClass& cls,
                                                  const SmoothFunction& phi,
                                                  std::span<const double> z,
                                                  const QuadratureConfig& cfg);

/// (interval_mass(a,b), beta * interval_mass(beta^{1/alpha} a, beta^{1/alpha} b));
/// the two sides agree to machine precision.
std::pair<double, double> scaling_pushforward_check(const StableLevyMeasure& m,
                                                    double beta, double a, double b);

struct LipschitzProbe {
    double observed = 0.0;  // sup over box vertices of int |delta phi(z2) - delta phi(z)| dF
    double bound = 0.0;     // (|D3 phi| + 2 |D2 phi|) * kappa(class) * |z2 - z|
};

LipschitzProbe generator_lipschitz_probe(const MeasureClass& cls, const SmoothFunction& phi,
                                         std::span<const double> z,
                                         std::span<const double> z2,
                                         const QuadratureConfig& cfg);

}  // namespace nlevy
