#pragma once

#include <span>

#include "nlevy/stable_measure.hpp"

namespace nlevy {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool valid() const { return hi >= lo; }
    bool degenerate() const { return hi == lo; }
    bool contains_zero() const { return lo <= 0.0 && 0.0 <= hi; }
};

/// One jump/drift/diffusion scenario.
struct LevyTriplet {
    StableLevyMeasure measure;
    double q = 0.0;  // drift
    double Q = 0.0;  // diffusion coefficient, >= 0
};

/// Product-box uncertainty set: per-atom jump weight intervals, a drift
/// interval and a diffusion interval. The sup of any parameter-linear
/// objective over the box is attained at a vertex, so the Hamiltonian below
/// is exact.
struct UncertaintySetBox {
    MeasureClass jump;  // atoms may have lo == hi == 0 for jump-free boxes
    Interval q{0.0, 0.0};
    Interval Q{0.0, 0.0};

    void validate() const;
    bool jump_free() const;
};

/// sup over (q,Q) in the box of  p*q + A*Q/2  (bang-bang closed form).
double g_function(double p, double A, const UncertaintySetBox& box);

/// sup over the box of  sum_i w_i * J_i + p*q + A*Q/2  where J_i are per-atom
/// generator integrals at unit weight.
double hamiltonian(const UncertaintySetBox& box, std::span<const double> jump_values,
                   double p, double A);

/// Scheme-side variant: the drift term picks the one-sided difference that
/// matches the sign of the maximizing q (candidates q_lo, q_hi, and 0 when the
/// interval spans it), which keeps the explicit update monotone.
double hamiltonian_upwind(const UncertaintySetBox& box, std::span<const double> jump_values,
                          double d_plus, double d_minus, double A);

/// The vertex attaining the sup; ties broken toward upper endpoints.
LevyTriplet argmax_triplet(const UncertaintySetBox& box, std::span<const double> jump_values,
                           double p, double A);

}  // namespace nlevy
