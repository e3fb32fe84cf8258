#include "nlevy/uncertainty.hpp"

#include <algorithm>
#include <stdexcept>

namespace nlevy {

void UncertaintySetBox::validate() const {
    if (!q.valid() || !Q.valid()) throw std::invalid_argument("empty parameter interval");
    if (Q.lo < 0) throw std::invalid_argument("diffusion interval must be nonnegative");
    if (!jump.atoms.empty() && !jump_free()) jump.validate();
}

bool UncertaintySetBox::jump_free() const {
    for (const auto& a : jump.atoms)
        if (a.hi > 0) return false;
    return true;
}

double g_function(double p, double A, const UncertaintySetBox& box) {
    const double pq = p >= 0 ? p * box.q.hi : p * box.q.lo;
    const double aq = A >= 0 ? 0.5 * A * box.Q.hi : 0.5 * A * box.Q.lo;
    return pq + aq;
}

double hamiltonian(const UncertaintySetBox& box, std::span<const double> jump_values,
                   double p, double A) {
    if (jump_values.size() != box.jump.atoms.size())
        throw std::invalid_argument("jump value count does not match atom count");
    double h = g_function(p, A, box);
    for (std::size_t i = 0; i < jump_values.size(); ++i) {
        const auto& w = box.jump.atoms[i];
        h += jump_values[i] >= 0 ? w.hi * jump_values[i] : w.lo * jump_values[i];
    }
    return h;
}

double hamiltonian_upwind(const UncertaintySetBox& box, std::span<const double> jump_values,
                          double d_plus, double d_minus, double A) {
    if (jump_values.size() != box.jump.atoms.size())
        throw std::invalid_argument("jump value count does not match atom count");
    double drift = box.q.hi >= 0 ? box.q.hi * d_plus : box.q.hi * d_minus;
    const double lo_cand = box.q.lo >= 0 ? box.q.lo * d_plus : box.q.lo * d_minus;
    drift = std::max(drift, lo_cand);
    if (box.q.contains_zero()) drift = std::max(drift, 0.0);
    double h = drift + (A >= 0 ? 0.5 * A * box.Q.hi : 0.5 * A * box.Q.lo);
    for (std::size_t i = 0; i < jump_values.size(); ++i) {
        const auto& w = box.jump.atoms[i];
        h += jump_values[i] >= 0 ? w.hi * jump_values[i] : w.lo * jump_values[i];
    }
    return h;
}

LevyTriplet argmax_triplet(const UncertaintySetBox& box, std::span<const double> jump_values,
                           double p, double A) {
    if (jump_values.size() != box.jump.atoms.size())
        throw std::invalid_argument("jump value count does not match atom count");
    LevyTriplet t;
    t.measure.alpha = box.jump.alpha;
    t.measure.dim = box.jump.dim;
    for (std::size_t i = 0; i < jump_values.size(); ++i) {
        const auto& w = box.jump.atoms[i];
        t.measure.atoms.push_back({w.axis, w.sign, jump_values[i] >= 0 ? w.hi : w.lo});
    }
    t.q = p >= 0 ? box.q.hi : box.q.lo;
    t.Q = A >= 0 ? box.Q.hi : box.Q.lo;
    return t;
}

}  // namespace nlevy
