#include "nlevy/stable_measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nlevy/common.hpp"

namespace nlevy {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 1.0) || !(alpha < 2.0))
        throw std::invalid_argument("alpha must lie strictly in (1,2)");
}

double grad_norm(std::span<const double> g) {
    double s = 0;
    for (double v : g) s += v * v;
    return std::sqrt(s);
}

}  // namespace

double StableLevyMeasure::total_mass() const {
    double s = 0;
    for (const auto& a : atoms) s += a.weight;
    return s;
}

void StableLevyMeasure::validate() const {
    check_alpha(alpha);
    if (dim != 1 && dim != 2) throw std::invalid_argument("dim must be 1 or 2");
    for (const auto& a : atoms) {
        if (a.weight < 0) throw std::invalid_argument("atom weights must be >= 0");
        if (a.axis < 0 || a.axis >= dim) throw std::invalid_argument("atom axis out of range");
        if (a.sign != 1 && a.sign != -1) throw std::invalid_argument("atom sign must be +-1");
    }
}

StableLevyMeasure measure_1d(double alpha, double k_minus, double k_plus) {
    StableLevyMeasure m;
    m.alpha = alpha;
    m.dim = 1;
    m.atoms = {{0, -1, k_minus}, {0, +1, k_plus}};
    m.validate();
    return m;
}

StableLevyMeasure measure_2d(double alpha, double k1_minus, double k1_plus,
                             double k2_minus, double k2_plus) {
    StableLevyMeasure m;
    m.alpha = alpha;
    m.dim = 2;
    m.atoms = {{0, -1, k1_minus}, {0, +1, k1_plus}, {1, -1, k2_minus}, {1, +1, k2_plus}};
    m.validate();
    return m;
}

void MeasureClass::validate() const {
    check_alpha(alpha);
    if (!(lambda_lower > 0) || !(lambda_upper > lambda_lower))
        throw std::invalid_argument("need 0 < lambda_lower < lambda_upper");
    if (atoms.empty()) throw std::invalid_argument("measure class needs at least one atom");
    double lo_sum = 0, hi_sum = 0;
    for (const auto& a : atoms) {
        if (!(a.lo >= 0) || !(a.hi >= a.lo))
            throw std::invalid_argument("atom weight interval must satisfy 0 <= lo <= hi");
        lo_sum += a.lo;
        hi_sum += a.hi;
    }
    if (!(lo_sum > lambda_lower) || !(hi_sum < lambda_upper))
        throw std::invalid_argument("box total mass must stay inside (lambda_lower, lambda_upper)");
}

StableLevyMeasure MeasureClass::vertex_measure(unsigned mask) const {
    StableLevyMeasure m;
    m.alpha = alpha;
    m.dim = dim;
    m.atoms.reserve(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const auto& a = atoms[i];
        m.atoms.push_back({a.axis, a.sign, (mask >> i) & 1u ? a.hi : a.lo});
    }
    return m;
}

StableLevyMeasure MeasureClass::upper_measure() const {
    return vertex_measure(~0u);
}

StableLevyMeasure MeasureClass::lower_measure() const { return vertex_measure(0u); }

bool MeasureClass::contains(const StableLevyMeasure& m) const {
    if (m.dim != dim || m.atoms.size() != atoms.size() || m.alpha != alpha) return false;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        const auto& box = atoms[i];
        const auto& a = m.atoms[i];
        if (a.axis != box.axis || a.sign != box.sign) return false;
        if (a.weight < box.lo || a.weight > box.hi) return false;
    }
    return true;
}

MeasureClass class_1d(double alpha, double k_lo, double k_hi) {
    MeasureClass c;
    c.alpha = alpha;
    c.dim = 1;
    c.atoms = {{0, -1, k_lo, k_hi}, {0, +1, k_lo, k_hi}};
    c.lambda_lower = 0.5 * 2 * k_lo;
    c.lambda_upper = 2.0 * 2 * k_hi;
    c.validate();
    return c;
}

MeasureClass class_2d(double alpha, double k_lo, double k_hi) {
    MeasureClass c;
    c.alpha = alpha;
    c.dim = 2;
    c.atoms = {{0, -1, k_lo, k_hi}, {0, +1, k_lo, k_hi}, {1, -1, k_lo, k_hi}, {1, +1, k_lo, k_hi}};
    c.lambda_lower = 0.5 * 4 * k_lo;
    c.lambda_upper = 2.0 * 4 * k_hi;
    c.validate();
    return c;
}

void QuadratureConfig::validate() const {
    if (!(inner_cut > 0)) throw std::invalid_argument("inner_cut must be > 0");
    if (!(outer_cut > inner_cut)) throw std::invalid_argument("outer_cut must exceed inner_cut");
    if (nodes_per_decade < 2) throw std::invalid_argument("nodes_per_decade must be >= 2");
    if (!(max_outer_cut >= outer_cut)) throw std::invalid_argument("max_outer_cut too small");
}

double atom_interval_mass(double alpha, double weight, double a, double b) {
    if (!(a > 0) || !(b > a)) throw std::invalid_argument("need 0 < a < b");
    const double outer = std::isinf(b) ? 0.0 : std::pow(b, -alpha);
    return weight * (std::pow(a, -alpha) - outer) / alpha;
}

double interval_mass(const StableLevyMeasure& m, double a, double b) {
    double s = 0;
    for (const auto& atom : m.atoms) s += atom_interval_mass(m.alpha, atom.weight, a, b);
    return s;
}

double small_second_moment(const StableLevyMeasure& m, double eps) {
    if (!(eps > 0)) throw std::invalid_argument("eps must be > 0");
    return m.total_mass() * std::pow(eps, 2.0 - m.alpha) / (2.0 - m.alpha);
}

double tail_first_moment(const StableLevyMeasure& m, double r) {
    if (!(r > 0)) throw std::invalid_argument("r must be > 0");
    return m.total_mass() * std::pow(r, 1.0 - m.alpha) / (m.alpha - 1.0);
}

double kappa(const StableLevyMeasure& m) {
    return small_second_moment(m, 1.0) + tail_first_moment(m, 1.0);
}

double kappa(const MeasureClass& cls) {
    // Linear in the weights, so the sup over the box sits at the upper vertex.
    return kappa(cls.upper_measure());
}

RadialBand make_radial_band(double alpha, double eps, double R, int nodes_per_decade) {
    if (!(R > eps) || !(eps > 0)) throw std::invalid_argument("need 0 < eps < R");
    const double decades = std::log10(R / eps);
    const int cells = std::max(1, static_cast<int>(std::ceil(decades * nodes_per_decade)));
    RadialBand band;
    band.node_r.resize(cells);
    band.cell_mass.resize(cells);
    const double lstep = std::log(R / eps) / cells;
    for (int i = 0; i < cells; ++i) {
        const double r0 = eps * std::exp(i * lstep);
        const double r1 = i + 1 == cells ? R : eps * std::exp((i + 1) * lstep);
        const double mass = (std::pow(r0, -alpha) - std::pow(r1, -alpha)) / alpha;
        band.node_r[i] = std::sqrt(r0 * r1);
        band.cell_mass[i] = mass;
        band.total_mass += mass;
        band.first_moment += mass * band.node_r[i];
    }
    return band;
}

namespace {

struct GeneratorAccess {
    // Directional data of phi at the expansion point z.
    double value0 = 0;
    std::array<double, 3> grad{};
    std::array<double, 3> hess_diag{};  // second derivative along each axis
    double grad_norm2 = 0;
    double sup_norm = 0;
};

GeneratorAccess probe_smooth(const SmoothFunction& phi, std::span<const double> z) {
    GeneratorAccess a;
    const int d = phi.arity();
    a.value0 = phi.value(z);
    std::array<double, 3> g{};
    std::array<double, 9> h{};
    phi.gradient(z, std::span<double>(g.data(), d));
    phi.hessian(z, std::span<double>(h.data(), d * d));
    for (int c = 0; c < d; ++c) {
        a.grad[c] = g[c];
        a.hess_diag[c] = h[c * d + c];
    }
    a.grad_norm2 = grad_norm(std::span<const double>(g.data(), d));
    a.sup_norm = phi.bounds().f0;
    return a;
}

GeneratorAccess probe_grid(const GridFunction& phi, std::span<const double> z) {
    GeneratorAccess a;
    const Grid& grid = phi.grid();
    const int d = grid.arity;
    a.value0 = phi.eval(z);
    for (int c = 0; c < d; ++c) {
        const double h = grid.axes[c].step;
        std::array<double, 3> xp{}, xm{};
        for (int j = 0; j < d; ++j) xp[j] = xm[j] = z[j];
        const double lo = grid.axes[c].lo, hi = grid.axes[c].hi();
        if (z[c] - h < lo) {
            // one-sided, second order
            xp[c] = z[c] + h;
            const double f1 = phi.eval(std::span<const double>(xp.data(), d));
            xp[c] = z[c] + 2 * h;
            const double f2 = phi.eval(std::span<const double>(xp.data(), d));
            a.grad[c] = (-3 * a.value0 + 4 * f1 - f2) / (2 * h);
            a.hess_diag[c] = (a.value0 - 2 * f1 + f2) / (h * h);
        } else if (z[c] + h > hi) {
            xm[c] = z[c] - h;
            const double f1 = phi.eval(std::span<const double>(xm.data(), d));
            xm[c] = z[c] - 2 * h;
            const double f2 = phi.eval(std::span<const double>(xm.data(), d));
            a.grad[c] = (3 * a.value0 - 4 * f1 + f2) / (2 * h);
            a.hess_diag[c] = (a.value0 - 2 * f1 + f2) / (h * h);
        } else {
            xp[c] = z[c] + h;
            xm[c] = z[c] - h;
            const double fp = phi.eval(std::span<const double>(xp.data(), d));
            const double fm = phi.eval(std::span<const double>(xm.data(), d));
            a.grad[c] = (fp - fm) / (2 * h);
            a.hess_diag[c] = (fp - 2 * a.value0 + fm) / (h * h);
        }
    }
    a.grad_norm2 = grad_norm(std::span<const double>(a.grad.data(), d));
    a.sup_norm = phi.sup_norm();
    return a;
}

double select_outer_cut(const StableLevyMeasure& m, const GeneratorAccess& acc,
                        const QuadratureConfig& cfg, double tol, double* bound_out) {
    // Smallest power of two >= outer_cut whose dropped-tail bound meets tol.
    double R = std::exp2(std::ceil(std::log2(std::max(cfg.outer_cut, 2 * cfg.inner_cut))));
    const double mass = m.total_mass();
    for (;;) {
        const double bound = 2.0 * acc.sup_norm * mass * std::pow(R, -m.alpha) / m.alpha +
                             acc.grad_norm2 * mass * std::pow(R, 1.0 - m.alpha) / (m.alpha - 1.0);
        if (bound <= tol || mass == 0.0) {
            *bound_out = bound;
            return R;
        }
        if (R * 2 > cfg.max_outer_cut)
            throw ToleranceError("no admissible outer cut meets the tail tolerance");
        R *= 2;
    }
}

template <typename EvalFn>
GeneratorValue generator_impl(const StableLevyMeasure& m, const GeneratorAccess& acc,
                              std::span<const double> z, const QuadratureConfig& cfg,
                              int dim, const EvalFn& eval, double d3_bound) {
    m.validate();
    cfg.validate();
    const double tol = cfg.tail_tolerance > 0 ? cfg.tail_tolerance
                                              : 1e-6 * std::max(acc.sup_norm, 1e-300);
    GeneratorValue out;
    const double R = select_outer_cut(m, acc, cfg, tol, &out.tail_bound);
    out.outer_cut = R;
    const double eps = cfg.inner_cut;
    const double eps_m2 = std::pow(eps, 2.0 - m.alpha) / (2.0 - m.alpha);
    const RadialBand band = make_radial_band(m.alpha, eps, R, cfg.nodes_per_decade);

    double total = 0;
    std::array<double, 3> y{};
    for (const auto& atom : m.atoms) {
        if (atom.weight == 0.0) continue;
        // inner compensation
        double j = 0.5 * acc.hess_diag[atom.axis] * eps_m2;
        // middle band
        for (std::size_t k = 0; k < band.node_r.size(); ++k) {
            const double r = band.node_r[k];
            for (int c = 0; c < dim; ++c) y[c] = z[c];
            y[atom.axis] += atom.sign * r;
            const double delta = eval(std::span<const double>(y.data(), dim)) - acc.value0 -
                                 atom.sign * r * acc.grad[atom.axis];
            j += delta * band.cell_mass[k];
        }
        total += atom.weight * j;
    }
    out.value = total;
    out.inner_bound = d3_bound * std::pow(eps, 3.0 - m.alpha) / (3.0 - m.alpha) * m.total_mass();
    return out;
}

}  // namespace

GeneratorValue apply_generator(const StableLevyMeasure& m, const SmoothFunction& phi,
                               std::span<const double> z, const QuadratureConfig& cfg) {
    if (phi.arity() != m.dim)
        throw std::invalid_argument("test function arity does not match measure dimension");
    const GeneratorAccess acc = probe_smooth(phi, z);
    return generator_impl(
        m, acc, z, cfg, m.dim,
        [&phi](std::span<const double> y) { return phi.value(y); }, phi.bounds().d3);
}

GeneratorValue apply_generator(const StableLevyMeasure& m, const GridFunction& phi,
                               std::span<const double> z, const QuadratureConfig& cfg) {
    if (phi.grid().arity != m.dim)
        throw std::invalid_argument("grid arity does not match measure dimension");
    const GeneratorAccess acc = probe_grid(phi, z);
    // Third derivative of grid data is not available; the inner residual is
    // reported against the second-difference scale instead.
    const double d3_proxy = 0.0;
    return generator_impl(
        m, acc, z, cfg, m.dim,
        [&phi](std::span<const double> y) { return phi.eval(y); }, d3_proxy);
}

std::vector<GeneratorValue> unit_generator_values(const MeasureClass& cls,
                                                  const SmoothFunction& phi,
                                                  std::span<const double> z,
                                                  const QuadratureConfig& cfg) {
    std::vector<GeneratorValue> out;
    out.reserve(cls.atoms.size());
    for (const auto& box : cls.atoms) {
        StableLevyMeasure single;
        single.alpha = cls.alpha;
        single.dim = cls.dim;
        single.atoms = {{box.axis, box.sign, 1.0}};
        out.push_back(apply_generator(single, phi, z, cfg));
    }
    return out;
}

std::pair<double, double> scaling_pushforward_check(const StableLevyMeasure& m,
                                                    double beta, double a, double b) {
    if (!(beta > 0)) throw std::invalid_argument("beta must be > 0");
    const double scale = std::pow(beta, 1.0 / m.alpha);
    const double lhs = interval_mass(m, a, b);
    const double rhs = beta * interval_mass(m, scale * a, scale * b);
    return {lhs, rhs};
}

LipschitzProbe generator_lipschitz_probe(const MeasureClass& cls, const SmoothFunction& phi,
                                         std::span<const double> z,
                                         std::span<const double> z2,
                                         const QuadratureConfig& cfg) {
    cls.validate();
    cfg.validate();
    const int d = cls.dim;
    if (phi.arity() != d) throw std::invalid_argument("arity mismatch");
    const DerivativeBounds b = phi.bounds();

    double dist = 0;
    for (int c = 0; c < d; ++c) dist += (z2[c] - z[c]) * (z2[c] - z[c]);
    dist = std::sqrt(dist);

    const GeneratorAccess a1 = probe_smooth(phi, z);
    const GeneratorAccess a2 = probe_smooth(phi, z2);

    // R chosen so the dropped part of |delta(z2)-delta(z)| is negligible
    // against the lemma bound; the dropped bound is added to `observed` so it
    // stays an upper estimate.
    const double eps = cfg.inner_cut;
    const double eps_m2 = std::pow(eps, 2.0 - cls.alpha) / (2.0 - cls.alpha);
    double R = std::exp2(std::ceil(std::log2(std::max(cfg.outer_cut, 2 * eps))));
    const double drop_scale = 2.0 * b.d2 * dist;  // per unit mass, radius weight
    while (drop_scale * std::pow(R, 1.0 - cls.alpha) / (cls.alpha - 1.0) >
               1e-10 + 1e-6 * std::max(1.0, b.d2 * dist) &&
           R * 2 <= cfg.max_outer_cut)
        R *= 2;
    const RadialBand band = make_radial_band(cls.alpha, eps, R, cfg.nodes_per_decade);

    std::array<double, 3> y1{}, y2{};
    LipschitzProbe probe;
    for (unsigned mask = 0; mask < cls.vertex_count(); ++mask) {
        const StableLevyMeasure m = cls.vertex_measure(mask);
        double total = 0;
        for (std::size_t ai = 0; ai < m.atoms.size(); ++ai) {
            const Atom& atom = m.atoms[ai];
            if (atom.weight == 0) continue;
            double j = 0.5 * std::abs(a2.hess_diag[atom.axis] - a1.hess_diag[atom.axis]) * eps_m2;
            for (std::size_t k = 0; k < band.node_r.size(); ++k) {
                const double r = band.node_r[k];
                for (int c = 0; c < d; ++c) {
                    y1[c] = z[c];
                    y2[c] = z2[c];
                }
                y1[atom.axis] += atom.sign * r;
                y2[atom.axis] += atom.sign * r;
                const double d1v = phi.value(std::span<const double>(y1.data(), d)) - a1.value0 -
                                   atom.sign * r * a1.grad[atom.axis];
                const double d2v = phi.value(std::span<const double>(y2.data(), d)) - a2.value0 -
                                   atom.sign * r * a2.grad[atom.axis];
                j += std::abs(d2v - d1v) * band.cell_mass[k];
            }
            j += drop_scale * std::pow(R, 1.0 - cls.alpha) / (cls.alpha - 1.0);
            total += atom.weight * j;
        }
        probe.observed = std::max(probe.observed, total);
    }
    probe.bound = (b.d3 + 2.0 * b.d2) * kappa(cls) * dist;
    return probe;
}

}  // namespace nlevy
