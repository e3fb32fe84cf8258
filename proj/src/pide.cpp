#include "nlevy/pide.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nlevy/common.hpp"
#include "nlevy/parallel.hpp"

namespace nlevy {

void SchemeConfig::validate(int arity) const {
    if (arity < 1 || arity > 3) throw std::invalid_argument("arity must be 1..3");
    std::size_t total = 1;
    for (int c = 0; c < arity; ++c) {
        if (nodes[c] < 3) throw std::invalid_argument("each active axis needs >= 3 nodes");
        if (!(half_width[c] > 0)) throw std::invalid_argument("half widths must be > 0");
        total *= static_cast<std::size_t>(nodes[c]);
    }
    if (total > max_nodes)
        throw NumericalContractError("grid exceeds the memory budget of " +
                                     std::to_string(max_nodes) + " nodes");
    if (!(cfl_safety > 0) || !(cfl_safety < 1))
        throw std::invalid_argument("cfl_safety must lie in (0,1)");
    if (dt < 0) throw std::invalid_argument("dt must be >= 0");
}

double SolverResult::probe(double t, std::span<const double> x) const {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) <= 1e-9 * std::max(1.0, std::abs(t)))
            return layers[i].eval(x);
    throw std::invalid_argument("no stored layer at t=" + format_full(t));
}

namespace {

struct AtomStencil {
    int axis = 0;
    Interval weight{0, 0};
    // band kernel per node: u[clamp(i+cell)] and u[clamp(i+cell+1)]
    std::vector<long> cell;
    std::vector<double> w0, w1;
    double diag = 0;    // band mass
    double comp = 0;    // band first moment (compensator drift speed)
    double inner = 0;   // 0.5 * small second moment at the inner cut
    int sign = 1;
};

struct OperatorLayout {
    int diff_axis = -1;
    int drift_axis = -1;
    std::vector<AtomStencil> atoms;
};

Grid build_grid(const SchemeConfig& cfg, int arity) {
    Grid g;
    g.arity = arity;
    for (int c = 0; c < arity; ++c) g.axes[c] = symmetric_axis(cfg.half_width[c], cfg.nodes[c]);
    return g;
}

/// Assembles per-atom band stencils at unit weight and returns the
/// unit-intensity contribution to the monotonicity bound.
double build_atom_stencils(const UncertaintySetBox& box, const Grid& grid,
                           const std::vector<int>& atom_axis_map, const SchemeConfig& cfg,
                           double sup_phi, double lip_phi, OperatorLayout* layout,
                           SolverResult* result) {
    double intensity = 0;
    const MeasureClass& jump = box.jump;
    if (box.jump_free()) return 0.0;
    const double alpha = jump.alpha;
    for (std::size_t ai = 0; ai < jump.atoms.size(); ++ai) {
        const WeightInterval& wi = jump.atoms[ai];
        AtomStencil st;
        st.axis = atom_axis_map[ai];
        st.sign = wi.sign;
        st.weight = {wi.lo, wi.hi};
        const double h = grid.axes[st.axis].step;

        QuadratureConfig quad = cfg.quad;
        if (cfg.auto_inner_cut || quad.inner_cut <= 0) quad.inner_cut = h;
        const double tol = quad.tail_tolerance > 0 ? quad.tail_tolerance
                                                   : 1e-6 * std::max(sup_phi, 1e-300);
        // Smallest power of two whose dropped-tail bound meets the tolerance.
        double R = std::exp2(std::ceil(std::log2(std::max(quad.outer_cut, 2 * quad.inner_cut))));
        double tail_bound;
        for (;;) {
            tail_bound = 2 * sup_phi * std::pow(R, -alpha) / alpha +
                         lip_phi * std::pow(R, 1 - alpha) / (alpha - 1);
            if (tail_bound <= tol) break;
            if (R * 2 > quad.max_outer_cut)
                throw ToleranceError("no admissible outer cut meets the tail tolerance");
            R *= 2;
        }
        result->tail_bound_rate += wi.hi * tail_bound;

        const RadialBand band = make_radial_band(alpha, quad.inner_cut, R, quad.nodes_per_decade);
        st.cell.resize(band.node_r.size());
        st.w0.resize(band.node_r.size());
        st.w1.resize(band.node_r.size());
        for (std::size_t k = 0; k < band.node_r.size(); ++k) {
            const double shift = st.sign * band.node_r[k];
            const double t = shift / h;
            const double fl = std::floor(t);
            st.cell[k] = static_cast<long>(fl);
            const double th = t - fl;
            st.w0[k] = band.cell_mass[k] * (1 - th);
            st.w1[k] = band.cell_mass[k] * th;
        }
        st.diag = band.total_mass;
        st.comp = band.first_moment;
        st.inner = 0.5 * std::pow(quad.inner_cut, 2 - alpha) / (2 - alpha);

        // residual of the second-order small-jump compensation
        result->inner_bound_rate +=
            wi.hi * std::pow(quad.inner_cut, 3 - alpha) / (3 - alpha);
        // jump mass from the probe region landing past the domain edge
        const double margin = std::max(grid.axes[st.axis].hi() - cfg.probe_half_width,
                                       2 * quad.inner_cut);
        if (R > margin)
            result->boundary_mass_rate +=
                2 * sup_phi * wi.hi * atom_interval_mass(alpha, 1.0, margin, R);

        layout->atoms.push_back(std::move(st));
    }
    // per-unit-weight diagonal intensity, weighted by the largest weights
    double total = 0;
    for (const auto& st : layout->atoms) {
        const double h = grid.axes[st.axis].step;
        total += st.weight.hi * (st.diag + st.comp / h + 2 * st.inner / (h * h));
    }
    return total;
}

SolverResult solve_core(const UncertaintySetBox& box, const OperatorLayout& base_layout,
                        const InitialCondition& phi, double T, const SchemeConfig& cfg,
                        int arity, const std::vector<int>& atom_axis_map) {
    box.validate();
    cfg.validate(arity);
    if (T < 0) throw std::invalid_argument("horizon must be >= 0");

    const Grid grid = build_grid(cfg, arity);
    SolverResult result;
    result.grid = grid;

    OperatorLayout layout = base_layout;
    const double jump_intensity = build_atom_stencils(box, grid, atom_axis_map, cfg,
                                                      phi.sup_norm, phi.lipschitz, &layout,
                                                      &result);

    // Coverage: probes must stay clear of the boundary by transport reach,
    // diffusion spread and the configured jump margin.
    const double qmax = std::max(std::abs(box.q.lo), std::abs(box.q.hi));
    for (int c = 0; c < arity; ++c) {
        double need = cfg.probe_half_width;
        if (c == layout.drift_axis) need += qmax * T;
        if (c == layout.diff_axis) need += 6 * std::sqrt(std::max(0.0, box.Q.hi) * T);
        bool has_jump = false;
        for (const auto& st : layout.atoms) has_jump |= st.axis == c;
        if (has_jump) need += cfg.jump_coverage_margin;
        if (need - cfg.coverage_slack > cfg.half_width[c] + 1e-12)
            throw CoverageError("domain half-width " + format_full(cfg.half_width[c]) +
                                " on axis " + std::to_string(c) +
                                " does not cover the required reach " + format_full(need));
    }

    // Monotonicity bound on the time step.
    double intensity = jump_intensity;
    if (layout.diff_axis >= 0 && box.Q.hi > 0)
        intensity += box.Q.hi / (grid.axes[layout.diff_axis].step * grid.axes[layout.diff_axis].step);
    if (layout.drift_axis >= 0 && qmax > 0)
        intensity += qmax / grid.axes[layout.drift_axis].step;

    double dt;
    long steps;
    if (T == 0) {
        dt = 0;
        steps = 0;
    } else if (intensity <= 0) {
        dt = cfg.dt > 0 ? cfg.dt : T;
        steps = static_cast<long>(std::ceil(T / dt - 1e-12));
        dt = T / steps;
    } else {
        const double dt_max = cfg.cfl_safety / intensity;
        if (cfg.dt > 0 && cfg.dt > dt_max * (1 + 1e-12))
            throw CflError("dt=" + format_full(cfg.dt) + " violates the monotonicity bound " +
                           format_full(dt_max));
        dt = cfg.dt > 0 ? cfg.dt : dt_max;
        steps = static_cast<long>(std::ceil(T / dt - 1e-12));
        steps = std::max<long>(steps, 1);
        dt = T / steps;
    }
    result.dt = dt;
    result.steps = steps;
    result.cfl_margin = 1.0 - dt * intensity;

    GridFunction u = GridFunction::sample(grid, phi.f);

    // times at which layers are kept
    std::vector<long> store_steps;
    for (double t : cfg.store_times) {
        if (t < 0 || t > T + 1e-12) continue;
        store_steps.push_back(steps == 0 ? 0 : std::lround(t / T * steps));
    }
    store_steps.push_back(0);
    std::sort(store_steps.begin(), store_steps.end());
    store_steps.erase(std::unique(store_steps.begin(), store_steps.end()), store_steps.end());

    auto maybe_store = [&](long step_idx, const GridFunction& layer) {
        if (std::binary_search(store_steps.begin(), store_steps.end(), step_idx) ||
            step_idx == steps) {
            result.times.push_back(steps == 0 ? 0.0 : dt * step_idx);
            result.layers.push_back(layer);
        }
    };
    maybe_store(0, u);
    if (steps == 0) {
        if (result.times.empty() || result.times.back() != 0.0) maybe_store(0, u);
        return result;
    }

    // strides per axis
    std::array<std::size_t, 3> stride{};
    for (int c = 0; c < arity; ++c) {
        std::size_t s = 1;
        for (int d = c + 1; d < arity; ++d) s *= grid.axes[d].n;
        stride[c] = s;
    }

    const std::size_t n_total = grid.size();
    std::vector<double> next(n_total);

    for (long step = 0; step < steps; ++step) {
        const double* in = u.values().data();
        double* out = next.data();
        parallel_for_chunks(n_total, [&](std::size_t lo, std::size_t hi_i) {
            std::array<long, 3> idx{};
            for (std::size_t f = lo; f < hi_i; ++f) {
                // decompose flat index
                {
                    std::size_t rem = f;
                    for (int c = arity - 1; c >= 0; --c) {
                        idx[c] = static_cast<long>(rem % grid.axes[c].n);
                        rem /= grid.axes[c].n;
                    }
                }
                const double u0 = in[f];
                double h_total = 0;

                // jump generators, per atom at unit weight
                for (std::size_t a = 0; a < layout.atoms.size(); ++a) {
                    const AtomStencil& st = layout.atoms[a];
                    const long n_ax = grid.axes[st.axis].n;
                    const long ia = idx[st.axis];
                    const std::size_t base = f - static_cast<std::size_t>(ia) * stride[st.axis];
                    const double h = grid.axes[st.axis].step;
                    double j = -st.diag * u0;
                    for (std::size_t k = 0; k < st.cell.size(); ++k) {
                        long i0 = std::clamp<long>(ia + st.cell[k], 0, n_ax - 1);
                        long i1 = std::clamp<long>(ia + st.cell[k] + 1, 0, n_ax - 1);
                        j += st.w0[k] * in[base + i0 * stride[st.axis]] +
                             st.w1[k] * in[base + i1 * stride[st.axis]];
                    }
                    // compensator drift, upwinded against the jump direction
                    const double u_m = in[base + std::max<long>(ia - 1, 0) * stride[st.axis]];
                    const double u_p = in[base + std::min<long>(ia + 1, n_ax - 1) * stride[st.axis]];
                    if (st.sign > 0)
                        j -= st.comp * (u0 - u_m) / h;
                    else
                        j += st.comp * (u_p - u0) / h;
                    // small-jump compensation on the diffusion stencil
                    j += st.inner * (u_p - 2 * u0 + u_m) / (h * h);

                    // bang-bang weight by sign
                    h_total += j >= 0 ? st.weight.hi * j : st.weight.lo * j;
                }

                // diffusion (centered), bang-bang in Q
                if (layout.diff_axis >= 0) {
                    const int c = layout.diff_axis;
                    const long n_ax = grid.axes[c].n;
                    const long ic = idx[c];
                    const std::size_t base = f - static_cast<std::size_t>(ic) * stride[c];
                    const double h = grid.axes[c].step;
                    const double u_m = in[base + std::max<long>(ic - 1, 0) * stride[c]];
                    const double u_p = in[base + std::min<long>(ic + 1, n_ax - 1) * stride[c]];
                    const double A = (u_p - 2 * u0 + u_m) / (h * h);
                    h_total += A >= 0 ? 0.5 * box.Q.hi * A : 0.5 * box.Q.lo * A;
                }

                // drift, upwinded per candidate endpoint
                if (layout.drift_axis >= 0) {
                    const int c = layout.drift_axis;
                    const long n_ax = grid.axes[c].n;
                    const long ic = idx[c];
                    const std::size_t base = f - static_cast<std::size_t>(ic) * stride[c];
                    const double h = grid.axes[c].step;
                    const double u_m = in[base + std::max<long>(ic - 1, 0) * stride[c]];
                    const double u_p = in[base + std::min<long>(ic + 1, n_ax - 1) * stride[c]];
                    const double d_plus = (u_p - u0) / h;
                    const double d_minus = (u0 - u_m) / h;
                    double drift = box.q.hi >= 0 ? box.q.hi * d_plus : box.q.hi * d_minus;
                    drift = std::max(drift, box.q.lo >= 0 ? box.q.lo * d_plus : box.q.lo * d_minus);
                    if (box.q.contains_zero()) drift = std::max(drift, 0.0);
                    h_total += drift;
                }

                out[f] = u0 + dt * h_total;
            }
        });
        std::copy(next.begin(), next.end(), u.values().begin());
        maybe_store(step + 1, u);
    }

    return result;
}

std::vector<int> identity_axis_map(const MeasureClass& jump) {
    std::vector<int> m(jump.atoms.size());
    for (std::size_t i = 0; i < jump.atoms.size(); ++i) m[i] = jump.atoms[i].axis;
    return m;
}

}  // namespace

SolverResult solve_pure_jump(const UncertaintySetBox& box, const InitialCondition& phi,
                             double T, const SchemeConfig& cfg) {
    if (!box.q.degenerate() || box.q.lo != 0 || !box.Q.degenerate() || box.Q.lo != 0)
        throw std::invalid_argument("pure-jump solve requires degenerate q = Q = {0}");
    OperatorLayout layout;
    const int arity = box.jump.dim;
    return solve_core(box, layout, phi, T, cfg, arity, identity_axis_map(box.jump));
}

SolverResult solve_combined_1d(const UncertaintySetBox& box, const InitialCondition& phi,
                               double T, const SchemeConfig& cfg) {
    if (!box.jump_free() && box.jump.dim != 1)
        throw std::invalid_argument("combined solve is one-dimensional");
    OperatorLayout layout;
    layout.diff_axis = 0;
    layout.drift_axis = 0;
    std::vector<int> amap(box.jump.atoms.size(), 0);
    return solve_core(box, layout, phi, T, cfg, 1, amap);
}

SolverResult solve_triple(const UncertaintySetBox& box, const InitialCondition& phi,
                          double T, const SchemeConfig& cfg) {
    if (!box.jump_free() && box.jump.dim != 1)
        throw std::invalid_argument("the triple equation carries scalar coordinates");
    OperatorLayout layout;
    layout.diff_axis = 0;   // x
    layout.drift_axis = 1;  // y
    std::vector<int> amap(box.jump.atoms.size(), 2);  // jumps act on z
    return solve_core(box, layout, phi, T, cfg, 3, amap);
}

ScalingCheckResult scaling_check(const UncertaintySetBox& box, const SmoothFunction& phi,
                                 double t, double beta, const SchemeConfig& cfg) {
    if (!(beta > 0) || beta > 1 || !(t > 0) || t > 1)
        throw std::invalid_argument("need 0 < beta <= 1 and 0 < t <= 1");
    if (phi.arity() != box.jump.dim) throw std::invalid_argument("arity mismatch");

    struct Scaled : SmoothFunction {
        const SmoothFunction* inner;
        double c;
        int arity() const override { return inner->arity(); }
        double value(std::span<const double> x) const override {
            std::array<double, 3> y{};
            for (int i = 0; i < arity(); ++i) y[i] = c * x[i];
            return inner->value(std::span<const double>(y.data(), arity()));
        }
        void gradient(std::span<const double>, std::span<double>) const override {
            throw std::logic_error("not used");
        }
        void hessian(std::span<const double>, std::span<double>) const override {
            throw std::logic_error("not used");
        }
        DerivativeBounds bounds() const override {
            DerivativeBounds b = inner->bounds();
            return {b.f0, b.d1 * c, b.d2 * c * c, b.d3 * c * c * c};
        }
    };

    InitialCondition ic_plain;
    ic_plain.f = [&phi](std::span<const double> x) { return phi.value(x); };
    ic_plain.sup_norm = phi.bounds().f0;
    ic_plain.lipschitz = phi.bounds().d1;

    Scaled scaled;
    scaled.inner = &phi;
    scaled.c = std::pow(beta, 1.0 / box.jump.alpha);
    InitialCondition ic_scaled;
    ic_scaled.f = [&scaled](std::span<const double> x) { return scaled.value(x); };
    ic_scaled.sup_norm = scaled.bounds().f0;
    ic_scaled.lipschitz = scaled.bounds().d1;

    const SolverResult lhs_run = solve_pure_jump(box, ic_plain, beta * t, cfg);
    const SolverResult rhs_run = solve_pure_jump(box, ic_scaled, t, cfg);

    std::array<double, 3> origin{};
    ScalingCheckResult out;
    out.lhs = lhs_run.final_layer().eval(std::span<const double>(origin.data(), box.jump.dim));
    out.rhs = rhs_run.final_layer().eval(std::span<const double>(origin.data(), box.jump.dim));
    out.gap = std::abs(out.lhs - out.rhs);
    out.budget = lhs_run.reported_budget() + rhs_run.reported_budget();
    return out;
}

GeneratorLimitResult generator_limit_check(const UncertaintySetBox& box,
                                           const SmoothFunction& phi, double p, double A,
                                           const std::vector<double>& deltas,
                                           const SchemeConfig& cfg) {
    if (phi.arity() != 1) throw std::invalid_argument("generator limit check runs in d=1");
    {
        const double z0[1] = {0.0};
        if (std::abs(phi.value(z0)) > 1e-12)
            throw std::invalid_argument("phi(0) must vanish");
    }
    for (std::size_t i = 1; i < deltas.size(); ++i)
        if (!(deltas[i] < deltas[i - 1]))
            throw std::invalid_argument("delta list must decrease");

    GeneratorLimitResult out;
    // closed-form target by quadrature
    {
        const double z0[1] = {0.0};
        QuadratureConfig quad = cfg.quad;
        if (quad.inner_cut <= 0) quad.inner_cut = 1e-4;
        std::vector<double> jv;
        if (!box.jump_free()) {
            const auto gens = unit_generator_values(box.jump, phi, z0, quad);
            for (const auto& g : gens) jv.push_back(g.value);
        } else {
            jv.assign(box.jump.atoms.size(), 0.0);
        }
        out.target = hamiltonian(box, jv, p, A);
    }

    UncertaintySetBox jump_only = box;
    jump_only.q = {0, 0};
    jump_only.Q = {0, 0};
    UncertaintySetBox diff_only = box;
    diff_only.jump.atoms.clear();
    diff_only.q = {0, 0};
    UncertaintySetBox drift_only = box;
    drift_only.jump.atoms.clear();
    drift_only.Q = {0, 0};

    // quadratic/linear payloads clipped far outside the short-horizon reach
    const double cap = cfg.half_width[0] * cfg.half_width[0];
    const InitialCondition ic_quad = clipped_quadratic(0.5 * A, cap, {1.0});
    const InitialCondition ic_lin = piecewise_linear_ramp(p, cfg.half_width[0], {1.0});
    InitialCondition ic_phi;
    ic_phi.f = [&phi](std::span<const double> x) { return phi.value(x); };
    ic_phi.sup_norm = phi.bounds().f0;
    ic_phi.lipschitz = phi.bounds().d1;

    const double origin[1] = {0.0};
    for (double d : deltas) {
        GeneratorLimitRow row;
        row.delta = d;
        if (!box.jump_free())
            row.jump_part = solve_pure_jump(jump_only, ic_phi, d, cfg).final_layer().eval(origin);
        double g = 0;
        if (A != 0 || !box.Q.degenerate() || box.Q.lo != 0)
            g += solve_combined_1d(diff_only, ic_quad, d, cfg).final_layer().eval(origin);
        if (p != 0 || !box.q.degenerate() || box.q.lo != 0)
            g += solve_combined_1d(drift_only, ic_lin, d, cfg).final_layer().eval(origin);
        row.g_part = g;
        row.ratio = (row.jump_part + row.g_part) / d;
        out.rows.push_back(row);
    }
    return out;
}

TimeContinuityResult time_continuity_probe(const SolverResult& result, double alpha,
                                           const std::vector<double>& s_list, double slack) {
    TimeContinuityResult out;
    auto shape = [alpha](double s) {
        return std::sqrt(s) + s + std::pow(s, 1.0 / alpha);
    };
    double num = 0, den = 0;
    for (double s : s_list) {
        TimeContinuityRow row;
        row.s = s;
        if (s == 0) {
            out.rows.push_back(row);
            continue;
        }
        // sup over stored pairs (t, t+s)
        double worst = -1;
        for (std::size_t i = 0; i < result.times.size(); ++i) {
            for (std::size_t j = i + 1; j < result.times.size(); ++j) {
                if (std::abs(result.times[j] - result.times[i] - s) > 1e-9) continue;
                double m = 0;
                const auto a = result.layers[i].values();
                const auto b = result.layers[j].values();
                for (std::size_t k = 0; k < a.size(); ++k)
                    m = std::max(m, std::abs(b[k] - a[k]));
                worst = std::max(worst, m);
            }
        }
        if (worst < 0) continue;  // no stored pair at this lag
        row.max_increment = worst;
        out.rows.push_back(row);
        num += worst * shape(s);
        den += shape(s) * shape(s);
    }
    out.c_fit = den > 0 ? num / den : 0;
    out.dominated = true;
    for (auto& row : out.rows) {
        row.envelope = out.c_fit * shape(row.s);
        if (row.s > 0 && row.max_increment > row.envelope * (1 + slack) + 1e-12)
            out.dominated = false;
    }
    return out;
}

}  // namespace nlevy
