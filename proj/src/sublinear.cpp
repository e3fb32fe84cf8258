#include "nlevy/sublinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nlevy/common.hpp"
#include "nlevy/parallel.hpp"

namespace nlevy {

void DiscreteDistribution::validate() const {
    if (arity < 1 || arity > 3) throw std::invalid_argument("arity must be 1..3");
    if (nodes.empty() || nodes.size() != weights.size())
        throw std::invalid_argument("nodes/weights mismatch");
    double s = 0;
    for (double w : weights) {
        if (!(w >= 0)) throw std::invalid_argument("weights must be >= 0");
        s += w;
    }
    if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("weights must sum to 1");
    for (const auto& n : nodes)
        for (int c = 0; c < arity; ++c)
            if (!std::isfinite(n[c])) throw std::invalid_argument("nodes must be finite");
}

double DiscreteDistribution::max_abs_coord(int axis) const {
    double m = 0;
    for (const auto& n : nodes) m = std::max(m, std::abs(n[axis]));
    return m;
}

DiscreteDistribution point_mass(std::span<const double> x) {
    DiscreteDistribution d;
    d.arity = static_cast<int>(x.size());
    std::array<double, 3> n{};
    for (std::size_t c = 0; c < x.size(); ++c) n[c] = x[c];
    d.nodes = {n};
    d.weights = {1.0};
    return d;
}

DiscreteDistribution rademacher(double magnitude) {
    DiscreteDistribution d;
    d.arity = 1;
    d.nodes = {{-magnitude, 0, 0}, {+magnitude, 0, 0}};
    d.weights = {0.5, 0.5};
    return d;
}

DiscreteDistribution from_nodes_1d(std::vector<double> nodes, std::vector<double> weights) {
    DiscreteDistribution d;
    d.arity = 1;
    d.nodes.reserve(nodes.size());
    for (double x : nodes) d.nodes.push_back({x, 0, 0});
    d.weights = std::move(weights);
    d.validate();
    return d;
}

int DistributionFamily::arity() const {
    return members.empty() ? 0 : members.front().arity;
}

void DistributionFamily::validate() const {
    if (members.empty()) throw std::invalid_argument("family must be nonempty");
    const int a = members.front().arity;
    for (const auto& m : members) {
        m.validate();
        if (m.arity != a) throw std::invalid_argument("family members must share arity");
    }
    if (!factored_members.empty() && factored_members.size() != members.size())
        throw std::invalid_argument("factored form must cover every member");
}

DistributionFamily DistributionFamily::single(DiscreteDistribution d) {
    DistributionFamily f;
    f.members.push_back(std::move(d));
    f.validate();
    return f;
}

DistributionFamily DistributionFamily::of(std::vector<DiscreteDistribution> ds) {
    DistributionFamily f;
    f.members = std::move(ds);
    f.validate();
    return f;
}

DistributionFamily DistributionFamily::product(
    const std::vector<std::vector<Factor>>& per_axis_choices) {
    DistributionFamily f;
    const int arity = static_cast<int>(per_axis_choices.size());
    if (arity < 1 || arity > 3) throw std::invalid_argument("product arity must be 1..3");

    // Register factors and enumerate member combinations axis by axis.
    std::vector<std::vector<int>> ids_per_axis(arity);
    for (int c = 0; c < arity; ++c) {
        if (per_axis_choices[c].empty())
            throw std::invalid_argument("each axis needs at least one factor");
        for (const auto& fac : per_axis_choices[c]) {
            if (fac.axis != c) throw std::invalid_argument("factor axis mismatch");
            if (fac.nodes.size() != fac.weights.size() || fac.nodes.empty())
                throw std::invalid_argument("factor nodes/weights mismatch");
            ids_per_axis[c].push_back(static_cast<int>(f.factors.size()));
            f.factors.push_back(fac);
        }
    }
    std::vector<int> combo(arity, 0);
    for (;;) {
        // materialize the general member for this combination
        DiscreteDistribution d;
        d.arity = arity;
        d.nodes = {{0, 0, 0}};
        d.weights = {1.0};
        std::vector<int> ids;
        for (int c = 0; c < arity; ++c) {
            const Factor& fac = f.factors[ids_per_axis[c][combo[c]]];
            ids.push_back(ids_per_axis[c][combo[c]]);
            std::vector<std::array<double, 3>> nn;
            std::vector<double> ww;
            nn.reserve(d.nodes.size() * fac.nodes.size());
            for (std::size_t i = 0; i < d.nodes.size(); ++i) {
                for (std::size_t j = 0; j < fac.nodes.size(); ++j) {
                    auto node = d.nodes[i];
                    node[c] = fac.nodes[j];
                    nn.push_back(node);
                    ww.push_back(d.weights[i] * fac.weights[j]);
                }
            }
            d.nodes = std::move(nn);
            d.weights = std::move(ww);
        }
        f.members.push_back(std::move(d));
        f.factored_members.push_back(std::move(ids));
        // First axis varies fastest so consecutive members share their
        // last-axis factor (reused partial in the DP).
        int c = 0;
        while (c < arity && ++combo[c] == static_cast<int>(ids_per_axis[c].size())) {
            combo[c] = 0;
            ++c;
        }
        if (c == arity) break;
    }
    f.validate();
    return f;
}

double expect(const DistributionFamily& family,
              const std::function<double(std::span<const double>)>& phi) {
    family.validate();
    const int a = family.arity();
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& m : family.members) {
        double s = 0;
        for (std::size_t j = 0; j < m.nodes.size(); ++j)
            s += m.weights[j] * phi(std::span<const double>(m.nodes[j].data(), a));
        best = std::max(best, s);
    }
    return best;
}

namespace {

struct ShiftInterp {
    long base = 0;   // cell offset in axis units
    double th = 0;   // weight of the upper cell
};

ShiftInterp plan_shift(double shift, double step) {
    const double t = shift / step;
    const double fl = std::floor(t);
    return {static_cast<long>(fl), t - fl};
}

/// One-axis convolution with clamped linear interpolation:
/// out(x) = sum_j w_j u(x + shift_j e_axis).
void conv_axis(const Grid& grid, std::span<const double> in, std::span<double> out, int axis,
               std::span<const double> shifts, std::span<const double> weights) {
    const int n_axis = grid.axes[axis].n;
    std::size_t stride = 1;
    for (int c = axis + 1; c < grid.arity; ++c) stride *= grid.axes[c].n;
    std::vector<ShiftInterp> plan(shifts.size());
    for (std::size_t j = 0; j < shifts.size(); ++j)
        plan[j] = plan_shift(shifts[j], grid.axes[axis].step);

    parallel_for_chunks(grid.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t f = b; f < e; ++f) {
            const long ia = static_cast<long>((f / stride) % n_axis);
            const std::size_t base = f - static_cast<std::size_t>(ia) * stride;
            double acc = 0;
            for (std::size_t j = 0; j < plan.size(); ++j) {
                long i0 = ia + plan[j].base;
                long i1 = i0 + 1;
                i0 = std::clamp<long>(i0, 0, n_axis - 1);
                i1 = std::clamp<long>(i1, 0, n_axis - 1);
                const double v = (1.0 - plan[j].th) * in[base + i0 * stride] +
                                 plan[j].th * in[base + i1 * stride];
                acc += weights[j] * v;
            }
            out[f] = acc;
        }
    });
}

/// General member: full-dimensional shifted interpolation.
void member_step_general(const Grid& grid, std::span<const double> in, std::span<double> out,
                         const DiscreteDistribution& m, const std::array<double, 3>& scales) {
    const int a = grid.arity;
    std::vector<std::array<ShiftInterp, 3>> plan(m.nodes.size());
    for (std::size_t j = 0; j < m.nodes.size(); ++j)
        for (int c = 0; c < a; ++c)
            plan[j][c] = plan_shift(scales[c] * m.nodes[j][c], grid.axes[c].step);

    parallel_for_chunks(grid.size(), [&](std::size_t b, std::size_t e) {
        std::array<int, 3> idx{};
        for (std::size_t f = b; f < e; ++f) {
            grid.unflat(f, idx);
            double acc = 0;
            for (std::size_t j = 0; j < plan.size(); ++j) {
                double v = 0;
                const int corners = 1 << a;
                for (int mset = 0; mset < corners; ++mset) {
                    double w = 1.0;
                    std::size_t flat = 0;
                    for (int c = 0; c < a; ++c) {
                        const int up = (mset >> c) & 1;
                        w *= up ? plan[j][c].th : 1.0 - plan[j][c].th;
                        long ic = idx[c] + plan[j][c].base + up;
                        ic = std::clamp<long>(ic, 0, grid.axes[c].n - 1);
                        flat = flat * grid.axes[c].n + static_cast<std::size_t>(ic);
                    }
                    if (w != 0.0) v += w * in[flat];
                }
                acc += m.weights[j] * v;
            }
            out[f] = acc;
        }
    });
}

void max_into(std::span<double> acc, std::span<const double> v) {
    parallel_for_chunks(acc.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) acc[i] = std::max(acc[i], v[i]);
    });
}

}  // namespace

ComposeResult iid_compose(const DistributionFamily& family, const GridFunction& u0,
                          const ComposeOptions& opt) {
    family.validate();
    const Grid& grid = u0.grid();
    if (family.arity() != grid.arity)
        throw std::invalid_argument("family arity does not match grid arity");
    if (opt.steps < 0) throw std::invalid_argument("steps must be >= 0");

    // Coverage: n * max scaled increment plus the evaluation window must fit
    // inside the grid up to the configured slack.
    double overshoot = 0;
    for (int c = 0; c < grid.arity; ++c) {
        double max_node = 0;
        for (const auto& m : family.members) max_node = std::max(max_node, m.max_abs_coord(c));
        const double reach = opt.steps * std::abs(opt.scales[c]) * max_node +
                             opt.eval_half_width[c];
        overshoot = std::max(overshoot, reach - grid.axes[c].hi());
        overshoot = std::max(overshoot, reach + grid.axes[c].lo());
    }
    overshoot = std::max(overshoot, 0.0);
    if (!(overshoot <= opt.coverage_slack))
        throw CoverageError("grid too small: DP reach exceeds the domain by " +
                            format_full(overshoot));

    GridFunction u = u0;
    if (opt.steps == 0) return {std::move(u), overshoot};

    const std::size_t n = grid.size();
    std::vector<double> next(n), member_val(n), tmp_a(n), tmp_b(n);

    const bool product = family.has_product_form() && grid.arity > 1;
    for (int step = 0; step < opt.steps; ++step) {
        std::fill(next.begin(), next.end(), -std::numeric_limits<double>::infinity());
        if (product) {
            // Contract axes from fastest to slowest, caching shared partials:
            // members often share their higher-axis factors.
            int cached_first = -1;  // factor id whose axis-(arity-1) partial sits in tmp_a
            for (std::size_t mi = 0; mi < family.members.size(); ++mi) {
                const auto& ids = family.factored_members[mi];
                std::span<const double> cur = u.values();
                // scale factor shifts per axis
                for (int pos = static_cast<int>(ids.size()) - 1; pos >= 0; --pos) {
                    const auto& fac = family.factors[ids[pos]];
                    std::vector<double> shifts(fac.nodes.size());
                    for (std::size_t j = 0; j < shifts.size(); ++j)
                        shifts[j] = opt.scales[fac.axis] * fac.nodes[j];
                    const bool last = pos == static_cast<int>(ids.size()) - 1;
                    std::span<double> dst;
                    if (last) {
                        if (cached_first == ids[pos]) {
                            cur = tmp_a;
                            continue;
                        }
                        dst = tmp_a;
                        cached_first = ids[pos];
                    } else {
                        dst = pos % 2 == 0 ? std::span<double>(member_val) : std::span<double>(tmp_b);
                    }
                    conv_axis(grid, cur, dst, fac.axis, shifts, fac.weights);
                    cur = dst;
                }
                max_into(next, cur);
            }
        } else {
            for (const auto& m : family.members) {
                member_step_general(grid, u.values(), member_val, m, opt.scales);
                max_into(next, member_val);
            }
        }
        std::copy(next.begin(), next.end(), u.values().begin());
    }
    return {std::move(u), overshoot};
}

ComposeResult iid_compose(const DistributionFamily& family, const InitialCondition& phi,
                          const Grid& grid, const ComposeOptions& opt) {
    GridFunction u0 = GridFunction::sample(grid, phi.f);
    return iid_compose(family, u0, opt);
}

namespace {
double member_sum(const DiscreteDistribution& m, int arity,
                  const std::function<double(std::span<const double>)>& phi) {
    double s = 0;
    for (std::size_t j = 0; j < m.nodes.size(); ++j)
        s += m.weights[j] * phi(std::span<const double>(m.nodes[j].data(), arity));
    return s;
}
}  // namespace

AuditReport sublinearity_audit(const DistributionFamily& family,
                               const std::vector<std::function<double(std::span<const double>)>>& phis,
                               const std::vector<double>& lambdas, double tol) {
    family.validate();
    const int a = family.arity();
    AuditReport report;
    auto E = [&](const std::function<double(std::span<const double>)>& f) {
        return expect(family, f);
    };
    auto flag = [&](const std::string& check, double lhs, double rhs) {
        ++report.checks_run;
        if (lhs > rhs + tol) report.violations.push_back({check, lhs, rhs});
    };

    // constant preservation
    for (double c : {-1.0, 0.0, 1.0, 3.14159265358979}) {
        const double v = E([c](std::span<const double>) { return c; });
        flag("constant", std::abs(v - c), 0.0);
    }

    for (std::size_t i = 0; i < phis.size(); ++i) {
        const auto& f = phis[i];
        // monotonicity: f <= f + g^2 pointwise
        for (std::size_t j = 0; j < phis.size(); ++j) {
            const auto& g = phis[j];
            const double ef = E(f);
            const double efg = E([&](std::span<const double> x) {
                const double gv = g(x);
                return f(x) + gv * gv;
            });
            flag("monotonicity", ef, efg);
            // sub-additivity
            const double eg = E(g);
            const double esum = E([&](std::span<const double> x) { return f(x) + g(x); });
            flag("sub-additivity", esum, ef + eg);
            // |E[X]-E[Y]| <= E[|X-Y|]
            const double eabs = E([&](std::span<const double> x) { return std::abs(f(x) - g(x)); });
            flag("difference-bound", std::abs(ef - eg), eabs);
        }
        // positive homogeneity
        for (double lam : lambdas) {
            if (!(lam > 0)) continue;
            const double lhs = E([&](std::span<const double> x) { return lam * f(x); });
            const double rhs = lam * E(f);
            flag("homogeneity", std::abs(lhs - rhs), 0.0);
        }
        (void)a;
    }
    return report;
}

}  // namespace nlevy
