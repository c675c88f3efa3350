#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "homlab/cell/cell_problem.hpp"
#include "homlab/fields/random.hpp"
#include "homlab/fields/statistics.hpp"
#include "homlab/perforation/perforation_set.hpp"
#include "homlab/rve/window.hpp"

namespace homlab {

struct VolumeFraction {
    double theta = 1.0;
    double window = 0.0;
    std::string method = "midpoint";
};

/// |Q_R \ E| / R^d by the midpoint rule with `resolution` points per unit length.
inline VolumeFraction volume_fraction(const PerforationSet& E, double R, int resolution) {
    require(R >= 4.0, "volume fraction window must satisfy R >= 4");
    VolumeFraction v;
    v.window = R;
    v.theta = detail::cube_average(E.dim(), R, resolution, [&](const Vector2& y) { return E.contains(y) ? 0.0 : 1.0; });
    return v;
}

/// |(E symmetric-difference E') intersected with Q_R| / R^d.
inline double symmetric_difference_density(const PerforationSet& E, const PerforationSet& F, double R, int resolution) {
    require(E.dim() == F.dim(), "perforation dimensions differ");
    return detail::cube_average(E.dim(), R, resolution,
                                [&](const Vector2& y) { return E.contains(y) != F.contains(y) ? 1.0 : 0.0; });
}

namespace detail {

inline std::vector<bool> active_elements(const Grid& g, const PerforationSet& E, double eps = 1.0) {
    std::vector<bool> active(g.element_count());
    for (std::size_t e = 0; e < active.size(); ++e) active[e] = !E.contains_scaled(g.element_center(e), eps);
    return active;
}

/// Nodes touched by at least one active element.
inline std::vector<bool> active_nodes(const Grid& g, const std::vector<bool>& active) {
    std::vector<bool> used(g.node_count(), false);
    for (std::size_t e = 0; e < active.size(); ++e) {
        if (!active[e]) continue;
        const auto nodes = g.element_nodes(e);
        for (int k = 0; k < g.nodes_per_element(); ++k) used[nodes[k]] = true;
    }
    return used;
}

/// Minimum of sum_e int_e <A_e (xi + grad u), xi + grad u> / |domain| with only active elements assembled.
/// Box grids keep u = 0 on the outer boundary, torus grids fix the constant by projection.
inline double masked_energy(const Grid& g, const ElementCoefficients& c, const Vector2& xi, const SolverConfig& config) {
    if (dot(xi, xi) == 0.0) return 0.0;
    const std::vector<bool> used = c.active.empty() ? std::vector<bool>(g.node_count(), true) : active_nodes(g, c.active);
    std::vector<bool> free = used;
    if (g.topology() == Topology::Box)
        for (std::size_t k = 0; k < free.size(); ++k) free[k] = free[k] && !g.is_boundary_node(k);
    const DofMap dofs = DofMap::from_mask(free);
    const SparseSystem K = restrict_system(assemble_diffusion(g, c), dofs);
    const Vec b = dofs.restrict_vector(assemble_affine_load(g, c, xi));
    const Kernel kernel = g.topology() == Topology::Torus ? Kernel::Constants : Kernel::None;
    const SolveResult s = cg_solve(K, b, config, kernel);
    Vec w(g.node_count(), 0.0);
    dofs.scatter(s.x, w);
    return quadratic_energy(g, c, w, xi) / g.domain_volume();
}

}  // namespace detail

/// Periodic cell minimum of int a^{E,n} |xi + grad u|^2 with a^{E,n} = 1 outside E and 1/n inside.
inline double penalized_cell_value(const PerforationSet& E, double n, const Vector2& xi, int resolution,
                                   const SolverConfig& config = {}) {
    require(E.is_periodic(), "cell problems need an unperturbed (periodic) hole pattern");
    const auto a = CoefficientField::penalized_perforation(E, n);
    const Grid g = detail::cell_grid(E.dim(), resolution, 1);
    return detail::masked_energy(g, ElementCoefficients::scalar(sample_elements(g, a)), xi, config);
}

/// Periodic cell minimum of int_{cell \ E} |xi + grad u|^2, assembled only over elements outside E.
inline double masked_cell_value(const PerforationSet& E, const Vector2& xi, int resolution,
                                const SolverConfig& config = {}) {
    require(E.is_periodic(), "cell problems need an unperturbed (periodic) hole pattern");
    const Grid g = detail::cell_grid(E.dim(), resolution, 1);
    ElementCoefficients c = ElementCoefficients::scalar(std::vector<double>(g.element_count(), 1.0));
    c.active = detail::active_elements(g, E);
    const int components = count_active_components(g, c.active);
    require(components == 1, "perforated cell complement is disconnected at this resolution (" +
                                 std::to_string(components) + " components)");
    return detail::masked_energy(g, c, xi, config);
}

/// Homogenized matrix of the perforated cell, assembled from masked cell values.
inline Matrix2 masked_cell_matrix(const PerforationSet& E, int resolution, const SolverConfig& config = {}) {
    const int d = E.dim();
    Matrix2 m = zero_matrix();
    m[0][0] = masked_cell_value(E, {1.0, 0.0}, resolution, config);
    if (d == 2) {
        m[1][1] = masked_cell_value(E, {0.0, 1.0}, resolution, config);
        const double diag = masked_cell_value(E, {1.0, 1.0}, resolution, config);
        m[0][1] = m[1][0] = 0.5 * (diag - m[0][0] - m[1][1]);
    }
    return m;
}

/// Window analogue of the masked cell value: affine data on the boundary of Q_R(x0), holes as Neumann cavities.
inline double masked_window_value(const PerforationSet& E, const Vector2& x0, double R, const Vector2& xi,
                                  int resolution_per_unit, const SolverConfig& config = {}) {
    const Grid g = detail::window_grid(E.dim(), x0, R, resolution_per_unit);
    ElementCoefficients c = ElementCoefficients::scalar(std::vector<double>(g.element_count(), 1.0));
    c.active = detail::active_elements(g, E);
    require(count_active_components(g, c.active) == 1, "perforated window complement is disconnected");
    return detail::masked_energy(g, c, xi, config);
}

// -- extension operator -------------------------------------------------------

struct ExtensionResult {
    double scale = 1.0;
    double annulus_mean = 0.0;
    double extension_grad_norm = 0.0;  // ||grad Tu||_{L2(B_2)}
    double annulus_grad_norm = 0.0;    // ||grad u||_{L2(B_3 \ B_2)}
    double ratio = 0.0;
    std::vector<std::pair<Vector2, double>> samples;  // Tu at the quadrature points of B_2
};

namespace detail {

/// Polar midpoint rule over the annulus r_in < |x| < r_out.
template <class F>
void polar_quadrature(double r_in, double r_out, int radial, int angular, F&& f) {
    const double dr = (r_out - r_in) / radial;
    const double dt = 2.0 * std::numbers::pi / angular;
    for (int i = 0; i < radial; ++i) {
        const double r = r_in + (i + 0.5) * dr;
        for (int j = 0; j < angular; ++j) {
            const double t = (j + 0.5) * dt;
            f(Vector2{r * std::cos(t), r * std::sin(t)}, r * dr * dt);
        }
    }
}

template <class F>
Vector2 fd_gradient(F&& u, const Vector2& x, double step) {
    return {(u(Vector2{x[0] + step, x[1]}) - u(Vector2{x[0] - step, x[1]})) / (2.0 * step),
            (u(Vector2{x[0], x[1] + step}) - u(Vector2{x[0], x[1] - step})) / (2.0 * step)};
}

}  // namespace detail

/// Extension T of u from the annulus B_3s \ B_2s into B_2s:
///   Tu = mean on B_s,  Tu(x) = (|x|/s - 1) u(L x) + (2 - |x|/s) mean on B_2s \ B_s,
/// with the reflection L x = (4s - |x|) x / |x| onto the annulus. `resolution` is the
/// number of radial quadrature cells per unit of |x|/s.
inline ExtensionResult extend_over_ball(const std::function<double(const Vector2&)>& u, double scale, int resolution) {
    require(scale > 0.0, "extension scale must be positive");
    require(resolution >= 4, "extension resolution must be >= 4");
    const double s = scale;
    const int angular = 8 * resolution;
    ExtensionResult r;
    r.scale = s;

    double area = 0.0, integral = 0.0;
    detail::polar_quadrature(2.0 * s, 3.0 * s, resolution, angular, [&](const Vector2& x, double w) {
        area += w;
        integral += w * u(x);
    });
    const double mean = integral / area;
    r.annulus_mean = mean;

    auto Tu = [&](const Vector2& x) {
        const double rho = norm(x) / s;
        if (rho <= 1.0) return mean;
        const Vector2 Lx = ((4.0 - rho) / rho) * x;
        return (rho - 1.0) * u(Lx) + (2.0 - rho) * mean;
    };
    const double step = 1e-5 * s;

    double inner = 0.0;
    detail::polar_quadrature(0.0, 2.0 * s, 2 * resolution, angular, [&](const Vector2& x, double w) {
        const double v = Tu(x);
        r.samples.emplace_back(x, v);
        if (norm(x) > s) {
            const Vector2 gr = detail::fd_gradient(Tu, x, step);
            inner += w * dot(gr, gr);
        }
    });
    double outer = 0.0;
    detail::polar_quadrature(2.0 * s, 3.0 * s, resolution, angular, [&](const Vector2& x, double w) {
        const Vector2 gr = detail::fd_gradient(u, x, step);
        outer += w * dot(gr, gr);
    });
    r.extension_grad_norm = std::sqrt(inner);
    r.annulus_grad_norm = std::sqrt(outer);
    // constant input: Tu is that constant and the ratio is defined as 0
    const double tiny = 1e-12 * std::max(1.0, std::abs(mean)) * s;
    r.ratio = r.annulus_grad_norm <= tiny ? 0.0 : r.extension_grad_norm / r.annulus_grad_norm;
    if (r.annulus_grad_norm <= tiny) r.extension_grad_norm = 0.0;
    return r;
}

/// Largest extension ratio over `count` random smooth test functions
/// u(x) = sum_k c_k sin(<w_k, x> + phi_k) with |w_k| <= 2.
inline double empirical_extension_constant(std::uint64_t seed, int count, int resolution) {
    require(count >= 1, "need at least one test function");
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        struct Mode {
            double c, wx, wy, phi;
        };
        std::vector<Mode> modes;
        for (int k = 0; k < 4; ++k) {
            auto uni = [&](int slot) { return counter_uniform(seed, i, 8 * k + slot); };
            modes.push_back({2.0 * uni(0) - 1.0, 4.0 * uni(1) - 2.0, 4.0 * uni(2) - 2.0, 2.0 * std::numbers::pi * uni(3)});
        }
        auto u = [modes](const Vector2& x) {
            double v = 0.0;
            for (const auto& m : modes) v += m.c * std::sin(m.wx * x[0] + m.wy * x[1] + m.phi);
            return v;
        };
        const auto r = extend_over_ball(u, 1.0, resolution);
        require(std::isfinite(r.ratio), "extension ratio is not finite");
        worst = std::max(worst, r.ratio);
    }
    return worst;
}

// -- lambda problem -------------------------------------------------------------

struct LambdaProblemConfig {
    double lambda = 1.0;
    std::vector<double> epsilons{0.25, 0.125, 0.0625};
    double box_size = 2.0;          // box (-L/2, L/2)^d
    double n_penal = 1000.0;
    int resolution = 256;           // elements per unit length
    int cell_resolution = 128;      // for the homogenized matrix
    SolverConfig solver;
    int threads = 1;
};

struct LambdaProblemRow {
    double epsilon = 0.0;
    double distance = 0.0;       // ||u_eps - u_hom||_{L2(box)}
    double relative = 0.0;       // distance / ||u_hom||
};

struct LambdaProblemReport {
    Matrix2 a_hom{};
    double theta = 1.0;
    double hom_norm = 0.0;
    std::vector<LambdaProblemRow> rows;
};

namespace detail {

/// Minimizer of int <A grad u, grad u> + int w (lambda u^2 - 2 f u) on the box with u = 0 on the boundary.
inline Vec lambda_solve(const Grid& g, const ElementCoefficients& c, const std::vector<double>& weights, double lambda,
                        const std::function<double(const Vector2&)>& f, const SolverConfig& config) {
    const SparseSystem K = add_systems(assemble_diffusion(g, c), assemble_mass(g, weights), lambda);
    const Vec b = assemble_source_load(g, f, weights);
    const DofMap dofs = interior_dofs(g);
    const SolveResult s = cg_solve(restrict_system(K, dofs), dofs.restrict_vector(b), config);
    Vec u(g.node_count(), 0.0);
    dofs.scatter(s.x, u);
    return u;
}

}  // namespace detail

/// Compares the penalized perforated problems at each epsilon with the homogenized problem
/// int <A_hom grad u, grad u> + theta int (lambda u^2 - 2 f u), all on the same box grid.
inline LambdaProblemReport lambda_problem_experiment(const PerforationSet& E,
                                                     const std::function<double(const Vector2&)>& f,
                                                     const LambdaProblemConfig& cfg) {
    require(cfg.lambda > 0.0, "lambda must be positive");
    require(!cfg.epsilons.empty(), "need at least one epsilon");
    require(cfg.n_penal >= 1.0, "penalization index must be >= 1");
    require(E.is_periodic(), "lambda problem needs a periodic hole pattern");
    const int d = E.dim();
    const double L = cfg.box_size;
    const int cells = static_cast<int>(std::lround(L * cfg.resolution));
    const Grid g = build_grid(d, cells, Vector2{-0.5 * L, d == 2 ? -0.5 * L : 0.0}, L, Topology::Box);

    LambdaProblemReport report;
    report.a_hom = E.shape() == HoleShape::None ? identity_matrix() : masked_cell_matrix(E, cfg.cell_resolution, cfg.solver);
    if (d == 1) report.a_hom[0][1] = report.a_hom[1][0] = report.a_hom[1][1] = 0.0;
    report.theta = E.shape() == HoleShape::None ? 1.0 : volume_fraction(E, 4.0, cfg.cell_resolution).theta;

    ElementCoefficients hom_c;
    hom_c.matrices.assign(g.element_count(), report.a_hom);
    const Vec u_hom =
        detail::lambda_solve(g, hom_c, std::vector<double>(g.element_count(), report.theta), cfg.lambda, f, cfg.solver);
    report.hom_norm = l2_norm(g, u_hom);

    report.rows = parallel_map(cfg.epsilons.size(), cfg.threads, [&](std::size_t i) {
        const double eps = cfg.epsilons[i];
        require(eps > 0.0, "epsilon must be positive");
        std::vector<double> a(g.element_count()), w(g.element_count());
        for (std::size_t e = 0; e < a.size(); ++e) {
            const bool hole = E.contains_scaled(g.element_center(e), eps);
            a[e] = hole ? 1.0 / cfg.n_penal : 1.0;
            w[e] = hole ? 0.0 : 1.0;
        }
        const Vec u = detail::lambda_solve(g, ElementCoefficients::scalar(a), w, cfg.lambda, f, cfg.solver);
        Vec diff(u.size());
        for (std::size_t k = 0; k < u.size(); ++k) diff[k] = u[k] - u_hom[k];
        LambdaProblemRow row;
        row.epsilon = eps;
        row.distance = l2_norm(g, diff);
        row.relative = report.hom_norm > 0.0 ? row.distance / report.hom_norm : 0.0;
        return row;
    });
    return report;
}

}  // namespace homlab
