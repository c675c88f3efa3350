#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <vector>

#include "homlab/numerics/assembly.hpp"
#include "homlab/numerics/krylov.hpp"

namespace homlab {

/// A smooth convex functional on R^n with a symmetric Hessian model.
template <class E>
concept DiscreteEnergy = requires(const E& e, const Vec& x) {
    { e.size() } -> std::convertible_to<std::size_t>;
    { e.value(x) } -> std::convertible_to<double>;
    { e.gradient(x) } -> std::same_as<Vec>;
    { e.hessian(x) } -> std::same_as<SparseSystem>;
    { e.kernel() } -> std::same_as<Kernel>;
};

/// Discrete energy u -> sum_e a_e int_e |xi + grad u|^p for Q1/P1 functions.
///
/// Unknowns are the free nodes of `dofs`; every eliminated node carries the
/// value zero (homogeneous Dirichlet data for the corrector on box grids).
/// The coefficient is constant per element and the gradient term is
/// integrated with the 2-point Gauss rule per axis.
class PEnergyFunctional {
public:
    PEnergyFunctional(Grid grid, std::vector<double> element_coeff, double p, Vector2 xi, DofMap dofs, Kernel kernel)
        : grid_(std::move(grid)), tables_(grid_), a_(std::move(element_coeff)), p_(p), xi_(xi),
          dofs_(std::move(dofs)), kernel_(kernel) {
        require(p_ > 1.0, "p-energy requires p > 1");
        require(a_.size() == grid_.element_count(), "coefficient count does not match elements");
        if (grid_.dim() == 1) xi_[1] = 0.0;
        delta2_ = 1e-12 * std::max(1.0, dot(xi_, xi_));
    }

    /// All nodes free, constants in the kernel.
    static PEnergyFunctional periodic(const Grid& g, std::vector<double> a, double p, Vector2 xi) {
        require(g.topology() == Topology::Torus, "periodic p-energy needs a torus grid");
        return PEnergyFunctional(g, std::move(a), p, xi, DofMap::from_mask(std::vector<bool>(g.node_count(), true)),
                                 Kernel::Constants);
    }

    /// Boundary nodes eliminated: minimizers are affine-plus-H^1_0 competitors.
    static PEnergyFunctional dirichlet(const Grid& g, std::vector<double> a, double p, Vector2 xi) {
        require(g.topology() == Topology::Box, "Dirichlet p-energy needs a box grid");
        std::vector<bool> free(g.node_count());
        for (std::size_t k = 0; k < free.size(); ++k) free[k] = !g.is_boundary_node(k);
        return PEnergyFunctional(g, std::move(a), p, xi, DofMap::from_mask(free), Kernel::None);
    }

    std::size_t size() const { return dofs_.free_count(); }
    Kernel kernel() const { return kernel_; }
    const Grid& grid() const { return grid_; }
    const DofMap& dofs() const { return dofs_; }
    double exponent() const { return p_; }

    Vec expand(const Vec& x) const {
        Vec full(grid_.node_count(), 0.0);
        dofs_.scatter(x, full);
        return full;
    }

    double value(const Vec& x) const {
        const Vec u = expand(x);
        double s = 0.0;
        for_each_point(u, [&](std::size_t e, int q, const Vector2& g) {
            s += a_[e] * weight(q) * std::pow(norm(g), p_);
        });
        return s;
    }

    Vec gradient(const Vec& x) const {
        const Vec u = expand(x);
        Vec full(grid_.node_count(), 0.0);
        for_each_point(u, [&](std::size_t e, int q, const Vector2& g) {
            const double r = norm(g);
            if (r == 0.0) return;
            const double c = a_[e] * weight(q) * p_ * std::pow(r, p_ - 2.0);
            const auto nodes = grid_.element_nodes(e);
            for (int j = 0; j < tables_.nodes; ++j) full[nodes[j]] += c * dot(g, tables_.grads[q][j]);
        });
        Vec out = dofs_.restrict_vector(full);
        detail::project(out, kernel_);
        return out;
    }

    /// Regularized Hessian: |g|^2 is replaced by |g|^2 + delta^2 in the weight, which keeps the model SPD.
    SparseSystem hessian(const Vec& x) const {
        const Vec u = expand(x);
        TripletBuilder b(grid_.node_count());
        b.reserve(grid_.element_count() * std::size_t(tables_.nodes * tables_.nodes));
        for_each_point(u, [&](std::size_t e, int q, const Vector2& g) {
            const double r2 = dot(g, g) + delta2_;
            const double c = a_[e] * weight(q) * p_ * std::pow(r2, 0.5 * (p_ - 2.0));
            const double c2 = c * (p_ - 2.0) / r2;
            const auto nodes = grid_.element_nodes(e);
            for (int j = 0; j < tables_.nodes; ++j)
                for (int k = 0; k < tables_.nodes; ++k) {
                    const Vector2& gj = tables_.grads[q][j];
                    const Vector2& gk = tables_.grads[q][k];
                    b.add(nodes[j], nodes[k], c * dot(gj, gk) + c2 * dot(g, gj) * dot(g, gk));
                }
        });
        return restrict_system(b.build(true), dofs_);
    }

private:
    double weight(int q) const { return tables_.quad.weights[q] * tables_.volume; }

    template <class F>
    void for_each_point(const Vec& u, F&& f) const {
        for (std::size_t e = 0; e < grid_.element_count(); ++e) {
            const auto nodes = grid_.element_nodes(e);
            for (int q = 0; q < tables_.quad.count; ++q) {
                Vector2 g = xi_;
                for (int k = 0; k < tables_.nodes; ++k) g = g + u[nodes[k]] * tables_.grads[q][k];
                f(e, q, g);
            }
        }
    }

    Grid grid_;
    ElementTables tables_;
    std::vector<double> a_;
    double p_;
    Vector2 xi_;
    DofMap dofs_;
    Kernel kernel_;
    double delta2_ = 0.0;
};

struct MinimizeResult {
    Vec x;
    double energy = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    std::vector<double> energy_trace;  // energy after each accepted step, starting value first
};

/// Damped Newton descent with Armijo backtracking.
///
/// The search direction solves the Hessian model; if it fails to be a descent
/// direction the negative gradient is used instead. When the predicted decrease
/// drops to rounding level the gradient norm becomes the merit function.
/// Accepted energies never increase beyond floating-point resolution, which is
/// checked on every step.
template <DiscreteEnergy E>
MinimizeResult minimize_p_energy(const E& energy, Vec start, const SolverConfig& config) {
    config.validate();
    require(start.size() == energy.size(), "minimize_p_energy: start vector size mismatch");
    constexpr double armijo = 1e-4;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    MinimizeResult r;
    r.x = std::move(start);
    detail::project(r.x, energy.kernel());
    r.energy = energy.value(r.x);
    r.energy_trace.push_back(r.energy);
    Vec g = energy.gradient(r.x);
    r.grad_norm = detail::norm2(g);
    const int limit = config.max_iterations > 0 ? config.max_iterations : config.iteration_limit(energy.size());
    SolverConfig inner;
    inner.rel_tolerance = 1e-10;
    while (r.grad_norm > config.nonlinear_grad_tolerance) {
        if (r.iterations >= limit)
            throw SolverFailure("minimize_p_energy did not converge", r.iterations, r.grad_norm);
        Vec neg(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) neg[i] = -g[i];
        Vec d;
        try {
            d = cg_solve(energy.hessian(r.x), neg, inner, energy.kernel()).x;
        } catch (const SolverFailure&) {
            d = neg;
        }
        double slope = detail::dotp(g, d);
        if (!(slope < 0.0)) {
            d = neg;
            slope = -r.grad_norm * r.grad_norm;
        }
        Vec trial(r.x.size());
        double e_trial = 0.0;
        Vec g_trial;
        bool accepted = false;
        // once the Armijo margin is within a few hundred ulps of the energy the comparison
        // is noise; backtrack on the gradient norm instead
        const double noise = 8.0 * eps * std::max(1.0, std::abs(r.energy)) * std::sqrt(double(energy.size()));
        const bool rounding_regime = -armijo * slope <= 32.0 * noise;
        double step = 1.0;
        for (int k = 0; k < 60 && !accepted; ++k, step *= 0.5) {
            for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = r.x[i] + step * d[i];
            e_trial = energy.value(trial);
            if (rounding_regime) {
                if (e_trial > r.energy + noise) continue;
                g_trial = energy.gradient(trial);
                accepted = detail::norm2(g_trial) < r.grad_norm;
            } else if (e_trial <= r.energy + armijo * step * slope) {
                g_trial = energy.gradient(trial);
                accepted = true;
            }
        }
        if (!accepted) throw SolverFailure("minimize_p_energy: line search failed", r.iterations, r.grad_norm);
        if (e_trial > r.energy + noise)
            throw SolverFailure("minimize_p_energy: energy increased", r.iterations, r.grad_norm);
        r.x = std::move(trial);
        trial = Vec(r.x.size());
        r.energy = e_trial;
        r.energy_trace.push_back(r.energy);
        g = std::move(g_trial);
        r.grad_norm = detail::norm2(g);
        ++r.iterations;
    }
    detail::project(r.x, energy.kernel());
    return r;
}

}  // namespace homlab
