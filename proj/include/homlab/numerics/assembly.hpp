#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "homlab/numerics/grid.hpp"
#include "homlab/numerics/sparse.hpp"

namespace homlab {

/// Tensor Gauss rule (2 points per axis) on the reference element [0,1]^d.
/// Exact for the products of multilinear gradients that appear in the
/// stiffness and mass matrices.
struct ReferenceQuadrature {
    int count = 0;
    std::array<Vector2, 4> points{};
    std::array<double, 4> weights{};  // sum to 1

    static ReferenceQuadrature gauss2(int dim) {
        const double g = 0.5 / std::sqrt(3.0);
        const double lo = 0.5 - g, hi = 0.5 + g;
        ReferenceQuadrature q;
        if (dim == 1) {
            q.count = 2;
            q.points = {Vector2{lo, 0.0}, Vector2{hi, 0.0}, Vector2{}, Vector2{}};
            q.weights = {0.5, 0.5, 0.0, 0.0};
        } else {
            q.count = 4;
            q.points = {Vector2{lo, lo}, Vector2{hi, lo}, Vector2{lo, hi}, Vector2{hi, hi}};
            q.weights = {0.25, 0.25, 0.25, 0.25};
        }
        return q;
    }
};

inline std::array<double, 4> shape_values(int dim, const Vector2& s) {
    if (dim == 1) return {1.0 - s[0], s[0], 0.0, 0.0};
    return {(1 - s[0]) * (1 - s[1]), s[0] * (1 - s[1]), (1 - s[0]) * s[1], s[0] * s[1]};
}

/// Physical gradients of the element shape functions at reference point s, element size h.
inline std::array<Vector2, 4> shape_gradients(int dim, const Vector2& s, double h) {
    if (dim == 1) return {Vector2{-1.0 / h, 0.0}, Vector2{1.0 / h, 0.0}, Vector2{}, Vector2{}};
    const double x = s[0], y = s[1];
    return {Vector2{-(1 - y) / h, -(1 - x) / h}, Vector2{(1 - y) / h, -x / h}, Vector2{-y / h, (1 - x) / h},
            Vector2{y / h, x / h}};
}

/// Element-level integrals shared by all elements of a uniform grid.
struct ElementTables {
    int dim = 1;
    int nodes = 2;
    double volume = 0.0;
    ReferenceQuadrature quad;
    std::array<std::array<Vector2, 4>, 4> grads{};   // [quad point][local node]
    std::array<std::array<double, 4>, 4> values{};   // [quad point][local node]
    std::array<Vector2, 4> grad_integral{};          // int_e grad phi_k
    // stiff[a][b][j][k] = int_e d_a phi_k d_b phi_j
    std::array<std::array<std::array<std::array<double, 4>, 4>, 2>, 2> stiff{};
    std::array<std::array<double, 4>, 4> mass{};     // int_e phi_j phi_k

    explicit ElementTables(const Grid& g) : dim(g.dim()), nodes(g.nodes_per_element()), volume(g.element_volume()) {
        quad = ReferenceQuadrature::gauss2(dim);
        for (int q = 0; q < quad.count; ++q) {
            grads[q] = shape_gradients(dim, quad.points[q], g.h());
            values[q] = shape_values(dim, quad.points[q]);
            const double w = quad.weights[q] * volume;
            for (int k = 0; k < nodes; ++k) {
                grad_integral[k] = grad_integral[k] + w * grads[q][k];
                for (int j = 0; j < nodes; ++j) {
                    mass[j][k] += w * values[q][j] * values[q][k];
                    for (int a = 0; a < dim; ++a)
                        for (int b = 0; b < dim; ++b) stiff[a][b][j][k] += w * grads[q][k][a] * grads[q][j][b];
                }
            }
        }
    }
};

/// Element-constant coefficient matrices, indexed by element, and an optional activity mask.
struct ElementCoefficients {
    std::vector<Matrix2> matrices;
    std::vector<bool> active;  // empty means every element is active

    bool is_active(std::size_t e) const { return active.empty() || active[e]; }

    bool symmetric(int dim) const {
        if (dim == 1) return true;
        for (const auto& m : matrices)
            if (std::abs(m[0][1] - m[1][0]) > 1e-14 * std::max(1.0, max_abs_entry(m))) return false;
        return true;
    }

    static ElementCoefficients scalar(const std::vector<double>& a) {
        ElementCoefficients c;
        c.matrices.reserve(a.size());
        for (double v : a) c.matrices.push_back(v * identity_matrix());
        return c;
    }
};

/// Stiffness matrix K_jk = sum_e int_e <A_e grad phi_k, grad phi_j> over active elements.
inline SparseSystem assemble_diffusion(const Grid& g, const ElementCoefficients& c) {
    require(c.matrices.size() == g.element_count(), "coefficient count does not match elements");
    const ElementTables t(g);
    const int np = t.nodes, dim = t.dim;
    TripletBuilder b(g.node_count());
    b.reserve(g.element_count() * std::size_t(np * np));
    for (std::size_t e = 0; e < g.element_count(); ++e) {
        if (!c.is_active(e)) continue;
        const auto nodes = g.element_nodes(e);
        const Matrix2& a = c.matrices[e];
        for (int j = 0; j < np; ++j)
            for (int k = 0; k < np; ++k) {
                double v = 0.0;
                for (int p = 0; p < dim; ++p)
                    for (int q = 0; q < dim; ++q) v += a[q][p] * t.stiff[p][q][j][k];
                b.add(nodes[j], nodes[k], v);
            }
    }
    return b.build(c.symmetric(dim));
}

/// Consistent mass matrix with element weights w_e (zero weights drop the element).
inline SparseSystem assemble_mass(const Grid& g, const std::vector<double>& weights) {
    require(weights.size() == g.element_count(), "weight count does not match elements");
    const ElementTables t(g);
    TripletBuilder b(g.node_count());
    for (std::size_t e = 0; e < g.element_count(); ++e) {
        if (weights[e] == 0.0) continue;
        const auto nodes = g.element_nodes(e);
        for (int j = 0; j < t.nodes; ++j)
            for (int k = 0; k < t.nodes; ++k) b.add(nodes[j], nodes[k], weights[e] * t.mass[j][k]);
    }
    return b.build(true);
}

/// Sum of two systems with identical sparsity-compatible dimension.
inline SparseSystem add_systems(const SparseSystem& a, const SparseSystem& b, double scale_b = 1.0) {
    require(a.dimension() == b.dimension(), "system dimensions differ");
    TripletBuilder t(a.dimension());
    for (const SparseSystem* m : {&a, &b}) {
        const double s = (m == &a) ? 1.0 : scale_b;
        for (std::size_t i = 0; i < m->dimension(); ++i)
            for (std::size_t k = m->row_offsets()[i]; k < m->row_offsets()[i + 1]; ++k)
                t.add(i, m->col_indices()[k], s * m->values()[k]);
    }
    return t.build(a.symmetric() && b.symmetric());
}

/// Load b_j = -sum_e int_e <A_e xi, grad phi_j>: the right-hand side of the corrector equation.
inline Vec assemble_affine_load(const Grid& g, const ElementCoefficients& c, const Vector2& xi) {
    const ElementTables t(g);
    Vec b(g.node_count(), 0.0);
    for (std::size_t e = 0; e < g.element_count(); ++e) {
        if (!c.is_active(e)) continue;
        const auto nodes = g.element_nodes(e);
        const Vector2 flux = matvec(c.matrices[e], xi);
        for (int j = 0; j < t.nodes; ++j) b[nodes[j]] -= dot(flux, t.grad_integral[j]);
    }
    return b;
}

/// Load b_j = sum_e w_e int_e f phi_j, with f sampled at the Gauss points.
inline Vec assemble_source_load(const Grid& g, const std::function<double(const Vector2&)>& f,
                                const std::vector<double>& weights) {
    const ElementTables t(g);
    Vec b(g.node_count(), 0.0);
    for (std::size_t e = 0; e < g.element_count(); ++e) {
        if (weights[e] == 0.0) continue;
        const auto nodes = g.element_nodes(e);
        const Vector2 corner = g.element_corner(e);
        for (int q = 0; q < t.quad.count; ++q) {
            const Vector2 x = corner + g.h() * t.quad.points[q];
            const double fw = weights[e] * t.quad.weights[q] * t.volume * f(x);
            for (int j = 0; j < t.nodes; ++j) b[nodes[j]] += fw * t.values[q][j];
        }
    }
    return b;
}

/// int_e grad u for the discrete function with nodal values u.
inline Vector2 element_gradient_integral(const Grid& g, const ElementTables& t, const Vec& u, std::size_t e) {
    const auto nodes = g.element_nodes(e);
    Vector2 s{};
    for (int k = 0; k < t.nodes; ++k) s = s + u[nodes[k]] * t.grad_integral[k];
    return s;
}

/// |D|^{-1} sum_e A_e (xi |e| + int_e grad u): average flux of xi + grad u.
inline Vector2 average_flux(const Grid& g, const ElementCoefficients& c, const Vec& u, const Vector2& xi) {
    const ElementTables t(g);
    Vector2 s{};
    for (std::size_t e = 0; e < g.element_count(); ++e) {
        if (!c.is_active(e)) continue;
        const Vector2 grad = t.volume * xi + element_gradient_integral(g, t, u, e);
        s = s + matvec(c.matrices[e], grad);
    }
    return (1.0 / g.domain_volume()) * s;
}

/// sum_e int_e <A_e (xi + grad u), xi + grad u>, unnormalized.
inline double quadratic_energy(const Grid& g, const ElementCoefficients& c, const Vec& u, const Vector2& xi) {
    const ElementTables t(g);
    double s = 0.0;
    for (std::size_t e = 0; e < g.element_count(); ++e) {
        if (!c.is_active(e)) continue;
        const auto nodes = g.element_nodes(e);
        for (int q = 0; q < t.quad.count; ++q) {
            Vector2 grad = xi;
            for (int k = 0; k < t.nodes; ++k) grad = grad + u[nodes[k]] * t.grads[q][k];
            s += t.quad.weights[q] * t.volume * dot(matvec(c.matrices[e], grad), grad);
        }
    }
    return s;
}

/// L2 norm of the discrete function with nodal values u (exact for Q1).
inline double l2_norm(const Grid& g, const Vec& u) {
    const ElementTables t(g);
    double s = 0.0;
    for (std::size_t e = 0; e < g.element_count(); ++e) {
        const auto nodes = g.element_nodes(e);
        for (int j = 0; j < t.nodes; ++j)
            for (int k = 0; k < t.nodes; ++k) s += u[nodes[j]] * t.mass[j][k] * u[nodes[k]];
    }
    return std::sqrt(std::max(s, 0.0));
}

/// Connected components of the active elements, elements being adjacent when they share a node.
inline int count_active_components(const Grid& g, const std::vector<bool>& active) {
    const std::size_t ne = g.element_count();
    std::vector<int> parent(g.node_count());
    for (std::size_t k = 0; k < parent.size(); ++k) parent[k] = static_cast<int>(k);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<bool> used(g.node_count(), false);
    for (std::size_t e = 0; e < ne; ++e) {
        if (!active.empty() && !active[e]) continue;
        const auto nodes = g.element_nodes(e);
        for (int k = 0; k < g.nodes_per_element(); ++k) {
            used[nodes[k]] = true;
            const int a = find(static_cast<int>(nodes[0])), b = find(static_cast<int>(nodes[k]));
            if (a != b) parent[b] = a;
        }
    }
    int count = 0;
    for (std::size_t k = 0; k < used.size(); ++k)
        if (used[k] && find(static_cast<int>(k)) == static_cast<int>(k)) ++count;
    return count;
}

}  // namespace homlab
