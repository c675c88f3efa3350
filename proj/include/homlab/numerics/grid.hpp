#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "homlab/core/types.hpp"

namespace homlab {

enum class Topology { Torus, Box };

inline std::string to_string(Topology t) { return t == Topology::Torus ? "torus" : "box"; }

/// Uniform tensor grid on the cube origin + [0, L]^d, d in {1, 2}.
///
/// Torus grids identify opposite faces, so they have n^d nodes; box grids
/// keep the boundary and have (n+1)^d nodes. Elements are multilinear
/// (P1 segments in 1D, Q1 squares in 2D), n^d of them in both cases.
/// Local node order inside an element is tensor order: (0,0), (1,0), (0,1), (1,1).
class Grid {
public:
    Grid(int dim, int cells_per_axis, Vector2 origin, double side_length, Topology topology)
        : dim_(dim), n_(cells_per_axis), origin_(origin), side_(side_length), topology_(topology) {
        require(dim == 1 || dim == 2, "grid dimension must be 1 or 2");
        require(cells_per_axis >= 2, "grid needs at least 2 cells per axis");
        require(side_length > 0.0 && std::isfinite(side_length), "grid side length must be positive");
        if (dim == 1) origin_[1] = 0.0;
        nodes_per_axis_ = topology == Topology::Torus ? n_ : n_ + 1;
    }

    int dim() const noexcept { return dim_; }
    int cells_per_axis() const noexcept { return n_; }
    const Vector2& origin() const noexcept { return origin_; }
    double side_length() const noexcept { return side_; }
    Topology topology() const noexcept { return topology_; }
    double h() const noexcept { return side_ / n_; }
    int nodes_per_axis() const noexcept { return nodes_per_axis_; }
    int nodes_per_element() const noexcept { return dim_ == 1 ? 2 : 4; }

    std::size_t node_count() const noexcept {
        return dim_ == 1 ? std::size_t(nodes_per_axis_)
                         : std::size_t(nodes_per_axis_) * std::size_t(nodes_per_axis_);
    }
    std::size_t element_count() const noexcept {
        return dim_ == 1 ? std::size_t(n_) : std::size_t(n_) * std::size_t(n_);
    }
    double element_volume() const noexcept { return dim_ == 1 ? h() : h() * h(); }
    double domain_volume() const noexcept { return dim_ == 1 ? side_ : side_ * side_; }

    std::size_t node_index(int i, int j = 0) const {
        if (topology_ == Topology::Torus) {
            i = ((i % n_) + n_) % n_;
            j = ((j % n_) + n_) % n_;
        }
        return std::size_t(i) + (dim_ == 2 ? std::size_t(j) * std::size_t(nodes_per_axis_) : 0);
    }

    std::array<int, 2> node_multi_index(std::size_t k) const {
        if (dim_ == 1) return {static_cast<int>(k), 0};
        return {static_cast<int>(k % std::size_t(nodes_per_axis_)), static_cast<int>(k / std::size_t(nodes_per_axis_))};
    }

    Vector2 node_coords(std::size_t k) const {
        const auto m = node_multi_index(k);
        return {origin_[0] + h() * m[0], dim_ == 2 ? origin_[1] + h() * m[1] : 0.0};
    }

    std::array<int, 2> element_multi_index(std::size_t e) const {
        if (dim_ == 1) return {static_cast<int>(e), 0};
        return {static_cast<int>(e % std::size_t(n_)), static_cast<int>(e / std::size_t(n_))};
    }

    /// Global node indices of element e; only the first nodes_per_element() entries are used.
    std::array<std::size_t, 4> element_nodes(std::size_t e) const {
        const auto m = element_multi_index(e);
        if (dim_ == 1) return {node_index(m[0]), node_index(m[0] + 1), 0, 0};
        return {node_index(m[0], m[1]), node_index(m[0] + 1, m[1]), node_index(m[0], m[1] + 1),
                node_index(m[0] + 1, m[1] + 1)};
    }

    Vector2 element_center(std::size_t e) const {
        const auto m = element_multi_index(e);
        return {origin_[0] + h() * (m[0] + 0.5), dim_ == 2 ? origin_[1] + h() * (m[1] + 0.5) : 0.0};
    }

    /// Lower-left corner of element e.
    Vector2 element_corner(std::size_t e) const {
        const auto m = element_multi_index(e);
        return {origin_[0] + h() * m[0], dim_ == 2 ? origin_[1] + h() * m[1] : 0.0};
    }

    bool is_boundary_node(std::size_t k) const {
        if (topology_ == Topology::Torus) return false;
        const auto m = node_multi_index(k);
        auto edge = [&](int i) { return i == 0 || i == n_; };
        return edge(m[0]) || (dim_ == 2 && edge(m[1]));
    }

private:
    int dim_;
    int n_;
    Vector2 origin_;
    double side_;
    Topology topology_;
    int nodes_per_axis_ = 0;
};

inline Grid build_grid(int dim, int cells_per_axis, Vector2 origin, double side_length, Topology topology) {
    return Grid(dim, cells_per_axis, origin, side_length, topology);
}

/// Nodal samples of the affine function x -> <xi, x>. Only meaningful as Dirichlet data on box grids.
inline Vec interpolate_affine(const Grid& grid, const Vec& xi) {
    require(grid.topology() == Topology::Box, "affine interpolation requires a box grid");
    require(xi.size() == std::size_t(grid.dim()), "xi dimension does not match grid");
    Vec v(grid.node_count());
    const Vector2 x2{xi[0], grid.dim() == 2 ? xi[1] : 0.0};
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = dot(x2, grid.node_coords(k));
    return v;
}

}  // namespace homlab
