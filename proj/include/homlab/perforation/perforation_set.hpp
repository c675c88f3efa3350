#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <variant>

#include "homlab/core/types.hpp"

namespace homlab {

enum class HoleShape { None, Ball, Square };

inline std::string to_string(HoleShape s) {
    switch (s) {
        case HoleShape::None: return "none";
        case HoleShape::Ball: return "ball";
        case HoleShape::Square: return "square";
    }
    return "none";
}

/// Hole of cell k is displaced along e1 by min(max_shift, decay / |k|); the cell at the origin moves by max_shift.
struct DecayingShift {
    double max_shift = 0.1;
    double decay = 1.0;
    bool operator==(const DecayingShift&) const = default;
};

/// Holes are removed from the cells whose integer coordinates are all powers of two (1, 2, 4, ...).
struct SparseRemoval {
    bool operator==(const SparseRemoval&) const = default;
};

using PerforationPerturbation = std::variant<std::monostate, DecayingShift, SparseRemoval>;

/// Closed set E made of one hole per integer cell z + [0,1)^d, optionally perturbed.
///
/// The hole of the unperturbed pattern sits at z + center and has radius
/// (ball) or half-width (square) `radius`. Holes never touch: radius plus
/// the largest shift stays below 1/2, so the complement is connected.
class PerforationSet {
public:
    PerforationSet() = default;

    PerforationSet(int dim, HoleShape shape, double radius, PerforationPerturbation perturbation = {})
        : dim_(dim), shape_(shape), radius_(radius), perturbation_(perturbation) {
        require(dim == 1 || dim == 2, "perforation dimension must be 1 or 2");
        if (shape_ == HoleShape::None) {
            radius_ = 0.0;
            return;
        }
        require(radius_ > 0.0, "hole radius must be positive");
        double reach = radius_;
        if (const auto* s = std::get_if<DecayingShift>(&perturbation_)) {
            require(s->max_shift >= 0.0 && s->decay >= 0.0, "shift parameters must be non-negative");
            reach += s->max_shift;
        }
        require(reach < 0.5, "holes must stay inside their cell (radius + shift < 1/2)");
    }

    static PerforationSet none(int dim) { return PerforationSet(dim, HoleShape::None, 0.0); }

    int dim() const noexcept { return dim_; }
    HoleShape shape() const noexcept { return shape_; }
    double radius() const noexcept { return radius_; }
    const PerforationPerturbation& perturbation() const noexcept { return perturbation_; }
    bool is_periodic() const noexcept { return std::holds_alternative<std::monostate>(perturbation_); }

    PerforationSet with_perturbation(PerforationPerturbation p) const {
        return PerforationSet(dim_, shape_, radius_, p);
    }
    PerforationSet unperturbed() const { return PerforationSet(dim_, shape_, radius_); }

    /// Measure of one unperturbed hole.
    double hole_volume() const {
        if (shape_ == HoleShape::None) return 0.0;
        if (dim_ == 1) return 2.0 * radius_;
        return shape_ == HoleShape::Ball ? std::numbers::pi * radius_ * radius_ : 4.0 * radius_ * radius_;
    }

    /// Volume fraction of the complement for the periodic pattern.
    double nominal_volume_fraction() const { return 1.0 - hole_volume(); }

    static bool removed_cell(std::int64_t zx, std::int64_t zy, int dim) {
        return is_power_of_two(zx) && (dim == 1 || is_power_of_two(zy));
    }

    Vector2 hole_center(std::int64_t zx, std::int64_t zy) const {
        Vector2 c{static_cast<double>(zx) + 0.5, dim_ == 2 ? static_cast<double>(zy) + 0.5 : 0.0};
        if (const auto* s = std::get_if<DecayingShift>(&perturbation_)) {
            const double k = std::hypot(static_cast<double>(zx), dim_ == 2 ? static_cast<double>(zy) : 0.0);
            c[0] += k == 0.0 ? s->max_shift : std::min(s->max_shift, s->decay / k);
        }
        return c;
    }

    bool contains(const Vector2& y) const {
        if (shape_ == HoleShape::None) return false;
        const auto zx = static_cast<std::int64_t>(std::floor(y[0]));
        const auto zy = dim_ == 2 ? static_cast<std::int64_t>(std::floor(y[1])) : 0;
        if (std::holds_alternative<SparseRemoval>(perturbation_) && removed_cell(zx, zy, dim_)) return false;
        const Vector2 c = hole_center(zx, zy);
        const double dx = std::abs(y[0] - c[0]);
        const double dy = dim_ == 2 ? std::abs(y[1] - c[1]) : 0.0;
        return shape_ == HoleShape::Ball ? dx * dx + dy * dy < radius_ * radius_ : std::max(dx, dy) < radius_;
    }

    /// Membership in the scaled set eps * E.
    bool contains_scaled(const Vector2& x, double eps) const { return contains((1.0 / eps) * x); }

    bool operator==(const PerforationSet&) const = default;

private:
    int dim_ = 2;
    HoleShape shape_ = HoleShape::None;
    double radius_ = 0.0;
    PerforationPerturbation perturbation_;
};

}  // namespace homlab
