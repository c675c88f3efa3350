#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "homlab/core/types.hpp"
#include "homlab/fields/random.hpp"
#include "homlab/perforation/perforation_set.hpp"

namespace homlab {

/// Uniform bounds alpha <= a(y) <= beta and the growth exponent p of the energy.
struct FieldBounds {
    double alpha = 1.0;
    double beta = 1.0;
    double p = 2.0;

    void validate() const {
        require(alpha > 0.0 && std::isfinite(alpha), "bounds: alpha must be positive");
        require(beta >= alpha && std::isfinite(beta), "bounds: beta must be >= alpha");
        require(p > 1.0, "bounds: p must be > 1");
    }
    bool contains(double v) const { return v >= alpha && v <= beta; }
    bool operator==(const FieldBounds&) const = default;
};

// ---------------------------------------------------------------------------
// Sparse perturbations

struct BallSupport {
    double radius = 1.0;
    bool operator==(const BallSupport&) const = default;
};
/// Cubes z + [0, width)^d at the integer cells z whose coordinates are all powers of two (1, 2, 4, ...).
struct PowerOfTwoCells {
    double width = 1.0;
    bool operator==(const PowerOfTwoCells&) const = default;
};
/// Profile (1 + |y|)^(-exponent).
struct LpDecay {
    double exponent = 1.0;
    bool operator==(const LpDecay&) const = default;
};

using PerturbationSupport = std::variant<BallSupport, PowerOfTwoCells, LpDecay>;

/// A perturbation y -> amplitude * profile(y) whose averages over growing cubes vanish.
struct SparsePerturbationRule {
    PerturbationSupport support = BallSupport{};
    double amplitude = 1.0;

    double profile(const Vector2& y, int dim) const {
        const double r = dim == 1 ? std::abs(y[0]) : std::hypot(y[0], y[1]);
        if (const auto* b = std::get_if<BallSupport>(&support)) return r < b->radius ? 1.0 : 0.0;
        if (const auto* c = std::get_if<PowerOfTwoCells>(&support)) {
            const double fx = std::floor(y[0]);
            const double fy = dim == 2 ? std::floor(y[1]) : 0.0;
            const bool cell = is_power_of_two(static_cast<std::int64_t>(fx)) &&
                              (dim == 1 || is_power_of_two(static_cast<std::int64_t>(fy)));
            const bool inside = (y[0] - fx) < c->width && (dim == 1 || (y[1] - fy) < c->width);
            return cell && inside ? 1.0 : 0.0;
        }
        return std::pow(1.0 + r, -std::get<LpDecay>(support).exponent);
    }

    double operator()(const Vector2& y, int dim) const { return amplitude * profile(y, dim); }

    void validate() const {
        require(std::isfinite(amplitude), "perturbation amplitude must be finite");
        if (const auto* b = std::get_if<BallSupport>(&support)) require(b->radius > 0.0, "ball radius must be positive");
        if (const auto* c = std::get_if<PowerOfTwoCells>(&support))
            require(c->width > 0.0 && c->width <= 1.0, "power-of-two cell width must be in (0, 1]");
        if (const auto* l = std::get_if<LpDecay>(&support)) require(l->exponent > 0.0, "decay exponent must be positive");
    }

    bool operator==(const SparsePerturbationRule&) const = default;
};

/// How a perturbation acts on the base value: added (then clamped), or as a
/// weighted reflection a -> alpha + beta - a on its support.
enum class PerturbationMode { Add, Flip };

class CoefficientField;

namespace field_kind {

struct Constant {
    double value = 1.0;
    bool operator==(const Constant&) const = default;
};

/// 1-periodic step profile of y1: values[i] on [breakpoints[i], breakpoints[i+1]).
struct Layered1D {
    std::vector<double> breakpoints;
    std::vector<double> values;
    bool operator==(const Layered1D&) const = default;
};

/// 1-periodic piecewise constant on a cells^d subgrid of the unit cell, values indexed i + cells * j.
struct PeriodicStep {
    int cells = 2;
    std::vector<double> values;
    bool operator==(const PeriodicStep&) const = default;
};

struct TrigTerm {
    double amplitude = 0.0;
    Vector2 frequency{};
    double phase = 0.0;
    bool operator==(const TrigTerm&) const = default;
};

/// max(alpha, min(beta, offset + sum_k amplitude_k sin(2 pi <frequency_k, y> + phase_k))).
struct TrigPolynomialClamped {
    double offset = 0.0;
    std::vector<TrigTerm> terms;
    bool operator==(const TrigPolynomialClamped&) const = default;
};

/// gamma + c for y1 >= 0, gamma - c for y1 < 0.
struct HalfSpaceStep {
    double gamma = 2.0;
    double c = 0.5;
    bool operator==(const HalfSpaceStep&) const = default;
};

/// iid values on the integer cells: `high` with probability `probability`, else `low`.
/// `shift` realizes the action of the integer translation group on the realization.
struct RandomCheckerboard {
    double low = 1.0;
    double high = 4.0;
    double probability = 0.5;
    std::uint64_t seed = 0;
    std::array<std::int64_t, 2> shift{};
    bool operator==(const RandomCheckerboard&) const = default;
};

struct Perturbed {
    std::shared_ptr<const CoefficientField> base;
    SparsePerturbationRule rule;
    double sign = 1.0;
    PerturbationMode mode = PerturbationMode::Add;
};

/// 1 outside the hole set, 1/n inside.
struct PenalizedPerforation {
    PerforationSet set;
    double n = 1.0;
    bool operator==(const PenalizedPerforation&) const = default;
};

}  // namespace field_kind

/// Scalar coefficient a(y) on R^d with uniform bounds.
///
/// Immutable once built; evaluation is deterministic and reentrant.
class CoefficientField {
public:
    using Kind = std::variant<field_kind::Constant, field_kind::Layered1D, field_kind::PeriodicStep,
                              field_kind::TrigPolynomialClamped, field_kind::HalfSpaceStep,
                              field_kind::RandomCheckerboard, field_kind::Perturbed, field_kind::PenalizedPerforation>;

    CoefficientField(int dim, FieldBounds bounds, Kind kind, std::string id = {})
        : dim_(dim), bounds_(bounds), kind_(std::move(kind)), id_(std::move(id)) {
        require(dim == 1 || dim == 2, "field dimension must be 1 or 2");
        bounds_.validate();
        validate_kind();
        if (id_.empty()) id_ = describe();
    }

    // -- factories ----------------------------------------------------------

    static CoefficientField constant(int dim, double value, std::optional<FieldBounds> b = {}) {
        return {dim, b.value_or(FieldBounds{value, value}), field_kind::Constant{value}};
    }

    static CoefficientField layered(int dim, std::vector<double> breakpoints, std::vector<double> values,
                                    std::optional<FieldBounds> b = {}) {
        const FieldBounds fb = b.value_or(range_of(values));
        return {dim, fb, field_kind::Layered1D{std::move(breakpoints), std::move(values)}};
    }

    /// first on [0, 1/2), second on [1/2, 1), as a function of y1.
    static CoefficientField two_phase(int dim, double first, double second, std::optional<FieldBounds> b = {}) {
        return layered(dim, {0.0, 0.5}, {first, second}, b);
    }

    static CoefficientField periodic_step(int dim, int cells, std::vector<double> values,
                                          std::optional<FieldBounds> b = {}) {
        const FieldBounds fb = b.value_or(range_of(values));
        return {dim, fb, field_kind::PeriodicStep{cells, std::move(values)}};
    }

    /// 2D checkerboard: `first` on the cells (0,0), (1,1) of the half-cell subgrid, `second` elsewhere.
    static CoefficientField checkerboard(double first, double second, std::optional<FieldBounds> b = {}) {
        return periodic_step(2, 2, {first, second, second, first}, b);
    }

    static CoefficientField trig_clamped(int dim, double offset, std::vector<field_kind::TrigTerm> terms,
                                         FieldBounds b) {
        return {dim, b, field_kind::TrigPolynomialClamped{offset, std::move(terms)}};
    }

    static CoefficientField half_space_step(int dim, double gamma, double c, std::optional<FieldBounds> b = {}) {
        const FieldBounds fb = b.value_or(FieldBounds{gamma - std::abs(c), gamma + std::abs(c)});
        return {dim, fb, field_kind::HalfSpaceStep{gamma, c}};
    }

    static CoefficientField random_checkerboard(int dim, double low, double high, double probability,
                                                std::uint64_t seed, std::optional<FieldBounds> b = {}) {
        const FieldBounds fb = b.value_or(FieldBounds{std::min(low, high), std::max(low, high)});
        return {dim, fb, field_kind::RandomCheckerboard{low, high, probability, seed, {}}};
    }

    static CoefficientField perturbed(const CoefficientField& base, SparsePerturbationRule rule, double sign = 1.0,
                                      PerturbationMode mode = PerturbationMode::Add,
                                      std::optional<FieldBounds> b = {}) {
        return {base.dim(), b.value_or(base.bounds()),
                field_kind::Perturbed{std::make_shared<const CoefficientField>(base), rule, sign, mode}};
    }

    static CoefficientField penalized_perforation(const PerforationSet& set, double n) {
        require(n >= 1.0, "penalization index must be >= 1");
        return {set.dim(), FieldBounds{1.0 / n, 1.0}, field_kind::PenalizedPerforation{set, n}};
    }

    // -- access -------------------------------------------------------------

    int dim() const noexcept { return dim_; }
    const FieldBounds& bounds() const noexcept { return bounds_; }
    const Kind& kind() const noexcept { return kind_; }
    const std::string& id() const noexcept { return id_; }

    CoefficientField with_id(std::string id) const {
        CoefficientField f = *this;
        f.id_ = std::move(id);
        return f;
    }
    CoefficientField with_bounds(FieldBounds b) const { return CoefficientField(dim_, b, kind_, id_); }

    /// a(omega, y + z) for the random checkerboard equals a(tau_z omega, y): same seed, shifted lattice.
    CoefficientField shifted(std::int64_t zx, std::int64_t zy = 0) const {
        const auto* rc = std::get_if<field_kind::RandomCheckerboard>(&kind_);
        require(rc != nullptr, "shifted() applies to random checkerboards only");
        auto k = *rc;
        k.shift[0] += zx;
        k.shift[1] += zy;
        return CoefficientField(dim_, bounds_, k, id_);
    }

    double operator()(const Vector2& y) const {
        return std::visit([&](const auto& k) { return eval(k, y); }, kind_);
    }

    /// Smallest integer P <= 4096 such that the field is P-periodic in every direction, if any.
    std::optional<int> integer_period() const {
        using namespace field_kind;
        return std::visit(
            [&](const auto& k) -> std::optional<int> {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, Constant> || std::is_same_v<T, Layered1D> ||
                              std::is_same_v<T, PeriodicStep>) {
                    return 1;
                } else if constexpr (std::is_same_v<T, TrigPolynomialClamped>) {
                    for (int q = 1; q <= 4096; ++q) {
                        bool ok = true;
                        for (const auto& t : k.terms) {
                            if (t.amplitude == 0.0) continue;
                            for (int i = 0; i < dim_; ++i) {
                                const double v = t.frequency[i] * q;
                                if (std::abs(v - std::round(v)) > 1e-9 * std::max(1.0, std::abs(v))) ok = false;
                            }
                        }
                        if (ok) return q;
                    }
                    return std::nullopt;
                } else if constexpr (std::is_same_v<T, PenalizedPerforation>) {
                    return k.set.is_periodic() ? std::optional<int>(1) : std::nullopt;
                } else {
                    return std::nullopt;
                }
            },
            kind_);
    }

    bool operator==(const CoefficientField& o) const {
        if (dim_ != o.dim_ || !(bounds_ == o.bounds_) || id_ != o.id_ || kind_.index() != o.kind_.index()) return false;
        if (const auto* p = std::get_if<field_kind::Perturbed>(&kind_)) {
            const auto& q = std::get<field_kind::Perturbed>(o.kind_);
            return *p->base == *q.base && p->rule == q.rule && p->sign == q.sign && p->mode == q.mode;
        }
        return std::visit(
            [&](const auto& k) {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, field_kind::Perturbed>) return true;
                else return k == std::get<T>(o.kind_);
            },
            kind_);
    }

private:
    static FieldBounds range_of(const std::vector<double>& v) {
        require(!v.empty(), "field needs at least one value");
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return FieldBounds{*lo, *hi};
    }

    static double frac(double x) { return x - std::floor(x); }

    double clamp(double v) const { return std::max(bounds_.alpha, std::min(bounds_.beta, v)); }

    double eval(const field_kind::Constant& k, const Vector2&) const { return k.value; }

    double eval(const field_kind::Layered1D& k, const Vector2& y) const {
        const double t = frac(y[0]);
        std::size_t i = 0;
        while (i + 1 < k.breakpoints.size() && t >= k.breakpoints[i + 1]) ++i;
        return k.values[i];
    }

    double eval(const field_kind::PeriodicStep& k, const Vector2& y) const {
        const int i = std::min(k.cells - 1, static_cast<int>(frac(y[0]) * k.cells));
        const int j = dim_ == 2 ? std::min(k.cells - 1, static_cast<int>(frac(y[1]) * k.cells)) : 0;
        return k.values[static_cast<std::size_t>(i + k.cells * j)];
    }

    double eval(const field_kind::TrigPolynomialClamped& k, const Vector2& y) const {
        double s = k.offset;
        for (const auto& t : k.terms)
            s += t.amplitude * std::sin(2.0 * std::numbers::pi * (t.frequency[0] * y[0] +
                                                                  (dim_ == 2 ? t.frequency[1] * y[1] : 0.0)) +
                                        t.phase);
        return clamp(s);
    }

    double eval(const field_kind::HalfSpaceStep& k, const Vector2& y) const {
        return y[0] >= 0.0 ? k.gamma + k.c : k.gamma - k.c;
    }

    double eval(const field_kind::RandomCheckerboard& k, const Vector2& y) const {
        const auto zx = static_cast<std::int64_t>(std::floor(y[0])) + k.shift[0];
        const auto zy = (dim_ == 2 ? static_cast<std::int64_t>(std::floor(y[1])) : 0) + k.shift[1];
        return counter_uniform(k.seed, zx, zy) < k.probability ? k.high : k.low;
    }

    double eval(const field_kind::Perturbed& k, const Vector2& y) const {
        const double base = (*k.base)(y);
        if (k.mode == PerturbationMode::Add) return clamp(base + k.sign * k.rule(y, dim_));
        const double w = std::min(1.0, std::abs(k.rule(y, dim_)));
        return clamp(base + w * (bounds_.alpha + bounds_.beta - 2.0 * base));
    }

    double eval(const field_kind::PenalizedPerforation& k, const Vector2& y) const {
        return k.set.contains(y) ? 1.0 / k.n : 1.0;
    }

    void validate_kind() const {
        using namespace field_kind;
        auto check = [&](double v, const char* what) {
            require(std::isfinite(v) && bounds_.contains(v),
                    std::string("bounds: ") + what + " value " + std::to_string(v) + " outside [alpha, beta]");
        };
        std::visit(
            [&](const auto& k) {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, Constant>) {
                    check(k.value, "constant");
                } else if constexpr (std::is_same_v<T, Layered1D>) {
                    require(!k.values.empty() && k.values.size() == k.breakpoints.size(),
                            "layered field needs one value per breakpoint");
                    require(k.breakpoints.front() == 0.0, "layered breakpoints must start at 0");
                    for (std::size_t i = 1; i < k.breakpoints.size(); ++i)
                        require(k.breakpoints[i] > k.breakpoints[i - 1] && k.breakpoints[i] < 1.0,
                                "layered breakpoints must increase inside [0, 1)");
                    for (double v : k.values) check(v, "layered");
                } else if constexpr (std::is_same_v<T, PeriodicStep>) {
                    require(k.cells >= 1, "periodic step needs cells >= 1");
                    const std::size_t expect = dim_ == 1 ? std::size_t(k.cells) : std::size_t(k.cells * k.cells);
                    require(k.values.size() == expect, "periodic step value count must be cells^d");
                    for (double v : k.values) check(v, "periodic step");
                } else if constexpr (std::is_same_v<T, TrigPolynomialClamped>) {
                    require(std::isfinite(k.offset), "trig offset must be finite");
                } else if constexpr (std::is_same_v<T, HalfSpaceStep>) {
                    check(k.gamma + k.c, "half-space");
                    check(k.gamma - k.c, "half-space");
                } else if constexpr (std::is_same_v<T, RandomCheckerboard>) {
                    check(k.low, "random checkerboard");
                    check(k.high, "random checkerboard");
                    require(k.probability >= 0.0 && k.probability <= 1.0, "probability must be in [0, 1]");
                } else if constexpr (std::is_same_v<T, Perturbed>) {
                    require(k.base != nullptr, "perturbed field needs a base");
                    require(k.base->dim() == dim_, "perturbed field dimension mismatch");
                    k.rule.validate();
                } else if constexpr (std::is_same_v<T, PenalizedPerforation>) {
                    require(k.set.dim() == dim_, "perforation dimension mismatch");
                    require(k.n >= 1.0, "penalization index must be >= 1");
                }
            },
            kind_);
    }

    std::string describe() const {
        using namespace field_kind;
        std::ostringstream os;
        os.precision(6);
        std::visit(
            [&](const auto& k) {
                using T = std::decay_t<decltype(k)>;
                if constexpr (std::is_same_v<T, Constant>) {
                    os << "constant(" << k.value << ")";
                } else if constexpr (std::is_same_v<T, Layered1D>) {
                    os << "layered(";
                    for (std::size_t i = 0; i < k.values.size(); ++i) os << (i ? ";" : "") << k.values[i];
                    os << ")";
                } else if constexpr (std::is_same_v<T, PeriodicStep>) {
                    os << "step" << k.cells << "(";
                    for (std::size_t i = 0; i < k.values.size(); ++i) os << (i ? ";" : "") << k.values[i];
                    os << ")";
                } else if constexpr (std::is_same_v<T, TrigPolynomialClamped>) {
                    os << "trig(" << k.offset << ";" << k.terms.size() << " terms)";
                } else if constexpr (std::is_same_v<T, HalfSpaceStep>) {
                    os << "halfspace(" << k.gamma << ";" << k.c << ")";
                } else if constexpr (std::is_same_v<T, RandomCheckerboard>) {
                    os << "random(" << k.low << ";" << k.high << ";p=" << k.probability << ";seed=" << k.seed << ")";
                } else if constexpr (std::is_same_v<T, Perturbed>) {
                    os << k.base->id() << "+perturbation";
                } else if constexpr (std::is_same_v<T, PenalizedPerforation>) {
                    os << "penalized(" << to_string(k.set.shape()) << ";r=" << k.set.radius() << ";n=" << k.n << ")";
                }
            },
            kind_);
        return os.str();
    }

    int dim_;
    FieldBounds bounds_;
    Kind kind_;
    std::string id_;
};

inline double eval_scalar(const CoefficientField& field, const Vector2& point) { return field(point); }

}  // namespace homlab
