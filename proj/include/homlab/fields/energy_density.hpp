#pragma once

#include <cmath>
#include <string>
#include <variant>

#include "homlab/fields/matrix_field.hpp"

namespace homlab {

namespace energy_form {
/// a(y) |xi|^2
struct QuadraticIsotropic {
    CoefficientField a;
};
/// <A(y) xi, xi>
struct QuadraticMatrix {
    MatrixField A;
};
/// a(y) |xi|^p
struct PPower {
    CoefficientField a;
    double p = 2.0;
};
}  // namespace energy_form

/// Integrand f(y, xi) in one of the three supported forms.
class EnergyDensity {
public:
    using Form = std::variant<energy_form::QuadraticIsotropic, energy_form::QuadraticMatrix, energy_form::PPower>;

    explicit EnergyDensity(Form form) : form_(std::move(form)) {
        if (const auto* pp = std::get_if<energy_form::PPower>(&form_)) require(pp->p > 1.0, "p-energy needs p > 1");
    }

    static EnergyDensity quadratic(CoefficientField a) { return EnergyDensity(energy_form::QuadraticIsotropic{std::move(a)}); }
    static EnergyDensity quadratic(MatrixField a) { return EnergyDensity(energy_form::QuadraticMatrix{std::move(a)}); }
    static EnergyDensity p_power(CoefficientField a, double p) { return EnergyDensity(energy_form::PPower{std::move(a), p}); }

    const Form& form() const noexcept { return form_; }
    bool is_matrix() const noexcept { return std::holds_alternative<energy_form::QuadraticMatrix>(form_); }

    int dim() const {
        return std::visit(
            [](const auto& f) {
                if constexpr (requires { f.A; }) return f.A.dim();
                else return f.a.dim();
            },
            form_);
    }

    double exponent() const {
        if (const auto* pp = std::get_if<energy_form::PPower>(&form_)) return pp->p;
        return 2.0;
    }

    const FieldBounds& bounds() const {
        return std::visit(
            [](const auto& f) -> const FieldBounds& {
                if constexpr (requires { f.A; }) return f.A.bounds();
                else return f.a.bounds();
            },
            form_);
    }

    std::string id() const {
        return std::visit(
            [](const auto& f) -> std::string {
                if constexpr (requires { f.A; }) return f.A.id();
                else return f.a.id();
            },
            form_);
    }

    /// Scalar coefficient of the isotropic and p-power forms.
    const CoefficientField& scalar() const {
        if (const auto* q = std::get_if<energy_form::QuadraticIsotropic>(&form_)) return q->a;
        if (const auto* pp = std::get_if<energy_form::PPower>(&form_)) return pp->a;
        throw InvalidArgument("energy density has no scalar coefficient");
    }

    /// Matrix view of a quadratic form (isotropic forms become a(y) I).
    MatrixField matrix() const {
        if (const auto* q = std::get_if<energy_form::QuadraticMatrix>(&form_)) return q->A;
        if (const auto* q = std::get_if<energy_form::QuadraticIsotropic>(&form_)) return MatrixField::isotropic(q->a);
        throw InvalidArgument("p-energy has no matrix form");
    }

    double operator()(const Vector2& y, const Vector2& xi) const {
        return std::visit(
            [&](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, energy_form::QuadraticMatrix>) return dot(matvec(f.A(y), xi), xi);
                else if constexpr (std::is_same_v<T, energy_form::QuadraticIsotropic>) return f.a(y) * dot(xi, xi);
                else return f.a(y) * std::pow(norm(xi), f.p);
            },
            form_);
    }

    /// sup_{|xi| <= t} |f(y, xi) - g(y, xi)|, computed in closed form per form:
    /// t^2 |a - b|, t^2 rho(sym(A - B)), or t^p |a - b|. Mixed forms are rejected.
    double sup_difference(const EnergyDensity& g, const Vector2& y, double t) const {
        require(form_.index() == g.form_.index(), "statistic requires densities of the same form");
        require(dim() == g.dim(), "statistic requires densities of the same dimension");
        if (const auto* f = std::get_if<energy_form::QuadraticIsotropic>(&form_))
            return t * t * std::abs(f->a(y) - std::get<energy_form::QuadraticIsotropic>(g.form_).a(y));
        if (const auto* f = std::get_if<energy_form::QuadraticMatrix>(&form_))
            return t * t * quadratic_form_norm(f->A(y) - std::get<energy_form::QuadraticMatrix>(g.form_).A(y), dim());
        const auto& f = std::get<energy_form::PPower>(form_);
        const auto& h = std::get<energy_form::PPower>(g.form_);
        require(f.p == h.p, "statistic requires equal exponents");
        return std::pow(t, f.p) * std::abs(f.a(y) - h.a(y));
    }

private:
    Form form_;
};

}  // namespace homlab
