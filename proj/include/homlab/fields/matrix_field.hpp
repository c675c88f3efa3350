#pragma once

#include <array>
#include <numeric>
#include <optional>
#include <string>

#include "homlab/fields/coefficient_field.hpp"

namespace homlab {

/// Matrix coefficient A(y) on R^d.
///
/// Either a scalar field times the identity, or a matrix whose entries are
/// scalar fields (absent entries are zero). Bounds are those of the matrix:
/// alpha |xi|^2 <= <A xi, xi> and |A| <= beta.
class MatrixField {
public:
    using Entries = std::array<std::array<std::optional<CoefficientField>, 2>, 2>;

    static MatrixField isotropic(CoefficientField a) {
        MatrixField m;
        m.dim_ = a.dim();
        m.bounds_ = a.bounds();
        m.id_ = a.id() + "*I";
        m.scalar_ = std::move(a);
        m.symmetric_ = true;
        return m;
    }

    static MatrixField entrywise(int dim, Entries entries, FieldBounds bounds, std::string id = "matrix") {
        require(dim == 1 || dim == 2, "matrix field dimension must be 1 or 2");
        bounds.validate();
        MatrixField m;
        m.dim_ = dim;
        m.bounds_ = bounds;
        m.entries_ = std::move(entries);
        m.id_ = std::move(id);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                if (m.entries_[i][j]) require(m.entries_[i][j]->dim() == dim, "matrix entry dimension mismatch");
        m.symmetric_ = dim == 1 || (!m.entries_[0][1] && !m.entries_[1][0]) ||
                       (m.entries_[0][1] && m.entries_[1][0] && *m.entries_[0][1] == *m.entries_[1][0]);
        return m;
    }

    static MatrixField constant(int dim, const Matrix2& a, std::optional<FieldBounds> b = {}) {
        require(dim == 1 || dim == 2, "matrix field dimension must be 1 or 2");
        MatrixField m;
        m.dim_ = dim;
        m.bounds_ = b.value_or(natural_bounds(a, dim));
        m.bounds_.validate();
        m.constant_ = m.restrict(a);
        m.symmetric_ = dim == 1 || a[0][1] == a[1][0];
        m.id_ = "constant-matrix";
        return m;
    }

    int dim() const noexcept { return dim_; }
    bool symmetric() const noexcept { return symmetric_; }
    const FieldBounds& bounds() const noexcept { return bounds_; }
    const std::string& id() const noexcept { return id_; }
    const std::optional<CoefficientField>& scalar() const noexcept { return scalar_; }
    bool is_constant() const noexcept { return constant_.has_value(); }

    MatrixField with_id(std::string id) const {
        MatrixField m = *this;
        m.id_ = std::move(id);
        return m;
    }

    Matrix2 operator()(const Vector2& y) const {
        if (constant_) return restrict(*constant_);
        if (scalar_) return restrict((*scalar_)(y) * identity_matrix());
        Matrix2 a = zero_matrix();
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                if (entries_[i][j]) a[i][j] = (*entries_[i][j])(y);
        return a;
    }

    /// Smallest common integer period of all entries, if any.
    std::optional<int> integer_period() const {
        if (constant_) return 1;
        if (scalar_) return scalar_->integer_period();
        int period = 1;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) {
                if (!entries_[i][j]) continue;
                const auto p = entries_[i][j]->integer_period();
                if (!p) return std::nullopt;
                period = std::lcm(period, *p);
            }
        return period;
    }

private:
    static FieldBounds natural_bounds(const Matrix2& a, int dim) {
        const auto ev = symmetric_eigenvalues(a, dim);
        double op = 0.0;
        // Frobenius norm bounds the operator norm from above
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) op += a[i][j] * a[i][j];
        return FieldBounds{ev[0], std::max(ev[0], std::sqrt(op))};
    }

    Matrix2 restrict(Matrix2 a) const {
        if (dim_ == 1) a[0][1] = a[1][0] = a[1][1] = 0.0;
        return a;
    }

    int dim_ = 1;
    FieldBounds bounds_;
    std::string id_;
    std::optional<CoefficientField> scalar_;
    Entries entries_{};
    std::optional<Matrix2> constant_;
    bool symmetric_ = true;
};

inline Matrix2 eval_matrix(const MatrixField& field, const Vector2& point) { return field(point); }

}  // namespace homlab
