#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace homlab {

/// Points and vectors in R^d for d <= 2. Unused trailing components are zero.
using Vector2 = std::array<double, 2>;
/// Row-major 2x2 matrix; in 1D only entry (0,0) is meaningful.
using Matrix2 = std::array<std::array<double, 2>, 2>;
using Vec = std::vector<double>;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised on violated preconditions (bad sizes, bounds, dimensions).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Raised when an iterative solver stops without meeting its tolerance.
class SolverFailure : public Error {
public:
    SolverFailure(const std::string& what, int iterations, double residual)
        : Error(what + " (iterations=" + std::to_string(iterations) +
                ", residual=" + std::to_string(residual) + ")"),
          iterations_(iterations), residual_(residual) {}

    int iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidArgument(message);
}

constexpr Matrix2 identity_matrix() { return {{{1.0, 0.0}, {0.0, 1.0}}}; }
constexpr Matrix2 zero_matrix() { return {{{0.0, 0.0}, {0.0, 0.0}}}; }

inline double dot(const Vector2& a, const Vector2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm(const Vector2& a) { return std::sqrt(dot(a, a)); }

inline Vector2 operator+(const Vector2& a, const Vector2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vector2 operator-(const Vector2& a, const Vector2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vector2 operator*(double s, const Vector2& a) { return {s * a[0], s * a[1]}; }

inline Vector2 matvec(const Matrix2& m, const Vector2& x) {
    return {m[0][0] * x[0] + m[0][1] * x[1], m[1][0] * x[0] + m[1][1] * x[1]};
}

inline Matrix2 operator+(const Matrix2& a, const Matrix2& b) {
    return {{{a[0][0] + b[0][0], a[0][1] + b[0][1]}, {a[1][0] + b[1][0], a[1][1] + b[1][1]}}};
}
inline Matrix2 operator-(const Matrix2& a, const Matrix2& b) {
    return {{{a[0][0] - b[0][0], a[0][1] - b[0][1]}, {a[1][0] - b[1][0], a[1][1] - b[1][1]}}};
}
inline Matrix2 operator*(double s, const Matrix2& a) {
    return {{{s * a[0][0], s * a[0][1]}, {s * a[1][0], s * a[1][1]}}};
}

inline Matrix2 matmul(const Matrix2& a, const Matrix2& b) {
    Matrix2 c = zero_matrix();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) c[i][j] += a[i][k] * b[k][j];
    return c;
}

inline Matrix2 transpose(const Matrix2& a) { return {{{a[0][0], a[1][0]}, {a[0][1], a[1][1]}}}; }

inline double max_abs_entry(const Matrix2& a, int dim = 2) {
    double m = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) m = std::max(m, std::abs(a[i][j]));
    return m;
}

/// Eigenvalues (ascending) of the symmetric part of a restricted to the leading dim x dim block.
inline std::array<double, 2> symmetric_eigenvalues(const Matrix2& a, int dim) {
    if (dim == 1) return {a[0][0], a[0][0]};
    const double p = a[0][0], q = a[1][1], r = 0.5 * (a[0][1] + a[1][0]);
    const double mean = 0.5 * (p + q);
    const double rad = std::sqrt(0.25 * (p - q) * (p - q) + r * r);
    return {mean - rad, mean + rad};
}

/// Spectral radius of the symmetric part: the exact value of sup_{|x|<=1} |<a x, x>|.
inline double quadratic_form_norm(const Matrix2& a, int dim) {
    const auto ev = symmetric_eigenvalues(a, dim);
    return std::max(std::abs(ev[0]), std::abs(ev[1]));
}

/// True when z is 1, 2, 4, 8, ...
inline bool is_power_of_two(std::int64_t z) {
    const auto m = static_cast<std::uint64_t>(z);
    return z > 0 && (m & (m - 1)) == 0;
}

}  // namespace homlab
