#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>

#include "homlab/numerics/sparse.hpp"

namespace homlab {

struct SolverConfig {
    double rel_tolerance = 1e-10;
    /// 0 selects 20 x (number of unknowns).
    int max_iterations = 0;
    double nonlinear_grad_tolerance = 1e-8;

    void validate() const {
        require(rel_tolerance > 0.0 && nonlinear_grad_tolerance > 0.0, "solver tolerances must be positive");
        require(max_iterations >= 0, "max_iterations must be non-negative");
    }
    int iteration_limit(std::size_t unknowns) const {
        return max_iterations > 0 ? max_iterations : static_cast<int>(20 * std::max<std::size_t>(unknowns, 1));
    }
};

/// Null space handled by the Krylov solvers. Periodic (torus) systems carry the constants.
enum class Kernel { None, Constants };

struct SolveResult {
    Vec x;
    int iterations = 0;
    double relative_residual = 0.0;
};

namespace detail {

inline double dotp(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dotp(a, a)); }

inline void project_mean_zero(Vec& v) {
    if (v.empty()) return;
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    for (double& x : v) x -= m;
}

inline void project(Vec& v, Kernel k) {
    if (k == Kernel::Constants) project_mean_zero(v);
}

inline Vec inverse_diagonal(const SparseSystem& a) {
    Vec d = a.diagonal();
    for (double& x : d) x = (x != 0.0) ? 1.0 / x : 1.0;
    return d;
}

inline Vec residual(const SparseSystem& a, const Vec& x, const Vec& b) {
    Vec r(b.size());
    a.multiply(x, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    return r;
}

}  // namespace detail

/// Jacobi-preconditioned conjugate gradients.
///
/// With Kernel::Constants the rhs, the iterates and the preconditioned
/// residuals are projected onto the mean-zero subspace, and the returned
/// solution has zero mean.
inline SolveResult cg_solve(const SparseSystem& a, Vec rhs, const SolverConfig& config,
                            Kernel kernel = Kernel::None, std::optional<Vec> initial = std::nullopt) {
    config.validate();
    const std::size_t n = a.dimension();
    require(rhs.size() == n, "cg_solve: rhs size mismatch");
    detail::project(rhs, kernel);
    SolveResult out;
    out.x = initial ? std::move(*initial) : Vec(n, 0.0);
    require(out.x.size() == n, "cg_solve: initial guess size mismatch");
    detail::project(out.x, kernel);
    const double bnorm = detail::norm2(rhs);
    if (bnorm == 0.0) {
        out.x.assign(n, 0.0);
        return out;
    }
    const Vec dinv = detail::inverse_diagonal(a);
    Vec r = detail::residual(a, out.x, rhs);
    detail::project(r, kernel);
    Vec z(n), p(n), q(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
    detail::project(z, kernel);
    p = z;
    double rz = detail::dotp(r, z);
    const int limit = config.iteration_limit(n);
    double rnorm = detail::norm2(r);
    int it = 0;
    for (;;) {
        while (rnorm > config.rel_tolerance * bnorm) {
            if (it >= limit) throw SolverFailure("cg_solve did not converge", it, rnorm / bnorm);
            a.multiply(p, q);
            const double pq = detail::dotp(p, q);
            if (!(pq > 0.0))
                throw SolverFailure("cg_solve: matrix not positive definite on search space", it, rnorm / bnorm);
            const double alpha = rz / pq;
            for (std::size_t i = 0; i < n; ++i) {
                out.x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            detail::project(r, kernel);
            ++it;
            if (it % 50 == 0) {
                r = detail::residual(a, out.x, rhs);
                detail::project(r, kernel);
            }
            rnorm = detail::norm2(r);
            for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
            detail::project(z, kernel);
            const double rz_new = detail::dotp(r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        }
        // the recursive residual can drift from the true one; restart from the true residual if so
        r = detail::residual(a, out.x, rhs);
        detail::project(r, kernel);
        rnorm = detail::norm2(r);
        if (rnorm <= config.rel_tolerance * bnorm) break;
        for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
        detail::project(z, kernel);
        p = z;
        rz = detail::dotp(r, z);
    }
    detail::project(out.x, kernel);
    out.iterations = it;
    out.relative_residual = rnorm / bnorm;
    return out;
}

/// Jacobi right-preconditioned BiCGSTAB for nonsymmetric systems.
inline SolveResult krylov_solve_nonsymmetric(const SparseSystem& a, Vec rhs, const SolverConfig& config,
                                             Kernel kernel = Kernel::None,
                                             std::optional<Vec> initial = std::nullopt) {
    config.validate();
    const std::size_t n = a.dimension();
    require(rhs.size() == n, "krylov_solve_nonsymmetric: rhs size mismatch");
    detail::project(rhs, kernel);
    SolveResult out;
    out.x = initial ? std::move(*initial) : Vec(n, 0.0);
    require(out.x.size() == n, "krylov_solve_nonsymmetric: initial guess size mismatch");
    detail::project(out.x, kernel);
    const double bnorm = detail::norm2(rhs);
    if (bnorm == 0.0) {
        out.x.assign(n, 0.0);
        return out;
    }
    const Vec dinv = detail::inverse_diagonal(a);
    auto precondition = [&](const Vec& v) {
        Vec w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = dinv[i] * v[i];
        detail::project(w, kernel);
        return w;
    };
    const int limit = config.iteration_limit(n);
    int it = 0;
    int restarts = 0;
    Vec r = detail::residual(a, out.x, rhs);
    detail::project(r, kernel);
    double rnorm = detail::norm2(r);
    while (rnorm > config.rel_tolerance * bnorm) {
        Vec r_hat = r;
        double rho = 1.0, alpha = 1.0, omega = 1.0;
        Vec v(n, 0.0), p(n, 0.0), s(n), t(n);
        bool breakdown = false;
        while (rnorm > config.rel_tolerance * bnorm) {
            if (it >= limit) throw SolverFailure("krylov_solve_nonsymmetric did not converge", it, rnorm / bnorm);
            const double rho_new = detail::dotp(r_hat, r);
            if (std::abs(rho_new) < 1e-300 || omega == 0.0) {
                breakdown = true;
                break;
            }
            const double beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
            const Vec ph = precondition(p);
            a.multiply(ph, v);
            detail::project(v, kernel);
            const double rv = detail::dotp(r_hat, v);
            if (std::abs(rv) < 1e-300) {
                breakdown = true;
                break;
            }
            alpha = rho / rv;
            for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
            ++it;
            if (detail::norm2(s) <= config.rel_tolerance * bnorm) {
                for (std::size_t i = 0; i < n; ++i) out.x[i] += alpha * ph[i];
                r = s;
                rnorm = detail::norm2(r);
                break;
            }
            const Vec sh = precondition(s);
            a.multiply(sh, t);
            detail::project(t, kernel);
            const double tt = detail::dotp(t, t);
            omega = tt > 0.0 ? detail::dotp(t, s) / tt : 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                out.x[i] += alpha * ph[i] + omega * sh[i];
                r[i] = s[i] - omega * t[i];
            }
            rnorm = detail::norm2(r);
        }
        // restart with a fresh shadow residual on breakdown or to confirm convergence
        r = detail::residual(a, out.x, rhs);
        detail::project(r, kernel);
        rnorm = detail::norm2(r);
        if (breakdown && ++restarts > 20)
            throw SolverFailure("krylov_solve_nonsymmetric: repeated breakdown", it, rnorm / bnorm);
    }
    detail::project(out.x, kernel);
    out.iterations = it;
    out.relative_residual = rnorm / bnorm;
    return out;
}

}  // namespace homlab
