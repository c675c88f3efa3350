#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "homlab/fields/energy_density.hpp"
#include "homlab/fields/sampling.hpp"
#include "homlab/numerics/krylov.hpp"
#include "homlab/numerics/p_energy.hpp"
#include "homlab/numerics/parallel.hpp"

namespace homlab {

struct SolveDiagnostics {
    std::string stage;
    int iterations = 0;
    double residual = 0.0;
};

/// Homogenized matrix (from flux averages) and/or sampled energy values.
struct HomogenizedResult {
    int dim = 1;
    std::optional<Matrix2> matrix;
    std::vector<std::pair<Vector2, double>> energy_samples;
    int resolution = 0;
    int cell_period = 1;
    std::string field_id;
    std::vector<SolveDiagnostics> residuals;
    /// max_i |energy(e_i) - flux(e_i) . e_i| on the symmetric path, 0 otherwise.
    double energy_flux_defect = 0.0;
};

struct CellOptions {
    SolverConfig solver;
    int threads = 1;
    /// Cell side; defaults to the field's integer period.
    std::optional<int> period;
    /// Lower corner of the cell. Periodizing a non-periodic field on a centred torus uses (-R/2, ..., -R/2).
    Vector2 origin{};
};

namespace detail {

inline int cell_period(std::optional<int> requested, std::optional<int> field_period) {
    if (requested) {
        require(*requested >= 1, "cell period must be >= 1");
        return *requested;
    }
    require(field_period.has_value(), "cell problem needs an integer-periodic field");
    return *field_period;
}

inline Grid cell_grid(int dim, int resolution, int period, Vector2 origin = {}) {
    require(resolution >= 1 && resolution * period >= 2, "cell grid needs at least two elements per axis");
    if (dim == 1) origin[1] = 0.0;
    return build_grid(dim, resolution * period, origin, static_cast<double>(period), Topology::Torus);
}

}  // namespace detail

/// Periodic corrector w_i for each basis vector: int <A(e_i + grad w_i), grad phi> = 0 for all periodic phi.
/// Column i of the result is the cell average of A(e_i + grad w_i).
inline HomogenizedResult homogenize_matrix(const MatrixField& A, int resolution, const CellOptions& options = {}) {
    options.solver.validate();
    const int period = detail::cell_period(options.period, A.integer_period());
    const Grid g = detail::cell_grid(A.dim(), resolution, period, options.origin);
    const ElementCoefficients c = sample_elements(g, A);
    const SparseSystem K = assemble_diffusion(g, c);
    const int d = A.dim();

    struct Column {
        Vector2 flux{};
        double energy = 0.0;
        SolveResult solve;
    };
    const auto columns = parallel_map(std::size_t(d), options.threads, [&](std::size_t i) {
        Vector2 e{};
        e[i] = 1.0;
        const Vec b = assemble_affine_load(g, c, e);
        Column col;
        col.solve = K.symmetric() ? cg_solve(K, b, options.solver, Kernel::Constants)
                                  : krylov_solve_nonsymmetric(K, b, options.solver, Kernel::Constants);
        col.flux = average_flux(g, c, col.solve.x, e);
        if (K.symmetric()) col.energy = quadratic_energy(g, c, col.solve.x, e) / g.domain_volume();
        return col;
    });

    HomogenizedResult r;
    r.dim = d;
    r.resolution = resolution;
    r.cell_period = period;
    r.field_id = A.id();
    Matrix2 m = zero_matrix();
    for (int i = 0; i < d; ++i) {
        for (int k = 0; k < d; ++k) m[k][i] = columns[i].flux[k];
        r.residuals.push_back({"corrector e" + std::to_string(i + 1), columns[i].solve.iterations,
                               columns[i].solve.relative_residual});
        if (K.symmetric()) {
            Vector2 e{};
            e[i] = 1.0;
            r.energy_samples.emplace_back(e, columns[i].energy);
            r.energy_flux_defect = std::max(r.energy_flux_defect, std::abs(columns[i].energy - m[i][i]));
        }
    }
    if (K.symmetric() && r.energy_flux_defect > 1e-8 * std::max(1.0, max_abs_entry(m, d)))
        throw SolverFailure("cell energy and flux disagree", 0, r.energy_flux_defect);
    r.matrix = m;
    return r;
}

inline HomogenizedResult homogenize_matrix(const CoefficientField& a, int resolution, const CellOptions& options = {}) {
    return homogenize_matrix(MatrixField::isotropic(a), resolution, options);
}

/// min over periodic u of the cell average of a(y) |xi + grad u|^p.
inline double homogenize_p_energy(const CoefficientField& a, double p, const Vector2& xi, int resolution,
                                  const CellOptions& options = {}) {
    options.solver.validate();
    const int period = detail::cell_period(options.period, a.integer_period());
    const Grid g = detail::cell_grid(a.dim(), resolution, period, options.origin);
    const auto energy = PEnergyFunctional::periodic(g, sample_elements(g, a), p, xi);
    const auto r = minimize_p_energy(energy, Vec(energy.size(), 0.0), options.solver);
    return r.energy / g.domain_volume();
}

/// <M xi, xi> for a result holding a matrix.
inline double homogenized_quadratic_form(const HomogenizedResult& result, const Vector2& xi) {
    require(result.matrix.has_value(), "result holds no matrix");
    Vector2 x = xi;
    if (result.dim == 1) x[1] = 0.0;
    return dot(matvec(*result.matrix, x), x);
}

/// Dual coefficient alpha*beta/a of a piecewise-constant periodic field.
inline CoefficientField dual_field(const CoefficientField& a) {
    const double ab = a.bounds().alpha * a.bounds().beta;
    const FieldBounds b{a.bounds().alpha, a.bounds().beta, a.bounds().p};
    auto invert = [&](std::vector<double> v) {
        for (double& x : v) x = ab / x;
        return v;
    };
    if (const auto* k = std::get_if<field_kind::Constant>(&a.kind())) return CoefficientField::constant(a.dim(), ab / k->value, b);
    if (const auto* k = std::get_if<field_kind::Layered1D>(&a.kind()))
        return CoefficientField::layered(a.dim(), k->breakpoints, invert(k->values), b);
    if (const auto* k = std::get_if<field_kind::PeriodicStep>(&a.kind()))
        return CoefficientField::periodic_step(a.dim(), k->cells, invert(k->values), b);
    throw InvalidArgument("dual field needs a constant, layered or periodic step field");
}

}  // namespace homlab
