#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "homlab/perforation/perforation.hpp"

using namespace homlab;

namespace {

/// Cells z + [0,1)^d inside (-R/2, R/2)^d whose coordinates are all in {1, 2, 4, ...}.
int removed_cells_in_window(int dim, double R) {
    int per_axis = 0;
    for (int z = 1; z + 1 <= R / 2; z *= 2) ++per_axis;
    return dim == 1 ? per_axis : per_axis * per_axis;
}

}  // namespace

TEST(PerforationSet, ValidatesGeometry) {
    EXPECT_THROW(PerforationSet(3, HoleShape::Ball, 0.2), InvalidArgument);
    EXPECT_THROW(PerforationSet(2, HoleShape::Ball, 0.0), InvalidArgument);
    EXPECT_THROW(PerforationSet(2, HoleShape::Ball, 0.5), InvalidArgument);
    EXPECT_THROW(PerforationSet(2, HoleShape::Ball, 0.3, DecayingShift{0.25, 1.0}), InvalidArgument);
    EXPECT_NO_THROW(PerforationSet(2, HoleShape::Square, 0.3, DecayingShift{0.1, 1.0}));
    EXPECT_EQ(PerforationSet::none(2).hole_volume(), 0.0);
}

TEST(PerforationSet, MembershipAndRemovedCells) {
    const PerforationSet E(2, HoleShape::Ball, 0.25);
    EXPECT_TRUE(E.contains({3.5, -1.5}));
    EXPECT_FALSE(E.contains({3.0, -1.0}));
    EXPECT_TRUE(E.contains_scaled({0.05, 0.05}, 0.1));

    const auto sparse = E.with_perturbation(SparseRemoval{});
    EXPECT_FALSE(sparse.is_periodic());
    EXPECT_FALSE(sparse.contains({4.5, 2.5}));
    EXPECT_FALSE(sparse.contains({1.5, 1.5}));
    EXPECT_TRUE(sparse.contains({3.5, 2.5}));
    EXPECT_TRUE(sparse.contains({-0.5, 1.5}));   // 0 and -1 are not powers of two
    EXPECT_TRUE(sparse.contains({-1.5, -1.5}));
    EXPECT_EQ(sparse.unperturbed(), E);

    const auto shifted = E.with_perturbation(DecayingShift{0.2, 1.0});
    EXPECT_TRUE(shifted.contains({0.7, 0.5}));     // origin cell moves by the full shift
    EXPECT_FALSE(shifted.contains({0.3, 0.5}));
    EXPECT_NEAR(shifted.hole_center(10, 0)[0], 10.6, 1e-12);
}

TEST(Perforation, VolumeFractionMatchesHoleArea) {
    const PerforationSet ball(2, HoleShape::Ball, 0.25);
    EXPECT_NEAR(volume_fraction(ball, 4.0, 64).theta, 1.0 - std::numbers::pi / 16.0, 2e-3);
    const PerforationSet square(2, HoleShape::Square, 0.25);
    EXPECT_NEAR(volume_fraction(square, 4.0, 16).theta, 0.75, 1e-12);
    const PerforationSet line(1, HoleShape::Ball, 0.125);
    EXPECT_NEAR(volume_fraction(line, 8.0, 64).theta, 0.75, 1e-12);
    EXPECT_THROW(volume_fraction(ball, 2.0, 16), InvalidArgument);
}

TEST(Perforation, SymmetricDifferenceCountsRemovedHoles) {
    const PerforationSet E(2, HoleShape::Square, 0.25);
    const auto F = E.with_perturbation(SparseRemoval{});
    for (double R : {8.0, 16.0, 32.0}) {
        const double exact = removed_cells_in_window(2, R) * E.hole_volume() / (R * R);
        EXPECT_NEAR(symmetric_difference_density(E, F, R, 8), exact, 1e-12) << "R = " << R;
    }
    const PerforationSet L(1, HoleShape::Ball, 0.25);
    EXPECT_NEAR(symmetric_difference_density(L, L.with_perturbation(SparseRemoval{}), 64.0, 8),
                removed_cells_in_window(1, 64.0) * 0.5 / 64.0, 1e-12);
    EXPECT_EQ(symmetric_difference_density(E, E, 16.0, 8), 0.0);
}

TEST(Perforation, SparseRemovalKeepsTheVolumeFraction) {
    const PerforationSet E(2, HoleShape::Ball, 0.25);
    const double theta = volume_fraction(E, 64.0, 8).theta;
    EXPECT_NEAR(volume_fraction(E.with_perturbation(SparseRemoval{}), 64.0, 8).theta, theta, 0.01);
}

TEST(Perforation, DecayingShiftDensityIsBelowTheSweptArea) {
    // a ball moved by delta sweeps at most 2 * diameter * delta of area
    const double r = 0.2;
    const PerforationSet E(2, HoleShape::Ball, r);
    const auto F = E.with_perturbation(DecayingShift{0.1, 1.0});
    double previous = 1e300;
    for (double R : {16.0, 32.0, 64.0}) {
        const int h = static_cast<int>(R / 2);
        double swept = 0.0;
        for (int zx = -h; zx < h; ++zx)
            for (int zy = -h; zy < h; ++zy) {
                const double k = std::hypot(zx, zy);
                swept += 4.0 * r * (k == 0.0 ? 0.1 : std::min(0.1, 1.0 / k));
            }
        const double density = symmetric_difference_density(E, F, R, 16);
        EXPECT_LE(density, swept / (R * R) * 1.05) << "R = " << R;
        EXPECT_LT(density, previous);
        previous = density;
    }
}

TEST(Perforation, PenalizedValuesDecreaseTowardsTheMaskedValue) {
    const PerforationSet E(2, HoleShape::Ball, 0.25);
    const Vector2 xi{1.0, 0.0};
    const double masked = masked_cell_value(E, xi, 32);
    double previous = 1e300;
    for (double n : {4.0, 16.0, 64.0}) {
        const double v = penalized_cell_value(E, n, xi, 32);
        EXPECT_GE(v, masked - 1e-10);
        EXPECT_LT(v, previous);
        previous = v;
    }
    EXPECT_LT((previous - masked) / masked, 0.05);
    EXPECT_LT(masked, 1.0 - std::numbers::pi / 16.0 + 1e-9);  // Voigt bound on the complement
}

TEST(Perforation, MaskedCellMatrixIsIsotropicForBallsAndTrivialWithoutHoles) {
    const auto m = masked_cell_matrix(PerforationSet(2, HoleShape::Ball, 0.25), 32);
    EXPECT_NEAR(m[0][0], m[1][1], 1e-9);
    EXPECT_NEAR(m[0][1], 0.0, 1e-9);
    EXPECT_NEAR(masked_cell_value(PerforationSet::none(2), {0.6, 0.8}, 8), 1.0, 1e-12);
}

TEST(Perforation, DisconnectedOrNonPeriodicCellsAreRejected) {
    EXPECT_THROW(masked_cell_value(PerforationSet(2, HoleShape::Ball, 0.25, SparseRemoval{}), {1.0, 0.0}, 16),
                 InvalidArgument);
}

TEST(Perforation, OneDimensionalHolesBlockTheFlux) {
    // the complement of a hole in the periodic line is one interval: the corrector absorbs the whole slope
    EXPECT_NEAR(masked_cell_value(PerforationSet(1, HoleShape::Ball, 0.25), {1.0, 0.0}, 16), 0.0, 1e-10);
}

TEST(Perforation, MaskedWindowWithoutHolesIsAffine) {
    EXPECT_NEAR(masked_window_value(PerforationSet::none(2), {0.0, 0.0}, 4.0, {1.0, 2.0}, 4), 5.0, 1e-12);
    const double w = masked_window_value(PerforationSet(2, HoleShape::Ball, 0.25), {0.0, 0.0}, 4.0, {1.0, 0.0}, 16);
    EXPECT_GT(w, 0.5);
    EXPECT_LT(w, 1.0);
}

TEST(Extension, RatioIsScaleInvariant) {
    auto u = [](const Vector2& x) { return x[0] + 0.3 * x[1] * x[1]; };
    const auto a = extend_over_ball(u, 1.0, 16);
    // u(s x) has the same ratio at scale 1 as u at scale s
    const double s = 0.5;
    const auto b = extend_over_ball([&](const Vector2& x) { return u((1.0 / s) * x); }, s, 16);
    EXPECT_NEAR(a.ratio, b.ratio, 1e-3);
    EXPECT_GT(a.ratio, 0.0);
}

TEST(Extension, ConstantsAndLinearFunctions) {
    const auto c = extend_over_ball([](const Vector2&) { return 2.5; }, 1.0, 8);
    EXPECT_EQ(c.ratio, 0.0);
    EXPECT_NEAR(c.annulus_mean, 2.5, 1e-12);
    for (const auto& [x, v] : c.samples) EXPECT_NEAR(v, 2.5, 1e-12);

    // linear u: the annulus mean is u(0)
    const auto l = extend_over_ball([](const Vector2& x) { return x[0]; }, 1.0, 16);
    EXPECT_NEAR(l.annulus_mean, 0.0, 1e-10);
    EXPECT_TRUE(std::isfinite(l.ratio));
    EXPECT_THROW(extend_over_ball([](const Vector2&) { return 0.0; }, 0.0, 8), InvalidArgument);
}

TEST(Extension, EmpiricalConstantIsReproducible) {
    const double a = empirical_extension_constant(3, 4, 8);
    EXPECT_EQ(a, empirical_extension_constant(3, 4, 8));
    EXPECT_GE(empirical_extension_constant(3, 6, 8), a);  // more test functions can only raise the maximum
}

TEST(LambdaProblem, NoHolesReproducesTheHomogenizedSolution) {
    LambdaProblemConfig cfg;
    cfg.resolution = 16;
    cfg.epsilons = {0.5, 0.25};
    const auto r = lambda_problem_experiment(PerforationSet::none(2), [](const Vector2&) { return 1.0; }, cfg);
    EXPECT_GT(r.hom_norm, 0.0);
    for (const auto& row : r.rows) EXPECT_LT(row.distance, 1e-8);
}

TEST(LambdaProblem, DistanceShrinksWithEpsilon) {
    LambdaProblemConfig cfg;
    cfg.resolution = 64;
    cfg.cell_resolution = 32;
    cfg.epsilons = {0.5, 0.25};
    const auto r = lambda_problem_experiment(PerforationSet(2, HoleShape::Ball, 0.25),
                                             [](const Vector2& x) { return std::exp(-8.0 * dot(x, x)); }, cfg);
    ASSERT_EQ(r.rows.size(), 2u);
    EXPECT_LT(r.rows[1].distance, r.rows[0].distance);
    EXPECT_LT(r.theta, 1.0);
}
