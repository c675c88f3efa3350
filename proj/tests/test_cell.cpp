#include <cmath>

#include <gtest/gtest.h>

#include "homlab/cell/cell_problem.hpp"

using namespace homlab;

TEST(Cell, ConstantCoefficientIsItsOwnLimit) {
    const auto r = homogenize_matrix(CoefficientField::constant(2, 3.0), 8);
    ASSERT_TRUE(r.matrix.has_value());
    EXPECT_NEAR((*r.matrix)[0][0], 3.0, 1e-12);
    EXPECT_NEAR((*r.matrix)[1][1], 3.0, 1e-12);
    EXPECT_NEAR((*r.matrix)[0][1], 0.0, 1e-12);
}

TEST(Cell, LayeredGivesHarmonicAndArithmeticMeans) {
    const auto a = CoefficientField::layered(2, {0.0, 0.25, 0.5}, {1.0, 2.0, 4.0});
    const auto r = homogenize_matrix(a, 16);
    // harmonic mean across the layers, arithmetic mean along them
    const double harmonic = 1.0 / (0.25 / 1.0 + 0.25 / 2.0 + 0.5 / 4.0);
    const double arithmetic = 0.25 * 1.0 + 0.25 * 2.0 + 0.5 * 4.0;
    EXPECT_NEAR((*r.matrix)[0][0], harmonic, 1e-10);
    EXPECT_NEAR((*r.matrix)[1][1], arithmetic, 1e-10);
    EXPECT_NEAR((*r.matrix)[0][1], 0.0, 1e-12);
    EXPECT_LT(r.energy_flux_defect, 1e-10);
    EXPECT_NEAR(homogenized_quadratic_form(r, {1.0, 1.0}), harmonic + arithmetic, 1e-10);
}

TEST(Cell, OneDimensionalHarmonicMean) {
    const auto r = homogenize_matrix(CoefficientField::two_phase(1, 1.0, 4.0), 32);
    EXPECT_NEAR((*r.matrix)[0][0], 1.6, 1e-12);
    EXPECT_EQ(r.dim, 1);
}

TEST(Cell, LayeredDualityIsExact) {
    // the dual layering alpha*beta/a swaps harmonic and arithmetic means
    const auto a = CoefficientField::two_phase(2, 1.0, 4.0);
    const auto ra = homogenize_matrix(a, 16);
    const auto rd = homogenize_matrix(dual_field(a), 16);
    EXPECT_NEAR((*ra.matrix)[0][0] * (*rd.matrix)[1][1], 4.0, 1e-10);
    EXPECT_NEAR((*ra.matrix)[1][1] * (*rd.matrix)[0][0], 4.0, 1e-10);
}

TEST(Cell, CheckerboardDualityProductApproachesAlphaBeta) {
    const auto a = CoefficientField::checkerboard(1.0, 4.0);
    double previous = 1e300;
    for (int n : {16, 32}) {
        const auto ra = homogenize_matrix(a, n);
        const auto rd = homogenize_matrix(dual_field(a), n);
        const double prod = (*ra.matrix)[0][0] * (*rd.matrix)[0][0];
        EXPECT_NEAR(prod, 4.0, 0.15);
        EXPECT_LT(std::abs(prod - 4.0), previous);
        previous = std::abs(prod - 4.0);
        EXPECT_NEAR((*ra.matrix)[0][0], (*ra.matrix)[1][1], 1e-9);  // square symmetry
    }
}

TEST(Cell, ConstantNonsymmetricMatrixIsReproduced) {
    const Matrix2 A{{{2.0, 1.0}, {-1.0, 2.0}}};
    const auto r = homogenize_matrix(MatrixField::constant(2, A), 8);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) EXPECT_NEAR((*r.matrix)[i][j], A[i][j], 1e-12);
    EXPECT_TRUE(r.energy_samples.empty());
}

TEST(Cell, LayeredNonsymmetricMatrixMatchesLaminateFormula) {
    // A(y1) = [[a, b], [c, a]] with a two-valued and b != c constant: the corrector depends on y1 only and
    // A_11 = <1/a>^-1, A_12 = <b/a> A_11, A_21 = <c/a> A_11, A_22 = <a> - <bc/a> + <c/a><b/a> A_11
    const double a1 = 1.0, a2 = 4.0, b = 0.5, c = 0.25;
    MatrixField::Entries e;
    e[0][0] = CoefficientField::two_phase(2, a1, a2);
    e[1][1] = e[0][0];
    e[0][1] = CoefficientField::constant(2, b);
    e[1][0] = CoefficientField::constant(2, c);
    const auto A = MatrixField::entrywise(2, e, FieldBounds{0.5, 4.5});
    EXPECT_FALSE(A.symmetric());
    const auto r = homogenize_matrix(A, 32);
    const double h = 1.0 / (0.5 / a1 + 0.5 / a2);
    const double ba = 0.5 * (b / a1 + b / a2), ca = 0.5 * (c / a1 + c / a2);
    const double bca = 0.5 * (b * c / a1 + b * c / a2);
    EXPECT_NEAR((*r.matrix)[0][0], h, 1e-9);
    EXPECT_NEAR((*r.matrix)[0][1], ba * h, 1e-9);
    EXPECT_NEAR((*r.matrix)[1][0], ca * h, 1e-9);
    EXPECT_NEAR((*r.matrix)[1][1], 0.5 * (a1 + a2) - bca + ca * ba * h, 1e-9);
}

TEST(Cell, PEnergyOneDimensionalClosedForm) {
    // <a^{-1/(p-1)}>^{-(p-1)} |xi|^p
    const auto a = CoefficientField::two_phase(1, 1.0, 4.0);
    for (double p : {2.0, 3.0}) {
        const double m = 0.5 * (1.0 + std::pow(4.0, -1.0 / (p - 1.0)));
        const double exact = std::pow(m, -(p - 1.0)) * std::pow(1.5, p);
        EXPECT_NEAR(homogenize_p_energy(a, p, {1.5, 0.0}, 64), exact, 1e-8) << "p = " << p;
    }
}

TEST(Cell, PEnergyMatchesQuadraticCellForPEqualTwo) {
    const auto a = CoefficientField::checkerboard(1.0, 4.0);
    const auto r = homogenize_matrix(a, 16);
    const Vector2 xi{0.6, 0.8};
    EXPECT_NEAR(homogenize_p_energy(a, 2.0, xi, 16), homogenized_quadratic_form(r, xi), 1e-8);
}

TEST(Cell, ThreadCountDoesNotChangeResults) {
    CellOptions one, four;
    four.threads = 4;
    const auto a = CoefficientField::checkerboard(1.0, 3.0);
    EXPECT_EQ(*homogenize_matrix(a, 16, one).matrix, *homogenize_matrix(a, 16, four).matrix);
}

TEST(Cell, NonPeriodicFieldNeedsAnExplicitPeriod) {
    const auto h = CoefficientField::half_space_step(2, 2.0, 0.5);
    EXPECT_THROW(homogenize_matrix(h, 8), InvalidArgument);
    CellOptions o;
    o.period = 4;
    o.origin = {-2.0, -2.0};
    EXPECT_NO_THROW(homogenize_matrix(h, 4, o));
}

TEST(Cell, RationalTrigFieldUsesItsPeriod) {
    const auto t = CoefficientField::trig_clamped(2, 2.0, {{0.5, {0.5, 0.0}, 0.0}}, FieldBounds{1.0, 3.0});
    const auto r = homogenize_matrix(t, 16);
    EXPECT_EQ(r.cell_period, 2);
    // the field depends on y1 only: harmonic mean across, arithmetic mean along
    EXPECT_NEAR((*r.matrix)[1][1], 2.0, 1e-9);
    EXPECT_NEAR((*r.matrix)[0][0], std::sqrt(4.0 - 0.25), 2e-3);
}

TEST(Cell, DualFieldRejectsUnsupportedKinds) {
    EXPECT_THROW(dual_field(CoefficientField::half_space_step(1, 2.0, 0.5)), InvalidArgument);
}
