#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "homlab/fields/energy_density.hpp"
#include "homlab/fields/sampling.hpp"
#include "homlab/fields/statistics.hpp"
#include "homlab/numerics/grid.hpp"

using namespace homlab;

TEST(Bounds, InvalidBoundsAreNamed) {
    try {
        CoefficientField::constant(1, 2.0, FieldBounds{3.0, 1.0});
        FAIL();
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("bounds"), std::string::npos);
    }
    EXPECT_THROW(CoefficientField::constant(1, 5.0, FieldBounds{1.0, 4.0}), InvalidArgument);
    EXPECT_THROW(CoefficientField::constant(3, 1.0), InvalidArgument);
}

TEST(Fields, LayeredAndPeriodicStepValues) {
    const auto a = CoefficientField::two_phase(2, 1.0, 4.0);
    EXPECT_DOUBLE_EQ(a({0.25, 7.3}), 1.0);
    EXPECT_DOUBLE_EQ(a({0.75, -2.0}), 4.0);
    EXPECT_DOUBLE_EQ(a({-0.25, 0.0}), 4.0);  // periodic continuation
    EXPECT_EQ(a.integer_period(), 1);

    const auto c = CoefficientField::checkerboard(1.0, 4.0);
    EXPECT_DOUBLE_EQ(c({0.25, 0.25}), 1.0);
    EXPECT_DOUBLE_EQ(c({0.75, 0.25}), 4.0);
    EXPECT_DOUBLE_EQ(c({0.25, 0.75}), 4.0);
    EXPECT_DOUBLE_EQ(c({1.75, -0.25}), 1.0);
}

TEST(Fields, TrigFieldIsClampedAndRationalPeriodic) {
    const FieldBounds b{1.0, 3.0};
    const auto t = CoefficientField::trig_clamped(2, 2.0, {{2.0, {1.0, 0.0}, 0.0}}, b);
    EXPECT_DOUBLE_EQ(t({0.25, 0.0}), 3.0);  // 2 + 2 clamped to beta
    EXPECT_DOUBLE_EQ(t({0.75, 0.0}), 1.0);
    EXPECT_NEAR(t({1.0 / 12.0, 0.0}), 3.0, 1e-12);
    EXPECT_EQ(t.integer_period(), 1);
    const auto r = CoefficientField::trig_clamped(2, 2.0, {{0.5, {1.5, 0.0}, 0.0}}, b);
    EXPECT_EQ(r.integer_period(), 2);
    const auto q = CoefficientField::trig_clamped(2, 2.0, {{0.5, {std::sqrt(2.0), 0.0}, 0.0}}, b);
    EXPECT_FALSE(q.integer_period().has_value());
}

TEST(Fields, HalfSpaceStep) {
    const auto h = CoefficientField::half_space_step(2, 2.0, 0.5);
    EXPECT_DOUBLE_EQ(h({3.0, -1.0}), 2.5);
    EXPECT_DOUBLE_EQ(h({-3.0, 1.0}), 1.5);
    EXPECT_FALSE(h.integer_period().has_value());
    EXPECT_DOUBLE_EQ(h.bounds().alpha, 1.5);
    EXPECT_DOUBLE_EQ(h.bounds().beta, 2.5);
}

TEST(Fields, RandomCheckerboardIsReproducibleAndStationary) {
    const auto a = CoefficientField::random_checkerboard(2, 1.0, 4.0, 0.5, 11);
    const auto b = CoefficientField::random_checkerboard(2, 1.0, 4.0, 0.5, 11);
    const auto c = CoefficientField::random_checkerboard(2, 1.0, 4.0, 0.5, 12);
    int high = 0, differ = 0, total = 0;
    for (int i = -20; i < 20; ++i)
        for (int j = -20; j < 20; ++j) {
            const Vector2 y{i + 0.3, j + 0.6};
            EXPECT_EQ(a(y), b(y));
            EXPECT_EQ(a(y), a({i + 0.9, j + 0.1}));  // constant on unit cells
            EXPECT_TRUE(a(y) == 1.0 || a(y) == 4.0);
            EXPECT_EQ(a.shifted(3, -2)(y), a({y[0] + 3.0, y[1] - 2.0}));
            high += a(y) == 4.0;
            differ += a(y) != c(y);
            ++total;
        }
    // 1600 Bernoulli(1/2) cells: five standard deviations is 100
    EXPECT_NEAR(high, total / 2, 100);
    EXPECT_NEAR(differ, total / 2, 100);
}

TEST(Fields, RealizationSeedsAreDistinct) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(realization_seed(42, i));
    EXPECT_EQ(seen.size(), 1000u);
    EXPECT_EQ(realization_seed(42, 5), realization_seed(42, 5));
}

namespace {

bool power_of_two(long z) { return z > 0 && (z & (z - 1)) == 0; }

// cells z with z + [0,1)^d inside (-R/2, R/2)^d and all coordinates powers of two
long power_of_two_cells(int dim, long R) {
    long count = 0;
    for (long x = -R / 2; x < R / 2; ++x) {
        if (!power_of_two(x)) continue;
        if (dim == 1) {
            ++count;
            continue;
        }
        for (long y = -R / 2; y < R / 2; ++y) count += power_of_two(y);
    }
    return count;
}

}  // namespace

TEST(Perturbation, PowerOfTwoCellsStatisticMatchesCellCount) {
    for (int dim : {1, 2}) {
        const auto base = dim == 2 ? CoefficientField::checkerboard(1.0, 4.0) : CoefficientField::two_phase(1, 1.0, 4.0);
        const auto g = CoefficientField::perturbed(base, {PowerOfTwoCells{1.0}, 1.0}, 1.0, PerturbationMode::Add,
                                                   FieldBounds{1.0, 5.0});
        const auto ef = EnergyDensity::quadratic(base.with_bounds({1.0, 5.0}));
        const auto eg = EnergyDensity::quadratic(g);
        double previous = 1e300;
        for (long R : {8L, 16L, 32L, 64L}) {
            const double s = mean_abs_statistic(ef, eg, 1.0, double(R), 4);
            const double oracle = double(power_of_two_cells(dim, R)) / std::pow(double(R), dim);
            EXPECT_NEAR(s, oracle, 1e-12) << "dim " << dim << " R " << R;
            EXPECT_LT(s, previous);
            previous = s;
        }
    }
}

TEST(Perturbation, PowerOfTwoCellCounts) {
    EXPECT_EQ(power_of_two_cells(2, 8), 4);    // {1,2}^2
    EXPECT_EQ(power_of_two_cells(2, 16), 9);   // {1,2,4}^2
    EXPECT_EQ(power_of_two_cells(1, 64), 5);   // 1,2,4,8,16
    const SparsePerturbationRule rule{PowerOfTwoCells{1.0}, 1.0};
    EXPECT_EQ(rule({4.5, 2.5}, 2), 1.0);
    EXPECT_EQ(rule({-4.5, 2.5}, 2), 0.0);
    EXPECT_EQ(rule({3.5, 2.5}, 2), 0.0);
    EXPECT_EQ(rule({0.5, 1.5}, 2), 0.0);
}

TEST(Perturbation, EveryRuleHasVanishingMean) {
    const auto base = CoefficientField::constant(2, 2.0, FieldBounds{1.0, 4.0});
    for (const PerturbationSupport& s :
         {PerturbationSupport{BallSupport{3.0}}, PerturbationSupport{PowerOfTwoCells{0.5}},
          PerturbationSupport{LpDecay{3.0}}}) {
        const auto g = CoefficientField::perturbed(base, {s, 1.0});
        std::vector<double> v;
        for (double R : {8.0, 16.0, 32.0, 64.0})
            v.push_back(mean_abs_statistic(EnergyDensity::quadratic(base), EnergyDensity::quadratic(g), 1.0, R, 4));
        for (std::size_t i = 1; i < v.size(); ++i) EXPECT_LT(v[i], v[i - 1]);
        EXPECT_LT(v.back(), 0.5 * v.front());
    }
}

TEST(Perturbation, FlipSwapsPhasesInsideTheSupport) {
    const auto base = CoefficientField::two_phase(1, 1.0, 4.0);
    const auto g = CoefficientField::perturbed(base, {BallSupport{2.0}, 1.0}, 1.0, PerturbationMode::Flip);
    EXPECT_DOUBLE_EQ(g({0.25, 0.0}), 4.0);
    EXPECT_DOUBLE_EQ(g({0.75, 0.0}), 1.0);
    EXPECT_DOUBLE_EQ(g({5.25, 0.0}), 1.0);
}

TEST(Statistic, ScalesWithTSquaredAndTToThePForPowerEnergies) {
    const auto a = CoefficientField::two_phase(2, 1.0, 4.0);
    const auto b = CoefficientField::constant(2, 2.0, FieldBounds{1.0, 4.0});
    const auto fa = EnergyDensity::quadratic(a), fb = EnergyDensity::quadratic(b);
    const double s1 = mean_abs_statistic(fa, fb, 1.0, 8.0, 4);
    EXPECT_NEAR(s1, 1.5, 1e-12);  // (|1-2| + |4-2|) / 2
    EXPECT_NEAR(mean_abs_statistic(fa, fb, 3.0, 8.0, 4), 9.0 * s1, 1e-12);
    const auto pa = EnergyDensity::p_power(a, 3.0), pb = EnergyDensity::p_power(b, 3.0);
    EXPECT_NEAR(mean_abs_statistic(pa, pb, 2.0, 8.0, 4), 8.0 * s1, 1e-12);
    EXPECT_THROW(mean_abs_statistic(fa, pb, 1.0, 8.0, 4), InvalidArgument);
}

TEST(Statistic, MatrixFormsUseTheSpectralRadius) {
    Matrix2 A{{{2.0, 1.0}, {-1.0, 2.0}}};
    Matrix2 B{{{1.0, 0.0}, {0.0, 3.0}}};
    const auto f = EnergyDensity::quadratic(MatrixField::constant(2, A));
    const auto g = EnergyDensity::quadratic(MatrixField::constant(2, B));
    // sym(A - B) = diag(1, -1): sup over the unit ball of |<(A-B) xi, xi>| is 1
    EXPECT_NEAR(mean_abs_statistic(f, g, 2.0, 4.0, 2), 4.0, 1e-12);
}

TEST(Statistic, SignedMeanCancelsWhereTheAbsoluteMeanDoesNot) {
    const auto a = CoefficientField::two_phase(1, 1.0, 4.0);
    const auto b = CoefficientField::two_phase(1, 4.0, 1.0);
    const auto fa = EnergyDensity::quadratic(a), fb = EnergyDensity::quadratic(b);
    EXPECT_NEAR(signed_mean_statistic(fa, fb, 8.0, 8), 0.0, 1e-12);
    EXPECT_NEAR(mean_abs_statistic(fa, fb, 1.0, 8.0, 8), 3.0, 1e-12);
}

TEST(Statistic, ExpectationUsesPairedSeeds) {
    const EnergyFamily f = [](std::uint64_t s) {
        return EnergyDensity::quadratic(CoefficientField::random_checkerboard(2, 1.0, 4.0, 0.5, s));
    };
    const auto e = expectation_statistic(f, f, 1.0, 8.0, 4, 9, 2);
    EXPECT_EQ(e.mean, 0.0);
    EXPECT_EQ(e.std_error, 0.0);
    EXPECT_THROW(expectation_statistic(f, f, 1.0, 8.0, 1, 9, 2), InvalidArgument);
}

TEST(Sampling, ElementCentresDetermineCoefficients) {
    const Grid g = build_grid(2, 4, {}, 1.0, Topology::Torus);
    const auto v = sample_elements(g, CoefficientField::checkerboard(1.0, 4.0));
    EXPECT_EQ(v[0], 1.0);   // (0,0) element
    EXPECT_EQ(v[2], 4.0);   // x in [0.5, 0.75)
    EXPECT_EQ(v[15], 1.0);  // (0.875, 0.875)
    const auto m = sample_elements(g, MatrixField::constant(2, Matrix2{{{2.0, 1.0}, {-1.0, 2.0}}}));
    EXPECT_FALSE(m.symmetric(2));
}

TEST(MatrixFields, NaturalBoundsAndSymmetry) {
    const auto A = MatrixField::constant(2, Matrix2{{{2.0, 1.0}, {-1.0, 2.0}}});
    EXPECT_FALSE(A.symmetric());
    EXPECT_NEAR(A.bounds().alpha, 2.0, 1e-12);  // <A xi, xi> = 2 |xi|^2
    EXPECT_TRUE(A.is_constant());
    EXPECT_EQ(A.integer_period(), 1);
}
