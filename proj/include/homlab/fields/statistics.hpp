#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "homlab/fields/energy_density.hpp"
#include "homlab/fields/random.hpp"

namespace homlab {

namespace detail {

/// Midpoint rule over the cube (-R/2, R/2)^d with `resolution` points per unit length.
template <class F>
double cube_average(int dim, double R, int resolution, F&& f) {
    require(R > 0.0, "window size must be positive");
    require(resolution >= 1, "quadrature resolution must be >= 1");
    const long n = std::max(1L, std::lround(std::ceil(R * resolution)));
    const double h = R / static_cast<double>(n);
    const double lo = -0.5 * R;
    double total = 0.0;
    if (dim == 1) {
        for (long i = 0; i < n; ++i) total += f(Vector2{lo + (i + 0.5) * h, 0.0});
        return total / static_cast<double>(n);
    }
    for (long j = 0; j < n; ++j) {
        double row = 0.0;
        const double y = lo + (j + 0.5) * h;
        for (long i = 0; i < n; ++i) row += f(Vector2{lo + (i + 0.5) * h, y});
        total += row;
    }
    return total / (static_cast<double>(n) * static_cast<double>(n));
}

}  // namespace detail

/// R^{-d} int_{Q_R} sup_{|xi|<=t} |f(y,xi) - g(y,xi)| dy over the centred cube Q_R = (-R/2, R/2)^d.
inline double mean_abs_statistic(const EnergyDensity& f, const EnergyDensity& g, double t, double R, int resolution) {
    require(t > 0.0, "statistic needs t > 0");
    return detail::cube_average(f.dim(), R, resolution, [&](const Vector2& y) { return f.sup_difference(g, y, t); });
}

/// R^{-d} int_{Q_R} (a - b) dy for scalar forms: the signed-mean condition, weaker than the statistic above.
inline double signed_mean_statistic(const EnergyDensity& f, const EnergyDensity& g, double R, int resolution) {
    const auto& a = f.scalar();
    const auto& b = g.scalar();
    require(a.dim() == b.dim(), "signed mean requires equal dimensions");
    return detail::cube_average(a.dim(), R, resolution, [&](const Vector2& y) { return a(y) - b(y); });
}

/// Realization of a random integrand for a given seed.
using EnergyFamily = std::function<EnergyDensity(std::uint64_t seed)>;

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::vector<double> samples;
};

inline MonteCarloEstimate summarize(std::vector<double> samples) {
    require(samples.size() >= 2, "at least two samples are required");
    MonteCarloEstimate m;
    double s = 0.0;
    for (double v : samples) s += v;
    m.mean = s / static_cast<double>(samples.size());
    double q = 0.0;
    for (double v : samples) q += (v - m.mean) * (v - m.mean);
    const double var = q / static_cast<double>(samples.size() - 1);
    m.std_error = std::sqrt(var / static_cast<double>(samples.size()));
    m.samples = std::move(samples);
    return m;
}

/// Monte Carlo mean of mean_abs_statistic over paired realizations: trial i
/// evaluates both families with realization_seed(seed, i).
inline MonteCarloEstimate expectation_statistic(const EnergyFamily& f_family, const EnergyFamily& g_family, double t,
                                                double R, int trials, std::uint64_t seed, int resolution) {
    require(trials >= 2, "expectation statistic needs at least two trials");
    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(trials));
    for (int i = 0; i < trials; ++i) {
        const std::uint64_t s = realization_seed(seed, static_cast<std::uint64_t>(i));
        samples.push_back(mean_abs_statistic(f_family(s), g_family(s), t, R, resolution));
    }
    return summarize(std::move(samples));
}

}  // namespace homlab
