#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "homlab/cell/cell_problem.hpp"
#include "homlab/fields/statistics.hpp"
#include "homlab/rve/window.hpp"

namespace homlab {

enum class Conclusion {
    ConditionHoldsLimitsAgree,
    ConditionFailsLimitsAgree,
    ConditionFailsLimitsDiffer,
    /// Contradicts the stability theorem; always emitted with soundness_violation set.
    ConditionHoldsLimitsDiffer,
};

inline std::string to_string(Conclusion c) {
    switch (c) {
        case Conclusion::ConditionHoldsLimitsAgree: return "ConditionHoldsLimitsAgree";
        case Conclusion::ConditionFailsLimitsAgree: return "ConditionFailsLimitsAgree";
        case Conclusion::ConditionFailsLimitsDiffer: return "ConditionFailsLimitsDiffer";
        case Conclusion::ConditionHoldsLimitsDiffer: return "ConditionHoldsLimitsDiffer";
    }
    return "unknown";
}

/// Psi(R) for one value of t.
struct StatisticTrace {
    double t = 1.0;
    std::vector<double> windows;
    std::vector<double> values;
};

/// Trend test for a sequence that should vanish: strictly decreasing over the last three
/// entries with the final value below half the first, or identically zero to rounding.
inline bool vanishing_trend(const std::vector<double>& v, double zero = 1e-12) {
    require(v.size() >= 3, "trend test needs at least three values");
    if (std::all_of(v.begin(), v.end(), [&](double x) { return std::abs(x) <= zero; })) return true;
    const std::size_t n = v.size();
    return v[n - 1] < v[n - 2] && v[n - 2] < v[n - 3] && v[n - 1] < 0.5 * v[0];
}

enum class HomogenizationMethod { Auto, Cell, Window };

struct StabilityConfig {
    /// Empty selects {1} for quadratic forms and {1, 2} for p-energies.
    std::vector<double> t_list;
    std::vector<double> statistic_windows{8.0, 16.0, 32.0, 64.0};
    int statistic_resolution = 8;

    HomogenizationMethod method = HomogenizationMethod::Auto;
    int cell_resolution = 64;
    std::vector<double> window_sizes{4.0, 8.0, 16.0};
    int window_resolution = 8;
    /// Window centres; more than one centre also tests that each field's window limit is centre-independent.
    std::vector<Vector2> centers{{0.0, 0.0}};
    /// Empty selects e1 in 1D and e1, e2, (e1 + e2)/sqrt(2) in 2D.
    std::vector<Vector2> sample_xi;
    /// Fixed comparison tolerance; by default 3x the observed resolution gap (at least 1e-6).
    std::optional<double> tolerance;

    SolverConfig solver;
    int threads = 1;
};

struct StabilityReport {
    std::string name;
    std::string f_id, g_id;
    std::vector<StatisticTrace> statistic_traces;
    /// R^{-d} int_{Q_R} (a - b) over the statistic windows (scalar forms only).
    std::vector<double> signed_mean_trace;
    bool condition_vanishing = false;

    HomogenizationMethod method = HomogenizationMethod::Cell;
    std::optional<HomogenizedResult> homogenized_f, homogenized_g;
    std::vector<WindowEstimate> windows_f, windows_g;
    /// Window method: discrepancy per window size.
    std::vector<double> discrepancy_trace;
    double discrepancy = 0.0;
    double tolerance = 0.0;
    bool limits_agree = false;
    /// Window method: whether each field's window values agree across centres.
    bool f_center_independent = true, g_center_independent = true;

    Conclusion conclusion = Conclusion::ConditionFailsLimitsDiffer;
    bool soundness_violation = false;
    std::string diagnostic;
};

namespace detail {

inline std::vector<double> default_t_list(const EnergyDensity& f) {
    return f.exponent() == 2.0 ? std::vector<double>{1.0} : std::vector<double>{1.0, 2.0};
}

inline std::vector<Vector2> default_xi(int dim) {
    if (dim == 1) return {{1.0, 0.0}};
    const double s = std::sqrt(0.5);
    return {{1.0, 0.0}, {0.0, 1.0}, {s, s}};
}

inline bool is_periodic(const EnergyDensity& f) {
    if (f.is_matrix()) return f.matrix().integer_period().has_value();
    return f.scalar().integer_period().has_value();
}

inline std::optional<int> common_period(const EnergyDensity& f, const EnergyDensity& g) {
    auto period = [](const EnergyDensity& e) {
        return e.is_matrix() ? e.matrix().integer_period() : e.scalar().integer_period();
    };
    const auto a = period(f), b = period(g);
    if (!a || !b) return std::nullopt;
    return std::lcm(*a, *b);
}

/// Homogenized energy values at the sample xi: <A_hom xi, xi> for quadratic forms, f_hom(xi) for p-energies.
struct CellEvaluation {
    HomogenizedResult result;
    std::vector<double> values;
};

inline CellEvaluation evaluate_cell(const EnergyDensity& f, const std::vector<Vector2>& xis, int resolution,
                                    int period, const StabilityConfig& cfg) {
    CellOptions opt;
    opt.solver = cfg.solver;
    opt.threads = cfg.threads;
    opt.period = period;
    CellEvaluation ev;
    if (const auto* pp = std::get_if<energy_form::PPower>(&f.form())) {
        ev.result.dim = f.dim();
        ev.result.resolution = resolution;
        ev.result.cell_period = period;
        ev.result.field_id = f.id();
        for (const auto& xi : xis) {
            const double v = homogenize_p_energy(pp->a, pp->p, xi, resolution, opt);
            ev.result.energy_samples.emplace_back(xi, v);
            ev.values.push_back(v);
        }
        return ev;
    }
    ev.result = homogenize_matrix(f.matrix(), resolution, opt);
    for (const auto& xi : xis) ev.values.push_back(homogenized_quadratic_form(ev.result, xi));
    return ev;
}

/// max over xi of |a - b| / |xi|^p, plus the matrix entry difference when both results hold matrices.
inline double value_discrepancy(const std::vector<double>& a, const std::vector<double>& b,
                                const std::vector<Vector2>& xis, double p) {
    double d = 0.0;
    for (std::size_t i = 0; i < xis.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]) / std::pow(norm(xis[i]), p));
    return d;
}

inline double matrix_discrepancy(const HomogenizedResult& a, const HomogenizedResult& b) {
    if (!a.matrix || !b.matrix) return 0.0;
    return max_abs_entry(*a.matrix - *b.matrix, a.dim);
}

}  // namespace detail

/// Evaluates the averaged stability statistic for (f, g), homogenizes both, and classifies the pair.
inline StabilityReport run_stability_pair(const EnergyDensity& f, const EnergyDensity& g, const StabilityConfig& cfg,
                                          std::string name = "pair") {
    require(f.form().index() == g.form().index(), "stability pair must share the energy form");
    require(f.dim() == g.dim(), "stability pair must share the dimension");
    require(f.exponent() == g.exponent(), "stability pair must share the exponent");
    require(cfg.statistic_windows.size() >= 3, "statistic needs at least three windows");
    StabilityReport rep;
    rep.name = std::move(name);
    rep.f_id = f.id();
    rep.g_id = g.id();
    const int d = f.dim();
    const double p = f.exponent();

    // condition
    const auto ts = cfg.t_list.empty() ? detail::default_t_list(f) : cfg.t_list;
    rep.condition_vanishing = true;
    for (double t : ts) {
        StatisticTrace tr;
        tr.t = t;
        tr.windows = cfg.statistic_windows;
        for (double R : cfg.statistic_windows) tr.values.push_back(mean_abs_statistic(f, g, t, R, cfg.statistic_resolution));
        rep.condition_vanishing = rep.condition_vanishing && vanishing_trend(tr.values);
        rep.statistic_traces.push_back(std::move(tr));
    }
    if (!f.is_matrix())
        for (double R : cfg.statistic_windows)
            rep.signed_mean_trace.push_back(signed_mean_statistic(f, g, R, cfg.statistic_resolution));

    // limits
    const auto xis = cfg.sample_xi.empty() ? detail::default_xi(d) : cfg.sample_xi;
    const auto period = detail::common_period(f, g);
    HomogenizationMethod method = cfg.method;
    if (method == HomogenizationMethod::Auto) method = period ? HomogenizationMethod::Cell : HomogenizationMethod::Window;
    rep.method = method;

    if (method == HomogenizationMethod::Cell) {
        require(period.has_value(), "cell comparison needs periodic fields");
        const int n = cfg.cell_resolution;
        require(n >= 4 && n % 2 == 0, "cell resolution must be even and >= 4");
        const auto ef = detail::evaluate_cell(f, xis, n, *period, cfg);
        const auto eg = detail::evaluate_cell(g, xis, n, *period, cfg);
        const auto ef2 = detail::evaluate_cell(f, xis, n / 2, *period, cfg);
        const auto eg2 = detail::evaluate_cell(g, xis, n / 2, *period, cfg);
        rep.discrepancy = std::max(detail::value_discrepancy(ef.values, eg.values, xis, p),
                                   detail::matrix_discrepancy(ef.result, eg.result));
        const double gap = std::max({detail::value_discrepancy(ef.values, ef2.values, xis, p),
                                     detail::value_discrepancy(eg.values, eg2.values, xis, p),
                                     detail::matrix_discrepancy(ef.result, ef2.result),
                                     detail::matrix_discrepancy(eg.result, eg2.result)});
        rep.tolerance = cfg.tolerance.value_or(std::max(3.0 * gap, 1e-6));
        rep.limits_agree = rep.discrepancy <= rep.tolerance;
        rep.homogenized_f = ef.result;
        rep.homogenized_g = eg.result;
    } else {
        require(!cfg.centers.empty(), "window comparison needs at least one centre");
        WindowOptions wo;
        wo.solver = cfg.solver;
        wo.threads = cfg.threads;
        const std::size_t nR = cfg.window_sizes.size();
        rep.discrepancy_trace.assign(nR, 0.0);
        double cauchy = 0.0;
        for (const auto& c : cfg.centers)
            for (const auto& xi : xis) {
                auto wf = window_sequence(f, c, xi, cfg.window_sizes, cfg.window_resolution, wo);
                auto wg = window_sequence(g, c, xi, cfg.window_sizes, cfg.window_resolution, wo);
                const double scale = std::pow(norm(xi), p);
                for (std::size_t k = 0; k < nR; ++k)
                    rep.discrepancy_trace[k] =
                        std::max(rep.discrepancy_trace[k], std::abs(wf.values[k] - wg.values[k]) / scale);
                cauchy = std::max({cauchy, wf.cauchy_gap / scale, wg.cauchy_gap / scale});
                rep.windows_f.push_back(std::move(wf));
                rep.windows_g.push_back(std::move(wg));
            }
        rep.discrepancy = rep.discrepancy_trace.back();
        rep.tolerance = cfg.tolerance.value_or(std::max(3.0 * cauchy, 1e-6));
        // centre independence of each field's largest-window value, per xi
        const std::size_t nx = xis.size();
        for (std::size_t ci = 1; ci < cfg.centers.size(); ++ci)
            for (std::size_t x = 0; x < nx; ++x) {
                const double scale = std::pow(norm(xis[x]), p);
                const auto& f0 = rep.windows_f[x];
                const auto& g0 = rep.windows_g[x];
                const auto& fc = rep.windows_f[ci * nx + x];
                const auto& gc = rep.windows_g[ci * nx + x];
                if (std::abs(fc.last() - f0.last()) / scale > rep.tolerance) rep.f_center_independent = false;
                if (std::abs(gc.last() - g0.last()) / scale > rep.tolerance) rep.g_center_independent = false;
            }
        const bool trace_vanishes = nR >= 3 && vanishing_trend(rep.discrepancy_trace);
        rep.limits_agree = rep.f_center_independent && rep.g_center_independent &&
                           (rep.discrepancy <= rep.tolerance || trace_vanishes);
    }

    if (rep.condition_vanishing && rep.limits_agree) {
        rep.conclusion = Conclusion::ConditionHoldsLimitsAgree;
    } else if (rep.condition_vanishing) {
        rep.conclusion = Conclusion::ConditionHoldsLimitsDiffer;
        rep.soundness_violation = true;
        std::ostringstream os;
        os << "numerical failure: vanishing statistic but homogenized outputs differ (discrepancy " << rep.discrepancy
           << " > tolerance " << rep.tolerance << ")";
        rep.diagnostic = os.str();
    } else {
        rep.conclusion = rep.limits_agree ? Conclusion::ConditionFailsLimitsAgree : Conclusion::ConditionFailsLimitsDiffer;
    }
    if (!rep.f_center_independent) rep.diagnostic += (rep.diagnostic.empty() ? "" : "; ") + std::string("f window limits depend on the centre");
    if (!rep.g_center_independent) rep.diagnostic += (rep.diagnostic.empty() ? "" : "; ") + std::string("g window limits depend on the centre");
    return rep;
}

// -- approximation by periodic fields ------------------------------------------

/// Continued-fraction convergents p_k / q_k of x for k = 0..count-1 (stops early at exact rationals).
inline std::vector<std::pair<long, long>> convergents(double x, int count) {
    require(std::isfinite(x), "convergents of a non-finite value");
    std::vector<std::pair<long, long>> out;
    long p_prev = 1, q_prev = 0;
    long p = static_cast<long>(std::floor(x)), q = 1;
    double rest = x - std::floor(x);
    out.emplace_back(p, q);
    while (static_cast<int>(out.size()) < count && std::abs(rest) > 1e-12) {
        const double inv = 1.0 / rest;
        const long a = static_cast<long>(std::floor(inv));
        rest = inv - std::floor(inv);
        const long pn = a * p + p_prev, qn = a * q + q_prev;
        p_prev = p;
        q_prev = q;
        p = pn;
        q = qn;
        out.emplace_back(p, q);
    }
    return out;
}

struct ApproximationEntry {
    int j = 0;
    std::string description;
    int period = 1;
    HomogenizedResult homogenized;
    double value = 0.0;      // <g^j_hom xi, xi>
    double statistic = 0.0;  // mean_abs_statistic(f, g^j) at the largest window
};

struct ApproximationTrace {
    std::vector<ApproximationEntry> entries;
    WindowEstimate window_f;
    /// |g^j_hom - g^{j-1}_hom| relative to the latest value, for j >= 1.
    std::vector<double> cauchy;
    bool approximates = false;
};

struct ApproximationConfig {
    Vector2 xi{1.0, 0.0};
    int cell_resolution = 32;
    std::vector<double> window_sizes{64.0, 128.0, 256.0};
    int window_resolution = 16;
    int statistic_resolution = 16;
    int max_period = 4096;
    SolverConfig solver;
    int threads = 1;
};

/// g^j: the trig field with every frequency component replaced by its j-th convergent.
inline CoefficientField rational_truncation(const CoefficientField& f, int j) {
    const auto* k = std::get_if<field_kind::TrigPolynomialClamped>(&f.kind());
    require(k != nullptr, "approximation scheme needs a clamped trigonometric field");
    std::vector<field_kind::TrigTerm> terms;
    for (const auto& t : k->terms) {
        if (t.amplitude == 0.0) continue;
        auto r = t;
        for (int i = 0; i < f.dim(); ++i) {
            const auto cv = convergents(t.frequency[i], j + 1);
            r.frequency[i] = static_cast<double>(cv.back().first) / static_cast<double>(cv.back().second);
        }
        terms.push_back(r);
    }
    return CoefficientField::trig_clamped(f.dim(), k->offset, std::move(terms), f.bounds())
        .with_id(f.id() + "/j=" + std::to_string(j));
}

/// Cell solves on the periodic approximants g^j, j = 0..j_max, against window estimates of f itself.
inline ApproximationTrace run_approximation_scheme(const CoefficientField& f, int j_max, const ApproximationConfig& cfg) {
    require(j_max >= 0, "j_max must be non-negative");
    ApproximationTrace trace;
    const double p = 2.0;
    WindowOptions wo;
    wo.solver = cfg.solver;
    wo.threads = cfg.threads;
    const auto ef = EnergyDensity::quadratic(f);
    trace.window_f = window_sequence(ef, {0.0, 0.0}, cfg.xi, cfg.window_sizes, cfg.window_resolution, wo);
    const double Rmax = cfg.window_sizes.back();
    for (int j = 0; j <= j_max; ++j) {
        ApproximationEntry e;
        e.j = j;
        const auto g = rational_truncation(f, j);
        const auto period = g.integer_period();
        require(period && *period <= cfg.max_period, "approximant period exceeds max_period");
        e.period = *period;
        std::ostringstream os;
        os.precision(12);
        os << "period " << e.period << ", frequencies";
        for (const auto& t : std::get<field_kind::TrigPolynomialClamped>(g.kind()).terms) {
            os << " (" << t.frequency[0];
            if (f.dim() == 2) os << "," << t.frequency[1];
            os << ")";
        }
        e.description = os.str();
        CellOptions co;
        co.solver = cfg.solver;
        co.threads = cfg.threads;
        e.homogenized = homogenize_matrix(g, cfg.cell_resolution, co);
        e.value = homogenized_quadratic_form(e.homogenized, cfg.xi) / std::pow(norm(cfg.xi), p);
        e.statistic = mean_abs_statistic(ef, EnergyDensity::quadratic(g), 1.0, Rmax, cfg.statistic_resolution);
        trace.entries.push_back(std::move(e));
    }
    for (std::size_t j = 1; j < trace.entries.size(); ++j)
        trace.cauchy.push_back(std::abs(trace.entries[j].value - trace.entries[j - 1].value) /
                               std::abs(trace.entries[j].value));
    bool monotone = true;
    for (std::size_t j = 1; j < trace.entries.size(); ++j)
        monotone = monotone && trace.entries[j].statistic <= trace.entries[j - 1].statistic;
    const double target = trace.window_f.last() / std::pow(norm(cfg.xi), p);
    const double final_gap = std::abs(trace.entries.back().value - target) / std::abs(target);
    trace.approximates = monotone && final_gap <= 0.02;
    return trace;
}

// -- counterexamples -------------------------------------------------------------

struct CounterexampleConfig {
    double alpha = 1.0, beta = 4.0, gamma = 2.0, c = 0.5;
    int cell_resolution = 64;
    int statistic_resolution = 8;
    std::vector<double> statistic_windows{8.0, 16.0, 32.0, 64.0};
    double half_space_offset = 4.0;
    std::vector<double> half_space_windows{2.0, 4.0, 8.0};
    int window_resolution = 16;
    SolverConfig solver;
    int threads = 1;
};

/// Four reference pairs, each with the conclusion it must reach.
inline std::vector<StabilityReport> counterexample_suite(const CounterexampleConfig& cfg = {}) {
    const double a = cfg.alpha, b = cfg.beta;
    const FieldBounds bounds{a, b};
    StabilityConfig sc;
    sc.statistic_windows = cfg.statistic_windows;
    sc.statistic_resolution = cfg.statistic_resolution;
    sc.cell_resolution = cfg.cell_resolution;
    sc.solver = cfg.solver;
    sc.threads = cfg.threads;

    struct Case {
        std::string name;
        CoefficientField f, g;
        Conclusion expected;
        StabilityConfig config;
    };
    std::vector<Case> cases;
    cases.push_back({"swapped-1d", CoefficientField::two_phase(1, a, b, bounds), CoefficientField::two_phase(1, b, a, bounds),
                     Conclusion::ConditionFailsLimitsAgree, sc});
    cases.push_back({"layered-swapped-2d", CoefficientField::two_phase(2, a, b, bounds),
                     CoefficientField::two_phase(2, b, a, bounds), Conclusion::ConditionFailsLimitsAgree, sc});
    // same harmonic and arithmetic means, different profile (period 1/2)
    cases.push_back({"layered-same-means-2d", CoefficientField::two_phase(2, a, b, bounds),
                     CoefficientField::layered(2, {0.0, 0.25, 0.5, 0.75}, {a, b, a, b}, bounds),
                     Conclusion::ConditionFailsLimitsAgree, sc});
    StabilityConfig hs = sc;
    hs.method = HomogenizationMethod::Window;
    hs.centers = {{cfg.half_space_offset, 0.0}, {-cfg.half_space_offset, 0.0}};
    hs.window_sizes = cfg.half_space_windows;
    hs.window_resolution = cfg.window_resolution;
    cases.push_back({"half-space-vs-constant", CoefficientField::half_space_step(1, cfg.gamma, cfg.c, bounds),
                     CoefficientField::constant(1, cfg.gamma, bounds), Conclusion::ConditionFailsLimitsDiffer, hs});

    std::vector<StabilityReport> reports;
    for (auto& cs : cases) {
        auto r = run_stability_pair(EnergyDensity::quadratic(cs.f), EnergyDensity::quadratic(cs.g), cs.config, cs.name);
        if (r.conclusion != cs.expected)
            throw Error("counterexample '" + cs.name + "' concluded " + to_string(r.conclusion) + ", expected " +
                        to_string(cs.expected));
        reports.push_back(std::move(r));
    }
    return reports;
}

// -- stochastic ----------------------------------------------------------------------

struct StochasticConfig {
    double rve_size = 32.0;
    int rve_resolution = 4;
    double t = 1.0;
    std::vector<double> statistic_windows{8.0, 16.0, 32.0, 64.0};
    int statistic_resolution = 4;
    double z = 1.96;  // confidence multiplier
    double bias_allowance = 0.05;
    SolverConfig solver;
    int threads = 1;
};

struct StochasticQuantity {
    std::string name;
    MonteCarloEstimate f, g;
    /// Paired differences f_i - g_i.
    MonteCarloEstimate difference;
    bool intervals_overlap = false;
};

struct StochasticReport {
    int trials = 0;
    std::uint64_t seed = 0;
    std::vector<Matrix2> f_matrices, g_matrices;
    std::vector<StochasticQuantity> quantities;  // a11, a22 (2D) or a11 (1D)
    std::vector<double> statistic_windows;
    std::vector<MonteCarloEstimate> statistic;
    bool statistic_vanishing = false;
    bool intervals_overlap = false;
    bool soundness_violation = false;
    std::string diagnostic;
};

/// Paired-seed comparison: trial i homogenizes both families' realizations for seed
/// realization_seed(seed, i) on the periodized torus (-R/2, R/2)^d.
inline StochasticReport stochastic_stability_experiment(const EnergyFamily& f_family, const EnergyFamily& g_family,
                                                        int trials, std::uint64_t seed, const StochasticConfig& cfg = {}) {
    require(trials >= 8, "stochastic experiment needs at least 8 trials");
    require(cfg.rve_size >= 1.0 && std::abs(cfg.rve_size - std::round(cfg.rve_size)) < 1e-12,
            "RVE size must be a positive integer");
    StochasticReport rep;
    rep.trials = trials;
    rep.seed = seed;
    const int R = static_cast<int>(std::lround(cfg.rve_size));

    CellOptions co;
    co.solver = cfg.solver;
    co.period = R;
    co.origin = {-0.5 * R, -0.5 * R};
    auto homogenize = [&](const EnergyDensity& e) {
        require(!std::holds_alternative<energy_form::PPower>(e.form()), "stochastic experiment needs quadratic forms");
        return *homogenize_matrix(e.matrix(), cfg.rve_resolution, co).matrix;
    };
    const auto pairs = parallel_map(std::size_t(trials), cfg.threads, [&](std::size_t i) {
        const std::uint64_t s = realization_seed(seed, i);
        return std::make_pair(homogenize(f_family(s)), homogenize(g_family(s)));
    });
    const int d = f_family(realization_seed(seed, 0)).dim();
    for (const auto& [mf, mg] : pairs) {
        rep.f_matrices.push_back(mf);
        rep.g_matrices.push_back(mg);
    }

    rep.intervals_overlap = true;
    for (int k = 0; k < d; ++k) {
        StochasticQuantity q;
        q.name = k == 0 ? "a11" : "a22";
        std::vector<double> fv, gv, dv;
        for (int i = 0; i < trials; ++i) {
            fv.push_back(rep.f_matrices[i][k][k]);
            gv.push_back(rep.g_matrices[i][k][k]);
            dv.push_back(fv.back() - gv.back());
        }
        q.f = summarize(fv);
        q.g = summarize(gv);
        q.difference = summarize(dv);
        q.intervals_overlap = std::abs(q.f.mean - q.g.mean) <= cfg.z * (q.f.std_error + q.g.std_error);
        rep.intervals_overlap = rep.intervals_overlap && q.intervals_overlap;
        rep.quantities.push_back(std::move(q));
    }

    rep.statistic_windows = cfg.statistic_windows;
    std::vector<double> means;
    for (double Rw : cfg.statistic_windows) {
        rep.statistic.push_back(
            expectation_statistic(f_family, g_family, cfg.t, Rw, trials, seed, cfg.statistic_resolution));
        means.push_back(rep.statistic.back().mean);
    }
    rep.statistic_vanishing = means.size() >= 3 && vanishing_trend(means);
    if (rep.statistic_vanishing && !rep.intervals_overlap) {
        rep.soundness_violation = true;
        rep.diagnostic = "numerical failure: vanishing expectation statistic but confidence intervals do not overlap";
    }
    return rep;
}

}  // namespace homlab
