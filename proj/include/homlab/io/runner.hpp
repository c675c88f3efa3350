#pragma once

#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "homlab/cell/cell_problem.hpp"
#include "homlab/io/csv.hpp"
#include "homlab/io/experiment_spec.hpp"
#include "homlab/io/svg_plot.hpp"
#include "homlab/perforation/perforation.hpp"
#include "homlab/rve/window.hpp"
#include "homlab/stability/stability.hpp"

namespace homlab::io {

enum ExitCode : int { ExitOk = 0, ExitSpecError = 1, ExitSoundness = 2, ExitFailure = 3 };

struct RunOptions {
    std::filesystem::path out_dir = "out";
    bool plots = true;
};

struct RunResult {
    int exit_code = ExitOk;
    std::vector<std::filesystem::path> files;  // written artifacts, run.log last
    bool soundness_violation = false;
    std::string error;
};

namespace detail {

/// Artifacts are collected in memory and flushed together once the run is over.
class Artifacts {
public:
    Artifacts(const ExperimentSpec& spec, bool plots) : prefix_(spec.prefix), plots_(plots && spec.plots) {}

    void csv(const std::string& name, const CsvTable& t) { files_[prefix_ + "_" + name + ".csv"] = t.str(); }

    void plot(const std::string& name, const std::vector<std::pair<double, double>>& series, const PlotLabels& labels) {
        if (!plots_) return;
        std::vector<std::pair<double, double>> finite;
        for (const auto& [x, y] : series)
            if (std::isfinite(x) && std::isfinite(y) && (!labels.log_x || x > 0.0)) finite.emplace_back(x, y);
        if (finite.size() < 2) {
            log("plot " + name + " skipped: fewer than two finite points");
            return;
        }
        files_[prefix_ + "_" + name + ".svg"] = plot_series(finite, labels);
    }

    void log(const std::string& line) { log_ += line + "\n"; }

    std::vector<std::filesystem::path> flush(const std::filesystem::path& dir, bool include_outputs) {
        std::filesystem::create_directories(dir);
        std::vector<std::filesystem::path> out;
        if (include_outputs)
            for (const auto& [name, content] : files_) {
                write_file_atomic(dir / name, content);
                out.push_back(dir / name);
            }
        write_file_atomic(dir / "run.log", log_);
        out.push_back(dir / "run.log");
        return out;
    }

private:
    std::string prefix_;
    bool plots_;
    std::map<std::string, std::string> files_;
    std::string log_;
};

inline std::string vec_text(const Vector2& v) { return "(" + format_number(v[0]) + " " + format_number(v[1]) + ")"; }

inline void log_residuals(Artifacts& a, const std::string& stage, const HomogenizedResult& r) {
    for (const auto& d : r.residuals)
        a.log(stage + " " + d.stage + ": " + std::to_string(d.iterations) + " iterations, residual " +
              format_number(d.residual));
}

inline CellOptions cell_options(const ExperimentSpec& s) {
    CellOptions o;
    o.threads = s.threads;
    return o;
}

inline WindowOptions window_options(const ExperimentSpec& s) {
    WindowOptions o;
    o.threads = s.threads;
    return o;
}

inline void run_cell(const ExperimentSpec& s, Artifacts& a) {
    if (s.energy == "p_power" && s.field.at("type") != "matrix") {
        const auto field = build_coefficient(s.field);
        CsvTable t({"field_id", "resolution", "p", "xi1", "xi2", "value"});
        for (const auto& xi : s.xi) {
            const double v = homogenize_p_energy(field, s.p, xi, s.resolution, cell_options(s));
            t.add_row({field.id(), (long long)s.resolution, s.p, xi[0], xi[1], v});
            a.log("cell p-energy xi " + vec_text(xi) + ": " + format_number(v));
        }
        a.csv("cell", t);
        return;
    }
    const auto A = build_matrix_field(s.field);
    CsvTable t({"field_id", "resolution", "period", "a11", "a12", "a21", "a22", "max_residual", "max_iterations",
                "energy_flux_defect"});
    std::vector<int> resolutions;
    if (s.resolution / 2 >= 2 && s.resolution % 2 == 0) resolutions.push_back(s.resolution / 2);
    resolutions.push_back(s.resolution);
    for (int n : resolutions) {
        const auto r = homogenize_matrix(A, n, cell_options(s));
        log_residuals(a, "cell n=" + std::to_string(n), r);
        double res = 0.0;
        int it = 0;
        for (const auto& d : r.residuals) {
            res = std::max(res, d.residual);
            it = std::max(it, d.iterations);
        }
        const Matrix2& m = *r.matrix;
        t.add_row({A.id(), (long long)n, (long long)r.cell_period, m[0][0], m[0][1], m[1][0], m[1][1], res,
                   (long long)it, r.energy_flux_defect});
    }
    a.csv("cell", t);
}

inline void run_rve(const ExperimentSpec& s, Artifacts& a) {
    const auto f = build_energy(s.field, s.energy, s.p);
    CsvTable t({"field_id", "x0_1", "x0_2", "xi1", "xi2", "R", "value", "gap", "verdict"});
    bool first = true;
    for (const auto& c : s.centers)
        for (const auto& xi : s.xi) {
            const auto w = window_sequence(f, c, xi, s.windows, s.window_resolution, window_options(s));
            std::vector<std::pair<double, double>> series;
            for (std::size_t i = 0; i < w.values.size(); ++i) {
                const double gap = i == 0 ? std::nan("") : std::abs(w.values[i] - w.values[i - 1]);
                t.add_row({f.id(), c[0], c[1], xi[0], xi[1], w.window_sizes[i], w.values[i], gap,
                           std::string(w.homogenizable ? "homogenizable" : "undecided")});
                series.emplace_back(w.window_sizes[i], w.values[i]);
            }
            a.log("rve x0 " + vec_text(c) + " xi " + vec_text(xi) + ": last " + format_number(w.last()) + ", gap " +
                  format_number(w.cauchy_gap) + (w.homogenizable ? ", gaps decreasing" : ", gaps not decreasing"));
            if (first) a.plot("windows", series, {"window estimates at " + vec_text(c), "R", "value", true});
            first = false;
        }
    a.csv("windows", t);

    if (s.approximation_j_max >= 0) {
        require(s.field.at("type") == "trig", "the approximation scheme needs a trig field");
        ApproximationConfig cfg;
        cfg.xi = s.xi.front();
        cfg.cell_resolution = s.resolution;
        cfg.window_sizes = s.windows;
        cfg.window_resolution = s.window_resolution;
        cfg.statistic_resolution = s.statistic_resolution;
        cfg.threads = s.threads;
        const auto tr = run_approximation_scheme(build_coefficient(s.field), s.approximation_j_max, cfg);
        CsvTable at({"j", "period", "value", "statistic", "cauchy", "description"});
        std::vector<std::pair<double, double>> series;
        for (std::size_t j = 0; j < tr.entries.size(); ++j) {
            const auto& e = tr.entries[j];
            at.add_row({(long long)e.j, (long long)e.period, e.value, e.statistic,
                        j == 0 ? std::nan("") : tr.cauchy[j - 1], e.description});
            series.emplace_back(e.j, e.value);
        }
        a.csv("approximation", at);
        a.plot("approximation", series, {"periodic approximants", "j", "value", false});
        a.log(std::string("approximation scheme: ") + (tr.approximates ? "approximates" : "does not approximate") +
              " the window value " + format_number(tr.window_f.last()));
    }
}

inline void write_stability(const StabilityReport& r, const std::string& name, Artifacts& a) {
    CsvTable st({"t", "R", "psi"});
    for (const auto& tr : r.statistic_traces)
        for (std::size_t i = 0; i < tr.values.size(); ++i) st.add_row({tr.t, tr.windows[i], tr.values[i]});
    a.csv(name + "_statistic", st);
    if (!r.statistic_traces.empty()) {
        const auto& tr = r.statistic_traces.front();
        std::vector<std::pair<double, double>> series;
        for (std::size_t i = 0; i < tr.values.size(); ++i) series.emplace_back(tr.windows[i], tr.values[i]);
        a.plot(name + "_statistic", series, {"stability statistic, t = " + format_number(tr.t), "R", "psi", true});
    }
    if (!r.windows_f.empty()) {
        CsvTable wt({"field", "x0_1", "x0_2", "xi1", "xi2", "R", "value", "discrepancy"});
        for (int side = 0; side < 2; ++side)
            for (const auto& w : side == 0 ? r.windows_f : r.windows_g)
                for (std::size_t i = 0; i < w.values.size(); ++i)
                    wt.add_row({std::string(side == 0 ? "f" : "g"), w.center[0], w.center[1], w.xi[0], w.xi[1],
                                w.window_sizes[i], w.values[i],
                                i < r.discrepancy_trace.size() ? r.discrepancy_trace[i] : std::nan("")});
        a.csv(name + "_windows", wt);
    }
    CsvTable su({"name", "f_id", "g_id", "method", "condition_vanishing", "discrepancy", "tolerance", "limits_agree",
                 "conclusion", "soundness_violation"});
    su.add_row({r.name, r.f_id, r.g_id, std::string(r.method == HomogenizationMethod::Window ? "window" : "cell"),
                (long long)r.condition_vanishing, r.discrepancy, r.tolerance, (long long)r.limits_agree,
                to_string(r.conclusion), (long long)r.soundness_violation});
    a.csv(name + "_summary", su);
    a.log("stability " + r.name + ": " + to_string(r.conclusion) + " (discrepancy " + format_number(r.discrepancy) +
          ", tolerance " + format_number(r.tolerance) + ")" + (r.diagnostic.empty() ? "" : "; " + r.diagnostic));
}

inline bool run_stability(const ExperimentSpec& s, Artifacts& a) {
    StabilityConfig cfg;
    cfg.t_list = s.t_list;
    cfg.statistic_windows = s.statistic_windows;
    cfg.statistic_resolution = s.statistic_resolution;
    cfg.cell_resolution = s.resolution;
    cfg.window_sizes = s.windows;
    cfg.window_resolution = s.window_resolution;
    cfg.centers = s.centers;
    cfg.sample_xi = s.xi;
    if (s.tolerance > 0.0) cfg.tolerance = s.tolerance;
    cfg.threads = s.threads;
    const auto r = run_stability_pair(build_energy(s.field, s.energy, s.p), build_energy(s.g_field, s.energy, s.p), cfg,
                                      s.prefix);
    write_stability(r, "pair", a);
    return r.soundness_violation;
}

inline void run_perforation(const ExperimentSpec& s, Artifacts& a) {
    const auto E = build_holes(s.holes);
    const auto E0 = E.unperturbed();
    const Vector2 xi = s.xi.front();
    SolverConfig solver;

    const auto vf = volume_fraction(E0, 8.0, s.resolution);
    a.log("volume fraction theta = " + format_number(vf.theta));
    const double C = empirical_extension_constant(s.seed, s.extension_tests, 32);
    a.log("empirical extension constant C = " + format_number(C));

    if (E0.shape() != HoleShape::None) {
        const double masked = masked_cell_value(E0, xi, s.resolution, solver);
        const auto pen = parallel_map(s.n_list.size(), s.threads, [&](std::size_t i) {
            return penalized_cell_value(E0, s.n_list[i], xi, s.resolution, solver);
        });
        CsvTable t({"n", "penalized", "masked", "relative_gap", "upper_bound", "theta", "extension_constant"});
        std::vector<std::pair<double, double>> series;
        for (std::size_t i = 0; i < pen.size(); ++i) {
            const double n = s.n_list[i];
            t.add_row({n, pen[i], masked, (pen[i] - masked) / masked, (1.0 + 1.5 * C * C / n) * masked, vf.theta, C});
            series.emplace_back(n, pen[i]);
        }
        a.csv("penalization", t);
        a.plot("penalization", series, {"penalized cell value", "n", "value", true});
        a.log("masked cell value " + format_number(masked));
    }

    if (!E.is_periodic()) {
        const auto rows = parallel_map(s.windows.size(), s.threads, [&](std::size_t i) {
            const double R = s.windows[i];
            const double e = masked_window_value(E0, {0.0, 0.0}, R, xi, s.window_resolution, solver);
            const double f = masked_window_value(E, {0.0, 0.0}, R, xi, s.window_resolution, solver);
            const double dens = symmetric_difference_density(E0, E, R, s.window_resolution);
            return std::array<double, 4>{R, e, f, dens};
        });
        CsvTable t({"R", "unperturbed", "perturbed", "relative_difference", "symmetric_difference_density"});
        std::vector<std::pair<double, double>> series;
        for (const auto& r : rows) {
            t.add_row({r[0], r[1], r[2], std::abs(r[2] - r[1]) / std::abs(r[1]), r[3]});
            series.emplace_back(r[0], std::abs(r[2] - r[1]) / std::abs(r[1]));
        }
        a.csv("perturbation", t);
        a.plot("perturbation", series, {"perturbed vs periodic holes", "R", "relative difference", true});
    }

    if (s.lambda_problem) {
        LambdaProblemConfig cfg;
        cfg.lambda = s.lambda;
        cfg.epsilons = s.epsilons;
        cfg.box_size = s.box_size;
        cfg.n_penal = s.n_penal;
        cfg.resolution = s.lambda_resolution;
        cfg.cell_resolution = s.resolution;
        cfg.threads = s.threads;
        const double w2 = 2.0 * s.source_width * s.source_width;
        const std::function<double(const Vector2&)> f = [w2](const Vector2& x) { return std::exp(-dot(x, x) / w2); };
        const auto rep = lambda_problem_experiment(E0, f, cfg);
        const auto control = lambda_problem_experiment(PerforationSet::none(E0.dim()), f, cfg);
        CsvTable t({"epsilon", "distance", "relative", "control_distance", "theta", "a11", "a22"});
        std::vector<std::pair<double, double>> series;
        for (std::size_t i = 0; i < rep.rows.size(); ++i) {
            const auto& r = rep.rows[i];
            t.add_row({r.epsilon, r.distance, r.relative, control.rows[i].distance, rep.theta, rep.a_hom[0][0],
                       rep.a_hom[1][1]});
            series.emplace_back(r.epsilon, r.distance);
        }
        a.csv("lambda", t);
        a.plot("lambda", series, {"distance to the homogenized minimizer", "epsilon", "L2 distance", true});
    }
}

inline bool run_stochastic(const ExperimentSpec& s, Artifacts& a) {
    const json fam = s.family, pert = s.perturbation;
    const EnergyFamily f_family = [fam](std::uint64_t seed) {
        return EnergyDensity::quadratic(CoefficientField::random_checkerboard(
            fam.at("dim"), fam.at("low"), fam.at("high"), fam.at("probability"), seed));
    };
    const auto rule = build_rule(pert.at("support"), pert.at("amplitude"));
    const auto mode = pert.at("mode") == "flip" ? PerturbationMode::Flip : PerturbationMode::Add;
    const double sign = pert.at("sign");
    const EnergyFamily g_family = [fam, rule, mode, sign](std::uint64_t seed) {
        const auto base = CoefficientField::random_checkerboard(fam.at("dim"), fam.at("low"), fam.at("high"),
                                                                fam.at("probability"), seed);
        return EnergyDensity::quadratic(CoefficientField::perturbed(base, rule, sign, mode));
    };
    StochasticConfig cfg;
    cfg.rve_size = s.rve_size;
    cfg.rve_resolution = s.rve_resolution;
    cfg.t = s.t_list.front();
    cfg.statistic_windows = s.statistic_windows;
    cfg.statistic_resolution = s.statistic_resolution;
    cfg.threads = s.threads;
    const auto rep = stochastic_stability_experiment(f_family, g_family, s.trials, s.seed, cfg);

    CsvTable q({"quantity", "f_mean", "f_std_error", "g_mean", "g_std_error", "difference_mean",
                "difference_std_error", "intervals_overlap"});
    for (const auto& x : rep.quantities)
        q.add_row({x.name, x.f.mean, x.f.std_error, x.g.mean, x.g.std_error, x.difference.mean, x.difference.std_error,
                   (long long)x.intervals_overlap});
    a.csv("homogenized", q);

    CsvTable st({"R", "mean", "std_error", "samples"});
    std::vector<std::pair<double, double>> series;
    for (std::size_t i = 0; i < rep.statistic.size(); ++i) {
        st.add_row({rep.statistic_windows[i], rep.statistic[i].mean, rep.statistic[i].std_error,
                    (long long)rep.statistic[i].samples.size()});
        series.emplace_back(rep.statistic_windows[i], rep.statistic[i].mean);
    }
    a.csv("statistic", st);
    a.plot("statistic", series, {"expected stability statistic", "R", "E psi", true});

    CsvTable tr({"trial", "f_a11", "f_a12", "f_a22", "g_a11", "g_a12", "g_a22"});
    for (std::size_t i = 0; i < rep.f_matrices.size(); ++i) {
        const auto& F = rep.f_matrices[i];
        const auto& G = rep.g_matrices[i];
        tr.add_row({(long long)i, F[0][0], F[0][1], F[1][1], G[0][0], G[0][1], G[1][1]});
    }
    a.csv("trials", tr);
    a.log(std::string("stochastic: statistic ") + (rep.statistic_vanishing ? "vanishing" : "not vanishing") +
          ", intervals " + (rep.intervals_overlap ? "overlap" : "separate") +
          (rep.diagnostic.empty() ? "" : "; " + rep.diagnostic));
    return rep.soundness_violation;
}

inline bool run_counterexamples(const ExperimentSpec& s, Artifacts& a) {
    CounterexampleConfig cfg;
    cfg.threads = s.threads;
    bool violation = false;
    for (const auto& r : counterexample_suite(cfg)) {
        CsvTable t({"case", "quantity", "t", "R", "value", "text"});
        for (const auto& tr : r.statistic_traces)
            for (std::size_t i = 0; i < tr.values.size(); ++i)
                t.add_row({r.name, std::string("psi"), tr.t, tr.windows[i], tr.values[i], std::string()});
        for (const auto& w : r.windows_f)
            for (std::size_t i = 0; i < w.values.size(); ++i)
                t.add_row({r.name, "window_f x0=" + format_number(w.center[0]), std::nan(""), w.window_sizes[i],
                           w.values[i], std::string()});
        for (const auto& w : r.windows_g)
            for (std::size_t i = 0; i < w.values.size(); ++i)
                t.add_row({r.name, "window_g x0=" + format_number(w.center[0]), std::nan(""), w.window_sizes[i],
                           w.values[i], std::string()});
        auto matrix_rows = [&](const std::optional<HomogenizedResult>& h, const std::string& tag) {
            if (!h || !h->matrix) return;
            for (int i = 0; i < h->dim; ++i)
                for (int j = 0; j < h->dim; ++j)
                    t.add_row({r.name, tag + "_" + std::to_string(i + 1) + std::to_string(j + 1), std::nan(""),
                               std::nan(""), (*h->matrix)[i][j], std::string()});
        };
        matrix_rows(r.homogenized_f, "hom_f");
        matrix_rows(r.homogenized_g, "hom_g");
        t.add_row({r.name, std::string("discrepancy"), std::nan(""), std::nan(""), r.discrepancy, std::string()});
        t.add_row({r.name, std::string("tolerance"), std::nan(""), std::nan(""), r.tolerance, std::string()});
        t.add_row({r.name, std::string("conclusion"), std::nan(""), std::nan(""), std::nan(""), to_string(r.conclusion)});
        a.csv(r.name, t);
        a.log("counterexample " + r.name + ": " + to_string(r.conclusion));
        violation = violation || r.soundness_violation;
    }
    return violation;
}

}  // namespace detail

/// Runs a validated spec and writes its tables, plots and run.log into options.out_dir.
/// Exit codes: 0 success, 2 soundness guard fired, 3 solver or input failure.
inline RunResult run(const ExperimentSpec& spec, const RunOptions& options = {}) {
    detail::Artifacts a(spec, options.plots);
    RunResult result;
    a.log("kind " + to_string(spec.kind) + ", seed " + std::to_string(spec.seed) + ", threads " +
          std::to_string(spec.threads));
    try {
        switch (spec.kind) {
            case ExperimentKind::Cell: detail::run_cell(spec, a); break;
            case ExperimentKind::Rve: detail::run_rve(spec, a); break;
            case ExperimentKind::Stability: result.soundness_violation = detail::run_stability(spec, a); break;
            case ExperimentKind::Perforation: detail::run_perforation(spec, a); break;
            case ExperimentKind::Stochastic: result.soundness_violation = detail::run_stochastic(spec, a); break;
            case ExperimentKind::Counterexamples: result.soundness_violation = detail::run_counterexamples(spec, a); break;
        }
        if (result.soundness_violation) {
            a.log("soundness guard fired");
            result.exit_code = ExitSoundness;
        }
        a.log("status " + std::to_string(result.exit_code));
        result.files = a.flush(options.out_dir, true);
    } catch (const SolverFailure& e) {
        result.exit_code = ExitFailure;
        result.error = e.what();
        a.log(std::string("solver failure: ") + e.what());
        a.log("status " + std::to_string(result.exit_code));
        result.files = a.flush(options.out_dir, false);
    } catch (const std::exception& e) {
        result.exit_code = ExitFailure;
        result.error = e.what();
        a.log(std::string("error: ") + e.what());
        a.log("status " + std::to_string(result.exit_code));
        result.files = a.flush(options.out_dir, false);
    }
    return result;
}

}  // namespace homlab::io
