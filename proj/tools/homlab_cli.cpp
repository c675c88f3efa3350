// Command-line runner for homogenization experiments.
//
//   homlab cell --spec layered.json --out results/layered
//   homlab validate --spec any.json

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "homlab/io/runner.hpp"

namespace {

struct Flags {
    std::string spec_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    bool no_plots = false;
};

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw homlab::InvalidArgument("cannot open spec file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

homlab::io::ExperimentSpec load(const Flags& f) {
    auto spec = homlab::io::parse_spec(read_text(f.spec_path));
    if (f.seed) spec.seed = *f.seed;
    if (f.threads) spec.threads = *f.threads;
    return spec;
}

void add_common(CLI::App* cmd, Flags& f, bool run_flags) {
    cmd->add_option("--spec", f.spec_path, "experiment spec (JSON)")->required()->check(CLI::ExistingFile);
    if (!run_flags) return;
    cmd->add_option("--out", f.out_dir, "output directory")->capture_default_str();
    cmd->add_option("--seed", f.seed, "override the spec seed");
    cmd->add_option("--threads", f.threads, "worker threads")->check(CLI::Range(1, 1024));
    cmd->add_flag("--no-plots", f.no_plots, "skip SVG output");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace homlab::io;
    CLI::App app{"homlab: numerical homogenization experiments"};
    app.require_subcommand(1);
    Flags flags;

    auto* validate = app.add_subcommand("validate", "check a spec and print it with every default filled in");
    add_common(validate, flags, false);

    std::vector<std::pair<CLI::App*, ExperimentKind>> runners;
    for (const auto& [kind, name] : kind_names()) {
        auto* cmd = app.add_subcommand(name, "run a " + name + " experiment");
        add_common(cmd, flags, true);
        runners.emplace_back(cmd, kind);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ExitOk : ExitSpecError;  // --help exits 0
    }

    try {
        if (validate->parsed()) {
            std::cout << serialize(load(flags));
            return ExitOk;
        }
        for (const auto& [cmd, kind] : runners) {
            if (!cmd->parsed()) continue;
            auto spec = load(flags);
            if (spec.kind != kind) {
                std::cerr << "spec kind is '" << to_string(spec.kind) << "' but the subcommand is '" << to_string(kind)
                          << "'\n";
                return ExitSpecError;
            }
            RunOptions opts;
            opts.out_dir = flags.out_dir;
            opts.plots = !flags.no_plots;
            const auto result = run(spec, opts);
            for (const auto& f : result.files) std::cout << f.string() << "\n";
            if (result.exit_code == ExitSoundness) std::cerr << "soundness guard fired, see run.log\n";
            if (result.exit_code == ExitFailure) std::cerr << "run failed: " << result.error << "\n";
            return result.exit_code;
        }
    } catch (const SpecError& e) {
        std::cerr << e.what() << "\n";
        return ExitSpecError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return ExitSpecError;
    }
    return ExitOk;
}
