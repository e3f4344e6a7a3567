// Command-line driver: one subcommand per experiment.
//
//   dynloc fig1 --out runs/fig1 --seed 7 --threads 4
//   dynloc fig3 --config sweep.cfg
//
// Exit status: 0 success, 1 configuration error, 2 numerical abort.

#include <omp.h>

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include "dynloc/config.hpp"
#include "dynloc/errors.hpp"
#include "dynloc/experiments.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Classical and quantum dynamics of the side-mode oscillator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 0;
    app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (default: out/<experiment>)");
    app.add_option("--seed", seed, "ensemble seed");
    app.add_option("--threads", threads, "OpenMP threads (default: runtime setting)")
        ->check(CLI::NonNegativeNumber);

    const std::pair<const char*, const char*> commands[] = {
        {"fig1", "dispersion, distributions and Poincare section"},
        {"fig2", "space-time probability maps"},
        {"fig3", "dispersion against modulation strength"},
        {"kbar-sweep", "classical-quantum gap against kbar"},
        {"coupled-check", "mean-field and adiabatic coupled models"},
        {"custom", "paired run with the given configuration"},
    };
    for (const auto& [name, help] : commands)
        app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        const auto experiment = dynloc::parse_experiment(app.get_subcommands().front()->get_name());
        dynloc::RunConfig config = dynloc::default_config(experiment);
        if (!config_path.empty())
            config = dynloc::load_config(config_path, config);
        config.experiment = experiment;
        if (seed)
            config.seed = *seed;
        if (threads > 0)
            omp_set_num_threads(threads);
        if (out_dir.empty())
            out_dir = "out/" + dynloc::to_string(experiment);

        for (const auto& f : dynloc::run_experiment(config, out_dir))
            std::cout << out_dir << '/' << f << '\n';
    } catch (const dynloc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const dynloc::NumericalAbort& e) {
        std::cerr << "numerical abort: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
