#include <doctest.h>

#include <omp.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <stdexcept>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dynloc/config.hpp"
#include "dynloc/errors.hpp"
#include "dynloc/experiments.hpp"

using namespace dynloc;
namespace fs = std::filesystem;

namespace {

constexpr const char* small_run = "ensemble_size = 2000\n"
                                  "grid_n = 1024\n"
                                  "tau_final = 125.7\n"
                                  "section_trajectories = 10\n"
                                  "section_periods = 20\n";

RunConfig make(Experiment e, const std::string& extra = "")
{
    std::istringstream in(std::string(small_run) + extra);
    auto c = parse_config(in, default_config(e));
    c.experiment = e;
    return c;
}

fs::path scratch(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("dynloc_exp_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::size_t csv_rows(const fs::path& p)
{
    const auto text = slurp(p);
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) - 1;
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(DYNLOC_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("experiments")
{
    TEST_CASE("grid scaling with kbar")
    {
        CHECK(scaled_grid_size(2048, 1.0) == 2048);
        CHECK(scaled_grid_size(2048, 0.5) == 4096);
        CHECK(scaled_grid_size(2048, 0.3) == 8192);
        CHECK_THROWS_AS(scaled_grid_size(2048, 0.0), ConfigError);
    }

    TEST_CASE("fig1 writes its artifacts")
    {
        const auto dir = scratch("fig1");
        const auto r = run_fig1(make(Experiment::fig1), dir);
        for (const char* f : {"dispersion.csv", "energy.csv", "dist_classical_x.csv",
                              "dist_classical_p.csv", "dist_quantum_x.csv", "dist_quantum_p.csv",
                              "poincare.csv", "metadata.txt"})
            CHECK(fs::exists(dir / f));
        CHECK(r.files.size() == 8);
        CHECK(csv_rows(dir / "dispersion.csv") == 81);
        CHECK(csv_rows(dir / "poincare.csv") == 200);
        CHECK(r.alpha_sensitivity.size() == 4);
        CHECK(r.orbits.regular + r.orbits.chaotic == 10);
        CHECK(r.quantum_x.total() == doctest::Approx(1.0));
        const auto meta = read_key_values(dir / "metadata.txt");
        const auto has = [&](const std::string& k) {
            return std::any_of(meta.begin(), meta.end(), [&](const auto& kv) { return kv.first == k; });
        };
        CHECK(has("run.code_version"));
        CHECK(has("run.wall_clock"));
        CHECK(has("seed"));
        CHECK(has("result.alpha"));
        fs::remove_all(dir);
    }

    TEST_CASE("SI columns appear when scales are set")
    {
        const auto dir = scratch("fig1_si");
        run_fig1(make(Experiment::fig1, "x_scale_si = 1e-9\np_scale_si = 2e-27\n"), dir);
        const auto text = slurp(dir / "dispersion.csv");
        CHECK(text.substr(0, text.find('\n')).find("classical_dX_m") != std::string::npos);
        fs::remove_all(dir);
    }

    TEST_CASE("fig2 maps are normalized per strobe")
    {
        const auto dir = scratch("fig2");
        const auto r = run_fig2(make(Experiment::fig2, "tau_final = 15.7\n"), dir);
        CHECK(r.tau.size() == 11);
        for (const auto* m : {&r.classical_x, &r.classical_p, &r.quantum_x, &r.quantum_p}) {
            REQUIRE(m->size() == 11);
            for (const auto& row : *m) {
                CHECK(row.size() == 160);
                CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(1.0));
            }
        }
        CHECK(csv_rows(dir / "map_quantum_x.csv") == 11);
        fs::remove_all(dir);
    }

    TEST_CASE("fig3 has one row per modulation value")
    {
        const auto dir = scratch("fig3");
        const auto r = run_fig3(make(Experiment::fig3, "tau_final = 15.7\nlambda_list = 0, 2, 4, 6\n"), dir);
        CHECK(r.points.size() == 4);
        CHECK(r.points[2].lambda_eff == doctest::Approx(4.0));
        CHECK(csv_rows(dir / "sweep.csv") == 4);
        const auto auto_values = sweep_values(make(Experiment::fig3, "lambda_points = 5\n"));
        CHECK(auto_values.size() == 5);
        CHECK(auto_values.back() == doctest::Approx(2.0 * default_config(Experiment::fig3).effective.lambda_eff));
        fs::remove_all(dir);
    }

    TEST_CASE("without drive or Lorentzian the two pictures agree on dX")
    {
        const auto dir = scratch("harmonic");
        auto c = make(Experiment::custom, "lambda_eff = 0\nbeta = 0\nensemble_size = 20000\ntau_final = 31.4\n");
        const auto r = run_custom(c, dir);
        const auto& cx = r.run.classical.column("dX");
        const auto& qx = r.run.quantum.column("dX");
        for (std::size_t i = 0; i < cx.size(); ++i)
            CHECK(cx[i] == doctest::Approx(qx[i]).epsilon(0.03));
        fs::remove_all(dir);
    }

    TEST_CASE("single kbar gives one row")
    {
        const auto dir = scratch("kbar");
        const auto r = run_kbar_sweep(
            make(Experiment::kbar_sweep, "tau_final = 15.7\nkbar_list = 1\nkbar_curve_points = 0\n"), dir);
        REQUIRE(r.rows.size() == 1);
        CHECK(r.rows[0].grid_n == 1024);
        CHECK(std::isnan(r.rows[0].oscillation_amplitude));
        CHECK(csv_rows(dir / "kbar.csv") == 1);
        fs::remove_all(dir);
    }

    TEST_CASE("coupled check reproduces decoupled limits")
    {
        const auto dir = scratch("coupled");
        const auto r = run_coupled_check(default_config(Experiment::coupled_check), dir);
        CHECK(r.mirror_limit_error < 1e-8);
        CHECK(r.side_mode_limit_error < 1e-8);
        CHECK(r.cavity_limit_error < 1e-8);
        CHECK(r.xi.size() == 5);
        CHECK(fs::exists(dir / "ansatz_sweep.csv"));
        fs::remove_all(dir);
    }

    TEST_CASE("outputs are identical across thread counts and metadata reloads")
    {
        const auto a = scratch("det_a");
        const auto b = scratch("det_b");
        const auto c = scratch("det_c");
        const auto config = make(Experiment::fig1, "tau_final = 157.1\n");
        omp_set_num_threads(1);
        run_fig1(config, a);
        omp_set_num_threads(4);
        run_fig1(config, b);
        omp_set_num_threads(omp_get_num_procs());
        auto reloaded = load_config(a / "metadata.txt", default_config(Experiment::custom));
        run_fig1(reloaded, c);
        for (const char* f : {"dispersion.csv", "energy.csv", "dist_classical_p.csv",
                              "dist_quantum_p.csv", "poincare.csv"}) {
            CHECK(slurp(a / f) == slurp(b / f));
            CHECK(slurp(a / f) == slurp(c / f));
        }
        for (const auto& p : {a, b, c})
            fs::remove_all(p);
    }

    TEST_CASE("an aborted run leaves no artifacts")
    {
        const auto dir = scratch("abort");
        const auto config = make(Experiment::fig1, "x_min = -6\nx_max = 6\ngrid_n = 256\n");
        CHECK_THROWS_AS(run_fig1(config, dir), NumericalAbort);
        CHECK((!fs::exists(dir) || fs::is_empty(dir)));
        fs::remove_all(dir);
    }

    TEST_CASE("invalid configurations are rejected before running")
    {
        const auto dir = scratch("invalid");
        CHECK_THROWS_AS(run_fig1(make(Experiment::fig1, "ensemble_size = 1\n"), dir), ConfigError);
        fs::remove_all(dir);
    }
}

TEST_SUITE("cli")
{
    TEST_CASE("exit codes")
    {
        const auto dir = scratch("cli");
        fs::create_directories(dir);
        std::ofstream(dir / "bad.cfg") << "bogus = 1\n";
        std::ofstream(dir / "abort.cfg") << small_run << "x_min = -6\nx_max = 6\ngrid_n = 256\n";
        CHECK(run_cli("fig9") == 1);
        CHECK(run_cli("") == 1);
        CHECK(run_cli("fig1 --config " + (dir / "missing.cfg").string()) == 1);
        CHECK(run_cli("fig1 --config " + (dir / "bad.cfg").string() + " --out " + (dir / "o1").string()) == 1);
        CHECK(run_cli("fig1 --config " + (dir / "abort.cfg").string() + " --out " + (dir / "o2").string()) == 2);
        CHECK(run_cli("coupled-check --out " + (dir / "o3").string() + " --threads 1 --seed 5") == 0);
        CHECK(fs::exists(dir / "o3" / "metadata.txt"));
        fs::remove_all(dir);
    }
}
