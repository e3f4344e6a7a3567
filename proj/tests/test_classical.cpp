#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <stdexcept>
#include <cstring>
#include <numbers>

#include "dynloc/classical.hpp"
#include "dynloc/errors.hpp"
#include "dynloc/rng.hpp"
#include "oracles.hpp"

using namespace dynloc;
using kernels::Backend;

namespace {

double max_error_vs_rk(const EffectiveParams& e, double dtau, double tau_final)
{
    const EffectivePotential pot(e);
    ClassicalEnsemble ens;
    ens.x = {0.3, -1.2, 2.0};
    ens.p = {0.0, 0.8, -1.5};
    const auto x0 = ens.x;
    const auto p0 = ens.p;
    advance(ens, pot, dtau, static_cast<std::size_t>(std::llround(tau_final / dtau)), Backend::serial);
    double err = 0.0;
    for (std::size_t i = 0; i < x0.size(); ++i) {
        const auto [x, p] = oracle::rk_trajectory(e, x0[i], p0[i], 0.0, tau_final);
        err = std::max({err, std::abs(ens.x[i] - x), std::abs(ens.p[i] - p)});
    }
    return err;
}

}  // namespace

TEST_SUITE("classical")
{
    TEST_CASE("sampling is deterministic and matches the requested cloud")
    {
        const GaussianCloud g{1.0, -2.0, 0.5, 2.0};
        const auto a = sample_ensemble(g, 20000, 9);
        const auto b = sample_ensemble(g, 20000, 9);
        const auto c = sample_ensemble(g, 20000, 10);
        CHECK(std::memcmp(a.x.data(), b.x.data(), a.x.size() * sizeof(double)) == 0);
        CHECK(a.x[5] != c.x[5]);
        const auto d = dispersion(a);
        CHECK(d.dx == doctest::Approx(0.5).epsilon(0.02));
        CHECK(d.dp == doctest::Approx(2.0).epsilon(0.02));
        CHECK(kernels::moments(Backend::serial, a.x).mean == doctest::Approx(1.0).epsilon(0.01));
        CHECK(a.provenance.find("seed=9") != std::string::npos);

        const auto u = sample_ensemble(UniformSquare{}, 5000, 1);
        for (std::size_t i = 0; i < u.size(); ++i) {
            CHECK_UNARY(std::abs(u.x[i]) <= 4.0);
            CHECK_UNARY(std::abs(u.p[i]) <= 4.0);
        }
        CHECK_THROWS_AS(sample_ensemble(g, 0, 1), std::invalid_argument);
        CHECK_THROWS_AS(sample_ensemble(UniformSquare{1.0, -1.0, 0.0, 1.0}, 3, 1),
                        std::invalid_argument);
    }

    TEST_CASE("matching cloud is minimum uncertainty")
    {
        const auto g = matching_cloud(0.0, 0.0, std::sqrt(0.25), 0.5);
        CHECK(g.sigma_x * g.sigma_p == doctest::Approx(0.25));
    }

    TEST_CASE("harmonic leapfrog conserves its shadow energy")
    {
        const EffectivePotential pot(oracle::harmonic_params());
        ClassicalEnsemble ens;
        ens.x = {1.0, 0.0, -2.5};
        ens.p = {0.0, 1.7, 0.4};
        const double h = drive_period / 256.0;
        auto shadow = [&](std::size_t i) {
            return 0.5 * (1.0 - 0.25 * h * h) * ens.p[i] * ens.p[i] + 0.5 * ens.x[i] * ens.x[i];
        };
        std::vector<double> g0;
        for (std::size_t i = 0; i < ens.size(); ++i)
            g0.push_back(shadow(i));
        advance(ens, pot, h, 256 * 1000);
        for (std::size_t i = 0; i < ens.size(); ++i)
            CHECK(std::abs(shadow(i) - g0[i]) < 1e-8 * std::max(1.0, g0[i]));
    }

    TEST_CASE("agrees with an adaptive Runge-Kutta reference")
    {
        const double err = max_error_vs_rk(oracle::reference_params(6.0), drive_period / 4096.0,
                                           4.0 * drive_period);
        CHECK(err < 1e-5);
    }

    TEST_CASE("second-order convergence")
    {
        const auto e = oracle::reference_params(6.0);
        const double coarse = max_error_vs_rk(e, drive_period / 128.0, 2.0 * drive_period);
        const double fine = max_error_vs_rk(e, drive_period / 256.0, 2.0 * drive_period);
        CHECK(coarse / fine >= 3.5);
        CHECK(coarse / fine <= 4.5);
    }

    TEST_CASE("time reversal retraces the trajectory")
    {
        const EffectivePotential pot(oracle::reference_params(6.0));
        auto ens = sample_ensemble(GaussianCloud{0.0, 0.0, 1.0, 1.0}, 100, 3);
        const auto x0 = ens.x;
        const auto p0 = ens.p;
        const double h = drive_period / 256.0;
        advance(ens, pot, h, 2560);
        advance(ens, pot, -h, 2560);
        CHECK(std::abs(ens.tau) < 1e-9);
        for (std::size_t i = 0; i < ens.size(); ++i) {
            CHECK(ens.x[i] == doctest::Approx(x0[i]).epsilon(1e-9));
            CHECK(ens.p[i] == doctest::Approx(p0[i]).epsilon(1e-9));
        }
    }

    TEST_CASE("serial and OpenMP evolution are bitwise identical")
    {
        const EffectivePotential pot(oracle::reference_params(6.0));
        auto a = sample_ensemble(GaussianCloud{0.0, 0.0, 0.7, 0.7}, 3000, 5);
        auto b = a;
        ClassicalEvolveOptions opt;
        opt.tau_final = 20.0 * drive_period;
        opt.backend = Backend::serial;
        const auto sa = evolve(a, pot, opt);
        opt.backend = Backend::openmp;
        omp_set_num_threads(4);
        const auto sb = evolve(b, pot, opt);
        omp_set_num_threads(omp_get_num_procs());
        CHECK(std::memcmp(a.x.data(), b.x.data(), a.x.size() * sizeof(double)) == 0);
        for (const auto& col : sa.column_names())
            CHECK(sa.column(col) == sb.column(col));
    }

    TEST_CASE("evolve records at the requested stride")
    {
        const EffectivePotential pot(oracle::reference_params(2.0));
        auto ens = sample_ensemble(GaussianCloud{0.0, 0.0, 0.7, 0.7}, 100, 1);
        ClassicalEvolveOptions opt;
        opt.tau_final = 10.0 * drive_period;
        std::size_t calls = 0;
        const auto s = evolve(ens, pot, opt, [&](const ClassicalEnsemble&) { ++calls; });
        CHECK(s.size() == 11);
        CHECK(calls == 11);
        CHECK(s.tau().back() == doctest::Approx(10.0 * drive_period));
        CHECK(s.column("dX").front() == doctest::Approx(dispersion(sample_ensemble(
                                             GaussianCloud{0.0, 0.0, 0.7, 0.7}, 100, 1)).dx));
        opt.stride = 0;
        CHECK_THROWS_AS(evolve(ens, pot, opt), std::invalid_argument);
    }

    TEST_CASE("non-finite states abort with the trajectory index")
    {
        const EffectivePotential pot(oracle::reference_params(1.0));
        ClassicalEnsemble ens;
        ens.x = {0.0, std::nan("")};
        ens.p = {0.0, 0.0};
        try {
            advance(ens, pot, 0.01, 1);
            FAIL("expected NumericalAbort");
        } catch (const NumericalAbort& e) {
            CHECK(std::string(e.what()).find('1') != std::string::npos);
        }
    }

    TEST_CASE("dispersion needs two trajectories")
    {
        ClassicalEnsemble ens;
        ens.x = {1.0};
        ens.p = {1.0};
        CHECK_THROWS_AS(dispersion(ens), std::invalid_argument);
    }

    TEST_CASE("Poincare section layout and preconditions")
    {
        const EffectivePotential pot(oracle::reference_params(6.0));
        auto ens = sample_ensemble(UniformSquare{}, 5, 2);
        const auto sec = poincare(ens, pot, 12, drive_period / 64.0);
        CHECK(sec.points.size() == 60);
        CHECK(sec.points[13].trajectory == 1);
        CHECK(sec.points[13].period == 2);
        CHECK(ens.tau == doctest::Approx(12.0 * drive_period));
        CHECK_THROWS_AS(poincare(ens, pot, 3, 0.01), std::invalid_argument);
        ens.tau += 0.1;
        CHECK_THROWS_AS(poincare(ens, pot, 3, drive_period / 64.0), std::invalid_argument);
        CHECK(steps_per_period(drive_period / 256.0) == 256);
    }

    TEST_CASE("quasi-periodic curves are classified regular")
    {
        PoincareSection sec;
        sec.n_trajectories = 5;
        sec.n_periods = 200;
        const double turn = 2.0 * std::numbers::pi * (std::sqrt(5.0) - 1.0) / 2.0;
        for (std::size_t t = 0; t < 5; ++t) {
            const double a = 0.5 + static_cast<double>(t);
            for (std::size_t k = 0; k < 200; ++k) {
                const double phi = turn * static_cast<double>(k);
                sec.points.push_back({t, k + 1, 1.0 + a * std::cos(phi), 0.5 * a * std::sin(phi)});
            }
        }
        const auto cls = classify_orbits(sec);
        CHECK(cls.regular == 5);
        CHECK(cls.chaotic == 0);
    }

    TEST_CASE("diffusing point clouds are classified chaotic")
    {
        PoincareSection sec;
        sec.n_trajectories = 10;
        sec.n_periods = 200;
        for (std::size_t t = 0; t < 10; ++t) {
            const CounterRng rng(77, t);
            double x = 0.0;
            double p = 0.0;
            for (std::size_t k = 0; k < 200; ++k) {
                const auto [a, b] = rng.normal_pair(k);
                x += a;
                p += b;
                sec.points.push_back({t, k + 1, x, p});
            }
        }
        const auto cls = classify_orbits(sec);
        CHECK(cls.chaotic == 10);
        sec.n_periods = 4;
        CHECK_THROWS_AS(classify_orbits(sec), std::invalid_argument);
    }
}
