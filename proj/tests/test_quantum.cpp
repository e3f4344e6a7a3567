#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <stdexcept>
#include <cstring>

#include "dynloc/errors.hpp"
#include "dynloc/quantum.hpp"
#include "oracles.hpp"

using namespace dynloc;
using kernels::Backend;

namespace {

MonitorOptions unmonitored()
{
    MonitorOptions m;
    m.enabled = false;
    return m;
}

WavePacket evolved(const EffectiveParams& e, const Grid& g, std::size_t per_period,
                   std::size_t periods)
{
    const EffectivePotential pot(e);
    auto w = gaussian_packet(g, 0.5, 0.0, std::sqrt(e.kbar / 2.0));
    SplitOperatorPropagator prop(g, pot, drive_period / static_cast<double>(per_period),
                                 Backend::serial, unmonitored());
    prop.advance(w, per_period * periods);
    return w;
}

}  // namespace

TEST_SUITE("quantum")
{
    TEST_CASE("grid geometry")
    {
        const Grid g(-8.0, 8.0, 64, 0.5);
        CHECK(g.dx() == doctest::Approx(0.25));
        CHECK(g.dp() == doctest::Approx(0.5 * 2.0 * std::numbers::pi / 16.0));
        CHECK(g.positions().front() == -8.0);
        CHECK(g.momenta()[g.sorted_index(0)] == doctest::Approx(-32.0 * g.dp()));
        CHECK(g.momenta()[g.sorted_index(63)] == doctest::Approx(31.0 * g.dp()));
        CHECK_THROWS_AS(Grid(-1.0, 1.0, 100, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(Grid(1.0, -1.0, 64, 1.0), std::invalid_argument);
        CHECK_THROWS_AS(Grid(-1.0, 1.0, 64, 0.0), std::invalid_argument);
    }

    TEST_CASE("Gaussian packet moments and Parseval")
    {
        const Grid g(-40.0, 40.0, 2048, 0.5);
        const auto w = gaussian_packet(g, 1.5, -2.0, 0.8);
        CHECK(w.norm() == doctest::Approx(1.0).epsilon(1e-12));
        const EffectivePotential pot(oracle::harmonic_params(0.5));
        const auto o = observables(w, pot, Backend::serial);
        CHECK(o.mean_x == doctest::Approx(1.5).epsilon(1e-10));
        CHECK(o.mean_p == doctest::Approx(-2.0).epsilon(1e-10));
        CHECK(o.dx == doctest::Approx(0.8).epsilon(1e-10));
        CHECK(o.dp == doctest::Approx(0.5 / (2.0 * 0.8)).epsilon(1e-10));
        const auto m = momentum_representation(w);
        double s = 0.0;
        for (const auto& a : m.amplitude)
            s += std::norm(a) * m.dp;
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(position_distribution(w).total() == doctest::Approx(1.0));
        CHECK(momentum_distribution(w).total() == doctest::Approx(1.0));
        CHECK_THROWS_AS(gaussian_packet(g, 38.0, 0.0, 1.0), std::invalid_argument);
    }

    TEST_CASE("free spreading matches the closed form")
    {
        for (double kbar : {1.0, 0.25}) {
            const Grid g(-40.0, 40.0, 2048, kbar);
            const double s0 = std::sqrt(kbar / 2.0);
            auto w = gaussian_packet(g, 0.0, 0.0, s0);
            free_evolve(w, 5.0);
            const EffectivePotential pot(oracle::harmonic_params(kbar));
            CHECK(observables(w, pot, Backend::serial).dx ==
                  doctest::Approx(oracle::free_width(s0, kbar, 5.0)).epsilon(1e-6));
            CHECK(w.norm() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }

    TEST_CASE("coherent state keeps its width in the harmonic well")
    {
        const double kbar = 1.0;
        const Grid g(-20.0, 20.0, 1024, kbar);
        const EffectivePotential pot(oracle::harmonic_params(kbar));
        auto w = gaussian_packet(g, 3.0, 0.0, std::sqrt(kbar / 2.0));
        QuantumEvolveOptions opt;
        opt.dtau = drive_period / 2048.0;
        opt.stride = 2048;
        opt.tau_final = 10.0 * drive_period;
        opt.backend = Backend::serial;
        const auto s = evolve(w, pot, opt);
        for (std::size_t k = 0; k < s.size(); ++k) {
            CHECK(std::abs(s.column("dX")[k] - std::sqrt(0.5)) < 1e-6);
            CHECK(std::abs(s.column("mean_X")[k] - 3.0 * std::cos(s.tau()[k])) < 1e-5);
            CHECK(std::abs(s.column("mean_H")[k] - (4.5 + 0.5)) < 1e-5);
        }
    }

    TEST_CASE("harmonic ground state energy")
    {
        for (double kbar : {1.0, 0.5, 0.25}) {
            const Grid g(-20.0, 20.0, 1024, kbar);
            const auto w = gaussian_packet(g, 0.0, 0.0, std::sqrt(kbar / 2.0));
            const EffectivePotential pot(oracle::harmonic_params(kbar));
            CHECK(observables(w, pot, Backend::serial).mean_h == doctest::Approx(kbar / 2.0).epsilon(1e-10));
        }
    }

    TEST_CASE("agrees with a dense matrix propagator")
    {
        const Grid g(-8.0, 8.0, 64, 1.0);
        const auto e = oracle::reference_params(2.0);
        const auto u = oracle::dense_period_propagator(g, e, 512, 4);
        const auto w0 = gaussian_packet(g, 0.5, 0.0, std::sqrt(0.5));
        Eigen::VectorXcd v(64);
        for (Eigen::Index j = 0; j < 64; ++j)
            v(j) = w0.psi[static_cast<std::size_t>(j)];
        for (int k = 0; k < 10; ++k)
            v = u * v;
        const std::vector<oracle::cd> ref(v.data(), v.data() + v.size());
        const auto w = evolved(e, g, 512, 10);
        CHECK(oracle::fidelity(w.psi, ref) >= 1.0 - 1e-6);
    }

    TEST_CASE("Strang splitting is second order")
    {
        const Grid g(-20.0, 20.0, 512, 1.0);
        const auto e = oracle::reference_params(6.0);
        const auto ref = evolved(e, g, 4096, 2);
        const double coarse = oracle::l2_distance(evolved(e, g, 128, 2).psi, ref.psi, g.dx());
        const double fine = oracle::l2_distance(evolved(e, g, 256, 2).psi, ref.psi, g.dx());
        CHECK(coarse / fine >= 3.5);
        CHECK(coarse / fine <= 4.5);
    }

    TEST_CASE("serial and OpenMP propagation are bitwise identical")
    {
        const Grid g(-40.0, 40.0, 2048, 1.0);
        const EffectivePotential pot(oracle::reference_params(6.0));
        auto a = gaussian_packet(g, 0.0, 0.0, std::sqrt(0.5));
        auto b = a;
        QuantumEvolveOptions opt;
        opt.tau_final = 4.0 * drive_period;
        opt.backend = Backend::serial;
        const auto sa = evolve(a, pot, opt);
        opt.backend = Backend::openmp;
        omp_set_num_threads(3);
        const auto sb = evolve(b, pot, opt);
        omp_set_num_threads(omp_get_num_procs());
        CHECK(std::memcmp(a.psi.data(), b.psi.data(), a.psi.size() * sizeof(a.psi[0])) == 0);
        CHECK(sa.column("dP") == sb.column("dP"));
        CHECK(sa.column("mean_H") == sb.column("mean_H"));
    }

    TEST_CASE("off-lattice times take the direct phase path")
    {
        const Grid g(-20.0, 20.0, 512, 1.0);
        const EffectivePotential pot(oracle::reference_params(6.0));
        const double h = drive_period / 256.0;
        auto a = gaussian_packet(g, 0.0, 0.0, std::sqrt(0.5));
        auto b = a;
        a.tau = b.tau = 0.3 * h;
        SplitOperatorPropagator pa(g, pot, h, Backend::serial);
        pa.advance(a, 300);
        auto c = gaussian_packet(g, 0.0, 0.0, std::sqrt(0.5));
        SplitOperatorPropagator pc(g, pot, h, Backend::serial);
        pc.advance(c, 300);
        CHECK(oracle::l2_distance(a.psi, c.psi, g.dx()) > 1e-6);
        CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-10));
    }

    TEST_CASE("norm is conserved to rounding")
    {
        const Grid g(-40.0, 40.0, 2048, 1.0);
        const EffectivePotential pot(oracle::reference_params(6.0));
        auto w = gaussian_packet(g, 0.0, 0.0, std::sqrt(0.5));
        QuantumEvolveOptions opt;
        opt.tau_final = 50.0 * drive_period;
        const auto s = evolve(w, pot, opt);
        for (double n : s.column("norm"))
            CHECK(std::abs(n - 1.0) < 1e-10);
    }

    TEST_CASE("aborts when the box is too small")
    {
        const Grid g(-4.0, 4.0, 128, 1.0);
        const EffectivePotential pot(oracle::reference_params(6.0));
        auto w = gaussian_packet(g, 0.0, 0.0, 0.5);
        QuantumEvolveOptions opt;
        opt.tau_final = 200.0 * drive_period;
        CHECK_THROWS_AS(evolve(w, pot, opt), NumericalAbort);
    }

    TEST_CASE("aborts when the momentum grid is too coarse")
    {
        const Grid g(-40.0, 40.0, 16, 1.0);
        const EffectivePotential pot(oracle::reference_params(6.0));
        auto w = gaussian_packet(g, 0.0, 0.0, 4.0);
        QuantumEvolveOptions opt;
        opt.tau_final = 10.0 * drive_period;
        CHECK_THROWS_AS(evolve(w, pot, opt), NumericalAbort);
    }

    TEST_CASE("propagator preconditions")
    {
        const Grid g(-8.0, 8.0, 64, 1.0);
        CHECK_THROWS_AS(SplitOperatorPropagator(g, EffectivePotential(oracle::reference_params(1.0, 0.5)), 0.01),
                        std::invalid_argument);
        CHECK_THROWS_AS(SplitOperatorPropagator(g, EffectivePotential(oracle::reference_params(1.0)), 0.0),
                        std::invalid_argument);
    }

    TEST_CASE("time average renormalizes")
    {
        DistributionSnapshot a;
        a.coordinate = {0.0, 1.0};
        a.probability = {1.0, 0.0};
        a.bin_width = 1.0;
        auto b = a;
        b.probability = {0.0, 1.0};
        const auto m = time_averaged_distribution({a, b});
        CHECK(m.probability[0] == doctest::Approx(0.5));
        CHECK(m.total() == doctest::Approx(1.0));
    }
}
