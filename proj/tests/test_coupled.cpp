#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "dynloc/config.hpp"
#include "dynloc/coupled.hpp"
#include "dynloc/errors.hpp"

using namespace dynloc;

namespace {

CoupledParams preset()
{
    return CoupledParams::from(default_config(Experiment::coupled_check).physical);
}

CoupledParams decoupled()
{
    auto p = preset();
    p.mirror_coupling = 0.0;
    p.condensate_coupling = 0.0;
    p.pump_coupling = 0.0;
    return p;
}

double rel(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace

TEST_SUITE("coupled")
{
    TEST_CASE("decoupled mean-field oscillators are harmonic")
    {
        const auto prm = decoupled();
        CoupledState s0;
        s0.q = 0.7;
        s0.p = -0.3;
        s0.Q = 0.2;
        s0.P = 0.5;
        const double T = prm.mirror_period();
        const auto series = evolve_meanfield(s0, prm, 5.0 * T, T / 100.0);
        CHECK(series.size() == 501);
        const double om = prm.mirror_frequency;
        const double sm = 4.0 * prm.recoil_frequency;
        double err = 0.0;
        double energy = 0.0;
        for (const auto& s : series) {
            err = std::max(err, std::abs(s.q - (0.7 * std::cos(om * s.t) - 0.3 * std::sin(om * s.t))));
            err = std::max(err, std::abs(s.Q - (0.2 * std::cos(sm * s.t) + 0.5 * std::sin(sm * s.t))));
            energy = std::max({energy, std::abs(s.q * s.q + s.p * s.p - 0.58),
                               std::abs(s.Q * s.Q + s.P * s.P - 0.29)});
            CHECK(std::abs(s.c) == 0.0);
        }
        CHECK(err < 1e-8);
        CHECK(energy < 1e-8);
    }

    TEST_CASE("mean-field endpoint is stable under step halving and tighter tolerance")
    {
        const auto prm = preset();
        CoupledState s0;
        s0.q = 1.0;
        const double T = prm.mirror_period();
        const auto a = evolve_meanfield(s0, prm, 10.0 * T, T / 200.0);
        const auto b = evolve_meanfield(s0, prm, 10.0 * T, T / 400.0);
        IntegratorOptions tight;
        tight.abs_tol = tight.rel_tol = 1e-11;
        const auto c = evolve_meanfield(s0, prm, 10.0 * T, T / 200.0, tight);
        for (const auto* other : {&b, &c}) {
            CHECK(rel(a.back().q, other->back().q) < 1e-6);
            CHECK(rel(a.back().Q, other->back().Q) < 1e-6);
            CHECK(rel(std::abs(a.back().c), std::abs(other->back().c)) < 1e-6);
        }
    }

    TEST_CASE("constant cavity coupling differs from the position coupling")
    {
        auto prm = preset();
        CoupledState s0;
        s0.q = 1.0;
        const double T = prm.mirror_period();
        const auto a = evolve_meanfield(s0, prm, T, T / 50.0);
        prm.coupling = CavityCoupling::constant;
        const auto b = evolve_meanfield(s0, prm, T, T / 50.0);
        CHECK(std::abs(a.back().c - b.back().c) > 0.0);
    }

    TEST_CASE("mechanical damping drains the mirror energy")
    {
        auto prm = decoupled();
        prm.mech_damping = 0.05 * prm.mirror_frequency;
        CoupledState s0;
        s0.q = 1.0;
        const double T = prm.mirror_period();
        const auto series = evolve_meanfield(s0, prm, 10.0 * T, T / 100.0);
        double last = 2.0;
        for (std::size_t k = 0; k < series.size(); k += 100) {
            const double e = series[k].q * series[k].q + series[k].p * series[k].p;
            CHECK(e < last);
            last = e;
        }
    }

    TEST_CASE("adiabatic model reduces to free oscillators")
    {
        auto prm = preset();
        prm.pump_coupling = 0.0;
        CoupledState s0;
        s0.q = 1.0;
        s0.Q = -0.5;
        const double T = prm.mirror_period();
        const auto series = evolve_adiabatic(s0, prm, 3.0 * T, T / 100.0);
        // The side-mode restoring term is -4 omega_r^2 Q, so Q turns at 2 omega_r.
        const double sm = 2.0 * prm.recoil_frequency;
        for (const auto& s : series) {
            CHECK(std::abs(s.q - std::cos(prm.mirror_frequency * s.t)) < 1e-8);
            CHECK(std::abs(s.Q + 0.5 * std::cos(sm * s.t)) < 1e-8);
        }

        prm = preset();
        prm.mirror_coupling = 0.0;
        const auto decoupled_mirror = evolve_adiabatic(s0, prm, 3.0 * T, T / 100.0);
        CHECK(mirror_ansatz_residual(decoupled_mirror, 1.0, prm.mirror_frequency).residual < 1e-8);
    }

    TEST_CASE("adiabatic model matches step halving")
    {
        const auto prm = preset();
        CoupledState s0;
        s0.q = 1.0;
        const double T = prm.mirror_period();
        const auto a = evolve_adiabatic(s0, prm, 10.0 * T, T / 200.0);
        const auto b = evolve_adiabatic(s0, prm, 10.0 * T, T / 400.0);
        CHECK(rel(a.back().q, b.back().q) < 1e-6);
        CHECK(rel(a.back().Q, b.back().Q) < 1e-6);
    }

    TEST_CASE("ansatz residual contract")
    {
        const auto prm = decoupled();
        CoupledState s0;
        s0.q = 2.0;
        const double T = prm.mirror_period();
        const auto full = evolve_meanfield(s0, prm, 2.0 * T, T / 100.0);
        const auto r = mirror_ansatz_residual(full, 2.0, prm.mirror_frequency);
        CHECK(r.residual < 1e-8);
        CHECK_FALSE(r.partial);
        const auto part = evolve_meanfield(s0, prm, 0.5 * T, T / 100.0);
        CHECK(mirror_ansatz_residual(part, 2.0, prm.mirror_frequency).partial);
        CHECK_THROWS_AS(mirror_ansatz_residual(full, 0.0, prm.mirror_frequency), std::invalid_argument);
        CHECK_THROWS_AS(mirror_ansatz_residual({}, 1.0, prm.mirror_frequency), std::invalid_argument);
    }

    TEST_CASE("residual grows with the mirror coupling")
    {
        const auto base = preset();
        double last = -1.0;
        for (int i = 0; i < 5; ++i) {
            auto prm = base;
            prm.mirror_coupling = base.mirror_coupling * i / 4.0;
            CoupledState s0;
            s0.q = 1.0;
            const double T = prm.mirror_period();
            const auto r = mirror_ansatz_residual(evolve_meanfield(s0, prm, T, T / 200.0), 1.0,
                                                  prm.mirror_frequency);
            CHECK(r.residual > last);
            last = r.residual;
        }
    }

    TEST_CASE("argument checks")
    {
        const auto prm = preset();
        CHECK_THROWS_AS(evolve_meanfield({}, prm, 1.0, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(evolve_adiabatic({}, prm, -1.0, 0.1), std::invalid_argument);
        CoupledState bad;
        bad.Q = std::nan("");
        try {
            evolve_meanfield(bad, prm, 1.0, 0.1);
            FAIL("expected NumericalAbort");
        } catch (const NumericalAbort& e) {
            CHECK(std::string(e.what()).find("Q") != std::string::npos);
        }
    }
}
