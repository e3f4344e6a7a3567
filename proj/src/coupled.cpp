#include "dynloc/coupled.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "dynloc/errors.hpp"

namespace dynloc {

namespace odeint = boost::numeric::odeint;

namespace {

using State6 = std::array<double, 6>;  // q, p, Q, P, Re c, Im c
using State4 = std::array<double, 4>;  // q, q', Q, Q'

void check_args(const CoupledParams& prm, double t_final, double dt)
{
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw std::invalid_argument("coupled integration step must be positive");
    if (!(t_final >= 0.0) || !std::isfinite(t_final))
        throw std::invalid_argument("coupled integration end time must be non-negative");
    if (!(prm.mirror_frequency > 0.0) || !(prm.recoil_frequency > 0.0) || !(prm.cavity_decay > 0.0))
        throw std::invalid_argument("coupled model needs positive omega_m, omega_r and kappa");
}

void check_finite(const CoupledState& s)
{
    const std::pair<const char*, double> parts[] = {
        {"q", s.q}, {"p", s.p}, {"Q", s.Q}, {"P", s.P}, {"Re c", s.c.real()}, {"Im c", s.c.imag()}};
    for (const auto& [name, v] : parts)
        if (!std::isfinite(v))
            throw NumericalAbort(std::string("non-finite coupled state component ") + name +
                                 " at t=" + std::to_string(s.t));
}

double cavity_detuning(const CoupledParams& prm, double q, double Q)
{
    return prm.detuning_tilde + prm.mirror_coupling * q - prm.condensate_coupling * Q;
}

std::size_t sample_count(double t_final, double dt)
{
    return static_cast<std::size_t>(std::floor(t_final / dt * (1.0 + 1e-12))) + 1;
}

}  // namespace

CoupledParams CoupledParams::from(const PhysicalParams& p)
{
    CoupledParams c;
    c.mirror_frequency = p.mirror_frequency;
    c.recoil_frequency = p.recoil_frequency;
    c.mirror_coupling = p.mirror_coupling;
    c.condensate_coupling = p.condensate_coupling;
    c.cavity_decay = p.cavity_decay;
    c.pump_coupling = p.pump_coupling;
    c.detuning_tilde = p.detuning;
    return c;
}

double CoupledParams::mirror_period() const
{
    return two_pi / mirror_frequency;
}

std::vector<CoupledState> evolve_meanfield(const CoupledState& initial, const CoupledParams& prm,
                                           double t_final, double dt,
                                           const IntegratorOptions& options)
{
    check_args(prm, t_final, dt);
    check_finite(initial);
    const double om = prm.mirror_frequency;
    const double sm = 4.0 * prm.recoil_frequency;
    const bool use_q = prm.coupling == CavityCoupling::side_mode_position;

    auto rhs = [&](const State6& s, State6& d, double) {
        const std::complex<double> c(s[4], s[5]);
        const double intensity = std::norm(c);
        const double side = use_q ? prm.condensate_coupling * s[2] : prm.condensate_coupling;
        const std::complex<double> rate(-prm.cavity_decay,
                                        prm.detuning_tilde + prm.mirror_coupling * s[0] - side);
        const std::complex<double> dc = rate * c + prm.pump_coupling;
        d[0] = om * s[1];
        d[1] = -om * s[0] - prm.mirror_coupling * intensity - prm.mech_damping * s[1];
        d[2] = sm * s[3] - prm.sm_damping * s[2];
        d[3] = -sm * s[2] - prm.condensate_coupling * intensity - prm.sm_damping * s[3];
        d[4] = dc.real();
        d[5] = dc.imag();
    };

    std::vector<CoupledState> out;
    out.reserve(sample_count(t_final, dt));
    auto observe = [&](const State6& s, double t) {
        CoupledState cs{s[0], s[1], s[2], s[3], {s[4], s[5]}, t};
        check_finite(cs);
        out.push_back(cs);
    };

    State6 x{initial.q, initial.p, initial.Q, initial.P, initial.c.real(), initial.c.imag()};
    auto stepper = odeint::make_controlled(options.abs_tol, options.rel_tol,
                                           odeint::runge_kutta_dopri5<State6>());
    odeint::integrate_const(stepper, rhs, x, initial.t, initial.t + t_final, dt, observe);
    return out;
}

std::vector<CoupledState> evolve_adiabatic(const CoupledState& initial, const CoupledParams& prm,
                                           double t_final, double dt,
                                           const IntegratorOptions& options)
{
    check_args(prm, t_final, dt);
    check_finite(initial);
    const double om = prm.mirror_frequency;
    const double wr = prm.recoil_frequency;
    const double eta2 = prm.pump_coupling * prm.pump_coupling;
    const double k2 = prm.cavity_decay * prm.cavity_decay;

    auto rhs = [&](const State4& s, State4& d, double) {
        const double det = cavity_detuning(prm, s[0], s[2]);
        const double lorentz = eta2 / (k2 + det * det);
        d[0] = s[1];
        d[1] = -om * om * s[0] + om * prm.mirror_coupling * lorentz;
        d[2] = s[3];
        d[3] = -4.0 * wr * wr * s[2] - 4.0 * wr * prm.condensate_coupling * lorentz;
    };

    std::vector<CoupledState> out;
    out.reserve(sample_count(t_final, dt));
    auto observe = [&](const State4& s, double t) {
        const double det = cavity_detuning(prm, s[0], s[2]);
        const std::complex<double> c =
            prm.pump_coupling / std::complex<double>(prm.cavity_decay, -det);
        CoupledState cs{s[0], s[1] / om, s[2], s[3] / (4.0 * wr), c, t};
        check_finite(cs);
        out.push_back(cs);
    };

    State4 x{initial.q, initial.p * om, initial.Q, initial.P * 4.0 * wr};
    auto stepper = odeint::make_controlled(options.abs_tol, options.rel_tol,
                                           odeint::runge_kutta_dopri5<State4>());
    odeint::integrate_const(stepper, rhs, x, initial.t, initial.t + t_final, dt, observe);
    return out;
}

AnsatzResidual mirror_ansatz_residual(const std::vector<CoupledState>& series, double q0,
                                      double mirror_frequency)
{
    if (q0 == 0.0 || !std::isfinite(q0))
        throw std::invalid_argument("mirror amplitude q0 must be nonzero");
    if (series.empty())
        throw std::invalid_argument("ansatz residual of an empty series");
    AnsatzResidual r;
    const double t0 = series.front().t;
    for (const auto& s : series) {
        const double dev = std::abs(s.q - q0 * std::cos(mirror_frequency * (s.t - t0)));
        r.residual = std::max(r.residual, dev);
    }
    r.residual /= std::abs(q0);
    r.partial = (series.back().t - t0) < two_pi / mirror_frequency;
    return r;
}

}  // namespace dynloc
