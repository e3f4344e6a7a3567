#pragma once

#include <complex>
#include <vector>

#include "dynloc/params.hpp"

namespace dynloc {

/// Mean-field state of mirror (q, p), condensate side mode (Q, P) and
/// cavity amplitude c at time t (seconds). All quadratures dimensionless.
struct CoupledState {
    double q = 0.0;
    double p = 0.0;
    double Q = 0.0;
    double P = 0.0;
    std::complex<double> c{0.0, 0.0};
    double t = 0.0;
};

/// How the side mode enters the cavity-field equation.
enum class CavityCoupling {
    side_mode_position,  // -i xi_sm Q c
    constant,            // -i xi_sm c, as printed without the operator factor
};

struct CoupledParams {
    double mirror_frequency = 0.0;     // omega_m, rad/s
    double recoil_frequency = 0.0;     // omega_r, rad/s
    double mirror_coupling = 0.0;      // xi, rad/s
    double condensate_coupling = 0.0;  // xi_sm, rad/s
    double cavity_decay = 0.0;         // kappa, rad/s
    double pump_coupling = 0.0;        // eta, rad/s
    double detuning_tilde = 0.0;       // rad/s
    double mech_damping = 0.0;         // mirror energy decay, rad/s
    double sm_damping = 0.0;           // side-mode damping, rad/s
    CavityCoupling coupling = CavityCoupling::side_mode_position;

    /// Copies the SI couplings; the effective detuning defaults to Delta.
    static CoupledParams from(const PhysicalParams& p);

    double mirror_period() const;
};

struct IntegratorOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
};

/// Noise-free mean-field Langevin equations:
///   c' = (i D + i xi q - i xi_sm Q - kappa) c + eta
///   p' = -omega_m q - xi |c|^2 - gamma_m p,     q' = omega_m p
///   P' = -4 omega_r Q - xi_sm |c|^2 - gamma_sm P, Q' = 4 omega_r P - gamma_sm Q
/// integrated with an adaptive Dormand-Prince 5(4) pair whose step never
/// exceeds dt. Returns samples at t = 0, dt, 2 dt, ...
std::vector<CoupledState> evolve_meanfield(const CoupledState& initial, const CoupledParams& params,
                                           double t_final, double dt,
                                           const IntegratorOptions& options = {});

/// Cavity-eliminated oscillator pair
///   q'' = -omega_m^2 q + omega_m xi eta^2 / L
///   Q'' = -4 omega_r^2 Q - 4 omega_r xi_sm eta^2 / L,
///   L = kappa^2 + (D + xi q - xi_sm Q)^2.
/// The state's p and P carry q'/omega_m and Q'/(4 omega_r); c is the
/// adiabatic cavity amplitude eta / (kappa - i (D + xi q - xi_sm Q)).
std::vector<CoupledState> evolve_adiabatic(const CoupledState& initial, const CoupledParams& params,
                                           double t_final, double dt,
                                           const IntegratorOptions& options = {});

struct AnsatzResidual {
    /// max_t |q(t) - q0 cos(omega_m t)| / |q0|
    double residual = 0.0;
    /// True when the series covers less than one mirror period.
    bool partial = false;
};

AnsatzResidual mirror_ansatz_residual(const std::vector<CoupledState>& series, double q0,
                                      double mirror_frequency);

}  // namespace dynloc
