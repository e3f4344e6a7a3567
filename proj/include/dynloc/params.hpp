#pragma once

#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dynloc {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// One drive period of the effective Hamiltonian in dimensionless time
/// (the drive enters as cos(4 tau)).
inline constexpr double drive_period = std::numbers::pi / 2.0;

/// Cavity, atom and mirror parameters in SI units. Every frequency-like
/// quantity is stored as an angular frequency (rad/s).
struct PhysicalParams {
    double pump_power = 0.0;         // W
    double pump_frequency = 0.0;     // omega_p, rad/s
    double pump_wavelength = 0.0;    // m
    double pump_coupling = 0.0;      // eta, rad/s
    double cavity_frequency = 0.0;   // omega_c, rad/s
    double recoil_frequency = 0.0;   // omega_r, rad/s
    double cavity_length = 0.0;      // m
    double cavity_decay = 0.0;       // kappa, rad/s
    double mirror_frequency = 0.0;   // omega_m, rad/s
    double mirror_coupling = 0.0;    // xi, rad/s
    double condensate_coupling = 0.0;  // xi_sm, rad/s
    double detuning = 0.0;           // Delta, rad/s (any sign)
    double rabi = 0.0;               // U_0, rad/s
    double atom_number = 0.0;
    double mirror_amplitude = 0.0;   // q_0, dimensionless

    std::optional<double> vacuum_rabi;         // g_0, rad/s
    std::optional<double> atomic_detuning;     // Delta_a, rad/s
    std::optional<double> atomic_transition;   // omega_0, rad/s
    std::optional<double> mirror_mass;         // kg
    std::optional<double> atom_mass;           // kg

    double wave_number() const { return two_pi / pump_wavelength; }
    double side_mode_frequency() const { return 4.0 * recoil_frequency; }

    /// Throws std::invalid_argument naming the first offending field.
    void validate() const;
};

/// Dimensionless parameter set driving every simulation.
struct EffectiveParams {
    double gamma = 1.0;       // 4 omega_r / omega_m
    double beta = 0.0;        // eta^2 / kappa^2
    double mu = 0.0;          // Delta / kappa
    double mu1 = 1.0;         // xi_sm / kappa
    double lambda = 0.0;      // bare modulation (xi_sm / xi) q_0
    double lambda_eff = 0.0;  // (1 + 32/gamma^2) lambda
    double gamma_eff = 0.0;   // 4 xi / (gamma omega_m)
    double kbar = 1.0;        // effective Planck constant

    /// Lorentzian strength gamma_eff * beta appearing in the force.
    double lorentz_strength() const { return gamma_eff * beta; }

    void validate() const;
};

/// Sets lambda_eff and keeps lambda consistent with it.
EffectiveParams with_lambda_eff(EffectiveParams p, double lambda_eff);

double lambda_eff_factor(double gamma);

enum class WarningCode {
    beta_mismatch,
    mu_mismatch,
    mu1_mismatch,
    gamma_eff_mismatch,
};

std::string to_string(WarningCode code);

struct ParamWarning {
    WarningCode code;
    std::string message;
    double expected = 0.0;
    double actual = 0.0;
};

/// Reference dimensionless values, used to cross-check the
/// SI derivation.
struct QuotedValues {
    double beta = 1.8;
    double mu = -0.4;
    double mu1 = 2.0;
    double gamma_eff = 0.6034;
};

inline constexpr double warning_tolerance = 0.01;

struct Derivation {
    EffectiveParams params;
    std::vector<ParamWarning> warnings;
};

/// Builds the dimensionless set from SI inputs. Warnings flag any quoted
/// value the derivation misses by more than 1 %; they never abort.
Derivation derive_effective(const PhysicalParams& p, double mirror_amplitude, double kbar,
                            const QuotedValues& quoted = {});

struct Preset {
    PhysicalParams physical;
    EffectiveParams effective;
};

/// Default modulation of the preset (see README).
inline constexpr double preset_lambda_eff = 6.0;

/// SI values of the reference setup together with the dimensionless set
/// that drives all figure runs.
Preset reference_preset();

double tau_of_t(double t, double mirror_frequency);
double t_of_tau(double tau, double mirror_frequency);

}  // namespace dynloc
