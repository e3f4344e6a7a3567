#include "dynloc/params.hpp"

#include <cmath>
#include <stdexcept>

namespace dynloc {

namespace {

void require_finite(double v, const char* name)
{
    if (!std::isfinite(v))
        throw std::invalid_argument(std::string("non-finite value for ") + name);
}

void require_positive(double v, const char* name)
{
    require_finite(v, name);
    if (v <= 0.0)
        throw std::invalid_argument(std::string(name) + " must be strictly positive");
}

void require_optional_positive(const std::optional<double>& v, const char* name)
{
    if (v)
        require_positive(*v, name);
}

}  // namespace

void PhysicalParams::validate() const
{
    require_positive(pump_power, "pump_power");
    require_positive(pump_frequency, "pump_frequency");
    require_positive(pump_wavelength, "pump_wavelength");
    require_positive(pump_coupling, "pump_coupling");
    require_positive(cavity_frequency, "cavity_frequency");
    require_positive(recoil_frequency, "recoil_frequency");
    require_positive(cavity_length, "cavity_length");
    require_positive(cavity_decay, "cavity_decay");
    require_positive(mirror_frequency, "mirror_frequency");
    require_positive(mirror_coupling, "mirror_coupling");
    require_positive(condensate_coupling, "condensate_coupling");
    require_finite(detuning, "detuning");
    require_positive(rabi, "rabi");
    require_positive(atom_number, "atom_number");
    require_finite(mirror_amplitude, "mirror_amplitude");
    require_optional_positive(vacuum_rabi, "vacuum_rabi");
    if (atomic_detuning)
        require_finite(*atomic_detuning, "atomic_detuning");
    require_optional_positive(atomic_transition, "atomic_transition");
    require_optional_positive(mirror_mass, "mirror_mass");
    require_optional_positive(atom_mass, "atom_mass");
}

void EffectiveParams::validate() const
{
    require_positive(gamma, "gamma");
    require_finite(beta, "beta");
    if (beta < 0.0)
        throw std::invalid_argument("beta must be non-negative");
    require_finite(mu, "mu");
    require_positive(mu1, "mu1");
    require_finite(lambda, "lambda");
    require_finite(lambda_eff, "lambda_eff");
    if (lambda_eff < 0.0)
        throw std::invalid_argument("lambda_eff must be non-negative");
    require_finite(gamma_eff, "gamma_eff");
    require_positive(kbar, "kbar");
}

double lambda_eff_factor(double gamma)
{
    return 1.0 + 32.0 / (gamma * gamma);
}

EffectiveParams with_lambda_eff(EffectiveParams p, double lambda_eff)
{
    p.lambda_eff = lambda_eff;
    p.lambda = lambda_eff / lambda_eff_factor(p.gamma);
    return p;
}

std::string to_string(WarningCode code)
{
    switch (code) {
    case WarningCode::beta_mismatch:
        return "beta_mismatch";
    case WarningCode::mu_mismatch:
        return "mu_mismatch";
    case WarningCode::mu1_mismatch:
        return "mu1_mismatch";
    case WarningCode::gamma_eff_mismatch:
        return "gamma_eff_mismatch";
    }
    return "unknown";
}

Derivation derive_effective(const PhysicalParams& p, double mirror_amplitude, double kbar,
                            const QuotedValues& quoted)
{
    p.validate();
    require_finite(mirror_amplitude, "mirror_amplitude");
    require_positive(kbar, "kbar");

    Derivation d;
    EffectiveParams& e = d.params;
    e.gamma = p.side_mode_frequency() / p.mirror_frequency;
    e.beta = (p.pump_coupling * p.pump_coupling) / (p.cavity_decay * p.cavity_decay);
    e.mu = p.detuning / p.cavity_decay;
    e.mu1 = p.condensate_coupling / p.cavity_decay;
    e.lambda = (p.condensate_coupling / p.mirror_coupling) * mirror_amplitude;
    e.lambda_eff = lambda_eff_factor(e.gamma) * e.lambda;
    e.gamma_eff = 4.0 * p.mirror_coupling / (e.gamma * p.mirror_frequency);
    e.kbar = kbar;

    auto check = [&](WarningCode code, const char* name, double expected, double actual) {
        if (std::abs(actual - expected) > warning_tolerance * std::abs(expected)) {
            d.warnings.push_back({code,
                                  std::string(name) + " derived as " + std::to_string(actual) +
                                      ", quoted " + std::to_string(expected),
                                  expected, actual});
        }
    };
    check(WarningCode::beta_mismatch, "beta", quoted.beta, e.beta);
    check(WarningCode::mu_mismatch, "mu", quoted.mu, e.mu);
    check(WarningCode::mu1_mismatch, "mu1", quoted.mu1, e.mu1);
    check(WarningCode::gamma_eff_mismatch, "gamma_eff", quoted.gamma_eff, e.gamma_eff);
    return d;
}

Preset reference_preset()
{
    Preset preset;
    PhysicalParams& p = preset.physical;
    p.pump_power = 0.0164e-3;
    p.pump_frequency = 3.8e14 * two_pi;
    p.pump_wavelength = 780e-9;
    p.pump_coupling = 18.4e6 * two_pi;
    p.cavity_frequency = 15.3e14 * two_pi;
    p.recoil_frequency = 3.8e3 * two_pi;
    p.cavity_length = 1.25e-4;
    p.cavity_decay = 1.3e6 * two_pi;
    p.mirror_frequency = 15.2e3 * two_pi;
    // The two coupling strengths are quoted without a 2 pi factor.
    p.mirror_coupling = 14.39e3;
    p.condensate_coupling = 15.07e6;
    p.detuning = 0.52e6 * two_pi;
    p.rabi = 3.1e6 * two_pi;
    p.atom_number = 2.8e4;
    p.mirror_amplitude = 0.0;

    QuotedValues quoted;
    EffectiveParams e;
    e.gamma = p.side_mode_frequency() / p.mirror_frequency;
    e.beta = quoted.beta;
    e.mu = quoted.mu;
    e.mu1 = quoted.mu1;
    e.gamma_eff = quoted.gamma_eff;
    e.kbar = 1.0;
    preset.effective = with_lambda_eff(e, preset_lambda_eff);
    p.mirror_amplitude = preset.effective.lambda * p.mirror_coupling / p.condensate_coupling;
    return preset;
}

double tau_of_t(double t, double mirror_frequency)
{
    return mirror_frequency * t / 4.0;
}

double t_of_tau(double tau, double mirror_frequency)
{
    return 4.0 * tau / mirror_frequency;
}

}  // namespace dynloc
