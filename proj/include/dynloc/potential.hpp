#pragma once

#include <cmath>

#include "dynloc/params.hpp"

namespace dynloc {

struct PotentialTerms {
    double harmonic = 0.0;
    double drive = 0.0;
    double lorentz = 0.0;

    double total() const { return harmonic + drive + lorentz; }
};

/// Time-periodic effective potential in the transformed coordinate
/// X = Q - lambda cos(4 tau):
///
///   V(X, tau) = X^2/2 + X lambda_eff cos(4 tau) - (gamma_eff beta / mu1) atan(mu - mu1 X)
///
/// The constant of integration of the atan primitive is zero.
class EffectivePotential {
public:
    explicit EffectivePotential(const EffectiveParams& params);

    const EffectiveParams& params() const { return params_; }

    /// lambda_eff cos(4 tau), the coefficient of X in the drive term.
    double drive(double tau) const { return params_.lambda_eff * std::cos(4.0 * tau); }

    PotentialTerms terms(double x, double tau) const;
    double value(double x, double tau) const { return terms(x, tau).total(); }

    /// Time-independent part of V (harmonic + Lorentzian primitive).
    double static_value(double x) const
    {
        return 0.5 * x * x - lorentz_coeff_ * std::atan(params_.mu - params_.mu1 * x);
    }

    /// -dV/dX in closed form, for a precomputed drive() value.
    double force_with_drive(double x, double drive_value) const
    {
        const double u = params_.mu - params_.mu1 * x;
        return -x - drive_value - strength_ / (1.0 + u * u);
    }
    double force(double x, double tau) const { return force_with_drive(x, drive(tau)); }

    double hamiltonian(double x, double p, double tau) const { return 0.5 * p * p + value(x, tau); }

    /// Lab-frame side-mode coordinate Q = X + lambda cos(4 tau).
    double to_lab(double x, double tau) const { return x + params_.lambda * std::cos(4.0 * tau); }

private:
    EffectiveParams params_;
    double strength_;      // gamma_eff beta
    double lorentz_coeff_; // gamma_eff beta / mu1
};

}  // namespace dynloc
