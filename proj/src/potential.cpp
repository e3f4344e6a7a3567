#include "dynloc/potential.hpp"

namespace dynloc {

EffectivePotential::EffectivePotential(const EffectiveParams& params)
    : params_(params),
      strength_(params.gamma_eff * params.beta),
      lorentz_coeff_(params.gamma_eff * params.beta / params.mu1)
{
    params_.validate();
}

PotentialTerms EffectivePotential::terms(double x, double tau) const
{
    PotentialTerms t;
    t.harmonic = 0.5 * x * x;
    t.drive = x * drive(tau);
    t.lorentz = -lorentz_coeff_ * std::atan(params_.mu - params_.mu1 * x);
    return t;
}

}  // namespace dynloc
