#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "dynloc/kernels.hpp"
#include "dynloc/potential.hpp"
#include "dynloc/series.hpp"

namespace dynloc {

struct UniformSquare {
    double x_lo = -4.0;
    double x_hi = 4.0;
    double p_lo = -4.0;
    double p_hi = 4.0;
};

struct GaussianCloud {
    double mean_x = 0.0;
    double mean_p = 0.0;
    double sigma_x = 0.0;
    double sigma_p = 0.0;
};

using EnsembleSpec = std::variant<UniformSquare, GaussianCloud>;

std::string describe(const EnsembleSpec& spec);

/// Phase-space cloud matching a minimum-uncertainty packet centred at
/// (x0, p0) with position width dx.
GaussianCloud matching_cloud(double x0, double p0, double dx, double kbar);

struct ClassicalEnsemble {
    std::vector<double> x;
    std::vector<double> p;
    double tau = 0.0;
    std::uint64_t seed = 0;
    std::string provenance;

    std::size_t size() const { return x.size(); }
};

/// Deterministic in (spec, n, seed): trajectory i uses counter stream i.
ClassicalEnsemble sample_ensemble(const EnsembleSpec& spec, std::size_t n, std::uint64_t seed);

/// One drift-kick-drift leapfrog step; the drive phase is taken at the
/// midpoint time tau + dtau/2. A negative dtau retraces the step.
void step(ClassicalEnsemble& ens, const EffectivePotential& potential, double dtau,
          kernels::Backend backend = kernels::Backend::openmp);

/// `steps` leapfrog steps; the time after the call is tau + steps * dtau.
void advance(ClassicalEnsemble& ens, const EffectivePotential& potential, double dtau,
             std::size_t steps, kernels::Backend backend = kernels::Backend::openmp);

struct Dispersion {
    double dx = 0.0;
    double dp = 0.0;
};

Dispersion dispersion(const ClassicalEnsemble& ens,
                      kernels::Backend backend = kernels::Backend::openmp);

double mean_energy(const ClassicalEnsemble& ens, const EffectivePotential& potential,
                   kernels::Backend backend = kernels::Backend::openmp);

enum class Axis { position, momentum };

DistributionSnapshot distribution(const ClassicalEnsemble& ens, Axis axis, const BinSpec& bins);

struct ClassicalEvolveOptions {
    double tau_final = 0.0;
    double dtau = drive_period / 256.0;
    /// Steps between observations.
    std::size_t stride = 256;
    kernels::Backend backend = kernels::Backend::openmp;
};

using ClassicalObserver = std::function<void(const ClassicalEnsemble&)>;

/// Evolves to tau_final and records tau, dX, dP, <X>, <P>, <H> at the
/// initial time and every `stride` steps. The observer sees each recorded
/// state.
ObservableSeries evolve(ClassicalEnsemble& ens, const EffectivePotential& potential,
                        const ClassicalEvolveOptions& options,
                        const ClassicalObserver& observer = {});

struct SectionPoint {
    std::size_t trajectory = 0;
    std::size_t period = 0;
    double x = 0.0;
    double p = 0.0;
};

struct PoincareSection {
    std::vector<SectionPoint> points;  // trajectory-major, period 1..n_periods
    std::size_t n_trajectories = 0;
    std::size_t n_periods = 0;
    double stride = drive_period;
};

/// Strobes every trajectory at tau = k pi/2, k = 1..n_periods. The ensemble
/// must start on a strobe time and dtau must divide pi/2.
PoincareSection poincare(ClassicalEnsemble& ens, const EffectivePotential& potential,
                         std::size_t n_periods, double dtau,
                         kernels::Backend backend = kernels::Backend::openmp);

/// Number of integration steps per drive period for dtau; throws if dtau
/// does not divide pi/2.
std::size_t steps_per_period(double dtau);

enum class OrbitClass { regular, chaotic };

struct RecurrenceOptions {
    /// A second-half point recurs if a first-half point lies within
    /// `radius_factor` times the typical first-half nearest-neighbour gap.
    double radius_factor = 4.0;
    /// Minimum fraction of recurring second-half points for a regular orbit.
    double min_recurrence = 0.9;
    /// Second-half extent may exceed the first-half extent by this factor.
    double max_growth = 1.2;
};

struct SectionClassification {
    std::vector<OrbitClass> orbit;
    std::vector<double> recurrence;
    std::size_t regular = 0;
    std::size_t chaotic = 0;
};

/// Nearest-neighbour recurrence test on each trajectory's strobe sequence:
/// regular orbits keep returning close to points they visited in the first
/// half of the run, chaotic orbits wander into new territory.
SectionClassification classify_orbits(const PoincareSection& section,
                                      const RecurrenceOptions& options = {});

}  // namespace dynloc
