#include "dynloc/classical.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dynloc/errors.hpp"
#include "dynloc/rng.hpp"

namespace dynloc {

namespace {

kernels::ForceCoefficients force_of(const EffectivePotential& potential)
{
    const auto& e = potential.params();
    return {e.mu, e.mu1, e.lorentz_strength()};
}

void check_finite(const ClassicalEnsemble& ens)
{
    for (std::size_t i = 0; i < ens.size(); ++i) {
        if (!std::isfinite(ens.x[i]) || !std::isfinite(ens.p[i])) {
            throw NumericalAbort("non-finite classical state in trajectory " + std::to_string(i) +
                                 " at tau=" + std::to_string(ens.tau));
        }
    }
}

double median(std::vector<double> v)
{
    if (v.empty())
        return 0.0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

}  // namespace

std::string describe(const EnsembleSpec& spec)
{
    std::ostringstream os;
    os.precision(17);
    if (const auto* u = std::get_if<UniformSquare>(&spec)) {
        os << "uniform x[" << u->x_lo << "," << u->x_hi << ") p[" << u->p_lo << "," << u->p_hi
           << ")";
    } else {
        const auto& g = std::get<GaussianCloud>(spec);
        os << "gaussian mean(" << g.mean_x << "," << g.mean_p << ") sigma(" << g.sigma_x << ","
           << g.sigma_p << ")";
    }
    return os.str();
}

GaussianCloud matching_cloud(double x0, double p0, double dx, double kbar)
{
    return {x0, p0, dx, kbar / (2.0 * dx)};
}

ClassicalEnsemble sample_ensemble(const EnsembleSpec& spec, std::size_t n, std::uint64_t seed)
{
    if (n == 0)
        throw std::invalid_argument("ensemble size must be at least 1");
    ClassicalEnsemble ens;
    ens.x.resize(n);
    ens.p.resize(n);
    ens.seed = seed;
    ens.provenance = describe(spec) + " seed=" + std::to_string(seed) +
                     " n=" + std::to_string(n) + " rng=splitmix-counter";

    if (const auto* u = std::get_if<UniformSquare>(&spec)) {
        if (!(u->x_hi > u->x_lo) || !(u->p_hi > u->p_lo))
            throw std::invalid_argument("uniform ensemble bounds must be ordered");
        for (std::size_t i = 0; i < n; ++i) {
            const CounterRng rng(seed, i);
            ens.x[i] = u->x_lo + (u->x_hi - u->x_lo) * rng.uniform(0);
            ens.p[i] = u->p_lo + (u->p_hi - u->p_lo) * rng.uniform(1);
        }
    } else {
        const auto& g = std::get<GaussianCloud>(spec);
        if (!(g.sigma_x >= 0.0) || !(g.sigma_p >= 0.0))
            throw std::invalid_argument("gaussian ensemble widths must be non-negative");
        for (std::size_t i = 0; i < n; ++i) {
            const CounterRng rng(seed, i);
            const auto [a, b] = rng.normal_pair(0);
            ens.x[i] = g.mean_x + g.sigma_x * a;
            ens.p[i] = g.mean_p + g.sigma_p * b;
        }
    }
    return ens;
}

void step(ClassicalEnsemble& ens, const EffectivePotential& potential, double dtau,
          kernels::Backend backend)
{
    advance(ens, potential, dtau, 1, backend);
}

void advance(ClassicalEnsemble& ens, const EffectivePotential& potential, double dtau,
             std::size_t steps, kernels::Backend backend)
{
    if (!std::isfinite(dtau) || dtau == 0.0)
        throw std::invalid_argument("time step must be finite and nonzero");
    if (steps == 0)
        return;
    std::vector<double> drive(steps);
    for (std::size_t k = 0; k < steps; ++k)
        drive[k] = potential.drive(ens.tau + (static_cast<double>(k) + 0.5) * dtau);
    kernels::leapfrog(backend, ens.x, ens.p, force_of(potential), drive, dtau);
    ens.tau += static_cast<double>(steps) * dtau;
    check_finite(ens);
}

Dispersion dispersion(const ClassicalEnsemble& ens, kernels::Backend backend)
{
    if (ens.size() < 2)
        throw std::invalid_argument("dispersion needs at least two trajectories");
    return {std::sqrt(kernels::moments(backend, ens.x).variance),
            std::sqrt(kernels::moments(backend, ens.p).variance)};
}

double mean_energy(const ClassicalEnsemble& ens, const EffectivePotential& potential,
                   kernels::Backend backend)
{
    if (ens.size() == 0)
        throw std::invalid_argument("mean energy of an empty ensemble");
    std::vector<double> h(ens.size());
    for (std::size_t i = 0; i < ens.size(); ++i)
        h[i] = potential.hamiltonian(ens.x[i], ens.p[i], ens.tau);
    return kernels::deterministic_sum(backend, h) / static_cast<double>(ens.size());
}

DistributionSnapshot distribution(const ClassicalEnsemble& ens, Axis axis, const BinSpec& bins)
{
    if (ens.size() == 0)
        throw std::invalid_argument("distribution of an empty ensemble");
    return histogram(axis == Axis::position ? ens.x : ens.p, bins);
}

ObservableSeries evolve(ClassicalEnsemble& ens, const EffectivePotential& potential,
                        const ClassicalEvolveOptions& options, const ClassicalObserver& observer)
{
    if (!(options.dtau > 0.0) || !std::isfinite(options.dtau))
        throw std::invalid_argument("evolve needs a positive time step");
    if (options.stride == 0)
        throw std::invalid_argument("observation stride must be positive");
    const double tau0 = ens.tau;
    const double span = options.tau_final - tau0;
    if (span < 0.0)
        throw std::invalid_argument("tau_final precedes the ensemble time");
    const auto total = static_cast<std::size_t>(std::llround(span / options.dtau));

    ObservableSeries series({"dX", "dP", "mean_X", "mean_P", "mean_H"});
    auto record = [&] {
        const auto mx = kernels::moments(options.backend, ens.x);
        const auto mp = kernels::moments(options.backend, ens.p);
        series.append(ens.tau, {std::sqrt(mx.variance), std::sqrt(mp.variance), mx.mean, mp.mean,
                                mean_energy(ens, potential, options.backend)});
        if (observer)
            observer(ens);
    };

    record();
    std::size_t done = 0;
    while (done < total) {
        const std::size_t chunk = std::min(options.stride, total - done);
        advance(ens, potential, options.dtau, chunk, options.backend);
        done += chunk;
        // Re-anchor to avoid accumulating rounding in the clock.
        ens.tau = tau0 + static_cast<double>(done) * options.dtau;
        record();
    }
    return series;
}

std::size_t steps_per_period(double dtau)
{
    if (!(dtau > 0.0))
        throw std::invalid_argument("time step must be positive");
    const double ratio = drive_period / dtau;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded)
        throw std::invalid_argument("time step must divide the drive period pi/2");
    return static_cast<std::size_t>(rounded);
}

PoincareSection poincare(ClassicalEnsemble& ens, const EffectivePotential& potential,
                         std::size_t n_periods, double dtau, kernels::Backend backend)
{
    const std::size_t per = steps_per_period(dtau);
    const double start_periods = ens.tau / drive_period;
    const double k0 = std::round(start_periods);
    if (std::abs(start_periods - k0) > 1e-9 * std::max(1.0, k0))
        throw std::invalid_argument("Poincare section must start on a strobe time");

    PoincareSection section;
    section.n_trajectories = ens.size();
    section.n_periods = n_periods;
    std::vector<std::vector<SectionPoint>> by_traj(ens.size());
    for (auto& v : by_traj)
        v.reserve(n_periods);
    for (std::size_t k = 1; k <= n_periods; ++k) {
        advance(ens, potential, dtau, per, backend);
        ens.tau = (k0 + static_cast<double>(k)) * drive_period;
        for (std::size_t i = 0; i < ens.size(); ++i)
            by_traj[i].push_back({i, k, ens.x[i], ens.p[i]});
    }
    section.points.reserve(ens.size() * n_periods);
    for (const auto& v : by_traj)
        section.points.insert(section.points.end(), v.begin(), v.end());
    return section;
}

SectionClassification classify_orbits(const PoincareSection& section,
                                      const RecurrenceOptions& options)
{
    SectionClassification out;
    const std::size_t np = section.n_periods;
    if (np < 8)
        throw std::invalid_argument("orbit classification needs at least 8 strobes");
    out.orbit.reserve(section.n_trajectories);
    for (std::size_t t = 0; t < section.n_trajectories; ++t) {
        const SectionPoint* pts = section.points.data() + t * np;
        const std::size_t half = np / 2;

        double cx = 0.0;
        double cp = 0.0;
        for (std::size_t i = 0; i < half; ++i) {
            cx += pts[i].x;
            cp += pts[i].p;
        }
        cx /= static_cast<double>(half);
        cp /= static_cast<double>(half);
        auto radius = [&](const SectionPoint& s) { return std::hypot(s.x - cx, s.p - cp); };
        double extent_first = 0.0;
        double extent_second = 0.0;
        for (std::size_t i = 0; i < half; ++i)
            extent_first = std::max(extent_first, radius(pts[i]));
        for (std::size_t i = half; i < np; ++i)
            extent_second = std::max(extent_second, radius(pts[i]));

        std::vector<double> gaps(half);
        for (std::size_t i = 0; i < half; ++i) {
            double best = INFINITY;
            for (std::size_t j = 0; j < half; ++j)
                if (j != i)
                    best = std::min(best, std::hypot(pts[i].x - pts[j].x, pts[i].p - pts[j].p));
            gaps[i] = best;
        }
        const double scale = std::max(extent_first, 1e-12);
        const double gap = std::max(median(gaps), 1e-9 * scale);
        const double r = options.radius_factor * gap;

        std::size_t recurring = 0;
        for (std::size_t i = half; i < np; ++i) {
            double best = INFINITY;
            for (std::size_t j = 0; j < half; ++j)
                best = std::min(best, std::hypot(pts[i].x - pts[j].x, pts[i].p - pts[j].p));
            if (best <= r)
                ++recurring;
        }
        const double recurrence =
            static_cast<double>(recurring) / static_cast<double>(np - half);
        const bool bounded = extent_second <= options.max_growth * scale;
        const bool regular = bounded && recurrence >= options.min_recurrence;
        out.recurrence.push_back(recurrence);
        out.orbit.push_back(regular ? OrbitClass::regular : OrbitClass::chaotic);
        ++(regular ? out.regular : out.chaotic);
    }
    return out;
}

}  // namespace dynloc
