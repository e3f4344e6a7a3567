#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "dynloc/kernels.hpp"
#include "dynloc/potential.hpp"
#include "dynloc/series.hpp"

namespace dynloc {

/// Uniform periodic position grid [x_min, x_max) with its paired momentum
/// grid P_j = kbar * 2 pi / (n dX) * j, j wrapped to [-n/2, n/2).
class Grid {
public:
    Grid(double x_min, double x_max, std::size_t n, double kbar);

    std::size_t size() const { return n_; }
    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    double kbar() const { return kbar_; }
    double dx() const { return dx_; }
    double dp() const { return dp_; }
    double length() const { return x_max_ - x_min_; }

    const std::vector<double>& positions() const { return x_; }
    /// Momenta in transform (unshifted) order.
    const std::vector<double>& momenta() const { return p_; }
    /// Index into momenta() of the k-th smallest momentum.
    std::size_t sorted_index(std::size_t k) const { return (k + n_ / 2) % n_; }

private:
    double x_min_;
    double x_max_;
    std::size_t n_;
    double kbar_;
    double dx_;
    double dp_;
    std::vector<double> x_;
    std::vector<double> p_;
};

/// In-place complex FFT of fixed length on an internally owned, suitably
/// aligned buffer. forward() and backward() are unnormalized.
class FftPlan {
public:
    explicit FftPlan(std::size_t n);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    std::span<std::complex<double>> data();
    void forward();
    void backward();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Amplitudes psi_j on the grid; sum |psi_j|^2 dX = 1.
struct WavePacket {
    Grid grid;
    std::vector<std::complex<double>> psi;
    double tau = 0.0;

    double kbar() const { return grid.kbar(); }
    double norm() const;
};

/// Minimum-uncertainty Gaussian with <X> = x0, <P> = p0 and position width
/// dx. Rejected unless x0 +- 5 dx lies inside the box.
WavePacket gaussian_packet(const Grid& grid, double x0, double p0, double dx);

/// Momentum-space amplitudes, ascending momentum, normalized so that
/// sum |phi_j|^2 dP = 1.
struct MomentumAmplitudes {
    std::vector<double> momentum;
    std::vector<std::complex<double>> amplitude;
    double dp = 0.0;
};

MomentumAmplitudes momentum_representation(const WavePacket& packet);

/// Exact evolution under P^2/2 alone for a time tau.
void free_evolve(WavePacket& packet, double tau);

DistributionSnapshot position_distribution(const WavePacket& packet);
DistributionSnapshot momentum_distribution(const WavePacket& packet);

struct QuantumObservables {
    double mean_x = 0.0;
    double mean_p = 0.0;
    double dx = 0.0;
    double dp = 0.0;
    double mean_h = 0.0;
    double norm = 0.0;
};

QuantumObservables observables(const WavePacket& packet, const EffectivePotential& potential,
                               kernels::Backend backend = kernels::Backend::openmp);

struct MonitorOptions {
    bool enabled = true;
    /// Largest tolerated change of the norm in a single step.
    double norm_tolerance = 1e-8;
    /// Outer fraction of the box (each side) watched for leaking density.
    double edge_fraction = 0.05;
    double edge_tolerance = 1e-6;
};

/// Strang splitting
///   exp(-i V dtau / 2 kbar) exp(-i K dtau / kbar) exp(-i V dtau / 2 kbar)
/// with V evaluated at the midpoint of each step and K = P^2/2 applied on
/// the momentum grid.
class SplitOperatorPropagator {
public:
    SplitOperatorPropagator(const Grid& grid, const EffectivePotential& potential, double dtau,
                            kernels::Backend backend = kernels::Backend::openmp,
                            MonitorOptions monitor = {});

    double dtau() const { return dtau_; }

    void step(WavePacket& packet);
    void advance(WavePacket& packet, std::size_t steps);

    /// Throws NumericalAbort if the position density reaches the box edge.
    void check_edges(const WavePacket& packet) const;

private:
    Grid grid_;
    EffectivePotential potential_;
    double dtau_;
    kernels::Backend backend_;
    MonitorOptions monitor_;
    std::vector<double> base_phase_;
    std::vector<double> slope_phase_;
    std::vector<std::complex<double>> kinetic_;
    // Half-step potential factors for each step of one drive period, used
    // when the step divides the period and the packet time sits on the
    // step lattice. Empty if too large.
    std::size_t period_steps_ = 0;
    std::vector<std::complex<double>> phase_table_;
    FftPlan fft_;
};

struct QuantumEvolveOptions {
    double tau_final = 0.0;
    double dtau = drive_period / 256.0;
    std::size_t stride = 256;
    kernels::Backend backend = kernels::Backend::openmp;
    MonitorOptions monitor;
};

using QuantumObserver = std::function<void(const WavePacket&)>;

/// Records tau, <X>, <P>, dX, dP, <H>, norm at the initial time and every
/// `stride` steps. Aborts if the momentum density reaches the edge of the
/// momentum grid at an observation.
ObservableSeries evolve(WavePacket& packet, const EffectivePotential& potential,
                        const QuantumEvolveOptions& options, const QuantumObserver& observer = {});

/// Mean of stored snapshots, renormalized.
DistributionSnapshot time_averaged_distribution(const std::vector<DistributionSnapshot>& snapshots);

}  // namespace dynloc
