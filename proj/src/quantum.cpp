#include "dynloc/quantum.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "dynloc/errors.hpp"

namespace dynloc {

namespace {

constexpr std::size_t phase_table_limit = std::size_t{1} << 22;  // entries

// The FFTW planner is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

bool is_power_of_two(std::size_t n)
{
    return n != 0 && (n & (n - 1)) == 0;
}

FftPlan& scratch_plan(std::size_t n)
{
    thread_local std::unordered_map<std::size_t, std::unique_ptr<FftPlan>> cache;
    auto& slot = cache[n];
    if (!slot)
        slot = std::make_unique<FftPlan>(n);
    return *slot;
}

double edge_mass(const WavePacket& packet, double fraction)
{
    const std::size_t n = packet.psi.size();
    const auto edge = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    double mass = 0.0;
    for (std::size_t j = 0; j < edge; ++j)
        mass += std::norm(packet.psi[j]) + std::norm(packet.psi[n - 1 - j]);
    return mass * packet.grid.dx();
}

}  // namespace

Grid::Grid(double x_min, double x_max, std::size_t n, double kbar)
    : x_min_(x_min), x_max_(x_max), n_(n), kbar_(kbar)
{
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min))
        throw std::invalid_argument("grid bounds must be finite with x_max > x_min");
    if (n < 16 || !is_power_of_two(n))
        throw std::invalid_argument("grid size must be a power of two >= 16");
    if (!(kbar > 0.0) || !std::isfinite(kbar))
        throw std::invalid_argument("kbar must be positive");
    dx_ = (x_max - x_min) / static_cast<double>(n);
    dp_ = kbar * 2.0 * std::numbers::pi / (static_cast<double>(n) * dx_);
    x_.resize(n);
    p_.resize(n);
    const auto half = static_cast<std::ptrdiff_t>(n / 2);
    for (std::size_t j = 0; j < n; ++j) {
        x_[j] = x_min + static_cast<double>(j) * dx_;
        auto k = static_cast<std::ptrdiff_t>(j);
        if (k >= half)
            k -= static_cast<std::ptrdiff_t>(n);
        p_[j] = dp_ * static_cast<double>(k);
    }
}

struct FftPlan::Impl {
    std::size_t n = 0;
    fftw_complex* buffer = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;
};

FftPlan::FftPlan(std::size_t n) : impl_(std::make_unique<Impl>())
{
    impl_->n = n;
    std::lock_guard lock(planner_mutex());
    impl_->buffer = fftw_alloc_complex(n);
    if (impl_->buffer == nullptr)
        throw std::bad_alloc();
    const int len = static_cast<int>(n);
    impl_->forward = fftw_plan_dft_1d(len, impl_->buffer, impl_->buffer, FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->backward =
        fftw_plan_dft_1d(len, impl_->buffer, impl_->buffer, FFTW_BACKWARD, FFTW_ESTIMATE);
}

FftPlan::~FftPlan()
{
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(impl_->forward);
    fftw_destroy_plan(impl_->backward);
    fftw_free(impl_->buffer);
}

std::span<std::complex<double>> FftPlan::data()
{
    return {reinterpret_cast<std::complex<double>*>(impl_->buffer), impl_->n};
}

void FftPlan::forward()
{
    fftw_execute(impl_->forward);
}

void FftPlan::backward()
{
    fftw_execute(impl_->backward);
}

double WavePacket::norm() const
{
    double s = 0.0;
    for (const auto& a : psi)
        s += std::norm(a);
    return s * grid.dx();
}

WavePacket gaussian_packet(const Grid& grid, double x0, double p0, double dx)
{
    if (!(dx > 0.0) || !std::isfinite(x0) || !std::isfinite(p0))
        throw std::invalid_argument("packet needs finite centre and positive width");
    if (x0 - 5.0 * dx < grid.x_min() || x0 + 5.0 * dx > grid.x_max())
        throw std::invalid_argument("packet support x0 +- 5 dX does not fit inside the grid");
    WavePacket packet{grid, std::vector<std::complex<double>>(grid.size()), 0.0};
    const double kbar = grid.kbar();
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double d = grid.positions()[j] - x0;
        const double amp = std::exp(-d * d / (4.0 * dx * dx));
        const double phase = p0 * grid.positions()[j] / kbar;
        packet.psi[j] = std::polar(amp, phase);
    }
    const double scale = 1.0 / std::sqrt(packet.norm());
    for (auto& a : packet.psi)
        a *= scale;
    return packet;
}

MomentumAmplitudes momentum_representation(const WavePacket& packet)
{
    const Grid& grid = packet.grid;
    const std::size_t n = grid.size();
    FftPlan& plan = scratch_plan(n);
    auto buf = plan.data();
    std::copy(packet.psi.begin(), packet.psi.end(), buf.begin());
    plan.forward();

    MomentumAmplitudes out;
    out.dp = grid.dp();
    out.momentum.resize(n);
    out.amplitude.resize(n);
    const double scale = grid.dx() / std::sqrt(2.0 * std::numbers::pi * grid.kbar());
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = grid.sorted_index(k);
        const double p = grid.momenta()[j];
        out.momentum[k] = p;
        out.amplitude[k] = buf[j] * std::polar(scale, -p * grid.x_min() / grid.kbar());
    }
    return out;
}

void free_evolve(WavePacket& packet, double tau)
{
    const Grid& grid = packet.grid;
    const std::size_t n = grid.size();
    FftPlan& plan = scratch_plan(n);
    auto buf = plan.data();
    std::copy(packet.psi.begin(), packet.psi.end(), buf.begin());
    plan.forward();
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double p = grid.momenta()[j];
        buf[j] *= std::polar(inv_n, -0.5 * p * p * tau / grid.kbar());
    }
    plan.backward();
    std::copy(buf.begin(), buf.end(), packet.psi.begin());
    packet.tau += tau;
}

DistributionSnapshot position_distribution(const WavePacket& packet)
{
    DistributionSnapshot d;
    d.coordinate = packet.grid.positions();
    d.bin_width = packet.grid.dx();
    d.probability.resize(packet.psi.size());
    for (std::size_t j = 0; j < packet.psi.size(); ++j)
        d.probability[j] = std::norm(packet.psi[j]) * d.bin_width;
    return d;
}

DistributionSnapshot momentum_distribution(const WavePacket& packet)
{
    const auto m = momentum_representation(packet);
    DistributionSnapshot d;
    d.coordinate = m.momentum;
    d.bin_width = m.dp;
    d.probability.resize(m.amplitude.size());
    for (std::size_t k = 0; k < m.amplitude.size(); ++k)
        d.probability[k] = std::norm(m.amplitude[k]) * m.dp;
    return d;
}

QuantumObservables observables(const WavePacket& packet, const EffectivePotential& potential,
                               kernels::Backend backend)
{
    const auto pos = position_distribution(packet);
    const auto mom = momentum_distribution(packet);
    QuantumObservables o;
    o.norm = kernels::deterministic_sum(backend, pos.probability);
    const auto mx = kernels::weighted_moments(backend, pos.coordinate, pos.probability);
    const auto mp = kernels::weighted_moments(backend, mom.coordinate, mom.probability);
    o.mean_x = mx.mean;
    o.dx = std::sqrt(mx.variance);
    o.mean_p = mp.mean;
    o.dp = std::sqrt(mp.variance);

    std::vector<double> buf(pos.coordinate.size());
    for (std::size_t k = 0; k < buf.size(); ++k)
        buf[k] = mom.probability[k] * 0.5 * mom.coordinate[k] * mom.coordinate[k];
    const double kinetic = kernels::deterministic_sum(backend, buf);
    for (std::size_t j = 0; j < buf.size(); ++j)
        buf[j] = pos.probability[j] * potential.value(pos.coordinate[j], packet.tau);
    const double pot = kernels::deterministic_sum(backend, buf);
    o.mean_h = (kinetic + pot) / o.norm;
    return o;
}

SplitOperatorPropagator::SplitOperatorPropagator(const Grid& grid,
                                                 const EffectivePotential& potential,
                                                 double dtau, kernels::Backend backend,
                                                 MonitorOptions monitor)
    : grid_(grid),
      potential_(potential),
      dtau_(dtau),
      backend_(backend),
      monitor_(monitor),
      fft_(grid.size())
{
    if (!(dtau > 0.0) || !std::isfinite(dtau))
        throw std::invalid_argument("split-operator step must be positive");
    if (std::abs(potential.params().kbar - grid.kbar()) > 1e-15 * grid.kbar())
        throw std::invalid_argument("grid and potential disagree on kbar");
    const std::size_t n = grid.size();
    const double kbar = grid.kbar();
    const double half = 0.5 * dtau / kbar;
    base_phase_.resize(n);
    slope_phase_.resize(n);
    kinetic_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double x = grid.positions()[j];
        base_phase_[j] = potential.static_value(x) * half;
        slope_phase_[j] = x * half;
        const double p = grid.momenta()[j];
        kinetic_[j] = std::polar(1.0, -0.5 * p * p * dtau / kbar);
    }

    const double per_period = drive_period / dtau;
    const auto steps = static_cast<std::size_t>(std::llround(per_period));
    if (steps > 0 && std::abs(per_period - static_cast<double>(steps)) < 1e-9 &&
        steps * n <= phase_table_limit) {
        period_steps_ = steps;
        phase_table_.assign(steps * n, {1.0, 0.0});
        for (std::size_t k = 0; k < steps; ++k) {
            const double drive = potential.drive((static_cast<double>(k) + 0.5) * dtau);
            kernels::apply_potential_phase_serial({phase_table_.data() + k * n, n}, base_phase_,
                                                  slope_phase_, drive);
        }
    }
}

void SplitOperatorPropagator::check_edges(const WavePacket& packet) const
{
    const double mass = edge_mass(packet, monitor_.edge_fraction);
    if (mass > monitor_.edge_tolerance) {
        throw NumericalAbort("box too small: probability " + std::to_string(mass) +
                             " in the outer edge of the position grid at tau=" +
                             std::to_string(packet.tau));
    }
}

void SplitOperatorPropagator::step(WavePacket& packet)
{
    if (packet.psi.size() != grid_.size())
        throw std::invalid_argument("packet does not live on the propagator grid");
    const double before = monitor_.enabled ? packet.norm() : 0.0;
    const std::size_t n = grid_.size();

    std::span<const std::complex<double>> row;
    if (period_steps_ > 0) {
        const double j = packet.tau / dtau_;
        const double jr = std::round(j);
        if (std::abs(j - jr) < 1e-6 && jr >= 0.0) {
            const auto k = static_cast<std::size_t>(jr) % period_steps_;
            row = {phase_table_.data() + k * n, n};
        }
    }
    const double drive = potential_.drive(packet.tau + 0.5 * dtau_);
    auto half_kick = [&](std::span<std::complex<double>> buf) {
        if (row.empty())
            kernels::apply_potential_phase(backend_, buf, base_phase_, slope_phase_, drive);
        else
            kernels::multiply(backend_, buf, row, 1.0);
    };

    auto buf = fft_.data();
    std::copy(packet.psi.begin(), packet.psi.end(), buf.begin());
    half_kick(buf);
    fft_.forward();
    kernels::multiply(backend_, buf, kinetic_, 1.0 / static_cast<double>(n));
    fft_.backward();
    half_kick(buf);
    std::copy(buf.begin(), buf.end(), packet.psi.begin());
    packet.tau += dtau_;

    if (monitor_.enabled) {
        const double after = packet.norm();
        if (!std::isfinite(after) || std::abs(after - before) > monitor_.norm_tolerance)
            throw NumericalAbort("norm drift " + std::to_string(after - before) +
                                 " in one step at tau=" + std::to_string(packet.tau));
        check_edges(packet);
    }
}

void SplitOperatorPropagator::advance(WavePacket& packet, std::size_t steps)
{
    for (std::size_t k = 0; k < steps; ++k)
        step(packet);
}

ObservableSeries evolve(WavePacket& packet, const EffectivePotential& potential,
                        const QuantumEvolveOptions& options, const QuantumObserver& observer)
{
    if (!(options.dtau > 0.0) || !std::isfinite(options.dtau))
        throw std::invalid_argument("evolve needs a positive time step");
    if (options.stride == 0)
        throw std::invalid_argument("observation stride must be positive");
    const double tau0 = packet.tau;
    const double span = options.tau_final - tau0;
    if (span < 0.0)
        throw std::invalid_argument("tau_final precedes the packet time");
    const auto total = static_cast<std::size_t>(std::llround(span / options.dtau));

    SplitOperatorPropagator prop(packet.grid, potential, options.dtau, options.backend,
                                 options.monitor);
    ObservableSeries series({"mean_X", "mean_P", "dX", "dP", "mean_H", "norm"});
    auto record = [&] {
        const auto o = observables(packet, potential, options.backend);
        if (options.monitor.enabled) {
            const auto mom = momentum_distribution(packet);
            const auto n = mom.probability.size();
            const auto edge = static_cast<std::size_t>(
                std::ceil(options.monitor.edge_fraction * static_cast<double>(n)));
            double mass = 0.0;
            for (std::size_t k = 0; k < edge; ++k)
                mass += mom.probability[k] + mom.probability[n - 1 - k];
            if (mass > options.monitor.edge_tolerance)
                throw NumericalAbort("momentum grid too coarse: probability " +
                                     std::to_string(mass) + " near the momentum cutoff at tau=" +
                                     std::to_string(packet.tau));
        }
        series.append(packet.tau, {o.mean_x, o.mean_p, o.dx, o.dp, o.mean_h, o.norm});
        if (observer)
            observer(packet);
    };

    record();
    std::size_t done = 0;
    while (done < total) {
        const std::size_t chunk = std::min(options.stride, total - done);
        prop.advance(packet, chunk);
        done += chunk;
        packet.tau = tau0 + static_cast<double>(done) * options.dtau;
        record();
    }
    return series;
}

DistributionSnapshot time_averaged_distribution(const std::vector<DistributionSnapshot>& snapshots)
{
    return average(snapshots);
}

}  // namespace dynloc
