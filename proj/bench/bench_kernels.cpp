// Serial reference against OpenMP kernels. Run with OMP_NUM_THREADS set to
// the thread count of interest.

#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <vector>

#include "dynloc/classical.hpp"
#include "dynloc/kernels.hpp"
#include "dynloc/params.hpp"
#include "dynloc/quantum.hpp"

using namespace dynloc;

namespace {

const kernels::ForceCoefficients force{-0.4, 2.0, 0.6034 * 1.8};

std::vector<double> drive_table(std::size_t steps)
{
    std::vector<double> d(steps);
    const double dt = drive_period / 256.0;
    for (std::size_t k = 0; k < steps; ++k)
        d[k] = 6.0 * std::cos(4.0 * (static_cast<double>(k) + 0.5) * dt);
    return d;
}

template <kernels::Backend B>
void BM_leapfrog(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    auto ens = sample_ensemble(GaussianCloud{0.0, 0.0, 0.7, 0.7}, n, 1);
    const auto drive = drive_table(256);
    for (auto _ : state) {
        kernels::leapfrog(B, ens.x, ens.p, force, drive, drive_period / 256.0);
        benchmark::DoNotOptimize(ens.p.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * 256);
}

template <kernels::Backend B>
void BM_potential_phase(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<std::complex<double>> psi(n, {1.0, 0.0});
    std::vector<double> base(n), slope(n);
    for (std::size_t j = 0; j < n; ++j) {
        base[j] = 1e-3 * static_cast<double>(j);
        slope[j] = 1e-4 * static_cast<double>(j);
    }
    for (auto _ : state) {
        kernels::apply_potential_phase(B, psi, base, slope, 0.3);
        benchmark::DoNotOptimize(psi.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <kernels::Backend B>
void BM_sum(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j)
        v[j] = std::sin(static_cast<double>(j));
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::deterministic_sum(B, v));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

template <kernels::Backend B>
void BM_split_operator(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    EffectiveParams p;
    p.beta = 1.8;
    p.mu = -0.4;
    p.mu1 = 2.0;
    p.gamma_eff = 0.6034;
    p = with_lambda_eff(p, 6.0);
    const EffectivePotential pot(p);
    const Grid grid(-40.0, 40.0, n, 1.0);
    auto packet = gaussian_packet(grid, 0.0, 0.0, std::sqrt(0.5));
    MonitorOptions mon;
    mon.enabled = false;
    SplitOperatorPropagator prop(grid, pot, drive_period / 256.0, B, mon);
    for (auto _ : state)
        prop.advance(packet, 16);
    state.SetItemsProcessed(state.iterations() * 16);
}

}  // namespace

BENCHMARK(BM_leapfrog<kernels::Backend::serial>)->Arg(10000);
BENCHMARK(BM_leapfrog<kernels::Backend::openmp>)->Arg(10000);
BENCHMARK(BM_potential_phase<kernels::Backend::serial>)->Arg(2048)->Arg(8192);
BENCHMARK(BM_potential_phase<kernels::Backend::openmp>)->Arg(2048)->Arg(8192);
BENCHMARK(BM_sum<kernels::Backend::serial>)->Arg(1 << 14)->Arg(1 << 20);
BENCHMARK(BM_sum<kernels::Backend::openmp>)->Arg(1 << 14)->Arg(1 << 20);
BENCHMARK(BM_split_operator<kernels::Backend::serial>)->Arg(2048)->Arg(8192);
BENCHMARK(BM_split_operator<kernels::Backend::openmp>)->Arg(2048)->Arg(8192);

BENCHMARK_MAIN();
