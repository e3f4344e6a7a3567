#include "dynloc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace dynloc::kernels {

namespace {

constexpr std::size_t lane_block = 64;

// Leapfrog for up to lane_block trajectories at once; the inner loops run
// across trajectories so they vectorize. Each trajectory sees exactly the
// same operation sequence as a scalar loop would apply.
inline void leapfrog_block(double* x, double* p, std::size_t m, const ForceCoefficients& force,
                           std::span<const double> drive, double dt)
{
    const double half = 0.5 * dt;
    double xs[lane_block];
    double ps[lane_block];
    for (std::size_t i = 0; i < m; ++i) {
        xs[i] = x[i];
        ps[i] = p[i];
    }
    for (const double d : drive) {
        for (std::size_t i = 0; i < m; ++i)
            xs[i] += half * ps[i];
        for (std::size_t i = 0; i < m; ++i)
            ps[i] += dt * force(xs[i], d);
        for (std::size_t i = 0; i < m; ++i)
            xs[i] += half * ps[i];
    }
    for (std::size_t i = 0; i < m; ++i) {
        x[i] = xs[i];
        p[i] = ps[i];
    }
}

void check_sizes(std::size_t a, std::size_t b)
{
    if (a != b)
        throw std::invalid_argument("kernel operand length mismatch");
}

double block_sum(const double* v, std::size_t n)
{
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += v[i];
    return s;
}

// Pairwise combination of block partials; the tree shape depends on the
// block count only.
double combine(std::vector<double>& partial)
{
    if (partial.empty())
        return 0.0;
    std::size_t n = partial.size();
    while (n > 1) {
        const std::size_t half = (n + 1) / 2;
        for (std::size_t i = 0; i + half < n; ++i)
            partial[i] += partial[i + half];
        n = half;
    }
    return partial[0];
}

}  // namespace

void leapfrog_serial(std::span<double> x, std::span<double> p, const ForceCoefficients& force,
                     std::span<const double> drive, double dt)
{
    check_sizes(x.size(), p.size());
    for (std::size_t i = 0; i < x.size(); i += lane_block)
        leapfrog_block(x.data() + i, p.data() + i, std::min(lane_block, x.size() - i), force, drive,
                       dt);
}

void leapfrog_openmp(std::span<double> x, std::span<double> p, const ForceCoefficients& force,
                     std::span<const double> drive, double dt)
{
    check_sizes(x.size(), p.size());
    const auto blocks = static_cast<std::int64_t>((x.size() + lane_block - 1) / lane_block);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < blocks; ++b) {
        const auto i = static_cast<std::size_t>(b) * lane_block;
        leapfrog_block(x.data() + i, p.data() + i, std::min(lane_block, x.size() - i), force, drive,
                       dt);
    }
}

void leapfrog(Backend backend, std::span<double> x, std::span<double> p,
              const ForceCoefficients& force, std::span<const double> drive, double dt)
{
    if (backend == Backend::openmp)
        leapfrog_openmp(x, p, force, drive, dt);
    else
        leapfrog_serial(x, p, force, drive, dt);
}

void apply_potential_phase_serial(std::span<std::complex<double>> psi, std::span<const double> base,
                                  std::span<const double> slope, double drive)
{
    check_sizes(psi.size(), base.size());
    check_sizes(psi.size(), slope.size());
    for (std::size_t j = 0; j < psi.size(); ++j) {
        const double phase = base[j] + slope[j] * drive;
        psi[j] *= std::complex<double>(std::cos(phase), -std::sin(phase));
    }
}

void apply_potential_phase_openmp(std::span<std::complex<double>> psi, std::span<const double> base,
                                  std::span<const double> slope, double drive)
{
    check_sizes(psi.size(), base.size());
    check_sizes(psi.size(), slope.size());
    const auto n = static_cast<std::int64_t>(psi.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < n; ++j) {
        const double phase = base[j] + slope[j] * drive;
        psi[j] *= std::complex<double>(std::cos(phase), -std::sin(phase));
    }
}

void apply_potential_phase(Backend backend, std::span<std::complex<double>> psi,
                           std::span<const double> base, std::span<const double> slope,
                           double drive)
{
    if (backend == Backend::openmp)
        apply_potential_phase_openmp(psi, base, slope, drive);
    else
        apply_potential_phase_serial(psi, base, slope, drive);
}

void multiply(Backend backend, std::span<std::complex<double>> psi,
              std::span<const std::complex<double>> factor, double scale)
{
    check_sizes(psi.size(), factor.size());
    const auto n = static_cast<std::int64_t>(psi.size());
    if (backend == Backend::openmp) {
#pragma omp parallel for schedule(static)
        for (std::int64_t j = 0; j < n; ++j)
            psi[j] *= factor[j] * scale;
    } else {
        for (std::int64_t j = 0; j < n; ++j)
            psi[j] *= factor[j] * scale;
    }
}

double deterministic_sum_serial(std::span<const double> v)
{
    const std::size_t blocks = (v.size() + reduction_block - 1) / reduction_block;
    std::vector<double> partial(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t lo = b * reduction_block;
        partial[b] = block_sum(v.data() + lo, std::min(reduction_block, v.size() - lo));
    }
    return combine(partial);
}

double deterministic_sum_openmp(std::span<const double> v)
{
    const std::size_t blocks = (v.size() + reduction_block - 1) / reduction_block;
    std::vector<double> partial(blocks);
    const auto nb = static_cast<std::int64_t>(blocks);
#pragma omp parallel for schedule(static)
    for (std::int64_t b = 0; b < nb; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * reduction_block;
        partial[b] = block_sum(v.data() + lo, std::min(reduction_block, v.size() - lo));
    }
    return combine(partial);
}

double deterministic_sum(Backend backend, std::span<const double> v)
{
    return backend == Backend::openmp ? deterministic_sum_openmp(v) : deterministic_sum_serial(v);
}

Moments moments(Backend backend, std::span<const double> v)
{
    if (v.empty())
        throw std::invalid_argument("moments of an empty sample");
    const double n = static_cast<double>(v.size());
    Moments m;
    m.mean = deterministic_sum(backend, v) / n;
    std::vector<double> sq(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double d = v[i] - m.mean;
        sq[i] = d * d;
    }
    m.variance = deterministic_sum(backend, sq) / n;
    return m;
}

Moments weighted_moments(Backend backend, std::span<const double> coordinate,
                         std::span<const double> weight)
{
    check_sizes(coordinate.size(), weight.size());
    std::vector<double> buf(coordinate.size());
    const double total = deterministic_sum(backend, weight);
    if (!(total > 0.0))
        throw std::invalid_argument("weighted moments need positive total weight");
    for (std::size_t i = 0; i < buf.size(); ++i)
        buf[i] = weight[i] * coordinate[i];
    Moments m;
    m.mean = deterministic_sum(backend, buf) / total;
    for (std::size_t i = 0; i < buf.size(); ++i) {
        const double d = coordinate[i] - m.mean;
        buf[i] = weight[i] * d * d;
    }
    m.variance = deterministic_sum(backend, buf) / total;
    return m;
}

}  // namespace dynloc::kernels
