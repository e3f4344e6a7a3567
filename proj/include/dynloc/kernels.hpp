#pragma once

#include <complex>
#include <span>

namespace dynloc::kernels {

/// Every hot loop exists twice: a plain serial reference and an OpenMP
/// version. Both produce bitwise-identical results for any thread count;
/// reductions use fixed block boundaries and a fixed combination tree.
enum class Backend { serial, openmp };

/// Static part of the effective force, -x - strength / (1 + (mu - mu1 x)^2).
struct ForceCoefficients {
    double mu = 0.0;
    double mu1 = 1.0;
    double strength = 0.0;

    double operator()(double x, double drive) const
    {
        const double u = mu - mu1 * x;
        return -x - drive - strength / (1.0 + u * u);
    }
};

/// Drift-kick-drift leapfrog over drive.size() steps for every trajectory.
/// drive[k] is lambda_eff cos(4 tau) at the midpoint of step k.
void leapfrog_serial(std::span<double> x, std::span<double> p, const ForceCoefficients& force,
                     std::span<const double> drive, double dt);
void leapfrog_openmp(std::span<double> x, std::span<double> p, const ForceCoefficients& force,
                     std::span<const double> drive, double dt);
void leapfrog(Backend backend, std::span<double> x, std::span<double> p,
              const ForceCoefficients& force, std::span<const double> drive, double dt);

/// psi[j] *= exp(-i (base[j] + slope[j] * drive)).
void apply_potential_phase_serial(std::span<std::complex<double>> psi, std::span<const double> base,
                                  std::span<const double> slope, double drive);
void apply_potential_phase_openmp(std::span<std::complex<double>> psi, std::span<const double> base,
                                  std::span<const double> slope, double drive);
void apply_potential_phase(Backend backend, std::span<std::complex<double>> psi,
                           std::span<const double> base, std::span<const double> slope,
                           double drive);

/// psi[j] *= factor[j] * scale.
void multiply(Backend backend, std::span<std::complex<double>> psi,
              std::span<const std::complex<double>> factor, double scale);

inline constexpr std::size_t reduction_block = 1024;

/// Sum with a thread-count independent association order.
double deterministic_sum_serial(std::span<const double> v);
double deterministic_sum_openmp(std::span<const double> v);
double deterministic_sum(Backend backend, std::span<const double> v);

struct Moments {
    double mean = 0.0;
    double variance = 0.0;  // population variance
};

/// Two-pass mean and population variance.
Moments moments(Backend backend, std::span<const double> v);

/// Weighted first and second central moments of a coordinate axis.
Moments weighted_moments(Backend backend, std::span<const double> coordinate,
                         std::span<const double> weight);

}  // namespace dynloc::kernels
