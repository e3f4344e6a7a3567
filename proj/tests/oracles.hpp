#pragma once

// Independent reference computations used by the unit and acceptance tests.

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include "dynloc/params.hpp"
#include "dynloc/potential.hpp"
#include "dynloc/quantum.hpp"

namespace oracle {

using cd = std::complex<double>;

/// Reference parameter set with a chosen modulation.
inline dynloc::EffectiveParams reference_params(double lambda_eff, double kbar = 1.0)
{
    dynloc::EffectiveParams p;
    p.gamma = 1.0;
    p.beta = 1.8;
    p.mu = -0.4;
    p.mu1 = 2.0;
    p.gamma_eff = 0.6034;
    p.kbar = kbar;
    return dynloc::with_lambda_eff(p, lambda_eff);
}

/// Harmonic oscillator: no drive, no Lorentzian.
inline dynloc::EffectiveParams harmonic_params(double kbar = 1.0)
{
    dynloc::EffectiveParams p;
    p.beta = 0.0;
    p.gamma_eff = 0.0;
    p.mu1 = 1.0;
    p.kbar = kbar;
    return p;
}

/// Potential written out directly, without the library.
inline double potential(const dynloc::EffectiveParams& e, double x, double tau)
{
    return 0.5 * x * x + x * e.lambda_eff * std::cos(4.0 * tau) -
           e.gamma_eff * e.beta / e.mu1 * std::atan(e.mu - e.mu1 * x);
}

/// Fourth-order central difference of -dV/dX.
inline double fd_force(const dynloc::EffectiveParams& e, double x, double tau, double h)
{
    return -(-potential(e, x + 2 * h, tau) + 8 * potential(e, x + h, tau) -
             8 * potential(e, x - h, tau) + potential(e, x - 2 * h, tau)) /
           (12.0 * h);
}

/// Classical trajectory from a high-order adaptive Runge-Kutta integrator.
inline std::pair<double, double> rk_trajectory(const dynloc::EffectiveParams& e, double x, double p,
                                               double tau0, double tau1)
{
    namespace ode = boost::numeric::odeint;
    using State = std::array<double, 2>;
    State s{x, p};
    auto rhs = [&](const State& y, State& d, double t) {
        const double u = e.mu - e.mu1 * y[0];
        d[0] = y[1];
        d[1] = -y[0] - e.lambda_eff * std::cos(4.0 * t) - e.gamma_eff * e.beta / (1.0 + u * u);
    };
    ode::integrate_adaptive(ode::make_controlled(1e-14, 1e-14, ode::runge_kutta_fehlberg78<State>()),
                            rhs, s, tau0, tau1, 1e-3);
    return {s[0], s[1]};
}

/// Dense Hamiltonian matrix H = T + V(tau) on the grid; T built from an
/// explicit DFT matrix.
inline Eigen::MatrixXcd kinetic_matrix(const dynloc::Grid& g)
{
    const auto n = static_cast<Eigen::Index>(g.size());
    const double two_pi = 2.0 * std::numbers::pi;
    Eigen::MatrixXcd f(n, n);
    for (Eigen::Index m = 0; m < n; ++m)
        for (Eigen::Index k = 0; k < n; ++k)
            f(m, k) = std::polar(1.0, -two_pi * static_cast<double>(m * k) / static_cast<double>(n));
    Eigen::VectorXcd t(n);
    const double dp = g.kbar() * two_pi / (static_cast<double>(n) * g.dx());
    for (Eigen::Index m = 0; m < n; ++m) {
        const double idx = m < n / 2 ? static_cast<double>(m) : static_cast<double>(m - n);
        t(m) = 0.5 * (dp * idx) * (dp * idx);
    }
    return f.adjoint() * t.asDiagonal() * f / static_cast<double>(n);
}

/// Propagator over one drive period from products of exact exponentials
/// exp(-i H(tau_mid) h / kbar) on `substeps` sub-intervals of each step.
inline Eigen::MatrixXcd dense_period_propagator(const dynloc::Grid& g,
                                                const dynloc::EffectiveParams& e,
                                                std::size_t steps, std::size_t substeps)
{
    const auto n = static_cast<Eigen::Index>(g.size());
    const Eigen::MatrixXcd t = kinetic_matrix(g);
    const double h = dynloc::drive_period / static_cast<double>(steps * substeps);
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(n, n);
    for (std::size_t k = 0; k < steps * substeps; ++k) {
        const double tau = (static_cast<double>(k) + 0.5) * h;
        Eigen::MatrixXcd hm = t;
        for (Eigen::Index j = 0; j < n; ++j)
            hm(j, j) += potential(e, g.positions()[static_cast<std::size_t>(j)], tau);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hm);
        Eigen::VectorXcd phase(n);
        for (Eigen::Index j = 0; j < n; ++j)
            phase(j) = std::polar(1.0, -es.eigenvalues()(j) * h / g.kbar());
        u = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint() * u;
    }
    return u;
}

inline double fidelity(const std::vector<cd>& a, const std::vector<cd>& b)
{
    cd overlap = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        overlap += std::conj(a[j]) * b[j];
        na += std::norm(a[j]);
        nb += std::norm(b[j]);
    }
    return std::norm(overlap) / (na * nb);
}

inline double l2_distance(const std::vector<cd>& a, const std::vector<cd>& b, double dx)
{
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        s += std::norm(a[j] - b[j]);
    return std::sqrt(s * dx);
}

/// Width of a free Gaussian packet of initial width s0 after time tau.
inline double free_width(double s0, double kbar, double tau)
{
    const double r = kbar * tau / (2.0 * s0 * s0);
    return s0 * std::sqrt(1.0 + r * r);
}

}  // namespace oracle
