#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dynloc/analysis.hpp"
#include "dynloc/classical.hpp"
#include "dynloc/config.hpp"
#include "dynloc/coupled.hpp"
#include "dynloc/io.hpp"
#include "dynloc/quantum.hpp"

namespace dynloc {

/// Which distributions a paired run keeps.
enum class Capture {
    none,
    /// Strobes in the final time_average_fraction of the run; quantum
    /// densities on the native grid, classical histograms on the
    /// distribution bins.
    final_fraction,
    /// Every strobe, all four on the map bins.
    every_strobe,
};

/// Classical Gaussian ensemble and the matching quantum packet evolved side
/// by side under the same potential and step size.
struct PairedRun {
    ObservableSeries classical;
    ObservableSeries quantum;
    std::vector<double> snapshot_tau;
    std::vector<DistributionSnapshot> classical_x;
    std::vector<DistributionSnapshot> classical_p;
    std::vector<DistributionSnapshot> quantum_x;
    std::vector<DistributionSnapshot> quantum_p;
};

PairedRun run_paired(const RunConfig& config, const EffectiveParams& params, const GridSpec& grid,
                     double tau_final, Capture capture,
                     kernels::Backend backend = kernels::Backend::openmp);

/// Space-time map bins.
BinSpec position_bins(const RunConfig& config);
BinSpec momentum_bins(const RunConfig& config);
/// Bins of the time-averaged classical distributions (both axes).
BinSpec distribution_bins(const RunConfig& config);

/// Smallest power of two >= n / kbar.
std::size_t scaled_grid_size(std::size_t n, double kbar);

/// Header and metadata entries shared by every experiment.
KeyValues run_metadata(const RunConfig& config, double elapsed_seconds);

struct Fig1Result {
    PairedRun run;
    DistributionSnapshot classical_x;
    DistributionSnapshot classical_p;
    DistributionSnapshot quantum_x;
    DistributionSnapshot quantum_p;

    FitResult alpha;    // classical dP
    FitResult alpha_x;  // classical dX
    std::vector<FitResult> alpha_sensitivity;
    std::optional<double> break_time;

    SaturationStats quantum_dp;
    SaturationStats quantum_dx;
    SaturationStats classical_dp;
    SaturationStats classical_dx;
    SaturationStats quantum_energy;    // whole run
    SaturationStats classical_energy;  // whole run

    double tail_threshold_x = 0.0;
    double tail_threshold_p = 0.0;
    std::optional<OutwardTails> quantum_x_tails;
    std::optional<OutwardTails> quantum_p_tails;
    std::string tail_error;

    PoincareSection section;
    SectionClassification orbits;

    KeyValues results;
    std::vector<std::string> files;
};

Fig1Result run_fig1(const RunConfig& config, const std::filesystem::path& out_dir);

struct Fig2Result {
    std::vector<double> tau;
    /// rows = strobes, columns = bins; each row sums to one.
    std::vector<std::vector<double>> classical_x;
    std::vector<std::vector<double>> classical_p;
    std::vector<std::vector<double>> quantum_x;
    std::vector<std::vector<double>> quantum_p;
    /// Mass in the central quarter of the position bins at the final strobe.
    double classical_central_mass = 0.0;
    double quantum_central_mass = 0.0;
    std::vector<std::string> files;
};

Fig2Result run_fig2(const RunConfig& config, const std::filesystem::path& out_dir);

struct SweepPoint {
    double lambda_eff = 0.0;
    double classical_dx = 0.0;
    double classical_dp = 0.0;
    double quantum_dx = 0.0;
    double quantum_dp = 0.0;
};

/// Dispersions after tau_final for one modulation value; instantaneous at
/// the final strobe, or averaged over the final strobes when
/// `time_average` is set.
SweepPoint sweep_point(const RunConfig& config, const EffectiveParams& params, double tau_final,
                       bool time_average, kernels::Backend backend);

/// Modulation values of a sweep: lambda_list, or lambda_points values
/// evenly spread over [0, 2 lambda_eff].
std::vector<double> sweep_values(const RunConfig& config);

struct Fig3Result {
    std::vector<SweepPoint> points;
    std::vector<std::size_t> quantum_minima;
    /// Least-squares slope of classical dP against lambda_eff.
    double classical_trend = 0.0;
    double classical_trend_stderr = 0.0;
    double median_gap = 0.0;
    std::vector<std::string> files;
};

/// Sweep points run in parallel, each on the serial kernels.
Fig3Result run_fig3(const RunConfig& config, const std::filesystem::path& out_dir);

struct KbarRow {
    double kbar = 0.0;
    std::size_t grid_n = 0;
    double classical_dp = 0.0;
    double quantum_dp = 0.0;
    double classical_dx = 0.0;
    double quantum_dx = 0.0;
    double gap = 0.0;  // |quantum_dp - classical_dp| at the final time
    /// Oscillation amplitude of quantum dP over the modulation curve; NaN
    /// when kbar_curve_points is 0.
    double oscillation_amplitude = 0.0;
};

struct KbarResult {
    std::vector<KbarRow> rows;
    std::vector<std::string> files;
};

KbarResult run_kbar_sweep(const RunConfig& config, const std::filesystem::path& out_dir);

struct CoupledCheckResult {
    /// Largest deviation from the closed-form solution with the other
    /// subsystems switched off.
    double mirror_limit_error = 0.0;
    double side_mode_limit_error = 0.0;
    double cavity_limit_error = 0.0;
    std::vector<double> xi;
    std::vector<double> ansatz_residual;
    bool residual_monotone = false;
    std::vector<std::string> files;
};

CoupledCheckResult run_coupled_check(const RunConfig& config, const std::filesystem::path& out_dir);

struct CustomResult {
    PairedRun run;
    std::vector<std::string> files;
};

CustomResult run_custom(const RunConfig& config, const std::filesystem::path& out_dir);

/// Dispatches on config.experiment and returns the files written.
std::vector<std::string> run_experiment(const RunConfig& config,
                                        const std::filesystem::path& out_dir);

}  // namespace dynloc
