#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dynloc/classical.hpp"
#include "dynloc/coupled.hpp"
#include "dynloc/params.hpp"

namespace dynloc {

enum class Experiment { fig1, fig2, fig3, kbar_sweep, coupled_check, custom };

std::string to_string(Experiment e);
/// Accepts fig1, fig2, fig3, kbar-sweep, coupled-check, custom.
Experiment parse_experiment(const std::string& name);

enum class Dimension { frequency, length, power, time, dimensionless };

/// Parses "<number> [unit]". Frequencies given in Hz/kHz/MHz/GHz are
/// ordinary frequencies and are converted to rad/s; rad/s, krad/s and
/// Mrad/s are taken as angular. Throws ConfigError on a unit that does not
/// match the dimension.
double parse_quantity(const std::string& text, Dimension dim);

enum class EffectiveSource { preset, derived };

struct GridSpec {
    double x_min = -40.0;
    double x_max = 40.0;
    std::size_t n = 2048;
};

struct RunConfig {
    Experiment experiment = Experiment::custom;
    std::uint64_t seed = 1;

    PhysicalParams physical;
    EffectiveParams effective;
    EffectiveSource effective_source = EffectiveSource::preset;
    /// Multiplies effective.lambda_eff before any run.
    double lambda_eff_scale = 1.0;

    GridSpec grid;
    double packet_x0 = 0.0;
    double packet_p0 = 0.0;
    /// Initial packet width; unset means sqrt(kbar / 2).
    std::optional<double> packet_dx;

    std::size_t ensemble_size = 10000;
    double section_bound = 4.0;
    std::size_t section_trajectories = 100;
    std::size_t section_periods = 400;

    std::size_t steps_per_period = 256;
    /// Evolution time in units of tau; unset means t_final converted.
    std::optional<double> tau_final;
    double t_final = 0.0;  // seconds
    std::size_t strobe_stride = 1;  // drive periods between observations
    double time_average_fraction = 0.2;

    std::vector<double> kbar_list{1.0, 0.5, 0.25};
    std::vector<double> lambda_list;  // empty: 41 points in [0, 2 lambda_eff]
    std::size_t lambda_points = 41;
    bool fig3_time_average = false;
    std::size_t kbar_curve_points = 9;
    double fig3_t_final = 2.09e-2;  // seconds

    // Space-time maps: bins over [-range, range); the central quarter
    // covers roughly the initial packet support.
    std::size_t map_bins = 160;
    double map_x_range = 20.0;
    double map_p_range = 20.0;
    // Time-averaged distributions: bins over [-dist_range, dist_range).
    std::size_t dist_bins = 320;
    double dist_range = 40.0;

    double x_scale_si = 0.0;  // m per unit X; 0 disables scaled columns
    double p_scale_si = 0.0;  // kg m/s per unit P

    CavityCoupling coupling = CavityCoupling::side_mode_position;
    std::optional<double> detuning_tilde;  // rad/s; unset means detuning
    double mech_damping = 0.0;
    double sm_damping = 0.0;
    std::size_t coupled_periods = 10;
    std::size_t coupled_samples_per_period = 200;
    double coupled_q0 = 1.0;
    std::size_t coupled_xi_points = 5;

    /// Effective parameters after applying effective_source and the
    /// lambda_eff scale.
    EffectiveParams resolved_effective() const;
    double dtau() const;
    /// Requested evolution time rounded to whole drive periods.
    double resolved_tau_final() const;
    std::size_t total_periods() const;
    double initial_packet_dx(double kbar) const;

    /// Throws ConfigError if any module precondition cannot be met.
    void validate() const;
};

/// Defaults for an experiment: reference preset parameters, and the evolution
/// time of the corresponding figure.
RunConfig default_config(Experiment experiment);

/// Applies "key = value [unit]" lines on top of `base`. Blank lines and
/// '#' comments are ignored, as are keys under the run. and result.
/// prefixes written into metadata files.
RunConfig parse_config(std::istream& in, RunConfig base);
RunConfig load_config(const std::filesystem::path& path, RunConfig base);

/// Full configuration as ordered key/value pairs; parsing these back
/// reproduces the configuration exactly.
std::vector<std::pair<std::string, std::string>> to_key_values(const RunConfig& config);

}  // namespace dynloc
