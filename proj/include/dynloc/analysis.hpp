#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dynloc/series.hpp"

namespace dynloc {

struct Window {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

struct FitResult {
    double estimate = 0.0;   // slope
    double std_error = 0.0;  // standard error of the slope
    double intercept = 0.0;
    double r2 = 0.0;         // clamped to [0, 1]
    Window window;           // span of the points actually used
    std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope x.
FitResult linear_fit(std::span<const double> x, std::span<const double> y);

/// Log-log slope alpha of column(tau) ~ tau^alpha over the window; tau <= 0
/// is skipped. Needs at least 10 points, all positive.
FitResult fit_power_law(const ObservableSeries& series, const std::string& column,
                        Window window = {10.0, std::numeric_limits<double>::infinity()});

/// First tau at which (classical - quantum) / classical exceeds `threshold`
/// and stays above it for `sustain` consecutive samples.
std::optional<double> detect_break_time(const ObservableSeries& quantum,
                                        const ObservableSeries& classical,
                                        const std::string& column = "dP",
                                        double threshold = 0.10, std::size_t sustain = 20);

struct SaturationStats {
    double mean = 0.0;
    double relative_sigma = 0.0;
    /// Slope of a straight-line fit over the tail divided by the tail mean.
    double residual_slope = 0.0;
    Window window;
    std::size_t points = 0;
};

SaturationStats saturation_stats(const ObservableSeries& series, const std::string& column,
                                 double tail_fraction = 0.5);

inline constexpr double probability_floor = 1e-12;

struct TailFit {
    FitResult linear;          // log p against coordinate
    double r2_quadratic = 0.0; // same data against a parabola
    bool exponential_preferred = false;
};

/// Fits log(probability) linearly in the coordinate over `region`, using the
/// bins above probability_floor (at least 8 are required).
TailFit fit_exponential_tail(const DistributionSnapshot& dist, Window region);

struct OutwardTails {
    TailFit left;   // expressed against |coordinate|
    TailFit right;
    double threshold = 0.0;
};

/// Fits both wings beyond |coordinate| >= threshold; slopes are reported
/// against |coordinate| so decay is negative on both sides.
OutwardTails fit_outward_tails(const DistributionSnapshot& dist, double threshold);

/// Indices i (0 < i < n-1) with y[i] below both neighbours.
std::vector<std::size_t> interior_minima(std::span<const double> y);

/// Half the peak-to-peak spread of y about its least-squares line in x.
double oscillation_amplitude(std::span<const double> x, std::span<const double> y);

}  // namespace dynloc
