#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace dynloc {

/// Time-stamped observable columns. tau is strictly increasing and every
/// column has the same length as tau.
class ObservableSeries {
public:
    ObservableSeries() = default;
    explicit ObservableSeries(std::vector<std::string> column_names);

    /// Appends one row; values follow the column order given at construction.
    void append(double tau, const std::vector<double>& values);

    void add_column(const std::string& name, std::vector<double> values);

    const std::vector<double>& tau() const { return tau_; }
    const std::vector<double>& column(const std::string& name) const;
    bool has_column(const std::string& name) const;
    const std::vector<std::string>& column_names() const { return names_; }
    std::size_t size() const { return tau_.size(); }
    bool empty() const { return tau_.empty(); }

    std::map<std::string, std::string> metadata;

private:
    std::vector<double> tau_;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
};

/// Normalized histogram or discretized density: probability[i] is the
/// probability mass of the bin centred at coordinate[i]; the masses sum to 1.
struct DistributionSnapshot {
    std::vector<double> coordinate;
    std::vector<double> probability;
    double bin_width = 0.0;
    /// Mass that fell outside the binned range before normalization.
    double outside_fraction = 0.0;

    double total() const;
    double mean() const;
    double standard_deviation() const;
    /// Smallest c with P(|coordinate| <= c) >= q.
    double abs_quantile(double q) const;
};

/// Uniform bins over [lo, hi).
struct BinSpec {
    double lo = -1.0;
    double hi = 1.0;
    std::size_t count = 1;

    double width() const { return (hi - lo) / static_cast<double>(count); }
    double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * width(); }
};

/// Histogram of samples, normalized over the in-range samples.
DistributionSnapshot histogram(const std::vector<double>& samples, const BinSpec& bins);

/// Redistributes fine-grid cell masses onto coarse bins by overlap; mass
/// outside the bins is reported and the result renormalized.
DistributionSnapshot rebin(const DistributionSnapshot& fine, const BinSpec& bins);

/// Arithmetic mean of snapshots sharing one coordinate axis, renormalized.
DistributionSnapshot average(const std::vector<DistributionSnapshot>& snapshots);

}  // namespace dynloc
