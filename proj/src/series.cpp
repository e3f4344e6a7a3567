#include "dynloc/series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace dynloc {

ObservableSeries::ObservableSeries(std::vector<std::string> column_names)
    : names_(std::move(column_names)), columns_(names_.size())
{
}

void ObservableSeries::append(double tau, const std::vector<double>& values)
{
    if (values.size() != names_.size())
        throw std::invalid_argument("row width does not match series columns");
    if (!tau_.empty() && !(tau > tau_.back()))
        throw std::invalid_argument("series tau must be strictly increasing");
    tau_.push_back(tau);
    for (std::size_t i = 0; i < values.size(); ++i)
        columns_[i].push_back(values[i]);
}

void ObservableSeries::add_column(const std::string& name, std::vector<double> values)
{
    if (values.size() != tau_.size())
        throw std::invalid_argument("column '" + name + "' length does not match tau");
    if (has_column(name))
        throw std::invalid_argument("duplicate column '" + name + "'");
    names_.push_back(name);
    columns_.push_back(std::move(values));
}

bool ObservableSeries::has_column(const std::string& name) const
{
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const std::vector<double>& ObservableSeries::column(const std::string& name) const
{
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end())
        throw std::out_of_range("no column '" + name + "' in series");
    return columns_[static_cast<std::size_t>(it - names_.begin())];
}

double DistributionSnapshot::total() const
{
    return std::accumulate(probability.begin(), probability.end(), 0.0);
}

double DistributionSnapshot::mean() const
{
    double m = 0.0;
    for (std::size_t i = 0; i < probability.size(); ++i)
        m += probability[i] * coordinate[i];
    return m / total();
}

double DistributionSnapshot::standard_deviation() const
{
    const double m = mean();
    double v = 0.0;
    for (std::size_t i = 0; i < probability.size(); ++i) {
        const double d = coordinate[i] - m;
        v += probability[i] * d * d;
    }
    return std::sqrt(v / total());
}

double DistributionSnapshot::abs_quantile(double q) const
{
    if (coordinate.empty())
        throw std::invalid_argument("quantile of an empty distribution");
    std::vector<std::size_t> order(coordinate.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(coordinate[a]) < std::abs(coordinate[b]);
    });
    const double target = q * total();
    double acc = 0.0;
    for (const std::size_t i : order) {
        acc += probability[i];
        if (acc >= target)
            return std::abs(coordinate[i]);
    }
    return std::abs(coordinate[order.back()]);
}

DistributionSnapshot histogram(const std::vector<double>& samples, const BinSpec& bins)
{
    if (samples.empty())
        throw std::invalid_argument("histogram of an empty sample");
    if (bins.count == 0 || !(bins.hi > bins.lo))
        throw std::invalid_argument("invalid bin specification");
    DistributionSnapshot d;
    d.bin_width = bins.width();
    d.coordinate.resize(bins.count);
    d.probability.assign(bins.count, 0.0);
    for (std::size_t i = 0; i < bins.count; ++i)
        d.coordinate[i] = bins.center(i);
    std::size_t inside = 0;
    for (const double s : samples) {
        const double f = (s - bins.lo) / d.bin_width;
        if (!(f >= 0.0) || f >= static_cast<double>(bins.count))
            continue;
        d.probability[static_cast<std::size_t>(f)] += 1.0;
        ++inside;
    }
    const double n = static_cast<double>(samples.size());
    d.outside_fraction = (n - static_cast<double>(inside)) / n;
    if (inside > 0)
        for (double& p : d.probability)
            p /= static_cast<double>(inside);
    return d;
}

DistributionSnapshot rebin(const DistributionSnapshot& fine, const BinSpec& bins)
{
    if (bins.count == 0 || !(bins.hi > bins.lo))
        throw std::invalid_argument("invalid bin specification");
    DistributionSnapshot d;
    d.bin_width = bins.width();
    d.coordinate.resize(bins.count);
    d.probability.assign(bins.count, 0.0);
    for (std::size_t i = 0; i < bins.count; ++i)
        d.coordinate[i] = bins.center(i);
    // Each fine cell [c - w/2, c + w/2) is split between coarse bins in
    // proportion to overlap.
    double inside = 0.0;
    double all = 0.0;
    const double half = 0.5 * fine.bin_width;
    for (std::size_t i = 0; i < fine.coordinate.size(); ++i) {
        const double mass = fine.probability[i];
        all += mass;
        if (mass == 0.0)
            continue;
        const double a = fine.coordinate[i] - half;
        const double b = fine.coordinate[i] + half;
        if (!(b > a)) {
            const double f = (fine.coordinate[i] - bins.lo) / d.bin_width;
            if (f >= 0.0 && f < static_cast<double>(bins.count)) {
                d.probability[static_cast<std::size_t>(f)] += mass;
                inside += mass;
            }
            continue;
        }
        const double lo = std::max(a, bins.lo);
        const double hi = std::min(b, bins.hi);
        if (!(hi > lo))
            continue;
        auto k = static_cast<std::size_t>((lo - bins.lo) / d.bin_width);
        for (; k < bins.count; ++k) {
            const double e0 = bins.lo + static_cast<double>(k) * d.bin_width;
            const double e1 = e0 + d.bin_width;
            if (e0 >= hi)
                break;
            const double overlap = std::min(hi, e1) - std::max(lo, e0);
            if (overlap > 0.0) {
                const double part = mass * overlap / (b - a);
                d.probability[k] += part;
                inside += part;
            }
        }
    }
    d.outside_fraction = all > 0.0 ? (all - inside) / all : 0.0;
    if (inside > 0.0)
        for (double& p : d.probability)
            p /= inside;
    return d;
}

DistributionSnapshot average(const std::vector<DistributionSnapshot>& snapshots)
{
    if (snapshots.empty())
        throw std::invalid_argument("cannot average an empty snapshot series");
    DistributionSnapshot d = snapshots.front();
    for (std::size_t k = 1; k < snapshots.size(); ++k) {
        const auto& s = snapshots[k];
        if (s.probability.size() != d.probability.size())
            throw std::invalid_argument("snapshots do not share a coordinate axis");
        for (std::size_t i = 0; i < d.probability.size(); ++i)
            d.probability[i] += s.probability[i];
        d.outside_fraction += s.outside_fraction;
    }
    const double n = static_cast<double>(snapshots.size());
    d.outside_fraction /= n;
    const double t = d.total();
    for (double& p : d.probability)
        p /= t;
    return d;
}

}  // namespace dynloc
