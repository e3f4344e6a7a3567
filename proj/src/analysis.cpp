#include "dynloc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace dynloc {

namespace {

double r_squared(double ss_res, double ss_tot)
{
    if (ss_tot <= 0.0)
        return ss_res <= 0.0 ? 1.0 : 0.0;
    return std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
}

// R^2 of y against a + b x + c x^2 via the normal equations.
double quadratic_r2(const std::vector<double>& x, const std::vector<double>& y)
{
    const std::size_t n = x.size();
    double xm = 0.0;
    for (double v : x)
        xm += v;
    xm /= static_cast<double>(n);
    double s[5] = {};
    double t[3] = {};
    for (std::size_t i = 0; i < n; ++i) {
        const double u = x[i] - xm;
        double pw = 1.0;
        for (int k = 0; k < 5; ++k) {
            s[k] += pw;
            if (k < 3)
                t[k] += pw * y[i];
            pw *= u;
        }
    }
    // Solve the symmetric 3x3 system by Cramer's rule.
    const double a[3][3] = {{s[0], s[1], s[2]}, {s[1], s[2], s[3]}, {s[2], s[3], s[4]}};
    auto det3 = [](const double m[3][3]) {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    };
    const double d = det3(a);
    if (d == 0.0)
        return 0.0;
    double coef[3];
    for (int c = 0; c < 3; ++c) {
        double m[3][3];
        for (int r = 0; r < 3; ++r)
            for (int k = 0; k < 3; ++k)
                m[r][k] = (k == c) ? t[r] : a[r][k];
        coef[c] = det3(m) / d;
    }
    const double ym = t[0] / s[0];
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = x[i] - xm;
        const double f = coef[0] + coef[1] * u + coef[2] * u * u;
        ss_res += (y[i] - f) * (y[i] - f);
        ss_tot += (y[i] - ym) * (y[i] - ym);
    }
    return r_squared(ss_res, ss_tot);
}

}  // namespace

FitResult linear_fit(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw std::invalid_argument("fit inputs differ in length");
    if (x.size() < 2)
        throw std::invalid_argument("fit needs at least two points");
    const double n = static_cast<double>(x.size());
    double xm = 0.0;
    double ym = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= n;
    ym /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
        syy += (y[i] - ym) * (y[i] - ym);
    }
    if (sxx <= 0.0)
        throw std::invalid_argument("fit abscissae are all equal");
    FitResult f;
    f.estimate = sxy / sxx;
    f.intercept = ym - f.estimate * xm;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.estimate * x[i]);
        ss_res += r * r;
    }
    f.r2 = r_squared(ss_res, syy);
    f.std_error = x.size() > 2 ? std::sqrt(ss_res / (n - 2.0) / sxx) : 0.0;
    f.points = x.size();
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    f.window = {*lo, *hi};
    return f;
}

FitResult fit_power_law(const ObservableSeries& series, const std::string& column, Window window)
{
    const auto& tau = series.tau();
    const auto& values = series.column(column);
    std::vector<double> lx;
    std::vector<double> ly;
    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (tau[i] <= 0.0 || tau[i] < window.lo || tau[i] > window.hi)
            continue;
        if (!(values[i] > 0.0))
            throw std::invalid_argument("power-law fit: nonpositive '" + column + "' at tau=" +
                                        std::to_string(tau[i]));
        if (lx.empty())
            lo = tau[i];
        hi = tau[i];
        lx.push_back(std::log(tau[i]));
        ly.push_back(std::log(values[i]));
    }
    if (lx.size() < 10)
        throw std::invalid_argument("power-law fit needs at least 10 points in the window");
    FitResult f = linear_fit(lx, ly);
    f.window = {lo, hi};
    return f;
}

std::optional<double> detect_break_time(const ObservableSeries& quantum,
                                        const ObservableSeries& classical,
                                        const std::string& column, double threshold,
                                        std::size_t sustain)
{
    const auto& tq = quantum.tau();
    const auto& tc = classical.tau();
    if (tq.size() != tc.size())
        throw std::invalid_argument("break-time series have different lengths");
    for (std::size_t i = 0; i < tq.size(); ++i)
        if (std::abs(tq[i] - tc[i]) > 1e-9 * std::max(1.0, std::abs(tc[i])))
            throw std::invalid_argument("break-time series are sampled on different tau grids");
    if (sustain == 0)
        throw std::invalid_argument("sustain must be at least one sample");
    const auto& q = quantum.column(column);
    const auto& c = classical.column(column);
    std::size_t run = 0;
    for (std::size_t i = 0; i < tq.size(); ++i) {
        const bool apart = c[i] > 0.0 && (c[i] - q[i]) / c[i] > threshold;
        run = apart ? run + 1 : 0;
        if (run == sustain)
            return tq[i + 1 - sustain];
    }
    return std::nullopt;
}

SaturationStats saturation_stats(const ObservableSeries& series, const std::string& column,
                                 double tail_fraction)
{
    if (!(tail_fraction > 0.0) || tail_fraction > 1.0)
        throw std::invalid_argument("tail fraction must lie in (0, 1]");
    const auto& tau = series.tau();
    const auto& values = series.column(column);
    const auto count = static_cast<std::size_t>(
        std::ceil(tail_fraction * static_cast<double>(tau.size())));
    if (count < 20)
        throw std::invalid_argument("saturation statistics need at least 20 tail points");
    const std::size_t first = tau.size() - count;
    std::span<const double> t(tau.data() + first, count);
    std::span<const double> v(values.data() + first, count);

    SaturationStats s;
    s.points = count;
    s.window = {t.front(), t.back()};
    double sum = 0.0;
    for (double x : v)
        sum += x;
    s.mean = sum / static_cast<double>(count);
    double var = 0.0;
    for (double x : v)
        var += (x - s.mean) * (x - s.mean);
    const double sigma = std::sqrt(var / static_cast<double>(count));
    s.relative_sigma = s.mean != 0.0 ? sigma / std::abs(s.mean) : (sigma == 0.0 ? 0.0 : INFINITY);
    const double slope = linear_fit(t, v).estimate;
    s.residual_slope = s.mean != 0.0 ? slope / s.mean : (slope == 0.0 ? 0.0 : INFINITY);
    return s;
}

TailFit fit_exponential_tail(const DistributionSnapshot& dist, Window region)
{
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 0; i < dist.coordinate.size(); ++i) {
        const double c = dist.coordinate[i];
        if (c < region.lo || c > region.hi || !(dist.probability[i] > probability_floor))
            continue;
        x.push_back(c);
        y.push_back(std::log(dist.probability[i]));
    }
    if (x.size() < 8)
        throw std::invalid_argument("tail fit needs at least 8 bins above the probability floor");
    TailFit t;
    t.linear = linear_fit(x, y);
    t.r2_quadratic = x.size() >= 3 ? quadratic_r2(x, y) : 0.0;
    t.exponential_preferred = t.linear.r2 >= t.r2_quadratic - 1e-12;
    return t;
}

OutwardTails fit_outward_tails(const DistributionSnapshot& dist, double threshold)
{
    DistributionSnapshot mirrored;
    mirrored.bin_width = dist.bin_width;
    for (std::size_t i = 0; i < dist.coordinate.size(); ++i) {
        if (dist.coordinate[i] <= -threshold) {
            mirrored.coordinate.push_back(-dist.coordinate[i]);
            mirrored.probability.push_back(dist.probability[i]);
        }
    }
    OutwardTails out;
    out.threshold = threshold;
    out.right = fit_exponential_tail(dist, {threshold, std::numeric_limits<double>::infinity()});
    out.left =
        fit_exponential_tail(mirrored, {threshold, std::numeric_limits<double>::infinity()});
    return out;
}

std::vector<std::size_t> interior_minima(std::span<const double> y)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        if (y[i] < y[i - 1] && y[i] < y[i + 1])
            out.push_back(i);
    return out;
}

double oscillation_amplitude(std::span<const double> x, std::span<const double> y)
{
    const FitResult f = linear_fit(x, y);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.estimate * x[i]);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return 0.5 * (hi - lo);
}

}  // namespace dynloc
