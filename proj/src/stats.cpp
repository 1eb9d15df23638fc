#include "rem/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "rem/errors.hpp"

namespace rem::stats {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

// Acklam's rational approximation to the standard normal quantile.
double acklam(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw InvalidArgumentError("normal_quantile: p must lie in (0, 1)");
    }
    double x = acklam(p);
    // One Halley step against the exact CDF tightens the approximation to
    // near machine precision.
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw InvalidArgumentError("quantile_sorted: empty sample");
    const std::size_t n = sorted.size();
    if (n == 1) return sorted[0];
    const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

double mean(std::span<const double> v) {
    if (v.empty()) throw InvalidArgumentError("mean: empty sample");
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return quantile_sorted(v, 0.5);
}

double silverman_bandwidth(std::span<const double> sorted) {
    if (sorted.empty()) throw InvalidArgumentError("silverman_bandwidth: empty sample");
    const double n = static_cast<double>(sorted.size());
    const double m = mean(sorted);
    double ss = 0.0;
    for (double x : sorted) ss += (x - m) * (x - m);
    const double sd = sorted.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);

    double scale = std::min(sd, iqr / 1.34);
    if (scale <= 0.0) scale = std::max(sd, iqr / 1.34);
    if (scale <= 0.0) {
        // Constant sample: fall back to a small positive scale so the kernel
        // stays a proper density.
        scale = 1e-3 * std::max(1.0, std::abs(sorted[0]));
    }
    return 0.9 * scale * std::pow(n, -0.2);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw InvalidArgumentError("loglog_slope: need matching samples of size >= 2");
    }
    const std::size_t n = x.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw InvalidArgumentError("loglog_slope: entries must be positive");
        }
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double nn = static_cast<double>(n);
    return (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
}

}  // namespace rem::stats
