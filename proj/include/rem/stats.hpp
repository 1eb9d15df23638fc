#pragma once

#include <span>
#include <vector>

namespace rem::stats {

/// Standard normal CDF.
double normal_cdf(double x);

/// Standard normal quantile (Acklam's rational approximation plus one
/// Halley refinement step; accurate to ~1e-15 over (0,1)).
double normal_quantile(double p);

/// Type-7 (linear interpolation) quantile of an ascending-sorted sample.
double quantile_sorted(std::span<const double> sorted, double p);

double mean(std::span<const double> v);
double median(std::vector<double> v);

/// Silverman rule-of-thumb bandwidth 0.9 * min(sd, iqr/1.34) * n^(-1/5)
/// for an ascending-sorted sample. Constant samples get a small positive
/// floor so downstream kernels stay proper.
double silverman_bandwidth(std::span<const double> sorted);

/// OLS slope of log(y) on log(x). Requires positive entries and >= 2 points.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace rem::stats
