#pragma once

#include <optional>
#include <vector>

#include "rem/errors.hpp"

namespace rem {

/// Closed interval the observations are confined to. Optional everywhere;
/// when present it adds box constraints to the Wasserstein projection.
struct DomainInterval {
    double lower;
    double upper;

    DomainInterval(double lo, double hi);
    bool contains(double x) const { return x >= lower && x <= upper; }
};

/// A unit's raw observations, stored sorted ascending. This is the uniform
/// discrete measure placing mass 1/N on each observation.
class EmpiricalMeasure {
public:
    explicit EmpiricalMeasure(std::vector<double> values,
                              std::optional<DomainInterval> domain = std::nullopt);

    int size() const { return static_cast<int>(values_.size()); }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> values_;
};

/// Discretized quantile function: entry m holds the value on the probability
/// cell ((m-1)/M, m/M]. Nondecreasing by construction; the common currency of
/// all Wasserstein arithmetic here.
class QuantileGrid {
public:
    explicit QuantileGrid(std::vector<double> values,
                          std::optional<DomainInterval> domain = std::nullopt);

    int grid_size() const { return static_cast<int>(values_.size()); }
    const std::vector<double>& values() const { return values_; }
    double operator[](int m) const { return values_[static_cast<std::size_t>(m)]; }

    friend bool operator==(const QuantileGrid&, const QuantileGrid&) = default;

private:
    std::vector<double> values_;
};

/// Density on an abscissa grid, for plot-ready output. `degenerate` marks
/// point masses, whose density is a synthetic narrow spike.
struct DensityCurve {
    std::vector<double> x;
    std::vector<double> f;
    bool degenerate = false;
};

/// Discretizes the empirical quantile function of `m` on `grid_size` cells.
/// When N divides M each observation is repeated M/N times; otherwise each
/// cell takes the left-continuous empirical quantile at its right endpoint,
/// which coincides with the repeat form whenever N | M.
QuantileGrid empirical_quantile(const EmpiricalMeasure& m, int grid_size);

/// Exact Wasserstein distance between step quantile functions sharing a grid:
/// sqrt((1/M) sum_m (a_m - b_m)^2). Throws GridMismatchError on unequal sizes;
/// align via lcm_grid first.
double wasserstein_distance(const QuantileGrid& a, const QuantileGrid& b);

/// min(lcm(sizes), cap), aborting the lcm accumulation early once it exceeds
/// the cap. Warns when cap < max(sizes) since stretching is then inexact.
int lcm_grid(const std::vector<int>& sizes, int cap);

/// Elementwise (1/n) sum_i w_i * grid_i. Weights must average to 1 (within
/// 1e-10); negative weights are allowed, so the result may be non-monotone.
std::vector<double> weighted_quantile_mean(const std::vector<QuantileGrid>& grids,
                                           const std::vector<double>& weights);

/// Least-squares projection onto nondecreasing sequences (pool-adjacent-
/// violators, equal weights). Already-monotone input is returned unchanged.
std::vector<double> pava_nondecreasing(std::vector<double> v);

/// Projection onto the discretized Wasserstein space: nearest nondecreasing
/// vector in least squares, clipped to the domain box when one is given.
/// Idempotent; identity on feasible input.
QuantileGrid project_to_wasserstein(std::vector<double> v,
                                    std::optional<DomainInterval> domain = std::nullopt);

/// Equal-weight Wasserstein barycenter of empirical measures on the common
/// lcm grid (capped at `cap`).
QuantileGrid barycenter(const std::vector<EmpiricalMeasure>& measures, int cap = 5000);

/// Converts a quantile grid to a density on `n_points` abscissae spanning
/// [q_1, q_M] via a local linear derivative estimate of the implied CDF
/// (Epanechnikov weights, the given bandwidth), renormalized to integrate
/// to 1. Constant grids come back as a degenerate spike.
DensityCurve quantile_to_density(const QuantileGrid& q, double bandwidth, int n_points);

/// Silverman-style default bandwidth for quantile_to_density, computed on the
/// pseudo-sample the grid implies.
double default_density_bandwidth(const QuantileGrid& q);

namespace detail {

/// Running elementwise mean of w_i * rows[i]: out[j] after all i equals
/// (1/n) sum_i w_i rows[i][j]. The running-mean recurrence keeps equal-weight
/// averages of identical rows bitwise exact, which the exactness guarantees
/// of barycenter and predict-at-mean rely on. All weighted averaging in the
/// library funnels through this one accumulation (or its multi-query twin in
/// regression.cpp, which applies the identical per-cell recurrence).
void running_weighted_mean(const std::vector<const double*>& rows, int m,
                           const double* weights, double* out);

}  // namespace detail

}  // namespace rem
