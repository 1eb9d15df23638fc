#pragma once

#include <vector>

#include "rem/regression.hpp"

namespace rem {

/// Configuration of the kernel-presmoothing step of the two-step baseline:
/// Gaussian kernel, Silverman or fixed bandwidth. The estimated density is
/// supported on the observed data range (renormalized), as in the
/// compact-support presmoothing pipelines this method stands in for, and its
/// CDF is inverted numerically on a uniform grid.
struct KdeConfig {
    enum class BandwidthRule { silverman, fixed };

    BandwidthRule rule = BandwidthRule::silverman;
    double bandwidth_value = 0.0;  // used by the fixed rule only
    int cdf_grid_size = 1000;
};

/// Bandwidth the config selects for a unit.
double kde_bandwidth(const EmpiricalMeasure& m, const KdeConfig& cfg);

/// Kernel density estimate of the unit, numerically inverted to an M-cell
/// quantile grid. Units with fewer than two observations are infeasible for
/// presmoothing and throw InfeasibleUnitError.
QuantileGrid kde_quantile(const EmpiricalMeasure& m, const KdeConfig& cfg, int grid_size);

/// The two-step comparison method: per-unit KDE presmoothing, then the same
/// weighting/averaging/projection pipeline as regression with empirical
/// measures, applied to the smoothed quantile grids.
class TwoStepModel {
public:
    TwoStepModel(FrechetRegressor regressor, std::vector<int> excluded_indices)
        : regressor_(std::move(regressor)), excluded_(std::move(excluded_indices)) {}

    const FrechetRegressor& regressor() const { return regressor_; }
    int grid_size() const { return regressor_.grid_size(); }

    /// Indices (into the input unit list) of units excluded as infeasible.
    const std::vector<int>& excluded_indices() const { return excluded_; }
    int excluded_units() const { return static_cast<int>(excluded_.size()); }

    Prediction predict(const std::vector<double>& z) const { return regressor_.predict(z); }
    Prediction predict(double z) const { return regressor_.predict(z); }
    std::vector<PredictionOutcome> predict_batch(const std::vector<std::vector<double>>& zs) const {
        return regressor_.predict_batch(zs);
    }
    std::vector<PredictionOutcome> predict_batch(const std::vector<double>& zs) const {
        return regressor_.predict_batch(zs);
    }

private:
    FrechetRegressor regressor_;
    std::vector<int> excluded_;
};

/// Fits the baseline. Units failing the kde_quantile precondition (N_i < 2)
/// are excluded with a warning; if fewer than two units remain the fit fails.
TwoStepModel fit_two_step(const std::vector<std::vector<double>>& covariates,
                          const std::vector<EmpiricalMeasure>& measures, const KdeConfig& kde,
                          const RemConfig& config = {});

TwoStepModel fit_two_step(const std::vector<double>& covariates,
                          const std::vector<EmpiricalMeasure>& measures, const KdeConfig& kde,
                          const RemConfig& config = {});

}  // namespace rem
