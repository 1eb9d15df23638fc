#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rem/measures.hpp"

namespace rem {

enum class Mode { global, local };

enum class KernelFamily { epanechnikov, triangular, quartic };

/// Symmetric probability density on [-1, 1].
struct KernelSpec {
    KernelFamily family = KernelFamily::epanechnikov;

    double operator()(double u) const;
};

/// Predictor matrix with cached mean, covariance (divisor n) and its
/// Cholesky factor. Construction rejects designs whose covariance has
/// smallest eigenvalue <= 1e-10; there is no ridge fallback.
class CovariateSample {
public:
    explicit CovariateSample(std::vector<std::vector<double>> z);

    int n() const { return n_; }
    int p() const { return p_; }
    const std::vector<double>& mean() const { return mean_; }
    const std::vector<double>& covariance() const { return cov_; }  // p x p row-major
    double min_eigenvalue() const { return min_eig_; }

    double value(int i, int j) const { return z_[static_cast<std::size_t>(i) * p_ + j]; }
    std::vector<double> row(int i) const;

    /// Solves covariance() * x = rhs through the cached Cholesky factor.
    std::vector<double> solve_covariance(std::vector<double> rhs) const;

private:
    int n_ = 0;
    int p_ = 0;
    std::vector<double> z_;     // n x p row-major
    std::vector<double> mean_;  // p
    std::vector<double> cov_;   // p x p
    std::vector<double> chol_;  // lower-triangular factor, p x p
    double min_eig_ = 0.0;
};

/// s_i = 1 + (Z_i - Zbar)' Sigma^{-1} (z - Zbar); averages to 1 by construction.
std::vector<double> global_weights(const CovariateSample& c, const std::vector<double>& z);

/// Local linear weights s_i = K_h(Z_i - z) [u2 - u1 (Z_i - z)] / sigma0^2 with
/// u_j = n^{-1} sum K_h(Z_i - z)(Z_i - z)^j. Scalar predictor only. Throws
/// InsufficientLocalDataError when sigma0^2 = u0 u2 - u1^2 <= 1e-12.
std::vector<double> local_weights(const CovariateSample& c, double z, double bandwidth,
                                  const KernelSpec& kernel);

struct Prediction {
    std::vector<double> z;
    QuantileGrid quantiles;
    std::vector<double> weights;    // diagnostic; mean 1 up to rounding
    bool extrapolation = false;     // some |weight| > 10
};

/// One entry of predict_batch: either a prediction or the error that query hit.
struct PredictionOutcome {
    std::optional<Prediction> prediction;
    std::string error_code;
    std::string error_message;

    bool ok() const { return prediction.has_value(); }
};

struct RemConfig {
    Mode mode = Mode::global;
    double bandwidth = 0.0;  // local only; <= 0 selects the n^(-1/5) default
    KernelSpec kernel{};
    int grid_cap = 5000;
    std::optional<DomainInterval> domain;
};

/// The shared weighting / averaging / projection pipeline over quantile grids
/// aligned on a common grid. Regression with empirical measures feeds it
/// stretched empirical quantiles; the two-step baseline feeds it presmoothed
/// ones. Immutable after construction; predict is pure and reentrant.
class FrechetRegressor {
public:
    FrechetRegressor(CovariateSample covariates, std::vector<QuantileGrid> grids,
                     RemConfig config);

    const CovariateSample& covariates() const { return covariates_; }
    const RemConfig& config() const { return config_; }
    int grid_size() const { return m_; }

    std::vector<double> weights_at(const std::vector<double>& z) const;

    Prediction predict(const std::vector<double>& z) const;
    Prediction predict(double z) const { return predict(std::vector<double>{z}); }

    /// Elementwise predict; per-query failures are collected, not fatal.
    std::vector<PredictionOutcome> predict_batch(const std::vector<std::vector<double>>& zs) const;
    std::vector<PredictionOutcome> predict_batch(const std::vector<double>& zs) const;

private:
    CovariateSample covariates_;
    RemConfig config_;
    int m_ = 0;
    std::vector<double> grid_matrix_;  // n x m row-major
};

/// A fitted regression-with-empirical-measures model: training measures plus
/// the regressor built on their lcm-grid quantile stretchings.
class RemModel {
public:
    RemModel(std::vector<EmpiricalMeasure> measures, FrechetRegressor regressor)
        : measures_(std::move(measures)), regressor_(std::move(regressor)) {}

    const std::vector<EmpiricalMeasure>& measures() const { return measures_; }
    const FrechetRegressor& regressor() const { return regressor_; }
    int grid_size() const { return regressor_.grid_size(); }

    Prediction predict(const std::vector<double>& z) const { return regressor_.predict(z); }
    Prediction predict(double z) const { return regressor_.predict(z); }
    std::vector<PredictionOutcome> predict_batch(const std::vector<std::vector<double>>& zs) const {
        return regressor_.predict_batch(zs);
    }
    std::vector<PredictionOutcome> predict_batch(const std::vector<double>& zs) const {
        return regressor_.predict_batch(zs);
    }

private:
    std::vector<EmpiricalMeasure> measures_;
    FrechetRegressor regressor_;
};

/// Validates the design, derives the common grid size min(lcm{N_i}, cap) and
/// builds the model. Requires n >= 2, nonempty units, and p == 1 for local
/// mode. Local bandwidth defaults to n^(-1/5) when unset.
RemModel fit(const std::vector<std::vector<double>>& covariates,
             std::vector<EmpiricalMeasure> measures, const RemConfig& config = {});

/// Scalar-predictor convenience.
RemModel fit(const std::vector<double>& covariates, std::vector<EmpiricalMeasure> measures,
             const RemConfig& config = {});

namespace detail {

/// Multi-query twin of measures::detail::running_weighted_mean: accumulates
/// q running means at once, tiled over cells for cache locality. Per-cell
/// arithmetic and unit order are identical to the single-row version, so a
/// 1-query batch is bitwise equal to it.
void running_weighted_mean_multi(const std::vector<const double*>& rows, int m,
                                 const std::vector<double>& weights /* q x n */, int q,
                                 std::vector<double>& out /* q x m */);

}  // namespace detail

}  // namespace rem
