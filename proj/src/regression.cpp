#include "rem/regression.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rem/errors.hpp"

namespace rem {

namespace {

constexpr double kMinEigenvalue = 1e-10;
constexpr double kMinLocalSpread = 1e-12;
constexpr double kExtrapolationThreshold = 10.0;

// Cyclic Jacobi eigenvalue sweep for a small symmetric matrix; returns the
// smallest eigenvalue.
double smallest_eigenvalue(std::vector<double> a, int p) {
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * p + j]; };
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < p; ++i) {
            for (int j = i + 1; j < p; ++j) off += at(i, j) * at(i, j);
        }
        if (off < 1e-30) break;
        for (int i = 0; i < p; ++i) {
            for (int j = i + 1; j < p; ++j) {
                if (at(i, j) == 0.0) continue;
                const double theta = (at(j, j) - at(i, i)) / (2.0 * at(i, j));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < p; ++k) {
                    const double aik = at(i, k);
                    const double ajk = at(j, k);
                    at(i, k) = c * aik - s * ajk;
                    at(j, k) = s * aik + c * ajk;
                }
                for (int k = 0; k < p; ++k) {
                    const double aki = at(k, i);
                    const double akj = at(k, j);
                    at(k, i) = c * aki - s * akj;
                    at(k, j) = s * aki + c * akj;
                }
            }
        }
    }
    double min_eig = at(0, 0);
    for (int i = 1; i < p; ++i) min_eig = std::min(min_eig, at(i, i));
    return min_eig;
}

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
std::vector<double> cholesky(const std::vector<double>& a, int p) {
    std::vector<double> l(static_cast<std::size_t>(p) * p, 0.0);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[static_cast<std::size_t>(i) * p + j];
            for (int k = 0; k < j; ++k) {
                s -= l[static_cast<std::size_t>(i) * p + k] * l[static_cast<std::size_t>(j) * p + k];
            }
            if (i == j) {
                if (!(s > 0.0)) {
                    throw DegenerateDesignError(
                        "covariance factorization failed: matrix is not positive definite");
                }
                l[static_cast<std::size_t>(i) * p + j] = std::sqrt(s);
            } else {
                l[static_cast<std::size_t>(i) * p + j] =
                    s / l[static_cast<std::size_t>(j) * p + j];
            }
        }
    }
    return l;
}

}  // namespace

double KernelSpec::operator()(double u) const {
    const double au = std::abs(u);
    if (au > 1.0) return 0.0;
    switch (family) {
        case KernelFamily::epanechnikov:
            return 0.75 * (1.0 - u * u);
        case KernelFamily::triangular:
            return 1.0 - au;
        case KernelFamily::quartic: {
            const double t = 1.0 - u * u;
            return 0.9375 * t * t;
        }
    }
    return 0.0;
}

CovariateSample::CovariateSample(std::vector<std::vector<double>> z) {
    n_ = static_cast<int>(z.size());
    if (n_ < 2) {
        throw DegenerateDesignError("covariate sample needs n >= 2 units");
    }
    p_ = static_cast<int>(z.front().size());
    if (p_ < 1) throw InvalidArgumentError("covariate sample needs p >= 1 predictors");

    z_.reserve(static_cast<std::size_t>(n_) * p_);
    for (const auto& row : z) {
        if (static_cast<int>(row.size()) != p_) {
            throw InvalidArgumentError("covariate rows have inconsistent dimension");
        }
        for (double v : row) {
            if (!std::isfinite(v)) {
                throw InvalidArgumentError("covariates must be finite");
            }
            z_.push_back(v);
        }
    }

    mean_.assign(static_cast<std::size_t>(p_), 0.0);
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < p_; ++j) mean_[j] += value(i, j);
    }
    for (double& m : mean_) m /= static_cast<double>(n_);

    cov_.assign(static_cast<std::size_t>(p_) * p_, 0.0);
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j < p_; ++j) {
            const double dj = value(i, j) - mean_[j];
            for (int k = j; k < p_; ++k) {
                cov_[static_cast<std::size_t>(j) * p_ + k] += dj * (value(i, k) - mean_[k]);
            }
        }
    }
    for (int j = 0; j < p_; ++j) {
        for (int k = j; k < p_; ++k) {
            const double v = cov_[static_cast<std::size_t>(j) * p_ + k] / static_cast<double>(n_);
            cov_[static_cast<std::size_t>(j) * p_ + k] = v;
            cov_[static_cast<std::size_t>(k) * p_ + j] = v;
        }
    }

    min_eig_ = smallest_eigenvalue(cov_, p_);
    if (!(min_eig_ > kMinEigenvalue)) {
        throw DegenerateDesignError(
            "covariance matrix is numerically singular (smallest eigenvalue " +
            std::to_string(min_eig_) + "); cannot fit");
    }
    chol_ = cholesky(cov_, p_);
}

std::vector<double> CovariateSample::row(int i) const {
    std::vector<double> r(static_cast<std::size_t>(p_));
    for (int j = 0; j < p_; ++j) r[j] = value(i, j);
    return r;
}

std::vector<double> CovariateSample::solve_covariance(std::vector<double> rhs) const {
    if (static_cast<int>(rhs.size()) != p_) {
        throw InvalidArgumentError("solve_covariance: dimension mismatch");
    }
    // Forward substitution L y = rhs, then back substitution L' x = y.
    for (int i = 0; i < p_; ++i) {
        double s = rhs[i];
        for (int k = 0; k < i; ++k) s -= chol_[static_cast<std::size_t>(i) * p_ + k] * rhs[k];
        rhs[i] = s / chol_[static_cast<std::size_t>(i) * p_ + i];
    }
    for (int i = p_ - 1; i >= 0; --i) {
        double s = rhs[i];
        for (int k = i + 1; k < p_; ++k) s -= chol_[static_cast<std::size_t>(k) * p_ + i] * rhs[k];
        rhs[i] = s / chol_[static_cast<std::size_t>(i) * p_ + i];
    }
    return rhs;
}

std::vector<double> global_weights(const CovariateSample& c, const std::vector<double>& z) {
    if (static_cast<int>(z.size()) != c.p()) {
        throw InvalidArgumentError("global_weights: query dimension does not match design");
    }
    std::vector<double> dir(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) dir[j] = z[j] - c.mean()[j];
    const std::vector<double> solved = c.solve_covariance(std::move(dir));

    std::vector<double> w(static_cast<std::size_t>(c.n()));
    for (int i = 0; i < c.n(); ++i) {
        double s = 1.0;
        for (int j = 0; j < c.p(); ++j) {
            s += (c.value(i, j) - c.mean()[j]) * solved[j];
        }
        w[static_cast<std::size_t>(i)] = s;
    }
    return w;
}

std::vector<double> local_weights(const CovariateSample& c, double z, double bandwidth,
                                  const KernelSpec& kernel) {
    if (c.p() != 1) {
        throw InvalidArgumentError("local_weights: local regression requires a scalar predictor");
    }
    if (!(bandwidth > 0.0)) {
        throw InvalidArgumentError("local_weights: bandwidth must be positive");
    }
    const int n = c.n();
    std::vector<double> k(static_cast<std::size_t>(n));
    std::vector<double> d(static_cast<std::size_t>(n));
    double u0 = 0.0, u1 = 0.0, u2 = 0.0;
    for (int i = 0; i < n; ++i) {
        d[i] = c.value(i, 0) - z;
        k[i] = kernel(d[i] / bandwidth) / bandwidth;
        u0 += k[i];
        u1 += k[i] * d[i];
        u2 += k[i] * d[i] * d[i];
    }
    u0 /= n;
    u1 /= n;
    u2 /= n;
    const double sigma0_sq = u0 * u2 - u1 * u1;
    if (!(sigma0_sq > kMinLocalSpread)) {
        throw InsufficientLocalDataError(
            "local window around z = " + std::to_string(z) +
            " carries no spread (sigma0^2 = " + std::to_string(sigma0_sq) +
            "); enlarge the bandwidth");
    }
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        w[i] = k[i] * (u2 - u1 * d[i]) / sigma0_sq;
    }
    return w;
}

namespace detail {

void running_weighted_mean_multi(const std::vector<const double*>& rows, int m,
                                 const std::vector<double>& weights, int q,
                                 std::vector<double>& out) {
    const int n = static_cast<int>(rows.size());
    out.assign(static_cast<std::size_t>(q) * m, 0.0);
    constexpr int kTile = 512;
    for (int j0 = 0; j0 < m; j0 += kTile) {
        const int j1 = std::min(m, j0 + kTile);
        for (int i = 0; i < n; ++i) {
            const double* row = rows[static_cast<std::size_t>(i)];
            const double r = 1.0 / static_cast<double>(i + 1);
            for (int query = 0; query < q; ++query) {
                const double w = weights[static_cast<std::size_t>(query) * n + i];
                double* acc = out.data() + static_cast<std::size_t>(query) * m;
                for (int j = j0; j < j1; ++j) {
                    acc[j] += (w * row[j] - acc[j]) * r;
                }
            }
        }
    }
}

}  // namespace detail

FrechetRegressor::FrechetRegressor(CovariateSample covariates, std::vector<QuantileGrid> grids,
                                   RemConfig config)
    : covariates_(std::move(covariates)), config_(std::move(config)) {
    if (static_cast<int>(grids.size()) != covariates_.n()) {
        throw InvalidArgumentError("FrechetRegressor: one grid per unit required");
    }
    if (config_.mode == Mode::local && covariates_.p() != 1) {
        throw InvalidArgumentError("FrechetRegressor: local mode requires a scalar predictor");
    }
    if (config_.mode == Mode::local && !(config_.bandwidth > 0.0)) {
        throw InvalidArgumentError("FrechetRegressor: local mode requires a positive bandwidth");
    }
    m_ = grids.front().grid_size();
    grid_matrix_.reserve(static_cast<std::size_t>(covariates_.n()) * m_);
    for (const auto& g : grids) {
        if (g.grid_size() != m_) {
            throw GridMismatchError("FrechetRegressor: grids must share a grid size");
        }
        grid_matrix_.insert(grid_matrix_.end(), g.values().begin(), g.values().end());
    }
}

std::vector<double> FrechetRegressor::weights_at(const std::vector<double>& z) const {
    if (config_.mode == Mode::global) {
        return global_weights(covariates_, z);
    }
    if (z.size() != 1) {
        throw InvalidArgumentError("predict: local mode takes scalar queries");
    }
    return local_weights(covariates_, z.front(), config_.bandwidth, config_.kernel);
}

std::vector<PredictionOutcome> FrechetRegressor::predict_batch(
    const std::vector<std::vector<double>>& zs) const {
    std::vector<PredictionOutcome> outcomes(zs.size());
    const int n = covariates_.n();

    // Weight rows for the queries that produced one.
    std::vector<double> weight_rows;
    std::vector<std::size_t> ok_queries;
    for (std::size_t qi = 0; qi < zs.size(); ++qi) {
        try {
            std::vector<double> w = weights_at(zs[qi]);
            weight_rows.insert(weight_rows.end(), w.begin(), w.end());
            ok_queries.push_back(qi);
        } catch (const Error& e) {
            outcomes[qi].error_code = e.code();
            outcomes[qi].error_message = e.what();
        }
    }
    if (ok_queries.empty()) return outcomes;

    std::vector<const double*> rows(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rows[i] = grid_matrix_.data() + static_cast<std::size_t>(i) * m_;

    std::vector<double> means;
    detail::running_weighted_mean_multi(rows, m_, weight_rows,
                                        static_cast<int>(ok_queries.size()), means);

    for (std::size_t r = 0; r < ok_queries.size(); ++r) {
        const std::size_t qi = ok_queries[r];
        std::vector<double> avg(means.begin() + static_cast<std::ptrdiff_t>(r) * m_,
                                means.begin() + static_cast<std::ptrdiff_t>(r + 1) * m_);
        Prediction pred{
            zs[qi],
            project_to_wasserstein(std::move(avg), config_.domain),
            std::vector<double>(weight_rows.begin() + static_cast<std::ptrdiff_t>(r) * n,
                                weight_rows.begin() + static_cast<std::ptrdiff_t>(r + 1) * n),
            false};
        for (double w : pred.weights) {
            if (std::abs(w) > kExtrapolationThreshold) {
                pred.extrapolation = true;
                break;
            }
        }
        outcomes[qi].prediction = std::move(pred);
    }
    return outcomes;
}

std::vector<PredictionOutcome> FrechetRegressor::predict_batch(
    const std::vector<double>& zs) const {
    std::vector<std::vector<double>> queries;
    queries.reserve(zs.size());
    for (double z : zs) queries.push_back({z});
    return predict_batch(queries);
}

Prediction FrechetRegressor::predict(const std::vector<double>& z) const {
    auto outcomes = predict_batch(std::vector<std::vector<double>>{z});
    if (!outcomes.front().ok()) {
        throw Error(outcomes.front().error_code, outcomes.front().error_message);
    }
    return std::move(*outcomes.front().prediction);
}

RemModel fit(const std::vector<std::vector<double>>& covariates,
             std::vector<EmpiricalMeasure> measures, const RemConfig& config) {
    if (covariates.size() != measures.size()) {
        throw InvalidArgumentError("fit: one covariate row per measure required");
    }
    if (measures.empty()) throw InvalidArgumentError("fit: empty training set");

    std::vector<int> sizes;
    sizes.reserve(measures.size());
    for (const auto& m : measures) sizes.push_back(m.size());
    const int grid_size = lcm_grid(sizes, config.grid_cap);

    std::vector<QuantileGrid> grids;
    grids.reserve(measures.size());
    for (const auto& m : measures) grids.push_back(empirical_quantile(m, grid_size));

    RemConfig cfg = config;
    if (cfg.mode == Mode::local && !(cfg.bandwidth > 0.0)) {
        cfg.bandwidth = std::pow(static_cast<double>(measures.size()), -0.2);
    }

    CovariateSample cov(covariates);
    return RemModel(std::move(measures), FrechetRegressor(std::move(cov), std::move(grids), cfg));
}

RemModel fit(const std::vector<double>& covariates, std::vector<EmpiricalMeasure> measures,
             const RemConfig& config) {
    std::vector<std::vector<double>> z;
    z.reserve(covariates.size());
    for (double v : covariates) z.push_back({v});
    return fit(z, std::move(measures), config);
}

}  // namespace rem
