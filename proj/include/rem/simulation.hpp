#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rem/baseline.hpp"
#include "rem/regression.hpp"
#include "rem/rng.hpp"

namespace rem {

/// The four generative settings of the benchmark study: Gaussian responses
/// whose mean/sd depend on the predictor linearly (I) or through sin(pi z)
/// (II); III and IV additionally push each response through a random
/// transport map.
enum class Setting { I, II, III, IV };

Setting parse_setting(const std::string& s);
std::string setting_name(Setting s);

/// Settings II and IV carry the nonlinear link and are fit with local
/// regression by default.
bool is_local_setting(Setting s);

struct SettingParams {
    double eta0 = 0.0;
    double sigma0 = 3.0;
    double alpha = 3.0;
    double beta = 0.5;
    double tau = 0.5;
    double kappa = 1.0;
};

/// Uniform midpoint evaluation grid for integrated squared error.
struct QueryGrid {
    double lo = -1.0;
    double hi = 1.0;
    int points = 100;

    std::vector<double> midpoints() const;
    double cell_width() const { return (hi - lo) / points; }
};

/// T_k(a) = a - sin(k a)/|k|, k in {-2,-1,1,2}: strictly increasing maps that
/// average to the identity over the collection.
struct TransportMap {
    int k;

    explicit TransportMap(int k_);
    double operator()(double a) const;
};

/// g(z): identity for settings I/III, sin(pi z) for II/IV.
double setting_link(Setting s, double z);

double true_mean(Setting s, const SettingParams& p, double z);
double true_sd(Setting s, const SettingParams& p, double z);

/// Quantile function of the target regression distribution at z, Gaussian
/// with mean true_mean and sd true_sd, discretized at cell midpoints.
/// Identical for I vs III and II vs IV since the transport maps average to
/// the identity.
QuantileGrid true_quantile(Setting s, const SettingParams& p, double z, int grid_size);

struct LatentUnit {
    double eta = 0.0;
    double sigma = 0.0;
    long n_obs = 0;
    int transport_k = 0;  // 0 when no transport was applied
};

struct SampledUnit {
    std::vector<double> observations;  // empty when N_i drew 0
    LatentUnit latent;
};

/// Draws one unit at predictor level z: latent (eta, sigma), a Poisson
/// observation count with mean lambda, and the observations themselves via
/// the quantile pushforward (transported in settings III/IV).
SampledUnit sample_unit(Setting s, const SettingParams& p, double z, double lambda,
                        rng::Engine& eng);

struct SimulationScenario {
    Setting setting = Setting::I;
    int n = 100;
    double lambda_rate = 0.25;  // N_i ~ Poisson(lambda_rate * n)
    // Optional heterogeneous sampling rates: unit i draws N_i with mean
    // lambda_rate * n * unit_rate_multipliers[i % size]. Empty = homogeneous.
    std::vector<double> unit_rate_multipliers;
    SettingParams params{};
    int runs = 200;
    std::uint64_t master_seed = 0;
    QueryGrid query_grid{};
    int grid_cap = 5000;
    int workers = 0;  // 0 -> hardware concurrency
    bool include_two_step = true;
    std::optional<Mode> mode_override;  // default: global for I/III, local for II/IV
    KdeConfig kde{};
};

struct RunResult {
    int run_index = 0;
    int n = 0;
    Setting setting = Setting::I;
    std::optional<double> ise_rem;
    std::optional<double> ise_two_step;
    bool two_step_infeasible = false;
    int excluded_units = 0;      // N_i = 0 units dropped before fitting
    int two_step_excluded = 0;   // N_i < 2 units the baseline could not use
    std::string error;

    bool failed() const { return !error.empty(); }
};

struct MethodSummary {
    int runs = 0;
    double mean = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
};

struct LadderPoint {
    int n = 0;
    MethodSummary rem;
    std::optional<MethodSummary> two_step;
    int failures = 0;
};

struct StudyResult {
    std::vector<RunResult> runs;          // ordered by (ladder position, run index)
    std::vector<LadderPoint> ladder;
    std::optional<double> rem_rate_slope;  // log-log slope of mean ISE vs n
};

/// Per-run data: predictors plus sampled units, before any exclusion.
struct RunData {
    std::vector<double> z;
    std::vector<SampledUnit> units;
};

/// The data of run `run_index` at ladder size n. Seeded by
/// derive_seed(master_seed, n, run_index), so every (seed, n, run) triple
/// reproduces bit-identically in any execution order.
RunData generate_run_data(const SimulationScenario& sc, int n, int run_index);

/// Fits and scores one generated run (used by run_study; exposed for
/// targeted experiments on modified data).
RunResult evaluate_run(const SimulationScenario& sc, int n, int run_index, const RunData& data);

/// Midpoint Riemann approximation of the integrated squared Wasserstein
/// distance between two quantile-valued curves over the query grid.
double ise(const std::function<QuantileGrid(double)>& fitted,
           const std::function<QuantileGrid(double)>& truth, const QueryGrid& grid);

/// Monte Carlo study over an n-ladder: scenario.runs runs per ladder point,
/// fitting regression on empirical measures (mode per setting unless
/// overridden) and optionally the two-step baseline on identical data.
/// Deterministic in (master_seed, n, run) regardless of worker count. More
/// than 10% failed runs aborts with diagnostics.
StudyResult run_study(const SimulationScenario& sc, const std::vector<int>& n_ladder);

namespace detail {
double ise_core(const std::vector<QuantileGrid>& fitted, const std::vector<QuantileGrid>& truth,
                double cell_width);
std::vector<double> standard_normal_grid(int grid_size);  // quantiles at cell midpoints
}  // namespace detail

}  // namespace rem
