#include "rem/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rem/log.hpp"
#include "rem/stats.hpp"

namespace rem {

double kde_bandwidth(const EmpiricalMeasure& m, const KdeConfig& cfg) {
    if (cfg.rule == KdeConfig::BandwidthRule::fixed) {
        if (!(cfg.bandwidth_value > 0.0)) {
            throw InvalidArgumentError("kde_bandwidth: fixed bandwidth must be positive");
        }
        return cfg.bandwidth_value;
    }
    return stats::silverman_bandwidth(m.values());
}

QuantileGrid kde_quantile(const EmpiricalMeasure& m, const KdeConfig& cfg, int grid_size) {
    if (m.size() < 2) {
        throw InfeasibleUnitError(
            "kernel density presmoothing needs at least 2 observations, got " +
            std::to_string(m.size()));
    }
    if (grid_size < 1) throw InvalidArgumentError("kde_quantile: grid size must be >= 1");
    if (cfg.cdf_grid_size < 2) {
        throw InvalidArgumentError("kde_quantile: cdf grid needs at least 2 points");
    }

    const auto& obs = m.values();
    const double h = kde_bandwidth(m, cfg);
    const int g = cfg.cdf_grid_size;
    // The estimated density lives on the observed data range, matching the
    // compact-support presmoothing pipelines this baseline stands in for;
    // the kernel mass falling outside is renormalized away. Constant data
    // falls back to a one-bandwidth window around the atom.
    double xlo = obs.front();
    double xhi = obs.back();
    if (!(xhi > xlo)) {
        xlo -= h;
        xhi += h;
    }
    const double dx = (xhi - xlo) / static_cast<double>(g - 1);

    // Mixture CDF on the uniform grid. Each observation contributes its
    // Gaussian CDF only inside +-10h; beyond that the contribution is 0 or 1
    // to double precision, tallied through a suffix counter.
    std::vector<double> cdf(static_cast<std::size_t>(g), 0.0);
    std::vector<double> ones_from(static_cast<std::size_t>(g) + 1, 0.0);
    const double cut = 10.0 * h;
    for (double y : obs) {
        const int j_lo = std::max(0, static_cast<int>(std::ceil((y - cut - xlo) / dx)));
        const int j_hi =
            std::clamp(static_cast<int>(std::ceil((y + cut - xlo) / dx)), j_lo, g);
        for (int j = j_lo; j < j_hi; ++j) {
            cdf[j] += stats::normal_cdf((xlo + dx * j - y) / h);
        }
        ones_from[j_hi] += 1.0;
    }
    double carried = 0.0;
    const double n = static_cast<double>(obs.size());
    for (int j = 0; j < g; ++j) {
        carried += ones_from[j];
        cdf[j] = (cdf[j] + carried) / n;
    }
    const double mass_lo = cdf[0];
    const double mass = cdf[g - 1] - mass_lo;
    for (int j = 0; j < g; ++j) cdf[j] = (cdf[j] - mass_lo) / mass;

    // Invert by monotone linear interpolation; probe points ascend so a
    // single sweep suffices.
    std::vector<double> q(static_cast<std::size_t>(grid_size));
    int j = 0;
    for (int cell = 0; cell < grid_size; ++cell) {
        const double p = (static_cast<double>(cell) + 0.5) / static_cast<double>(grid_size);
        while (j < g - 1 && cdf[j + 1] < p) ++j;
        const double f0 = cdf[j];
        const double f1 = cdf[std::min(j + 1, g - 1)];
        const double t = (f1 > f0) ? std::clamp((p - f0) / (f1 - f0), 0.0, 1.0) : 0.0;
        q[cell] = xlo + dx * (static_cast<double>(j) + t);
    }
    return QuantileGrid(std::move(q));
}

TwoStepModel fit_two_step(const std::vector<std::vector<double>>& covariates,
                          const std::vector<EmpiricalMeasure>& measures, const KdeConfig& kde,
                          const RemConfig& config) {
    if (covariates.size() != measures.size()) {
        throw InvalidArgumentError("fit_two_step: one covariate row per measure required");
    }
    if (measures.empty()) throw InvalidArgumentError("fit_two_step: empty training set");

    std::vector<int> feasible;
    std::vector<int> excluded;
    for (std::size_t i = 0; i < measures.size(); ++i) {
        if (measures[i].size() >= 2) {
            feasible.push_back(static_cast<int>(i));
        } else {
            excluded.push_back(static_cast<int>(i));
        }
    }
    for (int i : excluded) {
        log::warn(log::w_two_step_excluded,
                  "unit " + std::to_string(i) +
                      " has fewer than 2 observations; presmoothing is infeasible, unit dropped");
    }
    if (feasible.size() < 2) {
        throw InfeasibleUnitError(
            "two-step fit impossible: fewer than 2 units admit a density estimate");
    }

    std::vector<int> sizes;
    sizes.reserve(feasible.size());
    for (int i : feasible) sizes.push_back(measures[i].size());
    const int grid_size = lcm_grid(sizes, config.grid_cap);

    std::vector<QuantileGrid> grids;
    std::vector<std::vector<double>> z;
    grids.reserve(feasible.size());
    z.reserve(feasible.size());
    for (int i : feasible) {
        grids.push_back(kde_quantile(measures[i], kde, grid_size));
        z.push_back(covariates[i]);
    }

    RemConfig cfg = config;
    if (cfg.mode == Mode::local && !(cfg.bandwidth > 0.0)) {
        cfg.bandwidth = std::pow(static_cast<double>(feasible.size()), -0.2);
    }

    CovariateSample cov(std::move(z));
    return TwoStepModel(FrechetRegressor(std::move(cov), std::move(grids), cfg),
                        std::move(excluded));
}

TwoStepModel fit_two_step(const std::vector<double>& covariates,
                          const std::vector<EmpiricalMeasure>& measures, const KdeConfig& kde,
                          const RemConfig& config) {
    std::vector<std::vector<double>> z;
    z.reserve(covariates.size());
    for (double v : covariates) z.push_back({v});
    return fit_two_step(z, measures, kde, config);
}

}  // namespace rem
