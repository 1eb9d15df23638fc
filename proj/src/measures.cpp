#include "rem/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "rem/log.hpp"
#include "rem/stats.hpp"

namespace rem {

DomainInterval::DomainInterval(double lo, double hi) : lower(lo), upper(hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw InvalidArgumentError("DomainInterval: requires finite lower < upper");
    }
}

EmpiricalMeasure::EmpiricalMeasure(std::vector<double> values,
                                   std::optional<DomainInterval> domain)
    : values_(std::move(values)) {
    if (values_.empty()) {
        throw InvalidArgumentError("EmpiricalMeasure: needs at least one observation");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw InvalidArgumentError("EmpiricalMeasure: observations must be finite");
        }
    }
    std::stable_sort(values_.begin(), values_.end());
    if (domain) {
        if (values_.front() < domain->lower || values_.back() > domain->upper) {
            throw InvalidArgumentError("EmpiricalMeasure: observation outside domain interval");
        }
    }
}

QuantileGrid::QuantileGrid(std::vector<double> values, std::optional<DomainInterval> domain)
    : values_(std::move(values)) {
    if (values_.empty()) {
        throw InvalidArgumentError("QuantileGrid: needs at least one cell");
    }
    for (std::size_t m = 0; m < values_.size(); ++m) {
        if (!std::isfinite(values_[m])) {
            throw InvalidArgumentError("QuantileGrid: values must be finite");
        }
        if (m > 0 && values_[m] < values_[m - 1]) {
            throw InvalidArgumentError("QuantileGrid: values must be nondecreasing");
        }
    }
    if (domain) {
        if (values_.front() < domain->lower || values_.back() > domain->upper) {
            throw InvalidArgumentError("QuantileGrid: values outside domain interval");
        }
    }
}

QuantileGrid empirical_quantile(const EmpiricalMeasure& m, int grid_size) {
    if (grid_size < 1) {
        throw InvalidArgumentError("empirical_quantile: grid size must be >= 1");
    }
    const auto& v = m.values();
    const std::uint64_t n = static_cast<std::uint64_t>(v.size());
    const std::uint64_t mm = static_cast<std::uint64_t>(grid_size);
    std::vector<double> out(static_cast<std::size_t>(grid_size));
    // Left-continuous empirical quantile at cell right endpoints; reduces to
    // repeating each observation M/N times whenever N divides M.
    for (std::uint64_t cell = 1; cell <= mm; ++cell) {
        const std::uint64_t idx = (n * cell + mm - 1) / mm;  // ceil(n*cell/M), 1-based
        out[cell - 1] = v[idx - 1];
    }
    return QuantileGrid(std::move(out));
}

double wasserstein_distance(const QuantileGrid& a, const QuantileGrid& b) {
    if (a.grid_size() != b.grid_size()) {
        throw GridMismatchError("wasserstein_distance: grids of size " +
                                std::to_string(a.grid_size()) + " and " +
                                std::to_string(b.grid_size()) +
                                " are not comparable; align via lcm_grid");
    }
    const auto& av = a.values();
    const auto& bv = b.values();
    double acc = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) {
        const double d = av[i] - bv[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(av.size()));
}

int lcm_grid(const std::vector<int>& sizes, int cap) {
    if (sizes.empty()) throw InvalidArgumentError("lcm_grid: empty size list");
    if (cap < 1) throw InvalidArgumentError("lcm_grid: cap must be >= 1");
    int max_size = 0;
    for (int s : sizes) {
        if (s < 1) throw InvalidArgumentError("lcm_grid: sizes must be positive");
        max_size = std::max(max_size, s);
    }
    if (cap < max_size) {
        log::warn(log::w_grid_cap_below_max,
                  "grid cap " + std::to_string(cap) + " is below the largest unit size " +
                      std::to_string(max_size) + "; quantile stretching will be inexact");
    }
    std::uint64_t acc = 1;
    for (int s : sizes) {
        const std::uint64_t u = static_cast<std::uint64_t>(s);
        acc = acc / std::gcd(acc, u) * u;
        if (acc > static_cast<std::uint64_t>(cap)) return cap;
    }
    return static_cast<int>(acc);
}

namespace detail {

void running_weighted_mean(const std::vector<const double*>& rows, int m,
                           const double* weights, double* out) {
    std::fill(out, out + m, 0.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double w = weights[i];
        const double r = 1.0 / static_cast<double>(i + 1);
        const double* row = rows[i];
        for (int j = 0; j < m; ++j) {
            out[j] += (w * row[j] - out[j]) * r;
        }
    }
}

}  // namespace detail

std::vector<double> weighted_quantile_mean(const std::vector<QuantileGrid>& grids,
                                           const std::vector<double>& weights) {
    if (grids.empty()) throw InvalidArgumentError("weighted_quantile_mean: no grids");
    if (grids.size() != weights.size()) {
        throw InvalidArgumentError("weighted_quantile_mean: weight count does not match grids");
    }
    const int m = grids.front().grid_size();
    for (const auto& g : grids) {
        if (g.grid_size() != m) {
            throw GridMismatchError("weighted_quantile_mean: grids must share a grid size");
        }
    }
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    if (std::abs(wsum / static_cast<double>(weights.size()) - 1.0) > 1e-10) {
        throw InvalidArgumentError("weighted_quantile_mean: weights must average to 1");
    }
    std::vector<const double*> rows;
    rows.reserve(grids.size());
    for (const auto& g : grids) rows.push_back(g.values().data());
    std::vector<double> out(static_cast<std::size_t>(m));
    detail::running_weighted_mean(rows, m, weights.data(), out.data());
    return out;
}

std::vector<double> pava_nondecreasing(std::vector<double> v) {
    const std::size_t n = v.size();
    std::vector<double> block_mean;
    std::vector<std::size_t> block_count;
    block_mean.reserve(n);
    block_count.reserve(n);
    for (double x : v) {
        double m = x;
        std::size_t c = 1;
        while (!block_mean.empty() && block_mean.back() > m) {
            const double bm = block_mean.back();
            const std::size_t bc = block_count.back();
            m = (bm * static_cast<double>(bc) + m * static_cast<double>(c)) /
                static_cast<double>(bc + c);
            c += bc;
            block_mean.pop_back();
            block_count.pop_back();
        }
        block_mean.push_back(m);
        block_count.push_back(c);
    }
    std::size_t idx = 0;
    for (std::size_t b = 0; b < block_mean.size(); ++b) {
        for (std::size_t j = 0; j < block_count[b]; ++j) v[idx++] = block_mean[b];
    }
    return v;
}

QuantileGrid project_to_wasserstein(std::vector<double> v, std::optional<DomainInterval> domain) {
    if (v.empty()) throw InvalidArgumentError("project_to_wasserstein: empty input");
    for (double x : v) {
        if (!std::isfinite(x)) {
            throw InvalidArgumentError("project_to_wasserstein: entries must be finite");
        }
    }
    v = pava_nondecreasing(std::move(v));
    if (domain) {
        for (double& x : v) x = std::clamp(x, domain->lower, domain->upper);
    }
    return QuantileGrid(std::move(v), domain);
}

QuantileGrid barycenter(const std::vector<EmpiricalMeasure>& measures, int cap) {
    if (measures.empty()) throw InvalidArgumentError("barycenter: empty measure list");
    std::vector<int> sizes;
    sizes.reserve(measures.size());
    for (const auto& m : measures) sizes.push_back(m.size());
    const int grid_size = lcm_grid(sizes, cap);
    std::vector<QuantileGrid> grids;
    grids.reserve(measures.size());
    for (const auto& m : measures) grids.push_back(empirical_quantile(m, grid_size));
    const std::vector<double> weights(measures.size(), 1.0);
    return project_to_wasserstein(weighted_quantile_mean(grids, weights));
}

double default_density_bandwidth(const QuantileGrid& q) {
    return stats::silverman_bandwidth(q.values());
}

DensityCurve quantile_to_density(const QuantileGrid& q, double bandwidth, int n_points) {
    if (!(bandwidth > 0.0)) {
        throw InvalidArgumentError("quantile_to_density: bandwidth must be positive");
    }
    if (n_points < 2) {
        throw InvalidArgumentError("quantile_to_density: need at least 2 output points");
    }
    const auto& qv = q.values();
    const int m = q.grid_size();
    const double lo = qv.front();
    const double hi = qv.back();

    if (hi == lo) {
        // Point mass: synthetic spike of width ~bandwidth integrating to 1.
        const double w = bandwidth;
        DensityCurve spike;
        spike.x = {lo - w, lo, lo + w};
        spike.f = {0.0, 1.0 / w, 0.0};
        spike.degenerate = true;
        return spike;
    }

    DensityCurve curve;
    curve.x.resize(static_cast<std::size_t>(n_points));
    curve.f.resize(static_cast<std::size_t>(n_points));
    const double dx = (hi - lo) / static_cast<double>(n_points - 1);
    // The grid implies CDF samples (q_m, (m+0.5)/M); the density is the local
    // linear slope of that relation.
    for (int j = 0; j < n_points; ++j) {
        const double x = lo + dx * static_cast<double>(j);
        curve.x[static_cast<std::size_t>(j)] = x;
        const auto first = std::lower_bound(qv.begin(), qv.end(), x - bandwidth);
        const auto last = std::upper_bound(qv.begin(), qv.end(), x + bandwidth);
        double s0 = 0.0, s1 = 0.0, s2 = 0.0, t0 = 0.0, t1 = 0.0;
        for (auto it = first; it != last; ++it) {
            const double u = (*it - x) / bandwidth;
            const double w = 0.75 * (1.0 - u * u);
            if (w <= 0.0) continue;
            const double d = *it - x;
            const double p = (static_cast<double>(it - qv.begin()) + 0.5) /
                             static_cast<double>(m);
            s0 += w;
            s1 += w * d;
            s2 += w * d * d;
            t0 += w * p;
            t1 += w * p * d;
        }
        const double denom = s0 * s2 - s1 * s1;
        double slope = 0.0;
        if (denom > 1e-300) slope = (s0 * t1 - s1 * t0) / denom;
        curve.f[static_cast<std::size_t>(j)] = std::max(slope, 0.0);
    }

    double integral = 0.0;
    for (int j = 0; j + 1 < n_points; ++j) {
        integral += 0.5 * (curve.f[j] + curve.f[j + 1]) * dx;
    }
    if (!(integral > 0.0)) {
        throw InvalidArgumentError(
            "quantile_to_density: smoothing windows are empty; increase the bandwidth");
    }
    for (double& f : curve.f) f /= integral;
    return curve;
}

}  // namespace rem
