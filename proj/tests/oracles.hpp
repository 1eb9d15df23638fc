#pragma once

// Independent test oracles. Nothing here reuses the library's algorithms:
// the projection oracle enumerates candidate block structures exhaustively,
// the Dykstra oracle iterates alternating half-space projections, and the
// step-function distance integrates over merged probability breakpoints.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace oracle {

// Exhaustive solver for min ||q - v||^2 subject to q nondecreasing and
// optionally lo <= q_i <= hi. The optimum is blockwise constant with each
// block at its (clipped) mean, so enumerating all 2^(n-1) contiguous block
// partitions and keeping the best feasible candidate is exact. Usable up to
// n ~ 16.
inline std::vector<double> project_enumerate(const std::vector<double>& v,
                                             std::optional<std::pair<double, double>> box) {
    const int n = static_cast<int>(v.size());
    std::vector<double> best;
    double best_cost = std::numeric_limits<double>::infinity();
    const unsigned long masks = 1UL << (n - 1);  // bit b set -> boundary after position b
    std::vector<double> candidate(static_cast<std::size_t>(n));
    for (unsigned long mask = 0; mask < masks; ++mask) {
        int start = 0;
        bool feasible = true;
        double prev = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            const bool boundary = (i == n - 1) || ((mask >> i) & 1UL);
            if (!boundary) continue;
            double sum = 0.0;
            for (int j = start; j <= i; ++j) sum += v[j];
            double value = sum / static_cast<double>(i - start + 1);
            if (box) value = std::clamp(value, box->first, box->second);
            if (value < prev) {
                feasible = false;
                break;
            }
            for (int j = start; j <= i; ++j) candidate[j] = value;
            prev = value;
            start = i + 1;
        }
        if (!feasible) continue;
        double cost = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = candidate[i] - v[i];
            cost += d * d;
        }
        if (cost < best_cost) {
            best_cost = cost;
            best = candidate;
        }
    }
    return best;
}

// Dykstra's alternating projections onto the half-spaces {q_i <= q_{i+1}}
// and the box. Converges to the exact projection onto the intersection;
// slow but algorithmically unrelated to both the enumeration above and the
// library's pooling algorithm.
inline std::vector<double> project_dykstra(const std::vector<double>& v,
                                           std::optional<std::pair<double, double>> box,
                                           int cycles = 20000) {
    const int n = static_cast<int>(v.size());
    std::vector<double> x = v;
    const int sets = (n - 1) + (box ? 1 : 0);
    if (sets <= 0) return x;
    std::vector<std::vector<double>> increments(static_cast<std::size_t>(sets),
                                                std::vector<double>(v.size(), 0.0));
    for (int cycle = 0; cycle < cycles; ++cycle) {
        for (int s = 0; s < sets; ++s) {
            std::vector<double> y(v.size());
            for (int i = 0; i < n; ++i) y[i] = x[i] + increments[s][i];
            std::vector<double> projected = y;
            if (s < n - 1) {
                if (projected[s] > projected[s + 1]) {
                    const double mid = 0.5 * (projected[s] + projected[s + 1]);
                    projected[s] = mid;
                    projected[s + 1] = mid;
                }
            } else {
                for (double& t : projected) t = std::clamp(t, box->first, box->second);
            }
            for (int i = 0; i < n; ++i) increments[s][i] = y[i] - projected[i];
            x = std::move(projected);
        }
    }
    return x;
}

// Exact squared L2 distance between the quantile functions of two uniform
// discrete measures, integrating over the merged breakpoints {i/na} u {j/nb}.
inline double exact_wasserstein_sq(const std::vector<double>& a_sorted,
                                   const std::vector<double>& b_sorted) {
    const std::size_t na = a_sorted.size();
    const std::size_t nb = b_sorted.size();
    std::vector<double> cuts{0.0};
    for (std::size_t i = 1; i < na; ++i) cuts.push_back(static_cast<double>(i) / na);
    for (std::size_t j = 1; j < nb; ++j) cuts.push_back(static_cast<double>(j) / nb);
    cuts.push_back(1.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
        const double qa = a_sorted[std::min(na - 1, static_cast<std::size_t>(
                                                        std::ceil(mid * na) - 1))];
        const double qb = b_sorted[std::min(nb - 1, static_cast<std::size_t>(
                                                        std::ceil(mid * nb) - 1))];
        acc += (qa - qb) * (qa - qb) * (cuts[k + 1] - cuts[k]);
    }
    return acc;
}

}  // namespace oracle
