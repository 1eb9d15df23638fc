#include "rem/rng.hpp"

#include <cmath>

#include "rem/errors.hpp"
#include "rem/stats.hpp"

namespace rem::rng {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    const std::uint64_t s = splitmix64(master + kGolden * (a + 1));
    return splitmix64(s + kGolden * (b + 1));
}

Engine make_engine(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return Engine(derive_seed(master, a, b));
}

double uniform01(Engine& eng) {
    return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

double normal(Engine& eng, double mean, double sd) {
    return mean + sd * stats::normal_quantile(uniform01(eng));
}

double gamma(Engine& eng, double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) {
        throw InvalidArgumentError("gamma: shape and scale must be positive");
    }
    if (shape < 1.0) {
        const double u = uniform01(eng);
        return gamma(eng, shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    // Marsaglia-Tsang squeeze.
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x;
        double v;
        do {
            x = stats::normal_quantile(uniform01(eng));
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform01(eng);
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
}

long poisson(Engine& eng, double lambda) {
    if (lambda < 0.0) throw InvalidArgumentError("poisson: mean must be nonnegative");
    if (lambda == 0.0) return 0;
    // Split large means by additivity to keep exp(-lambda) representable.
    if (lambda > 500.0) {
        const double half = lambda / 2.0;
        return poisson(eng, half) + poisson(eng, lambda - half);
    }
    const double limit = std::exp(-lambda);
    long k = 0;
    double prod = uniform01(eng);
    while (prod > limit) {
        ++k;
        prod *= uniform01(eng);
    }
    return k;
}

}  // namespace rem::rng
