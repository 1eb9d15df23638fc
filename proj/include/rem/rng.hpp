#pragma once

#include <cstdint>
#include <random>

namespace rem::rng {

using Engine = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic stream derivation: two splitmix64 rounds fold the stream
/// coordinates (a, b) into the master seed, so any (master, a, b) triple
/// names the same engine regardless of execution order or worker count.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

Engine make_engine(std::uint64_t master, std::uint64_t a, std::uint64_t b);

/// Uniform on the open interval (0, 1); 53-bit resolution, never 0 or 1.
double uniform01(Engine& eng);

/// Inverse-CDF normal draw (portable bit-for-bit, unlike
/// std::normal_distribution).
double normal(Engine& eng, double mean, double sd);

/// Gamma(shape, scale) by the Marsaglia-Tsang squeeze method; shapes below 1
/// use the standard boost Gamma(shape+1) * U^(1/shape).
double gamma(Engine& eng, double shape, double scale);

/// Poisson by Knuth's product-of-uniforms inversion; large means are split
/// recursively by Poisson additivity to avoid underflow.
long poisson(Engine& eng, double lambda);

}  // namespace rem::rng
