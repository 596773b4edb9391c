// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace mixstock {

using Rng = std::mt19937_64;

// Deterministically expands a 64-bit seed into independent stream seeds
// (splitmix64 over seed ^ stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

double sample_uniform(Rng& rng);
double sample_normal(Rng& rng, double mean = 0.0, double sd = 1.0);

// log of a Gamma(shape, 1) variate. Stable for very small shapes, where the
// variate itself underflows.
double sample_log_gamma(Rng& rng, double shape);

// Dirichlet draw normalized in log space. Components are floored at 1e-300
// so the result always lies in the open simplex.
std::vector<double> sample_dirichlet(Rng& rng, std::span<const double> alpha);

std::vector<long> sample_multinomial(Rng& rng, long total, std::span<const double> probs);

// Index drawn with probability proportional to weights.
std::size_t sample_categorical(Rng& rng, std::span<const double> weights);

}  // namespace mixstock
