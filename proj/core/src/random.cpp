// Apache License, Version 2.0, refer to LICENSE.txt

#include "mixstock/random.hpp"

#include <cmath>
#include <numeric>

#include "mixstock/numeric.hpp"

namespace mixstock {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double sample_uniform(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

double sample_normal(Rng& rng, double mean, double sd) {
  return std::normal_distribution<double>(mean, sd)(rng);
}

double sample_log_gamma(Rng& rng, double shape) {
  if (shape >= 1.0) return std::log(std::gamma_distribution<double>(shape, 1.0)(rng));
  // Gamma(a) = Gamma(a + 1) * U^(1/a)
  double u = sample_uniform(rng);
  while (u <= 0.0) u = sample_uniform(rng);
  return std::log(std::gamma_distribution<double>(shape + 1.0, 1.0)(rng)) + std::log(u) / shape;
}

std::vector<double> sample_dirichlet(Rng& rng, std::span<const double> alpha) {
  std::vector<double> out(alpha.size());
  for (std::size_t j = 0; j < alpha.size(); ++j) out[j] = sample_log_gamma(rng, alpha[j]);
  const double norm = log_sum_exp(out);
  constexpr double kFloor = 1e-300;
  double total = 0.0;
  for (double& v : out) {
    v = std::max(std::exp(v - norm), kFloor);
    total += v;
  }
  for (double& v : out) v /= total;
  return out;
}

std::vector<long> sample_multinomial(Rng& rng, long total, std::span<const double> probs) {
  std::vector<long> counts(probs.size(), 0);
  double remaining_mass = std::accumulate(probs.begin(), probs.end(), 0.0);
  long remaining = total;
  for (std::size_t j = 0; j + 1 < probs.size() && remaining > 0; ++j) {
    const double q = std::clamp(probs[j] / remaining_mass, 0.0, 1.0);
    counts[j] = std::binomial_distribution<long>(remaining, q)(rng);
    remaining -= counts[j];
    remaining_mass -= probs[j];
    if (remaining_mass <= 0.0) break;
  }
  if (!probs.empty()) counts.back() += remaining;
  return counts;
}

std::size_t sample_categorical(Rng& rng, std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double u = sample_uniform(rng) * total;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (u < weights[j]) return j;
    u -= weights[j];
  }
  // Round-off: fall back to the last positive weight.
  for (std::size_t j = weights.size(); j-- > 0;)
    if (weights[j] > 0.0) return j;
  return 0;
}

}  // namespace mixstock
