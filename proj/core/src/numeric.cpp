// Apache License, Version 2.0, refer to LICENSE.txt

#include "mixstock/numeric.hpp"

#include <algorithm>
#include <numbers>

namespace mixstock {

double log_sum_exp(std::span<const double> x) {
  if (x.empty()) return kNegInf;
  const double hi = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double v : x) s += std::exp(v - hi);
  return hi + std::log(s);
}

double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (a == kNegInf) return a;
  return a + std::log1p(std::exp(b - a));
}

double log_dirichlet_density(std::span<const double> x, std::span<const double> alpha) {
  double total_alpha = 0.0;
  double value = 0.0;
  double total_x = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(x[i] < 1.0 || x.size() == 1)) return kNegInf;
    total_alpha += alpha[i];
    total_x += x[i];
    value += (alpha[i] - 1.0) * std::log(x[i]) - std::lgamma(alpha[i]);
  }
  if (std::abs(total_x - 1.0) > 1e-9) return kNegInf;
  return value + std::lgamma(total_alpha);
}

double log_normal_density(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * variance) + d * d / variance);
}

double log_gamma_density(double x, double shape, double rate) {
  if (!(x > 0.0)) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

}  // namespace mixstock
