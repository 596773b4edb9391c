// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cmath>
#include <limits>
#include <span>

namespace mixstock {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log(sum_i exp(x_i)); -inf for an empty span or all -inf entries.
double log_sum_exp(std::span<const double> x);

// log(exp(a) + exp(b))
double log_add_exp(double a, double b);

// Dirichlet(alpha) log-density at x, with normalizing constant. Returns -inf
// when x is off the open simplex.
double log_dirichlet_density(std::span<const double> x, std::span<const double> alpha);

double log_normal_density(double x, double mean, double variance);

// Gamma(shape, rate) log-density; -inf for x <= 0.
double log_gamma_density(double x, double shape, double rate);

inline double logit(double u) { return std::log(u) - std::log1p(-u); }

// Overflow-safe inverse logit.
inline double inv_logit(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow.
inline double log1p_exp(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace mixstock
