// Apache License, Version 2.0, refer to LICENSE.txt

#include "mixstock/simplex.hpp"

#include <cmath>

#include "mixstock/error.hpp"
#include "mixstock/numeric.hpp"

namespace mixstock {

std::vector<double> simplex_to_logit(std::span<const double> theta) {
  if (theta.empty()) throw ContractError("simplex point must have at least one component");
  for (double t : theta)
    if (!(t > 0.0) || !std::isfinite(t)) throw ContractError("simplex point is not strictly interior");
  const double log_base = std::log(theta.back());
  std::vector<double> xi(theta.size() - 1);
  for (std::size_t i = 0; i < xi.size(); ++i) xi[i] = std::log(theta[i]) - log_base;
  return xi;
}

std::vector<double> logit_to_simplex(std::span<const double> xi) {
  std::vector<double> theta(xi.begin(), xi.end());
  theta.push_back(0.0);
  const double norm = log_sum_exp(theta);
  for (double& t : theta) t = std::exp(t - norm);
  return theta;
}

double log_jacobian_det(std::span<const double> xi) {
  std::vector<double> terms(xi.begin(), xi.end());
  terms.push_back(0.0);
  double sum_xi = 0.0;
  for (double v : xi) sum_xi += v;
  return sum_xi - static_cast<double>(xi.size() + 1) * log_sum_exp(terms);
}

}  // namespace mixstock
