// Apache License, Version 2.0, refer to LICENSE.txt

// Multidimensional logit transform between the open (p+1)-simplex and R^p,
// with the last component as the implicit baseline:
//   theta_i = exp(xi_i) / (1 + sum_j exp(xi_j)),  i = 1..p
//   |det d theta / d xi| = exp(sum_j xi_j) / (1 + sum_j exp(xi_j))^(p+1)

#pragma once

#include <span>
#include <vector>

namespace mixstock {

// xi_i = log(theta_i / theta_{p+1}). Throws ContractError for a point on the
// boundary or an empty input.
std::vector<double> simplex_to_logit(std::span<const double> theta);

// Inverse of simplex_to_logit; overflow-safe for large |xi|.
std::vector<double> logit_to_simplex(std::span<const double> xi);

// log |det J| of logit_to_simplex restricted to its first p outputs.
double log_jacobian_det(std::span<const double> xi);

}  // namespace mixstock
