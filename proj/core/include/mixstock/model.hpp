// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <string>
#include <variant>
#include <vector>

#include "mixstock/genetics.hpp"
#include "mixstock/priors.hpp"

namespace mixstock {

// Colony genotypes, source allele counts and per-source covariates.
struct DataSet {
  GenotypeTable colony;
  AlleleCountTable sources;
  CovariateMatrix covariates;

  std::size_t num_sources() const { return sources.num_sources(); }
};

using HyperBlock = std::variant<std::monostate, DirichletDirichletHyper, DirichletLognormalHyper>;

// Full parameter vector. The hyper block must match the prior kind:
// monostate for Uniform.
struct ModelState {
  AlleleFrequencies freqs;
  MixtureProportions m;
  double omega = 0.5;
  HyperBlock hyper;

  friend bool operator==(const ModelState&, const ModelState&) = default;
};

// Throws InputError when colony, source and (if the prior uses them)
// covariate dimensions disagree.
void validate_dataset(const DataSet& data, const PriorSpec& prior);

// Starting point: P at add-one smoothed empirical source frequencies, m and
// phi uniform, omega and rho 0.5, alpha 0, tau 1, psi 1.
ModelState initial_state(const DataSet& data, const PriorSpec& prior);

// Sum of every prior log-density in the hierarchy. The Dirichlet(1) prior on
// allele frequencies is constant and omitted.
double log_prior_density(const ModelState& state, const CovariateMatrix& covariates, const PriorSpec& prior);

// colony log-likelihood + source_loglik + log_prior_density, up to an additive
// constant. An empty colony contributes 0.
double joint_log_posterior(const ModelState& state, const DataSet& data, const PriorSpec& prior);

// Column names for a flattened state, 1-based: P[l,i,j], m[i], omega, then
// rho, phi[i], alpha[r] or tau, psi[i], alpha[r]. alpha[0] is the intercept.
std::vector<std::string> parameter_names(const ModelState& state);
std::vector<double> flatten(const ModelState& state);
// Inverse of flatten given a state with the right shape.
ModelState unflatten(std::span<const double> values, const ModelState& shape);

}  // namespace mixstock
