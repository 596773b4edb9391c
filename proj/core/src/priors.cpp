// Apache License, Version 2.0, refer to LICENSE.txt

#include "mixstock/priors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mixstock/error.hpp"
#include "mixstock/numeric.hpp"

namespace mixstock {

CovariateMatrix CovariateMatrix::from_raw(std::vector<std::string> names, std::vector<std::vector<double>> raw) {
  if (names.size() != raw.size()) throw InputError("covariate names and rows differ in number");
  CovariateMatrix out;
  out.names_ = std::move(names);
  out.raw_ = std::move(raw);
  out.standardized_ = out.raw_;
  const std::size_t sources = out.raw_.empty() ? 0 : out.raw_.front().size();
  out.sources_ = sources;
  for (std::size_t r = 0; r < out.raw_.size(); ++r) {
    const auto& row = out.raw_[r];
    if (row.size() != sources) throw InputError("covariate '" + out.names_[r] + "' does not cover every source");
    if (sources < 2) throw InputError("covariates need at least two sources");
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(sources);
    double ss = 0.0;
    for (double v : row) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(sources - 1));
    if (!(sd > 0.0)) throw InputError("covariate '" + out.names_[r] + "' is constant across sources");
    if (std::abs(mean) < 0.01 && std::abs(sd - 1.0) < 0.01) continue;
    for (std::size_t i = 0; i < sources; ++i) out.standardized_[r][i] = (row[i] - mean) / sd;
  }
  return out;
}

CovariateMatrix CovariateMatrix::intercept_only(std::size_t sources) {
  CovariateMatrix out;
  out.sources_ = sources;
  return out;
}

std::vector<double> CovariateMatrix::linear_predictor(std::span<const double> alpha) const {
  if (alpha.size() != num_covariates() + 1)
    throw ContractError("regression coefficients must have one entry per covariate plus an intercept");
  const std::size_t sources = num_sources();
  std::vector<double> mu(sources, alpha[0]);
  for (std::size_t r = 0; r < num_covariates(); ++r)
    for (std::size_t i = 0; i < sources; ++i) mu[i] += alpha[r + 1] * standardized_[r][i];
  return mu;
}

std::string to_string(PriorKind kind) {
  switch (kind) {
    case PriorKind::DirichletDirichlet: return "dirichlet-dirichlet";
    case PriorKind::DirichletLognormal: return "dirichlet-lognormal";
    case PriorKind::Uniform: return "uniform";
  }
  return "unknown";
}

PriorKind parse_prior_kind(const std::string& name) {
  if (name == "dirichlet-dirichlet") return PriorKind::DirichletDirichlet;
  if (name == "dirichlet-lognormal") return PriorKind::DirichletLognormal;
  if (name == "uniform") return PriorKind::Uniform;
  throw InputError("unknown prior '" + name + "'");
}

double log_prior_m_dirdir(std::span<const double> m, double rho, std::span<const double> phi) {
  const double scale = (1.0 - rho) / rho;
  std::vector<double> a(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    a[i] = scale * phi[i];
    if (!(a[i] > 0.0) || !std::isfinite(a[i]))
      throw ContractError("Dirichlet-Dirichlet parameter must be positive");
  }
  return log_dirichlet_density(m, a);
}

std::vector<double> eta_from_covariates(std::span<const double> alpha, const CovariateMatrix& covariates) {
  auto eta = covariates.linear_predictor(alpha);
  for (double& v : eta) {
    if (!(std::abs(v) <= kMaxLinearPredictor)) throw std::overflow_error("covariate linear predictor out of range");
    v = std::exp(v);
  }
  return eta;
}

double log_prior_phi(std::span<const double> phi, std::span<const double> eta) {
  for (double e : eta)
    if (!(e > 0.0)) throw ContractError("Dirichlet parameter eta must be positive");
  return log_dirichlet_density(phi, eta);
}

double log_prior_m_dirlognormal(std::span<const double> m, std::span<const double> psi) {
  for (double v : psi)
    if (!(v > 0.0)) throw ContractError("Dirichlet parameter psi must be positive");
  return log_dirichlet_density(m, psi);
}

double log_prior_psi(std::span<const double> psi, std::span<const double> alpha, double tau,
                     const CovariateMatrix& covariates) {
  if (!(tau > 0.0)) throw ContractError("lognormal precision must be positive");
  const auto mu = covariates.linear_predictor(alpha);
  if (mu.size() != psi.size()) throw ContractError("psi and covariates differ in number of sources");
  double total = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    if (!(psi[i] > 0.0)) return kNegInf;
    const double log_psi = std::log(psi[i]);
    total += log_normal_density(log_psi, mu[i], 1.0 / tau) - log_psi;
  }
  return total;
}

std::vector<double> expected_m_given_alpha(std::span<const double> alpha, const CovariateMatrix& covariates) {
  auto mu = covariates.linear_predictor(alpha);
  const double norm = log_sum_exp(mu);
  for (double& v : mu) v = std::exp(v - norm);
  return mu;
}

double log_prior_scalars(const ScalarParameters& params, const PriorSpec& spec) {
  if (!(params.omega > 0.0 && params.omega < 1.0)) return kNegInf;
  double total = 0.0;
  if (params.rho && !(*params.rho > 0.0 && *params.rho < 1.0)) return kNegInf;
  if (params.tau) {
    if (!(*params.tau > 0.0)) return kNegInf;
    total += log_gamma_density(*params.tau, spec.tau_shape, spec.tau_rate);
  }
  for (double a : params.alpha) total += log_normal_density(a, 0.0, spec.alpha_variance);
  return total;
}

std::vector<double> sample_m_dirdir(Rng& rng, double rho, std::span<const double> phi) {
  std::vector<double> a(phi.begin(), phi.end());
  for (double& v : a) v *= (1.0 - rho) / rho;
  return sample_dirichlet(rng, a);
}

}  // namespace mixstock
