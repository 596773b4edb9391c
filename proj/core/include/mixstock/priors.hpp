// Apache License, Version 2.0, refer to LICENSE.txt

// Priors on the mixture proportions and their covariate regression link.
//
// Dirichlet-Dirichlet:   m ~ D(((1 - rho) / rho) phi),  phi ~ D(eta),
//                        log eta_i = alpha_0 + sum_r alpha_r G_ri
// Dirichlet-lognormal:   m ~ D(psi),  log psi_i ~ N(mu_i, 1 / tau),
//                        mu_i = alpha_0 + sum_r alpha_r G_ri
// Uniform:               m ~ D(1, ..., 1)
//
// Scalars: omega ~ U(0,1), rho ~ U(0,1), alpha_r ~ N(0, 10), tau ~ Gamma(1, 1).
// Allele frequencies carry a symmetric Dirichlet(1) prior, which is constant
// on the simplex and therefore contributes nothing here.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixstock/random.hpp"

namespace mixstock {

// Per-source covariates. raw[r][i] is covariate r for source i; the
// standardized view is what the regression uses.
class CovariateMatrix {
 public:
  CovariateMatrix() = default;

  // Z-scores each covariate across sources with the sample SD, unless it
  // already looks standardized (|mean| < 0.01 and |sd - 1| < 0.01), in which
  // case the values are used as given. Throws InputError for a covariate with
  // zero spread or ragged rows.
  static CovariateMatrix from_raw(std::vector<std::string> names, std::vector<std::vector<double>> raw);

  // No covariates: the linear predictor is the intercept alone.
  static CovariateMatrix intercept_only(std::size_t sources);

  std::size_t num_covariates() const { return names_.size(); }
  std::size_t num_sources() const { return sources_; }
  bool empty() const { return names_.empty(); }

  const std::vector<std::string>& names() const { return names_; }
  const std::vector<std::vector<double>>& raw() const { return raw_; }
  const std::vector<std::vector<double>>& standardized() const { return standardized_; }

  // alpha_0 + sum_r alpha_r G_ri; alpha.size() must be num_covariates() + 1.
  std::vector<double> linear_predictor(std::span<const double> alpha) const;

  friend bool operator==(const CovariateMatrix&, const CovariateMatrix&) = default;

 private:
  std::size_t sources_ = 0;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> raw_;
  std::vector<std::vector<double>> standardized_;
};

enum class PriorKind { DirichletDirichlet, DirichletLognormal, Uniform };

std::string to_string(PriorKind kind);
// Accepts "dirichlet-dirichlet", "dirichlet-lognormal", "uniform".
PriorKind parse_prior_kind(const std::string& name);

struct PriorSpec {
  PriorKind kind = PriorKind::DirichletDirichlet;
  double alpha_variance = 10.0;
  double tau_shape = 1.0;
  double tau_rate = 1.0;
};

struct DirichletDirichletHyper {
  double rho = 0.5;
  std::vector<double> phi;
  std::vector<double> alpha;
  friend bool operator==(const DirichletDirichletHyper&, const DirichletDirichletHyper&) = default;
};

struct DirichletLognormalHyper {
  std::vector<double> psi;
  double tau = 1.0;
  std::vector<double> alpha;
  friend bool operator==(const DirichletLognormalHyper&, const DirichletLognormalHyper&) = default;
};

inline constexpr double kMaxLinearPredictor = 700.0;

// Dirichlet(((1 - rho) / rho) phi) log-density of m, normalizing constant included.
double log_prior_m_dirdir(std::span<const double> m, double rho, std::span<const double> phi);

// eta_i = exp(alpha_0 + sum_r alpha_r G_ri). Throws std::overflow_error when
// any |linear predictor| exceeds kMaxLinearPredictor.
std::vector<double> eta_from_covariates(std::span<const double> alpha, const CovariateMatrix& covariates);

// Dirichlet(eta) log-density of phi; -inf on the simplex boundary.
double log_prior_phi(std::span<const double> phi, std::span<const double> eta);

// Dirichlet(psi) log-density of m.
double log_prior_m_dirlognormal(std::span<const double> m, std::span<const double> psi);

// Lognormal log-density of psi: sum_i [N(log psi_i; mu_i, 1/tau) - log psi_i].
double log_prior_psi(std::span<const double> psi, std::span<const double> alpha, double tau,
                     const CovariateMatrix& covariates);

// Softmax of the covariate linear predictor; independent of alpha_0.
std::vector<double> expected_m_given_alpha(std::span<const double> alpha, const CovariateMatrix& covariates);

struct ScalarParameters {
  double omega = 0.5;
  std::optional<double> rho;
  std::optional<double> tau;
  std::span<const double> alpha;
};

// Sum of the scalar priors present in `params`. Uniform components add 0;
// out-of-support values give -inf.
double log_prior_scalars(const ScalarParameters& params, const PriorSpec& spec);

// One draw of m from the Dirichlet-Dirichlet first stage.
std::vector<double> sample_m_dirdir(Rng& rng, double rho, std::span<const double> phi);

}  // namespace mixstock
