// Apache License, Version 2.0, refer to LICENSE.txt

#include "mixstock/model.hpp"

#include <cmath>
#include <stdexcept>

#include "mixstock/error.hpp"
#include "mixstock/numeric.hpp"

namespace mixstock {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::string idx(std::size_t a) { return std::to_string(a + 1); }

}  // namespace

void validate_dataset(const DataSet& data, const PriorSpec& prior) {
  validate(data.sources);
  validate(data.colony);
  if (data.num_sources() == 0) throw InputError("no source populations");
  const auto& src = data.sources.layout();
  const auto& col = data.colony.layout;
  if (src.num_loci() != col.num_loci())
    throw InputError("colony has " + std::to_string(col.num_loci()) + " loci, sources have " +
                     std::to_string(src.num_loci()));
  for (std::size_t l = 0; l < src.num_loci(); ++l)
    if (src.alleles[l] != col.alleles[l])
      throw InputError("locus " + idx(l) + " has " + std::to_string(col.alleles[l]) + " alleles in the colony, " +
                       std::to_string(src.alleles[l]) + " in the sources");
  if (prior.kind != PriorKind::Uniform && data.covariates.num_sources() != data.num_sources())
    throw InputError("covariates cover " + std::to_string(data.covariates.num_sources()) + " sources, data have " +
                     std::to_string(data.num_sources()));
}

ModelState initial_state(const DataSet& data, const PriorSpec& prior) {
  const std::size_t sources = data.num_sources();
  ModelState s;
  s.freqs = AlleleFrequencies(sources, data.sources.layout(), 0.0);
  for (std::size_t l = 0; l < s.freqs.num_loci(); ++l) {
    for (std::size_t i = 0; i < sources; ++i) {
      const auto n = data.sources.row(l, i);
      auto p = s.freqs.row(l, i);
      double total = 0.0;
      for (long c : n) total += static_cast<double>(c) + 1.0;
      for (std::size_t j = 0; j < p.size(); ++j) p[j] = (static_cast<double>(n[j]) + 1.0) / total;
    }
  }
  s.m.assign(sources, 1.0 / static_cast<double>(sources));
  s.omega = 0.5;
  const std::vector<double> alpha(data.covariates.num_covariates() + 1, 0.0);
  switch (prior.kind) {
    case PriorKind::DirichletDirichlet:
      s.hyper = DirichletDirichletHyper{0.5, s.m, alpha};
      break;
    case PriorKind::DirichletLognormal:
      s.hyper = DirichletLognormalHyper{std::vector<double>(sources, 1.0), 1.0, alpha};
      break;
    case PriorKind::Uniform:
      s.hyper = std::monostate{};
      break;
  }
  return s;
}

double log_prior_density(const ModelState& state, const CovariateMatrix& covariates, const PriorSpec& prior) {
  return std::visit(
      overloaded{
          [&](const std::monostate&) {
            if (prior.kind != PriorKind::Uniform) throw ContractError("state lacks the prior's hyperparameters");
            const std::vector<double> ones(state.m.size(), 1.0);
            return log_dirichlet_density(state.m, ones) + log_prior_scalars({state.omega, {}, {}, {}}, prior);
          },
          [&](const DirichletDirichletHyper& h) {
            if (prior.kind != PriorKind::DirichletDirichlet)
              throw ContractError("state carries Dirichlet-Dirichlet hyperparameters");
            const double scalars = log_prior_scalars({state.omega, h.rho, {}, h.alpha}, prior);
            if (scalars == kNegInf) return kNegInf;
            std::vector<double> eta;
            try {
              eta = eta_from_covariates(h.alpha, covariates);
            } catch (const std::overflow_error&) {
              return kNegInf;
            }
            return log_prior_m_dirdir(state.m, h.rho, h.phi) + log_prior_phi(h.phi, eta) + scalars;
          },
          [&](const DirichletLognormalHyper& h) {
            if (prior.kind != PriorKind::DirichletLognormal)
              throw ContractError("state carries Dirichlet-lognormal hyperparameters");
            const double scalars = log_prior_scalars({state.omega, {}, h.tau, h.alpha}, prior);
            if (scalars == kNegInf) return kNegInf;
            return log_prior_m_dirlognormal(state.m, h.psi) + log_prior_psi(h.psi, h.alpha, h.tau, covariates) +
                   scalars;
          },
      },
      state.hyper);
}

double joint_log_posterior(const ModelState& state, const DataSet& data, const PriorSpec& prior) {
  const double prior_part = log_prior_density(state, data.covariates, prior);
  if (prior_part == kNegInf) return kNegInf;
  const double source = source_loglik(data.sources, state.freqs);
  if (source == kNegInf) return kNegInf;
  double colony = 0.0;
  for (const auto& y : data.colony.individuals) colony += colony_individual_loglik(y, state.omega, state.freqs, state.m);
  return colony + source + prior_part;
}

std::vector<std::string> parameter_names(const ModelState& state) {
  std::vector<std::string> names;
  const auto& p = state.freqs;
  for (std::size_t l = 0; l < p.num_loci(); ++l)
    for (std::size_t i = 0; i < p.num_sources(); ++i)
      for (int j = 0; j < p.num_alleles(l); ++j)
        names.push_back("P[" + idx(l) + "," + idx(i) + "," + idx(static_cast<std::size_t>(j)) + "]");
  for (std::size_t i = 0; i < state.m.size(); ++i) names.push_back("m[" + idx(i) + "]");
  names.emplace_back("omega");
  std::visit(overloaded{
                 [](const std::monostate&) {},
                 [&](const DirichletDirichletHyper& h) {
                   names.emplace_back("rho");
                   for (std::size_t i = 0; i < h.phi.size(); ++i) names.push_back("phi[" + idx(i) + "]");
                   for (std::size_t r = 0; r < h.alpha.size(); ++r) names.push_back("alpha[" + std::to_string(r) + "]");
                 },
                 [&](const DirichletLognormalHyper& h) {
                   names.emplace_back("tau");
                   for (std::size_t i = 0; i < h.psi.size(); ++i) names.push_back("psi[" + idx(i) + "]");
                   for (std::size_t r = 0; r < h.alpha.size(); ++r) names.push_back("alpha[" + std::to_string(r) + "]");
                 },
             },
             state.hyper);
  return names;
}

std::vector<double> flatten(const ModelState& state) {
  std::vector<double> out(state.freqs.flat().begin(), state.freqs.flat().end());
  out.insert(out.end(), state.m.begin(), state.m.end());
  out.push_back(state.omega);
  std::visit(overloaded{
                 [](const std::monostate&) {},
                 [&](const DirichletDirichletHyper& h) {
                   out.push_back(h.rho);
                   out.insert(out.end(), h.phi.begin(), h.phi.end());
                   out.insert(out.end(), h.alpha.begin(), h.alpha.end());
                 },
                 [&](const DirichletLognormalHyper& h) {
                   out.push_back(h.tau);
                   out.insert(out.end(), h.psi.begin(), h.psi.end());
                   out.insert(out.end(), h.alpha.begin(), h.alpha.end());
                 },
             },
             state.hyper);
  return out;
}

ModelState unflatten(std::span<const double> values, const ModelState& shape) {
  if (values.size() != flatten(shape).size()) throw InputError("parameter vector has the wrong length");
  ModelState s = shape;
  std::size_t pos = 0;
  auto take = [&](std::span<double> dst) {
    for (double& v : dst) v = values[pos++];
  };
  for (std::size_t l = 0; l < s.freqs.num_loci(); ++l)
    for (std::size_t i = 0; i < s.freqs.num_sources(); ++i) take(s.freqs.row(l, i));
  take(s.m);
  s.omega = values[pos++];
  std::visit(overloaded{
                 [](std::monostate&) {},
                 [&](DirichletDirichletHyper& h) {
                   h.rho = values[pos++];
                   take(h.phi);
                   take(h.alpha);
                 },
                 [&](DirichletLognormalHyper& h) {
                   h.tau = values[pos++];
                   take(h.psi);
                   take(h.alpha);
                 },
             },
             s.hyper);
  return s;
}

}  // namespace mixstock
