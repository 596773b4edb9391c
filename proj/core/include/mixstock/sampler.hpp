// Apache License, Version 2.0, refer to LICENSE.txt

// Metropolis-within-Gibbs sampler for the joint posterior of allele
// frequencies, mixture proportions, the assortative-mating coefficient and
// the prior hierarchy. Simplex-valued blocks move in multidimensional-logit
// coordinates; the target there is f(theta) * |det J|.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mixstock/model.hpp"
#include "mixstock/random.hpp"

namespace mixstock {

enum class ProposalStyle {
  RandomWalk,    // Normal centred at the current point
  Independence,  // Normal centred at the block's conditional maximizer
};

std::string to_string(ProposalStyle style);
ProposalStyle parse_proposal_style(const std::string& name);

struct BlockTuning {
  double step = 0.3;
  ProposalStyle style = ProposalStyle::RandomWalk;
};

struct ChainConfig {
  long iterations = 30000;
  long burn_in = 5000;
  long thin = 5;
  std::uint64_t seed = 1;
  // Step sizes adapt during the first `adapt_window` burn-in iterations
  // (negative: the whole burn-in) and are frozen afterwards.
  long adapt_window = -1;

  BlockTuning freqs{0.3};
  BlockTuning proportions{0.3};
  BlockTuning omega{1.0};
  BlockTuning phi{0.3};
  BlockTuning rho{1.0};
  BlockTuning alpha{0.3};
  BlockTuning psi{0.3};
  BlockTuning tau{0.5};

  // Throws InputError for burn_in >= iterations, thin < 1 or a non-positive step.
  void validate() const;
  long retained_draws() const { return (iterations - burn_in) / thin; }
};

struct ChainOutput {
  PriorSpec prior;
  ChainConfig config;
  std::vector<long> iterations;
  std::vector<ModelState> draws;
  // colony_loglik + source_loglik at each retained draw.
  std::vector<double> loglik;
  // Post-burn-in acceptance rate per block kind ("P", "m", "omega", ...).
  std::map<std::string, double> acceptance;
};

using LogDensity = std::function<double(std::span<const double>)>;
using ScalarLogDensity = std::function<double(double)>;

struct BlockMove {
  std::vector<double> value;
  double log_target = 0.0;
  bool accepted = false;
};

struct ScalarMove {
  double value = 0.0;
  double log_target = 0.0;
  bool accepted = false;
};

// One MH move of a simplex block. `log_target` is the density in theta
// space; `current_log_target` its value at `current`. A non-finite proposal
// target is rejected. Independence proposals are centred at the maximizer of
// the transformed target found from xi = 0, with scale `proposal.step`.
BlockMove mh_update_simplex_block(std::span<const double> current, double current_log_target,
                                  const LogDensity& log_target, const BlockTuning& proposal, Rng& rng);

// Logit random walk on (0,1), Jacobian theta (1 - theta) included.
ScalarMove mh_update_unit_scalar(double current, double current_log_target, const ScalarLogDensity& log_target,
                                 double step, Rng& rng);

// Normal random walk on R^d. With `positive`, the walk is on the log scale
// and the target is the density of the positive values (log Jacobian added).
BlockMove mh_update_real_block(std::span<const double> current, double current_log_target,
                               const LogDensity& log_target, double step, bool positive, Rng& rng);

// Quasi-Newton (BFGS, central-difference gradients) maximizer of f from x0.
std::vector<double> maximize_bfgs(const LogDensity& f, std::vector<double> x0, int max_iterations = 100);

// One full chain. Each sweep updates every (locus, source) row of P, then m,
// omega, then (phi, rho, alpha) or (psi, tau, alpha). Throws RuntimeFailure
// when the starting posterior is not finite.
ChainOutput run_chain(const DataSet& data, const PriorSpec& prior, const ChainConfig& config);

}  // namespace mixstock
