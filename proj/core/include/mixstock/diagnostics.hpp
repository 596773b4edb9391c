// Apache License, Version 2.0, refer to LICENSE.txt

// Posterior summaries and model comparison for sampler output.
//
// Deviance is -2 (colony + source log-likelihood) with the multinomial
// coefficient dropped, so Dbar and DIC are only comparable between chains
// fitted to the same data.

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mixstock/model.hpp"
#include "mixstock/sampler.hpp"

namespace mixstock {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  double width() const { return upper - lower; }
};

// Shortest window over the sorted draws containing ceil(level * n) of them.
// Ties go to the lowest window. Throws ContractError for n < 2 or level
// outside (0,1).
Interval hpd_interval(std::span<const double> samples, double level = 0.95);

// Split-R-hat of a single chain (first half vs second half).
double split_rhat(std::span<const double> samples);

// Monte Carlo standard error of the sample mean by non-overlapping batch
// means with floor(sqrt(n)) batches.
double mcse_batch_means(std::span<const double> samples);

// Known parameter values keyed by flattened parameter name (see parameter_names).
using Truth = std::map<std::string, double>;

struct ParameterSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;  // divisor n, so rmse^2 = sd^2 + (mean - truth)^2 exactly
  Interval hpd;
  double rhat = 1.0;
  std::optional<double> truth;
  std::optional<double> rmse;
};

struct PosteriorSummary {
  std::vector<ParameterSummary> parameters;
  const ParameterSummary* find(const std::string& name) const;
};

// Per-parameter statistics of a chain. Allele frequencies are left out
// unless `include_freqs`. Throws ContractError for an empty chain.
PosteriorSummary summarize(const ChainOutput& chain, const Truth* truth = nullptr, bool include_freqs = false);

// -2 (colony_loglik + source_loglik)
double deviance(const ModelState& state, const DataSet& data);

// Mean of every parameter across draws, with simplex blocks renormalized.
// `renormalized` reports whether any block needed it beyond 1e-12.
ModelState posterior_mean_state(const ChainOutput& chain, bool* renormalized = nullptr);

struct DicResult {
  double dbar = 0.0;
  double pd = 0.0;
  double dic = 0.0;
  bool renormalized = false;
};

DicResult dic(const ChainOutput& chain, const DataSet& data);

struct LpmlResult {
  double lpml = 0.0;
  // Individuals whose likelihood underflowed in linear space for every draw;
  // their CPO is still computed in log space.
  std::vector<std::size_t> underflow;
};

// sum_k log CPO_k, CPO_k = [mean_s 1 / P(y_k | draw s)]^-1, in log space.
LpmlResult lpml(const ChainOutput& chain, const DataSet& data);

struct ModelScore {
  std::string model;
  double dbar = 0.0;
  double pd = 0.0;
  double dic = 0.0;
  double lpml = 0.0;
};

ModelScore score_model(const ChainOutput& chain, const DataSet& data);

}  // namespace mixstock
