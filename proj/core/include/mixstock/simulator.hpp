// Apache License, Version 2.0, refer to LICENSE.txt

// Synthetic mixed-colony datasets:
//  1. hyper-population frequencies psi_l ~ D(1, ..., 1) per locus
//  2. source frequencies p_li ~ D(((1 - fst) / fst) psi_l)
//  3. source allele counts ~ Multinomial(total, p_li)
//  4. colony genotypes: with probability omega both parents share one source
//     drawn from m, otherwise the two parent sources are drawn independently
//     from m; each locus is then drawn from the exact pair-probability table.
// True m is the softmax of the covariate linear predictor.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mixstock/diagnostics.hpp"
#include "mixstock/model.hpp"
#include "mixstock/random.hpp"
#include "mixstock/sampler.hpp"

namespace mixstock {

// The two normalized covariates (distance, productivity) of the seven
// grey-seal source colonies.
CovariateMatrix grey_seal_covariates();

struct SimulationConfig {
  std::size_t sources = 7;
  std::size_t loci = 8;
  int alleles = 10;
  double fst = 0.05;
  long allele_total = 400;
  std::size_t colony_size = 160;
  double omega = 0.05;
  // Slopes only; the intercept is 0 (m is invariant to it).
  std::vector<double> alpha = {-0.5, 0.5};
  CovariateMatrix covariates = grey_seal_covariates();
  std::uint64_t seed = 1;
  std::size_t replicates = 1;

  // Throws InputError for out-of-range values or covariates that do not
  // match `sources` and `alpha`.
  void validate() const;
};

// "paper-1": fst 0.05, 8 loci; "paper-2": fst 0.2, 8 loci;
// "paper-3": fst 0.05, 16 loci. All share the remaining defaults.
SimulationConfig scenario_config(const std::string& name);

struct SimulatedDataset {
  DataSet data;
  std::vector<std::vector<double>> hyper_freqs;  // [locus][allele]
  AlleleFrequencies freqs;
  MixtureProportions m;
  double omega = 0.0;
  std::vector<double> alpha;  // intercept first

  // m[i], omega, alpha[r] for r >= 1, and every P[l,i,j].
  Truth truth() const;
  friend bool operator==(const SimulatedDataset&, const SimulatedDataset&);
};

std::vector<std::vector<double>> gen_hyper_frequencies(std::size_t loci, int alleles, Rng& rng);
AlleleFrequencies gen_source_frequencies(const std::vector<std::vector<double>>& hyper, double fst,
                                         std::size_t sources, Rng& rng);
AlleleCountTable gen_allele_counts(const AlleleFrequencies& freqs, long total, Rng& rng);
GenotypeTable gen_colony(std::span<const double> m, const AlleleFrequencies& freqs, double omega,
                         std::size_t individuals, Rng& rng);

// Replicate r of a configuration; deterministic in (config, r).
SimulatedDataset simulate_dataset(const SimulationConfig& config, std::size_t replicate = 0);

// Across-replicate averages of the per-replicate summaries, one row per
// parameter: mean of posterior means, mean posterior SD, mean RMSE, mean
// 95% HPD length.
struct AggregateRow {
  std::string parameter;
  std::optional<double> truth;
  double mean = 0.0;
  double sd = 0.0;
  std::optional<double> rmse;
  double hpd_length = 0.0;
  std::size_t replicates = 0;
};

std::vector<AggregateRow> aggregate_replicates(const std::vector<PosteriorSummary>& summaries);

struct StudyOptions {
  std::vector<PriorKind> priors = {PriorKind::DirichletDirichlet, PriorKind::DirichletLognormal};
  ChainConfig chain;
  PriorSpec constants;
  // Worker threads for independent replicates; 0 picks hardware concurrency.
  unsigned workers = 0;
};

struct StudyResult {
  std::vector<SimulatedDataset> datasets;
  // prior -> per-replicate summaries (successful fits only)
  std::map<PriorKind, std::vector<PosteriorSummary>> summaries;
  std::map<PriorKind, std::vector<AggregateRow>> aggregate;
  // "replicate r, prior: message" for fits that threw
  std::vector<std::string> failures;
};

// Generates config.replicates datasets and fits every requested prior to
// each. Chain seeds derive from config.seed; options.chain.seed is ignored.
StudyResult run_study(const SimulationConfig& config, const StudyOptions& options);

}  // namespace mixstock
