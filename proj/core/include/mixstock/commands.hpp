// Apache License, Version 2.0, refer to LICENSE.txt

// Subcommands behind the `mixstock` tool. Each validates its whole
// configuration before doing any work.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mixstock/io.hpp"
#include "mixstock/sampler.hpp"
#include "mixstock/simulator.hpp"

namespace mixstock {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitRuntime = 2 };

struct RunConfig {
  // data inputs (fit, compare)
  std::string data_dir;
  std::string sources;
  std::string colony;
  std::string covariates;

  std::string out;
  std::uint64_t seed = 1;

  // fit
  std::string prior = "dirichlet-dirichlet";
  long iterations = 30000;
  long burnin = 5000;
  long thin = 5;
  long adapt_window = -1;
  std::string proposal = "random-walk";
  double alpha_variance = 10.0;
  double tau_shape = 1.0;
  double tau_rate = 1.0;

  // simulate
  std::string scenario = "paper-1";
  std::size_t replicates = 1;
  int alleles = 10;
  std::optional<double> fst;
  std::optional<std::size_t> loci;
  std::optional<std::size_t> colony_size;
  std::optional<long> allele_total;
  std::optional<double> omega;
  bool study = false;

  // summarize, compare
  std::vector<std::string> chains;
  std::vector<std::string> truth;
  std::string layout = "models";  // models | replicates | long
};

ChainConfig chain_config(const RunConfig& config);
PriorSpec prior_spec(const RunConfig& config);
SimulationConfig simulation_config(const RunConfig& config);
BundlePaths bundle_paths(const RunConfig& config);

// Writes the dataset files and truth.json into `out` (one rep-NNN
// subdirectory per replicate when replicates > 1). With `study`, also fits
// both covariate priors to every replicate and writes study.tsv.
void cmd_simulate(const RunConfig& config, std::ostream& log);

// Fits one prior and writes draws.tsv and run.json into `out`.
void cmd_fit(const RunConfig& config, std::ostream& log);

// Posterior summaries of one or more chains. Layouts: "models" (mean and 95%
// HPD per chain, side by side), "replicates" (per model: average posterior
// mean, SD, RMSE and HPD length across chains), "long" (one row per chain
// and parameter).
void cmd_summarize(const RunConfig& config, std::ostream& out);

// Dbar, pD, DIC and LPML per chain. All chains must have been fitted to the
// given data.
void cmd_compare(const RunConfig& config, std::ostream& out);

// Runs a subcommand by name, mapping exceptions to exit codes: InputError
// and ContractError -> 1, anything else -> 2.
int run_command(const std::string& name, const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace mixstock
