// Apache License, Version 2.0, refer to LICENSE.txt

#include "cli.hpp"

#include <CLI11.hpp>

#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mixstock/commands.hpp"

namespace mixstock {

namespace {

const std::vector<std::string> kSubcommands = {"simulate", "fit", "summarize", "compare"};

// Config files are flat `key = value` lines. CLI11 expects subcommand options
// under a [section], so un-sectioned keys are attributed to the subcommand
// being run; keys that match none of its options are rejected.
class FlatConfig : public CLI::ConfigINI {
 public:
  explicit FlatConfig(std::string subcommand) : subcommand_(std::move(subcommand)) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    auto items = CLI::ConfigINI::from_config(input);
    for (auto& item : items)
      if (item.parents.empty() && !subcommand_.empty()) item.parents.push_back(subcommand_);
    return items;
  }

 private:
  std::string subcommand_;
};

std::string find_subcommand(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i)
    for (const auto& name : kSubcommands)
      if (name == argv[i]) return name;
  return {};
}

void add_data_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--data", c.data_dir, "Directory holding sources.tsv, colony.tsv and optional covariates.tsv");
  sub->add_option("--sources", c.sources, "Source allele-count table (source, locus, allele, count)");
  sub->add_option("--colony", c.colony, "Colony genotype table (individual, locus, allele1, allele2)");
  sub->add_option("--covariates", c.covariates, "Source covariate table (source, covariate, value)");
}

void add_chain_options(CLI::App* sub, RunConfig& c) {
  sub->add_option("--prior", c.prior, "dirichlet-dirichlet | dirichlet-lognormal | uniform")
      ->capture_default_str();
  sub->add_option("--iterations", c.iterations, "Total MCMC iterations")->capture_default_str();
  sub->add_option("--burnin", c.burnin, "Burn-in iterations")->capture_default_str();
  sub->add_option("--thin", c.thin, "Keep every thin-th post-burn-in draw")->capture_default_str();
  sub->add_option("--adapt-window", c.adapt_window, "Adaptation stops after this iteration (-1: burn-in)")
      ->capture_default_str();
  sub->add_option("--proposal", c.proposal, "Simplex proposal: random-walk | independence")->capture_default_str();
  sub->add_option("--alpha-variance", c.alpha_variance, "Prior variance of regression coefficients")
      ->capture_default_str();
  sub->add_option("--tau-shape", c.tau_shape, "Gamma shape of the lognormal precision")->capture_default_str();
  sub->add_option("--tau-rate", c.tau_rate, "Gamma rate of the lognormal precision")->capture_default_str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Bayesian mixed stock analysis with covariate-informed priors", "mixstock"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_config("--config", "", "Read options from a key = value file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.config_formatter(std::make_shared<FlatConfig>(find_subcommand(argc, argv)));

  auto* simulate = app.add_subcommand("simulate", "Simulate source and colony datasets");
  simulate->add_option("--scenario", c.scenario, "paper-1 | paper-2 | paper-3")->capture_default_str();
  simulate->add_option("--replicates", c.replicates, "Number of datasets")->capture_default_str();
  simulate->add_option("--alleles", c.alleles, "Alleles per locus")->capture_default_str();
  simulate->add_option("--fst", c.fst, "Override the scenario's Fst");
  simulate->add_option("--loci", c.loci, "Override the scenario's number of loci");
  simulate->add_option("--colony-size", c.colony_size, "Override the number of colony individuals");
  simulate->add_option("--allele-total", c.allele_total, "Override the allele total sampled per source and locus");
  simulate->add_option("--omega", c.omega, "Override the assortative mating coefficient");
  simulate->add_flag("--study", c.study, "Also fit both covariate priors to every replicate and write study.tsv");
  add_chain_options(simulate, c);

  auto* fit = app.add_subcommand("fit", "Fit one prior model by MCMC");
  add_data_options(fit, c);
  add_chain_options(fit, c);

  auto* summarize = app.add_subcommand("summarize", "Posterior summary tables");
  summarize->add_option("chains", c.chains, "Chain directories written by fit")->required();
  summarize->add_option("--truth", c.truth, "truth.json (one shared, or one per chain)");
  summarize->add_option("--layout", c.layout, "models | replicates | long")->capture_default_str();

  auto* compare = app.add_subcommand("compare", "DIC and LPML for chains fitted to the same data");
  compare->add_option("chains", c.chains, "Chain directories written by fit")->required();
  add_data_options(compare, c);

  for (auto* sub : {simulate, fit, summarize, compare}) {
    sub->add_option("--seed", c.seed, "Master random seed")->capture_default_str();
    sub->add_option("--out", c.out, "Output directory (simulate, fit) or file (summarize, compare)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return run_command(app.get_subcommands().front()->get_name(), c, out, err);
}

}  // namespace mixstock
