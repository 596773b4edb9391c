// Apache License, Version 2.0, refer to LICENSE.txt

#include "mixstock/commands.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "mixstock/error.hpp"

namespace mixstock {

namespace fs = std::filesystem;

namespace {

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string replicate_dir(std::size_t r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "rep-%03zu", r + 1);
  return buf;
}

void emit(const RunConfig& config, const std::string& text, std::ostream& out) {
  if (config.out.empty()) {
    out << text;
    return;
  }
  const fs::path path(config.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw RuntimeFailure("cannot write " + config.out);
  f << text;
}

// One column group per model: average posterior mean, SD, RMSE and HPD length.
std::string replicate_table(const std::vector<std::pair<std::string, std::vector<AggregateRow>>>& groups) {
  std::string text = "parameter\ttruth";
  for (const auto& [model, rows] : groups)
    text += '\t' + model + " mean\t" + model + " sd\t" + model + " rmse\t" + model + " hpd_length";
  text += '\n';
  std::vector<std::string> order;
  std::set<std::string> seen;
  for (const auto& g : groups)
    for (const auto& row : g.second)
      if (seen.insert(row.parameter).second) order.push_back(row.parameter);
  for (const auto& name : order) {
    std::optional<double> truth;
    for (const auto& g : groups)
      for (const auto& row : g.second)
        if (row.parameter == name && row.truth) truth = row.truth;
    text += name + '\t' + (truth ? fixed(*truth) : "NA");
    for (const auto& g : groups) {
      const AggregateRow* found = nullptr;
      for (const auto& row : g.second)
        if (row.parameter == name) found = &row;
      if (!found) {
        text += "\t-\t-\t-\t-";
        continue;
      }
      text += '\t' + fixed(found->mean) + '\t' + fixed(found->sd) + '\t' + (found->rmse ? fixed(*found->rmse) : "NA") +
              '\t' + fixed(found->hpd_length);
    }
    text += '\n';
  }
  return text;
}

std::vector<std::string> model_labels(const std::vector<ChainFile>& chains, const std::vector<std::string>& dirs) {
  std::map<std::string, int> uses;
  for (const auto& c : chains) ++uses[to_string(c.chain.prior.kind)];
  std::vector<std::string> labels;
  for (std::size_t n = 0; n < chains.size(); ++n) {
    const std::string prior = to_string(chains[n].chain.prior.kind);
    labels.push_back(uses[prior] > 1 ? prior + " (" + fs::path(dirs[n]).filename().string() + ")" : prior);
  }
  return labels;
}

}  // namespace

ChainConfig chain_config(const RunConfig& config) {
  ChainConfig c;
  c.iterations = config.iterations;
  c.burn_in = config.burnin;
  c.thin = config.thin;
  c.seed = config.seed;
  c.adapt_window = config.adapt_window;
  const ProposalStyle style = parse_proposal_style(config.proposal);
  c.freqs.style = style;
  c.proportions.style = style;
  c.phi.style = style;
  c.validate();
  return c;
}

PriorSpec prior_spec(const RunConfig& config) {
  PriorSpec p;
  p.kind = parse_prior_kind(config.prior);
  p.alpha_variance = config.alpha_variance;
  p.tau_shape = config.tau_shape;
  p.tau_rate = config.tau_rate;
  if (!(p.alpha_variance > 0.0) || !(p.tau_shape > 0.0) || !(p.tau_rate > 0.0))
    throw InputError("prior constants must be positive");
  return p;
}

SimulationConfig simulation_config(const RunConfig& config) {
  SimulationConfig s = scenario_config(config.scenario);
  s.seed = config.seed;
  s.replicates = config.replicates;
  s.alleles = config.alleles;
  if (config.fst) s.fst = *config.fst;
  if (config.loci) s.loci = *config.loci;
  if (config.colony_size) s.colony_size = *config.colony_size;
  if (config.allele_total) s.allele_total = *config.allele_total;
  if (config.omega) s.omega = *config.omega;
  s.validate();
  return s;
}

BundlePaths bundle_paths(const RunConfig& config) {
  BundlePaths p;
  if (!config.data_dir.empty()) p = BundlePaths::in_directory(config.data_dir);
  if (!config.sources.empty()) p.sources = config.sources;
  if (!config.colony.empty()) p.colony = config.colony;
  if (!config.covariates.empty()) p.covariates = config.covariates;
  if (p.sources.empty() || p.colony.empty())
    throw InputError("data required: pass --data DIR or both --sources and --colony");
  return p;
}

void cmd_simulate(const RunConfig& config, std::ostream& log) {
  const SimulationConfig sim = simulation_config(config);
  StudyOptions options;
  if (config.study) {
    options.chain = chain_config(config);
    options.constants = prior_spec(config);
  }
  if (config.out.empty()) throw InputError("simulate needs --out DIR");

  const fs::path root(config.out);
  for (std::size_t r = 0; r < sim.replicates; ++r) {
    const SimulatedDataset ds = simulate_dataset(sim, r);
    const fs::path dir = sim.replicates > 1 ? root / replicate_dir(r) : root;
    write_bundle(bundle_from_simulation(ds), dir);
    write_truth(dir / "truth.json", ds, sim, r);
  }
  log << "simulated " << sim.replicates << " dataset(s) (I=" << sim.sources << ", L=" << sim.loci
      << ", A=" << sim.alleles << ", fst=" << sim.fst << ") with seed " << sim.seed << " into " << root.string()
      << "\n";

  if (!config.study) return;
  const StudyResult study = run_study(sim, options);
  std::vector<std::pair<std::string, std::vector<AggregateRow>>> groups;
  for (PriorKind kind : options.priors) groups.emplace_back(to_string(kind), study.aggregate.at(kind));
  std::ofstream f(root / "study.tsv", std::ios::binary | std::ios::trunc);
  if (!f) throw RuntimeFailure("cannot write " + (root / "study.tsv").string());
  f << replicate_table(groups);
  for (const auto& failure : study.failures) log << "fit failed: " << failure << "\n";
  log << "wrote " << (root / "study.tsv").string() << "\n";
}

void cmd_fit(const RunConfig& config, std::ostream& log) {
  const BundlePaths paths = bundle_paths(config);
  const PriorSpec prior = prior_spec(config);
  const ChainConfig chain = chain_config(config);
  if (config.out.empty()) throw InputError("fit needs --out DIR");

  const DataBundle bundle = load_bundle(paths);
  for (const auto& w : bundle.warnings) log << "warning: " << w << "\n";
  validate_dataset(bundle.data, prior);

  const ChainOutput out = run_chain(bundle.data, prior, chain);
  write_chain(config.out, out, bundle,
              {{"sources", paths.sources.string()},
               {"colony", paths.colony.string()},
               {"covariates", paths.covariates.string()}});
  log << "fitted " << to_string(prior.kind) << " (seed " << chain.seed << "): " << out.draws.size()
      << " draws retained; acceptance";
  for (const auto& [block, rate] : out.acceptance) log << ' ' << block << '=' << fixed(rate, 2);
  log << "\n";
}

void cmd_summarize(const RunConfig& config, std::ostream& out) {
  if (config.chains.empty()) throw InputError("summarize needs at least one chain directory");
  if (!config.truth.empty() && config.truth.size() != 1 && config.truth.size() != config.chains.size())
    throw InputError("pass one --truth file, or one per chain");
  if (config.layout != "models" && config.layout != "replicates" && config.layout != "long")
    throw InputError("unknown layout '" + config.layout + "' (models, replicates or long)");

  std::vector<ChainFile> chains;
  for (const auto& dir : config.chains) chains.push_back(read_chain(dir));
  std::vector<Truth> truths;
  for (const auto& t : config.truth) truths.push_back(read_truth(t));
  std::vector<PosteriorSummary> summaries;
  for (std::size_t n = 0; n < chains.size(); ++n) {
    const Truth* truth = truths.empty() ? nullptr : &truths[truths.size() == 1 ? 0 : n];
    summaries.push_back(summarize(chains[n].chain, truth));
  }
  const auto labels = model_labels(chains, config.chains);

  std::string text;
  if (config.layout == "long") {
    text = "chain\tmodel\tparameter\tmean\tsd\thpd_lower\thpd_upper\trhat\ttruth\trmse\n";
    for (std::size_t n = 0; n < chains.size(); ++n)
      for (const auto& p : summaries[n].parameters)
        text += config.chains[n] + '\t' + to_string(chains[n].chain.prior.kind) + '\t' + p.name + '\t' +
                format_double(p.mean) + '\t' + format_double(p.sd) + '\t' + format_double(p.hpd.lower) + '\t' +
                format_double(p.hpd.upper) + '\t' + format_double(p.rhat) + '\t' +
                (p.truth ? format_double(*p.truth) : "NA") + '\t' + (p.rmse ? format_double(*p.rmse) : "NA") + '\n';
  } else if (config.layout == "models") {
    const bool with_truth = !truths.empty();
    text = "parameter";
    for (const auto& label : labels) {
      text += '\t' + label + " Mean\t" + label + " 95% HPD";
      if (with_truth) text += '\t' + label + " RMSE";
    }
    text += '\n';
    std::vector<std::string> order;
    std::set<std::string> seen;
    for (const auto& s : summaries)
      for (const auto& p : s.parameters)
        if (seen.insert(p.name).second) order.push_back(p.name);
    for (const auto& name : order) {
      text += name;
      for (const auto& s : summaries) {
        const ParameterSummary* p = s.find(name);
        text += p ? '\t' + fixed(p->mean) + "\t(" + fixed(p->hpd.lower) + "," + fixed(p->hpd.upper) + ")" : "\t-\t-";
        if (with_truth) text += p && p->rmse ? '\t' + fixed(*p->rmse) : "\tNA";
      }
      text += '\n';
    }
  } else {
    std::vector<std::pair<std::string, std::vector<PosteriorSummary>>> grouped;
    for (std::size_t n = 0; n < chains.size(); ++n) {
      const std::string model = to_string(chains[n].chain.prior.kind);
      auto it = std::find_if(grouped.begin(), grouped.end(), [&](const auto& g) { return g.first == model; });
      if (it == grouped.end()) it = grouped.insert(grouped.end(), {model, {}});
      it->second.push_back(summaries[n]);
    }
    std::vector<std::pair<std::string, std::vector<AggregateRow>>> groups;
    for (const auto& [model, list] : grouped) groups.emplace_back(model, aggregate_replicates(list));
    text = replicate_table(groups);
  }
  emit(config, text, out);
}

void cmd_compare(const RunConfig& config, std::ostream& out) {
  if (config.chains.empty()) throw InputError("compare needs at least one chain directory");
  const BundlePaths paths = bundle_paths(config);
  const DataBundle bundle = load_bundle(paths);
  const std::string fingerprint = data_fingerprint(bundle);

  std::vector<ChainFile> chains;
  for (const auto& dir : config.chains) {
    chains.push_back(read_chain(dir));
    if (chains.back().data_fingerprint != fingerprint)
      throw InputError("chain '" + dir + "' was fitted to different data (fingerprint " +
                       chains.back().data_fingerprint + ", data " + fingerprint + "); comparison is invalid");
  }
  const auto labels = model_labels(chains, config.chains);
  std::string text = "Models\tDbar\tpD\tDIC\tLPML\n";
  for (std::size_t n = 0; n < chains.size(); ++n) {
    const ModelScore s = score_model(chains[n].chain, bundle.data);
    // Shortest round-trip formatting keeps DIC = Dbar + pD checkable from the table.
    text += labels[n] + '\t' + format_double(s.dbar) + '\t' + format_double(s.pd) + '\t' + format_double(s.dic) +
            '\t' + format_double(s.lpml) + '\n';
  }
  emit(config, text, out);
}

int run_command(const std::string& name, const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (name == "simulate")
      cmd_simulate(config, err);
    else if (name == "fit")
      cmd_fit(config, err);
    else if (name == "summarize")
      cmd_summarize(config, out);
    else if (name == "compare")
      cmd_compare(config, out);
    else
      throw InputError("unknown subcommand '" + name + "'");
    return kExitOk;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace mixstock
