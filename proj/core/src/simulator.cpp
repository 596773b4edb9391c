// Apache License, Version 2.0, refer to LICENSE.txt

#include "mixstock/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "mixstock/error.hpp"

namespace mixstock {

CovariateMatrix grey_seal_covariates() {
  return CovariateMatrix::from_raw({"distance", "productivity"},
                                   {{-0.295, -0.849, -0.822, -0.562, -0.326, 1.533, 1.320},
                                    {1.298, 1.285, -0.238, -1.256, -0.729, 0.286, -0.646}});
}

void SimulationConfig::validate() const {
  if (sources < 1 || loci < 1 || alleles < 1) throw InputError("sources, loci and alleles must be positive");
  if (!(fst > 0.0 && fst < 1.0)) throw InputError("fst must lie in (0,1)");
  if (allele_total < 1) throw InputError("allele total must be positive");
  if (colony_size < 1) throw InputError("colony size must be positive");
  if (!(omega >= 0.0 && omega <= 1.0)) throw InputError("omega must lie in [0,1]");
  if (alpha.size() != covariates.num_covariates())
    throw InputError("alpha has " + std::to_string(alpha.size()) + " slopes but there are " +
                     std::to_string(covariates.num_covariates()) + " covariates");
  if (!covariates.empty() && covariates.num_sources() != sources)
    throw InputError("covariates cover " + std::to_string(covariates.num_sources()) + " sources, expected " +
                     std::to_string(sources));
  if (replicates < 1) throw InputError("replicate count must be positive");
}

SimulationConfig scenario_config(const std::string& name) {
  SimulationConfig c;
  if (name == "paper-1") {
    c.fst = 0.05;
    c.loci = 8;
  } else if (name == "paper-2") {
    c.fst = 0.2;
    c.loci = 8;
  } else if (name == "paper-3") {
    c.fst = 0.05;
    c.loci = 16;
  } else {
    throw InputError("unknown scenario '" + name + "' (expected paper-1, paper-2 or paper-3)");
  }
  return c;
}

Truth SimulatedDataset::truth() const {
  Truth t;
  for (std::size_t i = 0; i < m.size(); ++i) t["m[" + std::to_string(i + 1) + "]"] = m[i];
  t["omega"] = omega;
  for (std::size_t r = 1; r < alpha.size(); ++r) t["alpha[" + std::to_string(r) + "]"] = alpha[r];
  for (std::size_t l = 0; l < freqs.num_loci(); ++l)
    for (std::size_t i = 0; i < freqs.num_sources(); ++i)
      for (int j = 0; j < freqs.num_alleles(l); ++j)
        t["P[" + std::to_string(l + 1) + "," + std::to_string(i + 1) + "," + std::to_string(j + 1) + "]"] =
            freqs(l, i, static_cast<std::size_t>(j));
  return t;
}

bool operator==(const SimulatedDataset& a, const SimulatedDataset& b) {
  return a.data.colony.layout == b.data.colony.layout && a.data.colony.individuals == b.data.colony.individuals &&
         a.data.sources == b.data.sources && a.hyper_freqs == b.hyper_freqs && a.freqs == b.freqs && a.m == b.m &&
         a.omega == b.omega && a.alpha == b.alpha;
}

std::vector<std::vector<double>> gen_hyper_frequencies(std::size_t loci, int alleles, Rng& rng) {
  const std::vector<double> ones(static_cast<std::size_t>(alleles), 1.0);
  std::vector<std::vector<double>> out;
  out.reserve(loci);
  for (std::size_t l = 0; l < loci; ++l) out.push_back(sample_dirichlet(rng, ones));
  return out;
}

AlleleFrequencies gen_source_frequencies(const std::vector<std::vector<double>>& hyper, double fst,
                                         std::size_t sources, Rng& rng) {
  if (!(fst > 0.0 && fst < 1.0)) throw InputError("fst must lie in (0,1)");
  LocusLayout layout;
  for (const auto& row : hyper) layout.alleles.push_back(static_cast<int>(row.size()));
  AlleleFrequencies freqs(sources, layout, 0.0);
  const double scale = (1.0 - fst) / fst;
  for (std::size_t l = 0; l < hyper.size(); ++l) {
    std::vector<double> a(hyper[l]);
    for (double& v : a) v *= scale;
    for (std::size_t i = 0; i < sources; ++i) {
      const auto draw = sample_dirichlet(rng, a);
      std::copy(draw.begin(), draw.end(), freqs.row(l, i).begin());
    }
  }
  return freqs;
}

AlleleCountTable gen_allele_counts(const AlleleFrequencies& freqs, long total, Rng& rng) {
  if (total < 1) throw InputError("allele total must be positive");
  AlleleCountTable counts(freqs.num_sources(), freqs.layout(), 0);
  for (std::size_t l = 0; l < freqs.num_loci(); ++l) {
    for (std::size_t i = 0; i < freqs.num_sources(); ++i) {
      const auto draw = sample_multinomial(rng, total, freqs.row(l, i));
      std::copy(draw.begin(), draw.end(), counts.row(l, i).begin());
    }
  }
  return counts;
}

GenotypeTable gen_colony(std::span<const double> m, const AlleleFrequencies& freqs, double omega,
                         std::size_t individuals, Rng& rng) {
  GenotypeTable table;
  table.layout = freqs.layout();
  std::vector<std::vector<AllelePair>> genotypes(freqs.num_loci());
  for (std::size_t l = 0; l < freqs.num_loci(); ++l) genotypes[l] = canonical_genotypes(freqs.num_alleles(l));

  std::vector<double> weights;
  for (std::size_t k = 0; k < individuals; ++k) {
    const bool same = sample_uniform(rng) < omega;
    const std::size_t mother = sample_categorical(rng, m);
    const std::size_t father = same ? mother : sample_categorical(rng, m);
    Genotype y;
    y.loci.reserve(freqs.num_loci());
    for (std::size_t l = 0; l < freqs.num_loci(); ++l) {
      weights.clear();
      for (const auto& g : genotypes[l])
        weights.push_back(pair_probability(g, freqs.row(l, mother), freqs.row(l, father), mother == father));
      y.loci.emplace_back(genotypes[l][sample_categorical(rng, weights)]);
    }
    table.individuals.push_back(std::move(y));
  }
  return table;
}

SimulatedDataset simulate_dataset(const SimulationConfig& config, std::size_t replicate) {
  config.validate();
  Rng rng(derive_seed(config.seed, 1000 + replicate));
  SimulatedDataset out;
  out.alpha.push_back(0.0);
  out.alpha.insert(out.alpha.end(), config.alpha.begin(), config.alpha.end());
  out.m = config.covariates.empty() ? std::vector<double>(config.sources, 1.0 / static_cast<double>(config.sources))
                                    : expected_m_given_alpha(out.alpha, config.covariates);
  out.omega = config.omega;
  out.hyper_freqs = gen_hyper_frequencies(config.loci, config.alleles, rng);
  out.freqs = gen_source_frequencies(out.hyper_freqs, config.fst, config.sources, rng);
  out.data.sources = gen_allele_counts(out.freqs, config.allele_total, rng);
  out.data.colony = gen_colony(out.m, out.freqs, out.omega, config.colony_size, rng);
  out.data.covariates =
      config.covariates.empty() ? CovariateMatrix::intercept_only(config.sources) : config.covariates;
  return out;
}

std::vector<AggregateRow> aggregate_replicates(const std::vector<PosteriorSummary>& summaries) {
  std::vector<AggregateRow> rows;
  if (summaries.empty()) return rows;
  for (const auto& p : summaries.front().parameters) {
    AggregateRow row;
    row.parameter = p.name;
    row.truth = p.truth;
    double rmse_total = 0.0;
    bool have_rmse = true;
    for (const auto& s : summaries) {
      const ParameterSummary* q = s.find(p.name);
      if (!q) continue;
      ++row.replicates;
      row.mean += q->mean;
      row.sd += q->sd;
      row.hpd_length += q->hpd.width();
      if (q->rmse)
        rmse_total += *q->rmse;
      else
        have_rmse = false;
    }
    const auto n = static_cast<double>(row.replicates);
    row.mean /= n;
    row.sd /= n;
    row.hpd_length /= n;
    if (have_rmse) row.rmse = rmse_total / n;
    rows.push_back(std::move(row));
  }
  return rows;
}

StudyResult run_study(const SimulationConfig& config, const StudyOptions& options) {
  config.validate();
  options.chain.validate();
  const std::size_t reps = config.replicates;
  const std::size_t priors = options.priors.size();

  StudyResult result;
  result.datasets.resize(reps);
  std::vector<std::optional<PosteriorSummary>> fits(reps * priors);
  std::vector<std::string> errors(reps * priors);

  auto work = [&](std::size_t r) {
    result.datasets[r] = simulate_dataset(config, r);
    const Truth truth = result.datasets[r].truth();
    for (std::size_t p = 0; p < priors; ++p) {
      PriorSpec spec = options.constants;
      spec.kind = options.priors[p];
      ChainConfig chain = options.chain;
      chain.seed = derive_seed(config.seed, 2000 + r * 16 + p);
      try {
        fits[r * priors + p] = summarize(run_chain(result.datasets[r].data, spec, chain), &truth);
      } catch (const std::exception& e) {
        errors[r * priors + p] = e.what();
      }
    }
  };

  unsigned workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, reps));
  if (workers <= 1) {
    for (std::size_t r = 0; r < reps; ++r) work(r);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < reps; r += workers) work(r);
      });
    for (auto& t : pool) t.join();
  }

  for (std::size_t p = 0; p < priors; ++p) {
    auto& list = result.summaries[options.priors[p]];
    for (std::size_t r = 0; r < reps; ++r) {
      if (fits[r * priors + p])
        list.push_back(std::move(*fits[r * priors + p]));
      else
        result.failures.push_back("replicate " + std::to_string(r + 1) + ", " + to_string(options.priors[p]) + ": " +
                                  errors[r * priors + p]);
    }
    result.aggregate[options.priors[p]] = aggregate_replicates(list);
  }
  return result;
}

}  // namespace mixstock
