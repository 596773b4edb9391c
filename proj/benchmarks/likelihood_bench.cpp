// Apache License, Version 2.0, refer to LICENSE.txt

#include <benchmark/benchmark.h>

#include "mixstock/genetics.hpp"
#include "mixstock/simulator.hpp"

namespace {

// Simulated dataset with `sources` sources and the default 8 loci x 10 alleles.
mixstock::SimulatedDataset dataset(std::size_t sources) {
  mixstock::SimulationConfig c;
  c.sources = sources;
  c.alpha.clear();
  c.covariates = mixstock::CovariateMatrix();
  c.seed = 17;
  return mixstock::simulate_dataset(c);
}

// One colony individual; the mixture has I + I^2 terms per individual.
void BM_IndividualLoglik(benchmark::State& state) {
  const auto sim = dataset(static_cast<std::size_t>(state.range(0)));
  const auto& y = sim.data.colony.individuals.front();
  for (auto _ : state) {
    double v = mixstock::colony_individual_loglik(y, sim.omega, sim.freqs, sim.m);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_IndividualLoglik)->Arg(2)->Arg(7)->Arg(14);

// Whole colony of 160 individuals.
void BM_ColonyLoglik(benchmark::State& state) {
  const auto sim = dataset(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    double v = mixstock::colony_loglik(sim.data.colony, sim.omega, sim.freqs, sim.m);
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(sim.data.colony.individuals.size()));
}
BENCHMARK(BM_ColonyLoglik)->Arg(2)->Arg(7)->Arg(14);

// Product-multinomial source likelihood.
void BM_SourceLoglik(benchmark::State& state) {
  const auto sim = dataset(7);
  for (auto _ : state) {
    double v = mixstock::source_loglik(sim.data.sources, sim.freqs);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_SourceLoglik);

}  // namespace
