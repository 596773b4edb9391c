// Apache License, Version 2.0, refer to LICENSE.txt

#include "mixstock/error.hpp"
#include "mixstock/model.hpp"
#include "mixstock/numeric.hpp"
#include "mixstock/simulator.hpp"
#include "support.hpp"

using namespace mixstock;
using namespace mixstock::testing;

namespace {

SimulatedDataset small_dataset() {
  SimulationConfig c;
  c.loci = 3;
  c.alleles = 4;
  c.colony_size = 30;
  c.seed = 99;
  return simulate_dataset(c);
}

PriorSpec spec(PriorKind kind) {
  PriorSpec p;
  p.kind = kind;
  return p;
}

}  // namespace

TEST_CASE("joint posterior decomposes into likelihood and prior terms") {
  const auto sim = small_dataset();
  for (auto kind : {PriorKind::DirichletDirichlet, PriorKind::DirichletLognormal, PriorKind::Uniform}) {
    const auto prior = spec(kind);
    auto state = initial_state(sim.data, prior);
    state.freqs = sim.freqs;
    state.m = sim.m;
    state.omega = 0.2;
    const double like = colony_loglik(sim.data.colony, state.omega, state.freqs, state.m) +
                        source_loglik(sim.data.sources, state.freqs);
    CHECK(joint_log_posterior(state, sim.data, prior) - like ==
          doctest::Approx(log_prior_density(state, sim.data.covariates, prior)).epsilon(1e-10));
  }
}

TEST_CASE("uniform prior: equal likelihoods give equal posteriors") {
  // Two sources with identical allele frequencies make the likelihood flat in m.
  const auto p = make_freqs({{{0.2, 0.8}, {0.2, 0.8}}});
  DataSet data;
  data.colony = GenotypeTable{LocusLayout{{2}}, {make_genotype({{0, 1}}), make_genotype({{1, 1}})}};
  data.sources = AlleleCountTable(2, LocusLayout{{2}});
  data.sources(0, 0, 0) = 3;
  data.sources(0, 1, 1) = 5;
  data.covariates = CovariateMatrix::intercept_only(2);
  const auto prior = spec(PriorKind::Uniform);
  auto a = initial_state(data, prior);
  a.freqs = p;
  auto b = a;
  b.m = {0.9, 0.1};
  CHECK(joint_log_posterior(a, data, prior) == doctest::Approx(joint_log_posterior(b, data, prior)).epsilon(1e-13));
}

TEST_CASE("posterior moves with the colony likelihood when everything else is fixed") {
  const auto sim = small_dataset();
  const auto prior = spec(PriorKind::Uniform);
  auto state = initial_state(sim.data, prior);
  state.freqs = sim.freqs;
  state.m = sim.m;
  double prev_colony = 0.0, prev_post = 0.0;
  bool first = true;
  for (double omega : {0.02, 0.1, 0.3, 0.6, 0.9}) {
    state.omega = omega;
    const double colony = colony_loglik(sim.data.colony, omega, state.freqs, state.m);
    const double post = joint_log_posterior(state, sim.data, prior);
    if (!first) CHECK((colony > prev_colony) == (post > prev_post));
    prev_colony = colony;
    prev_post = post;
    first = false;
  }
}

TEST_CASE("dataset validation") {
  auto sim = small_dataset();
  CHECK_NOTHROW(validate_dataset(sim.data, spec(PriorKind::DirichletDirichlet)));

  auto fewer = sim.data;
  fewer.covariates = CovariateMatrix::intercept_only(4);
  CHECK_THROWS_AS(validate_dataset(fewer, spec(PriorKind::DirichletDirichlet)), InputError);
  CHECK_NOTHROW(validate_dataset(fewer, spec(PriorKind::Uniform)));

  auto mismatch = sim.data;
  mismatch.colony.layout.alleles.pop_back();
  CHECK_THROWS_AS(validate_dataset(mismatch, spec(PriorKind::Uniform)), InputError);
}

TEST_CASE("initial state is valid and finite for every prior") {
  const auto sim = small_dataset();
  for (auto kind : {PriorKind::DirichletDirichlet, PriorKind::DirichletLognormal, PriorKind::Uniform}) {
    const auto state = initial_state(sim.data, spec(kind));
    CHECK_NOTHROW(validate_frequencies(state.freqs));
    CHECK_NOTHROW(validate_proportions(state.m));
    CHECK(std::isfinite(joint_log_posterior(state, sim.data, spec(kind))));
  }
  // Add-one smoothing: a zero count still gets positive frequency.
  const auto state = initial_state(sim.data, spec(PriorKind::Uniform));
  const auto n = sim.data.sources.row(0, 0);
  const double total = std::accumulate(n.begin(), n.end(), 0.0) + n.size();
  CHECK(state.freqs(0, 0, 0) == doctest::Approx((n[0] + 1.0) / total));
}

TEST_CASE("flatten, names and unflatten agree") {
  const auto sim = small_dataset();
  for (auto kind : {PriorKind::DirichletDirichlet, PriorKind::DirichletLognormal, PriorKind::Uniform}) {
    auto state = initial_state(sim.data, spec(kind));
    state.m = sim.m;
    const auto values = flatten(state);
    const auto names = parameter_names(state);
    REQUIRE(values.size() == names.size());
    CHECK(names.front() == "P[1,1,1]");
    CHECK(std::find(names.begin(), names.end(), "omega") != names.end());
    CHECK(unflatten(values, state) == state);
    CHECK_THROWS_AS(unflatten(std::vector<double>(3, 0.1), state), InputError);
  }
  const auto dd = parameter_names(initial_state(sim.data, spec(PriorKind::DirichletDirichlet)));
  CHECK(dd.back() == "alpha[2]");
  CHECK(std::find(dd.begin(), dd.end(), "rho") != dd.end());
  const auto dl = parameter_names(initial_state(sim.data, spec(PriorKind::DirichletLognormal)));
  CHECK(std::find(dl.begin(), dl.end(), "tau") != dl.end());
  CHECK(std::find(dl.begin(), dl.end(), "psi[7]") != dl.end());
}

TEST_CASE("a state whose hyperparameters do not match the prior is rejected") {
  const auto sim = small_dataset();
  const auto state = initial_state(sim.data, spec(PriorKind::Uniform));
  CHECK_THROWS_AS(log_prior_density(state, sim.data.covariates, spec(PriorKind::DirichletDirichlet)), ContractError);
}
