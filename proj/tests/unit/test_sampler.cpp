// Apache License, Version 2.0, refer to LICENSE.txt

#include "mixstock/diagnostics.hpp"
#include "mixstock/error.hpp"
#include "mixstock/numeric.hpp"
#include "mixstock/sampler.hpp"
#include "mixstock/simulator.hpp"
#include "support.hpp"

using namespace mixstock;
using namespace mixstock::testing;

namespace {

// |estimate - expected| within `k` batch-means standard errors.
void check_mean(const std::vector<double>& draws, double expected, double k = 4.0) {
  const double se = mcse_batch_means(draws);
  CHECK_MESSAGE(std::abs(mean_of(draws) - expected) < k * se,
                "mean " << mean_of(draws) << " expected " << expected << " se " << se);
}

SimulatedDataset small_dataset(std::uint64_t seed = 5) {
  SimulationConfig c;
  c.loci = 2;
  c.alleles = 4;
  c.colony_size = 25;
  c.allele_total = 60;
  c.seed = seed;
  return simulate_dataset(c);
}

ChainConfig short_chain(std::uint64_t seed = 3) {
  ChainConfig c;
  c.iterations = 600;
  c.burn_in = 200;
  c.thin = 2;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("unit-interval walk samples Beta(2, 2)") {
  Rng rng(1);
  const ScalarLogDensity target = [](double x) { return std::log(x) + std::log1p(-x); };
  double x = 0.5, lt = target(x);
  std::vector<double> draws, sq;
  for (int t = 0; t < 200000; ++t) {
    const auto move = mh_update_unit_scalar(x, lt, target, 1.5, rng);
    x = move.value;
    lt = move.log_target;
    draws.push_back(x);
    sq.push_back((x - 0.5) * (x - 0.5));
  }
  check_mean(draws, 0.5);
  check_mean(sq, 0.05);
}

TEST_CASE("unit-interval walk is reversible: bin-to-bin flows balance") {
  Rng rng(2);
  const ScalarLogDensity target = [](double x) { return std::log(x) + std::log1p(-x); };
  auto bin = [](double v) { return std::min(2, static_cast<int>(v * 3.0)); };
  double x = 0.5, lt = target(x);
  long flow[3][3] = {};
  for (int t = 0; t < 300000; ++t) {
    const int from = bin(x);
    const auto move = mh_update_unit_scalar(x, lt, target, 2.0, rng);
    x = move.value;
    lt = move.log_target;
    ++flow[from][bin(x)];
  }
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      const double n1 = static_cast<double>(flow[a][b]), n2 = static_cast<double>(flow[b][a]);
      CHECK(std::abs(n1 - n2) < 5.0 * std::sqrt(n1 + n2));
    }
}

TEST_CASE("simplex moves sample Dirichlet targets under both proposal styles") {
  const std::vector<std::vector<double>> alphas = {{5.0, 5.0}, {2.0, 3.0, 5.0}};
  for (auto style : {ProposalStyle::RandomWalk, ProposalStyle::Independence})
    for (const auto& alpha : alphas) {
      Rng rng(7);
      const LogDensity target = [&](std::span<const double> theta) { return log_dirichlet_density(theta, alpha); };
      std::vector<double> theta(alpha.size(), 1.0 / alpha.size());
      double lt = target(theta);
      const int n = style == ProposalStyle::RandomWalk ? 200000 : 40000;
      std::vector<std::vector<double>> comp(alpha.size());
      std::vector<double> sq;
      const BlockTuning tuning{style == ProposalStyle::RandomWalk ? 0.8 : 0.9, style};
      for (int t = 0; t < n; ++t) {
        const auto move = mh_update_simplex_block(theta, lt, target, tuning, rng);
        theta = move.value;
        lt = move.log_target;
        for (std::size_t i = 0; i < theta.size(); ++i) comp[i].push_back(theta[i]);
      }
      const double a0 = std::accumulate(alpha.begin(), alpha.end(), 0.0);
      for (std::size_t i = 0; i < alpha.size(); ++i) {
        const double mu = alpha[i] / a0;
        check_mean(comp[i], mu);
        std::vector<double> dev;
        for (double v : comp[i]) dev.push_back((v - mu) * (v - mu));
        check_mean(dev, mu * (1 - mu) / (a0 + 1));
      }
    }
}

TEST_CASE("real-line walks sample N(0, 10) and, on the log scale, Exp(1)") {
  Rng rng(4);
  {
    const LogDensity target = [](std::span<const double> x) { return log_normal_density(x[0], 0.0, 10.0); };
    std::vector<double> x{0.0}, draws, sq;
    double lt = target(x);
    for (int t = 0; t < 200000; ++t) {
      const auto move = mh_update_real_block(x, lt, target, 6.0, false, rng);
      x = move.value;
      lt = move.log_target;
      draws.push_back(x[0]);
      sq.push_back(x[0] * x[0]);
    }
    check_mean(draws, 0.0);
    check_mean(sq, 10.0);
  }
  {
    const LogDensity target = [](std::span<const double> x) { return -x[0]; };
    std::vector<double> x{1.0}, draws, sq;
    double lt = target(x);
    for (int t = 0; t < 200000; ++t) {
      const auto move = mh_update_real_block(x, lt, target, 1.5, true, rng);
      x = move.value;
      lt = move.log_target;
      draws.push_back(x[0]);
      sq.push_back((x[0] - 1.0) * (x[0] - 1.0));
    }
    check_mean(draws, 1.0);
    check_mean(sq, 1.0);
  }
}

TEST_CASE("BFGS finds the maximum of a concave quadratic") {
  const LogDensity f = [](std::span<const double> x) {
    const double a = x[0] - 1.0, b = x[1] + 2.0;
    return -(2.0 * a * a + a * b + b * b);
  };
  const auto x = maximize_bfgs(f, {0.0, 0.0});
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(x[1] == doctest::Approx(-2.0).epsilon(1e-4));
}

TEST_CASE("chain configuration validation and draw counts") {
  ChainConfig c;
  c.iterations = 100;
  c.burn_in = 50;
  c.thin = 5;
  CHECK(c.retained_draws() == 10);
  CHECK_NOTHROW(c.validate());
  c.burn_in = 100;
  CHECK_THROWS_AS(c.validate(), InputError);
  c.burn_in = 10;
  c.thin = 0;
  CHECK_THROWS_AS(c.validate(), InputError);
  c.thin = 1;
  c.omega.step = -1.0;
  CHECK_THROWS_AS(c.validate(), InputError);
  CHECK(parse_proposal_style(to_string(ProposalStyle::Independence)) == ProposalStyle::Independence);
  CHECK_THROWS_AS(parse_proposal_style("gibbs"), InputError);

  const auto sim = small_dataset();
  ChainConfig tiny;
  tiny.iterations = 100;
  tiny.burn_in = 50;
  tiny.thin = 5;
  const auto out = run_chain(sim.data, PriorSpec{}, tiny);
  CHECK(out.draws.size() == 10);
  CHECK(out.iterations.front() == 55);
  CHECK(out.iterations.back() == 100);
}

TEST_CASE("stored log-likelihoods match a direct evaluation of every draw") {
  const auto sim = small_dataset();
  for (auto kind : {PriorKind::DirichletDirichlet, PriorKind::DirichletLognormal, PriorKind::Uniform}) {
    PriorSpec prior;
    prior.kind = kind;
    const auto out = run_chain(sim.data, prior, short_chain());
    REQUIRE(out.draws.size() == 200);
    for (std::size_t s = 0; s < out.draws.size(); s += 7) {
      const auto& d = out.draws[s];
      const double direct =
          colony_loglik(sim.data.colony, d.omega, d.freqs, d.m) + source_loglik(sim.data.sources, d.freqs);
      CHECK(out.loglik[s] == doctest::Approx(direct).epsilon(1e-9));
      CHECK_NOTHROW(validate_frequencies(d.freqs));
      CHECK_NOTHROW(validate_proportions(d.m));
      CHECK(std::isfinite(joint_log_posterior(d, sim.data, prior)));
    }
    for (const auto& [block, rate] : out.acceptance) {
      CHECK_MESSAGE(rate > 0.02, block);
      CHECK_MESSAGE(rate < 0.95, block);
    }
  }
}

TEST_CASE("chains are reproducible from the seed") {
  const auto sim = small_dataset();
  const auto a = run_chain(sim.data, PriorSpec{}, short_chain(11));
  const auto b = run_chain(sim.data, PriorSpec{}, short_chain(11));
  const auto c = run_chain(sim.data, PriorSpec{}, short_chain(12));
  CHECK(a.draws == b.draws);
  CHECK(a.loglik == b.loglik);
  CHECK_FALSE(a.draws == c.draws);
}

TEST_CASE("with one source the allele-frequency posterior is the conjugate Dirichlet") {
  // Source counts plus the colony's alleles (every parent from the one source)
  // update the Dirichlet(1) prior.
  DataSet data;
  const LocusLayout layout{{3}};
  data.sources = AlleleCountTable(1, layout);
  data.sources(0, 0, 0) = 4;
  data.sources(0, 0, 1) = 9;
  data.sources(0, 0, 2) = 2;
  data.colony = GenotypeTable{layout, {make_genotype({{0, 1}}), make_genotype({{1, 1}}), make_genotype({{2, 0}})}};
  data.covariates = CovariateMatrix::intercept_only(1);
  const std::vector<double> post = {1.0 + 4 + 2, 1.0 + 9 + 3, 1.0 + 2 + 1};
  const double total = std::accumulate(post.begin(), post.end(), 0.0);

  PriorSpec prior;
  prior.kind = PriorKind::Uniform;
  ChainConfig c;
  c.iterations = 22000;
  c.burn_in = 2000;
  c.thin = 1;
  const auto out = run_chain(data, prior, c);
  for (std::size_t j = 0; j < 3; ++j) {
    std::vector<double> x;
    for (const auto& d : out.draws) x.push_back(d.freqs(0, 0, j));
    check_mean(x, post[j] / total, 3.0);
  }
}

TEST_CASE("zero steps keep the chain in place and flat targets are sampled uniformly") {
  Rng rng(6);
  const ScalarLogDensity flat = [](double) { return 0.0; };
  CHECK(mh_update_unit_scalar(0.3, 0.0, flat, 0.0, rng).value == 0.3);
  const std::vector<double> theta = {0.2, 0.8};
  const LogDensity flat_block = [](std::span<const double>) { return 0.0; };
  const auto stay = mh_update_simplex_block(theta, 0.0, flat_block, {0.0, ProposalStyle::RandomWalk}, rng);
  CHECK(stay.accepted);
  CHECK(stay.value == theta);

  double x = 0.5;
  std::vector<double> draws;
  for (int t = 0; t < 100000; ++t) {
    x = mh_update_unit_scalar(x, 0.0, flat, 2.0, rng).value;
    draws.push_back(x);
  }
  check_mean(draws, 0.5, 3.0);

  const std::vector<double> ones = {1.0, 1.0, 1.0};
  const LogDensity dir1 = [&](std::span<const double> t) { return log_dirichlet_density(t, ones); };
  std::vector<double> cur(3, 1.0 / 3.0);
  double lt = dir1(cur);
  std::vector<double> first;
  for (int t = 0; t < 100000; ++t) {
    const auto move = mh_update_simplex_block(cur, lt, dir1, {1.0, ProposalStyle::RandomWalk}, rng);
    cur = move.value;
    lt = move.log_target;
    first.push_back(cur[0]);
  }
  check_mean(first, 1.0 / 3.0, 3.0);
}

TEST_CASE("without data the chain samples the prior") {
  DataSet data;
  const LocusLayout layout{{3}};
  data.sources = AlleleCountTable(2, layout);
  data.colony = GenotypeTable{layout, {}};
  data.covariates = CovariateMatrix::intercept_only(2);
  PriorSpec prior;
  prior.kind = PriorKind::Uniform;
  ChainConfig c;
  c.iterations = 42000;
  c.burn_in = 2000;
  c.thin = 2;
  const auto out = run_chain(data, prior, c);
  std::vector<double> p, p_dev, m, omega;
  for (const auto& d : out.draws) {
    p.push_back(d.freqs(0, 1, 2));
    p_dev.push_back((d.freqs(0, 1, 2) - 1.0 / 3.0) * (d.freqs(0, 1, 2) - 1.0 / 3.0));
    m.push_back(d.m[0]);
    omega.push_back(d.omega);
  }
  check_mean(p, 1.0 / 3.0);
  check_mean(p_dev, 1.0 / 18.0);
  check_mean(m, 0.5);
  check_mean(omega, 0.5);
}
