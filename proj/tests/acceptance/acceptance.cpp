// Apache License, Version 2.0, refer to LICENSE.txt

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "mixstock/commands.hpp"
#include "mixstock/diagnostics.hpp"
#include "mixstock/io.hpp"
#include "mixstock/numeric.hpp"
#include "mixstock/sampler.hpp"
#include "mixstock/simplex.hpp"
#include "mixstock/simulator.hpp"

using namespace mixstock;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

const std::vector<double> kTrueM = {0.249, 0.327, 0.151, 0.079, 0.092, 0.060, 0.042};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

double mean_of(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0) / x.size(); }

double variance_of(std::span<const double> x) {
  const double mu = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - mu) * (v - mu);
  return s / (x.size() - 1);
}

// ---------------------------------------------------------------------------

Verdict softmax_truth() {
  const std::vector<double> alpha = {0.0, -0.5, 0.5};
  const auto m = expected_m_given_alpha(alpha, grey_seal_covariates());
  double worst = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) worst = std::max(worst, std::abs(m[i] - kTrueM[i]));
  return {worst <= 0.001, "max |m_i - truth| = " + fmt(worst, 5)};
}

Verdict prior_moments() {
  Rng rng(derive_seed(2024, 2));
  const std::vector<std::vector<double>> phis = {std::vector<double>(7, 1.0 / 7.0), kTrueM};
  const int n = 100000;
  double worst = 0.0;  // largest |error| / MC-SE
  for (double rho : {0.1, 0.5})
    for (auto phi : phis) {
      const double total = std::accumulate(phi.begin(), phi.end(), 0.0);
      for (double& v : phi) v /= total;
      std::vector<std::vector<double>> comp(phi.size(), std::vector<double>(n));
      for (int s = 0; s < n; ++s) {
        const auto m = sample_m_dirdir(rng, rho, phi);
        for (std::size_t i = 0; i < m.size(); ++i) comp[i][s] = m[i];
      }
      for (std::size_t i = 0; i < phi.size(); ++i) {
        const double var = rho * phi[i] * (1.0 - phi[i]);
        const double mu = mean_of(comp[i]);
        double m4 = 0.0;
        for (double v : comp[i]) m4 += std::pow(v - mu, 4);
        m4 /= n;
        worst = std::max(worst, std::abs(mu - phi[i]) / std::sqrt(var / n));
        worst = std::max(worst, std::abs(variance_of(comp[i]) - var) / std::sqrt((m4 - var * var) / n));
      }
    }
  return {worst < 3.0, "largest deviation " + fmt(worst, 2) + " MC-SE over 4 grid points x 7 components"};
}

double finite_difference_log_det(const std::vector<double>& xi) {
  const std::size_t p = xi.size();
  const double h = 1e-6;
  std::vector<std::vector<double>> jac(p, std::vector<double>(p));
  for (std::size_t c = 0; c < p; ++c) {
    auto up = xi, down = xi;
    up[c] += h;
    down[c] -= h;
    const auto tu = logit_to_simplex(up), td = logit_to_simplex(down);
    for (std::size_t r = 0; r < p; ++r) jac[r][c] = (tu[r] - td[r]) / (2.0 * h);
  }
  double log_det = 0.0;
  for (std::size_t k = 0; k < p; ++k) {
    std::size_t pivot = k;
    for (std::size_t r = k + 1; r < p; ++r)
      if (std::abs(jac[r][k]) > std::abs(jac[pivot][k])) pivot = r;
    std::swap(jac[k], jac[pivot]);
    log_det += std::log(std::abs(jac[k][k]));
    for (std::size_t r = k + 1; r < p; ++r) {
      const double f = jac[r][k] / jac[k][k];
      for (std::size_t c = k; c < p; ++c) jac[r][c] -= f * jac[k][c];
    }
  }
  return log_det;
}

Verdict jacobian() {
  Rng rng(derive_seed(2024, 3));
  double worst = 0.0;
  for (std::size_t p : {1, 2, 6})
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> xi(p);
      for (double& v : xi) v = sample_normal(rng, 0.0, 1.5);
      worst = std::max(worst, std::expm1(std::abs(finite_difference_log_det(xi) - log_jacobian_det(xi))));
    }
  const double e1 = std::abs(log_jacobian_det(std::vector<double>{0.0}) - std::log(0.25));
  const double e2 = std::abs(log_jacobian_det(std::vector<double>{0.0, 0.0}) - std::log(1.0 / 27.0));
  return {worst < 1e-5 && e1 < 1e-14 && e2 < 1e-14,
          "max relative error " + sci(worst) + "; closed forms off by " + sci(std::max(e1, e2))};
}

Verdict conjugate() {
  SimulationConfig c;
  c.sources = 1;
  c.loci = 3;
  c.alleles = 4;
  c.colony_size = 20;
  c.allele_total = 50;
  c.alpha.clear();
  c.covariates = CovariateMatrix();
  c.seed = 404;
  const auto sim = simulate_dataset(c);
  PriorSpec prior;
  prior.kind = PriorKind::Uniform;
  ChainConfig cc;
  cc.iterations = 22000;
  cc.burn_in = 2000;
  cc.thin = 1;
  cc.seed = 405;
  const auto chain = run_chain(sim.data, prior, cc);

  double worst = 0.0;
  for (std::size_t l = 0; l < 3; ++l) {
    std::vector<double> post(4, 1.0);
    for (std::size_t j = 0; j < 4; ++j) post[j] += static_cast<double>(sim.data.sources(l, 0, j));
    for (const auto& y : sim.data.colony.individuals) {
      post[static_cast<std::size_t>(y.loci[l]->first)] += 1.0;
      post[static_cast<std::size_t>(y.loci[l]->second)] += 1.0;
    }
    const double total = std::accumulate(post.begin(), post.end(), 0.0);
    for (std::size_t j = 0; j < 4; ++j) {
      std::vector<double> x;
      for (const auto& d : chain.draws) x.push_back(d.freqs(l, 0, j));
      worst = std::max(worst, std::abs(mean_of(x) - post[j] / total) / mcse_batch_means(x));
    }
  }
  return {worst < 3.0, std::to_string(chain.draws.size()) + " draws; largest deviation " + fmt(worst, 2) +
                           " MC-SE over 12 frequencies"};
}

Verdict simulator_consistency() {
  Rng rng(derive_seed(2024, 5));
  LocusLayout layout{{3}};
  AlleleFrequencies p(2, layout);
  const double rows[2][3] = {{0.2, 0.3, 0.5}, {0.6, 0.3, 0.1}};
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j) p(0, i, j) = rows[i][j];
  const std::vector<double> m = {0.4, 0.6};
  const double omega = 0.3;
  const int n = 100000;
  const auto colony = gen_colony(m, p, omega, n, rng);
  const auto pairs = canonical_genotypes(3);
  std::vector<double> observed(pairs.size(), 0.0);
  for (const auto& y : colony.individuals)
    for (std::size_t g = 0; g < pairs.size(); ++g)
      if (*y.loci[0] == pairs[g]) observed[g] += 1.0;
  double stat = 0.0;
  for (std::size_t g = 0; g < pairs.size(); ++g) {
    const double expected = n * std::exp(colony_individual_loglik(Genotype{{pairs[g]}}, omega, p, m));
    stat += (observed[g] - expected) * (observed[g] - expected) / expected;
  }
  const boost::math::chi_squared_distribution<double> chi2(static_cast<double>(pairs.size() - 1));
  const double pvalue = boost::math::cdf(boost::math::complement(chi2, stat));
  return {pvalue > 0.001, "chi-square " + fmt(stat, 2) + " on 5 df, p = " + fmt(pvalue, 4)};
}

// ---------------------------------------------------------------------------
// Scaled simulation study shared by criteria 6, 7 and 9.

struct Study {
  StudyResult high;  // fst 0.2, both priors
  StudyResult low;   // fst 0.05, both priors
};

ChainConfig study_chain() {
  ChainConfig c;
  c.iterations = 10000;
  c.burn_in = 2000;
  c.thin = 5;
  return c;
}

const Study& study() {
  static const Study s = [] {
    StudyOptions opt;
    opt.chain = study_chain();
    SimulationConfig high = scenario_config("paper-2");
    high.replicates = 10;
    high.seed = 2024;
    SimulationConfig low = scenario_config("paper-1");
    low.replicates = 10;
    low.seed = 2024;
    return Study{run_study(high, opt), run_study(low, opt)};
  }();
  return s;
}

const AggregateRow& row(const StudyResult& r, PriorKind kind, const std::string& name) {
  const auto& rows = r.aggregate.at(kind);
  return *std::find_if(rows.begin(), rows.end(), [&](const AggregateRow& a) { return a.parameter == name; });
}

Verdict scaled_study() {
  const auto& s = study();
  if (!s.high.failures.empty() || !s.low.failures.empty())
    return {false, std::to_string(s.high.failures.size() + s.low.failures.size()) + " fits failed"};
  bool pass = true;
  std::ostringstream detail;
  for (auto kind : {PriorKind::DirichletDirichlet, PriorKind::DirichletLognormal}) {
    double worst = 0.0;
    double sd_high = 0.0, sd_low = 0.0;
    for (std::size_t i = 0; i < 7; ++i) {
      const std::string name = "m[" + std::to_string(i + 1) + "]";
      worst = std::max(worst, std::abs(row(s.high, kind, name).mean - kTrueM[i]));
      sd_high += row(s.high, kind, name).sd / 7.0;
      sd_low += row(s.low, kind, name).sd / 7.0;
    }
    const double sd1 = row(s.high, kind, "m[1]").sd;
    const bool a = worst <= 0.05;
    const bool b = sd1 >= 0.02 && sd1 <= 0.06;
    const bool c = sd_high < sd_low;
    pass = pass && a && b && c;
    detail << to_string(kind) << ": (a) max |mean m_i - truth| " << fmt(worst, 3) << (a ? "" : " [fail]")
           << ", (b) SD m_1 " << fmt(sd1, 3) << (b ? "" : " [fail]") << ", (c) mean SD(m) " << fmt(sd_high, 4)
           << " (fst 0.2) vs " << fmt(sd_low, 4) << " (fst 0.05)" << (c ? "" : " [fail]")
           << (kind == PriorKind::DirichletDirichlet ? "; " : "");
  }
  return {pass, detail.str()};
}

Verdict alpha_dispersion() {
  const auto& s = study();
  bool pass = true;
  std::ostringstream detail;
  for (const char* name : {"alpha[1]", "alpha[2]"}) {
    const double dd = row(s.high, PriorKind::DirichletDirichlet, name).sd;
    const double dl = row(s.high, PriorKind::DirichletLognormal, name).sd;
    pass = pass && dd < dl;
    detail << name << " SD " << fmt(dd, 3) << " vs " << fmt(dl, 3) << "; ";
  }
  return {pass, detail.str() + "(Dirichlet-Dirichlet vs Dirichlet-lognormal, fst 0.2)"};
}

// ---------------------------------------------------------------------------
// One dataset fitted under all three priors, shared by criteria 8 and 9.

struct Comparison {
  SimulatedDataset data;
  std::vector<ChainOutput> chains;
};

const Comparison& comparison() {
  static const Comparison c = [] {
    SimulationConfig config = scenario_config("paper-1");
    config.seed = 77;
    Comparison out{simulate_dataset(config), {}};
    ChainConfig chain;  // 30000 iterations, 5000 burn-in, thin 5
    chain.seed = 78;
    for (auto kind : {PriorKind::DirichletDirichlet, PriorKind::DirichletLognormal, PriorKind::Uniform}) {
      PriorSpec prior;
      prior.kind = kind;
      out.chains.push_back(run_chain(out.data.data, prior, chain));
    }
    return out;
  }();
  return c;
}

Verdict model_indistinguishability() {
  const auto& c = comparison();
  std::vector<double> dic_values, lpml_values;
  std::ostringstream detail;
  for (const auto& chain : c.chains) {
    const auto score = score_model(chain, c.data.data);
    dic_values.push_back(score.dic);
    lpml_values.push_back(score.lpml);
    detail << score.model << " DIC " << fmt(score.dic, 1) << " LPML " << fmt(score.lpml, 1) << "; ";
  }
  const auto [dmin, dmax] = std::minmax_element(dic_values.begin(), dic_values.end());
  const auto [lmin, lmax] = std::minmax_element(lpml_values.begin(), lpml_values.end());
  const double dic_range = *dmax - *dmin, lpml_range = *lmax - *lmin;
  detail << "DIC range " << fmt(dic_range, 2) << ", LPML range " << fmt(lpml_range, 2);
  return {dic_range < 10.0 && lpml_range < 5.0, detail.str()};
}

Verdict diagnostics_oracles() {
  Rng rng(derive_seed(2024, 9));
  int hpd_mismatch = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng() % 499;
    std::vector<double> x(n);
    for (double& v : x) v = rep % 2 ? sample_normal(rng) : static_cast<double>(rng() % 25);
    const double level = 0.95;
    std::vector<double> sorted = x;
    std::sort(sorted.begin(), sorted.end());
    const auto need = static_cast<std::size_t>(std::ceil(level * n - 1e-9));
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t lo = 0; lo < n; ++lo)
      for (std::size_t hi = lo; hi < n; ++hi)
        if (hi - lo + 1 >= need) best = std::min(best, sorted[hi] - sorted[lo]);
    if (hpd_interval(x, level).width() != best) ++hpd_mismatch;
  }

  // RMSE identity on every chain of the study.
  std::size_t checked = 0;
  double worst_rmse = 0.0;
  const auto& s = study();
  for (const StudyResult* r : {&s.high, &s.low})
    for (const auto& [kind, summaries] : r->summaries)
      for (const auto& summary : summaries)
        for (const auto& p : summary.parameters) {
          if (!p.rmse) continue;
          const double bias = p.mean - *p.truth;
          const double lhs = *p.rmse * *p.rmse, rhs = p.sd * p.sd + bias * bias;
          worst_rmse = std::max(worst_rmse, std::abs(lhs - rhs) / std::max(rhs, 1e-300));
          ++checked;
        }

  double worst_dic = 0.0;
  const auto& c = comparison();
  for (const auto& chain : c.chains) {
    const auto d = dic(chain, c.data.data);
    worst_dic = std::max(worst_dic, std::abs(d.dic - (d.dbar + d.pd)));
  }
  return {hpd_mismatch == 0 && worst_rmse < 1e-12 && worst_dic < 1e-9,
          std::to_string(hpd_mismatch) + " HPD mismatches in 100; RMSE identity relative error " +
              sci(worst_rmse) + " over " + std::to_string(checked) +
              " summaries; DIC identity error " + sci(worst_dic)};
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "mixstock-acceptance-determinism";
  fs::remove_all(root);
  std::ostringstream log;
  RunConfig sim;
  sim.scenario = "paper-2";
  sim.seed = 99;
  sim.replicates = 2;
  RunConfig fit;
  fit.iterations = 1000;
  fit.burnin = 200;
  fit.seed = 100;
  int files = 0, differing = 0;
  for (const char* run : {"a", "b"}) {
    sim.out = (root / run / "data").string();
    cmd_simulate(sim, log);
    for (const char* prior : {"dirichlet-dirichlet", "dirichlet-lognormal", "uniform"}) {
      fit.prior = prior;
      fit.data_dir = (fs::path(sim.out) / "rep-001").string();
      fit.out = (root / run / prior).string();
      cmd_fit(fit, log);
    }
  }
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file()) continue;
    const auto twin = root / "b" / fs::relative(entry.path(), root / "a");
    std::string a = read_text(entry.path()), b = read_text(twin);
    // Chain metadata echoes the input paths, which name the run directory.
    if (entry.path().filename() == "run.json") {
      for (auto* text : {&a, &b}) {
        for (const char* tag : {"/a/", "/b/"})
          for (auto pos = text->find(tag); pos != std::string::npos; pos = text->find(tag)) text->replace(pos, 3, "/_/");
      }
    }
    ++files;
    if (a != b) ++differing;
  }
  fs::remove_all(root);
  return {files > 0 && differing == 0,
          std::to_string(files) + " files from simulate + fit (3 priors) compared, " + std::to_string(differing) +
              " differ"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "softmax ground truth", softmax_truth},
      {2, "Dirichlet-Dirichlet prior moments", prior_moments},
      {3, "logit transform Jacobian", jacobian},
      {4, "single-source conjugate posterior", conjugate},
      {5, "simulator matches the colony likelihood", simulator_consistency},
      {6, "scaled simulation study (10 replicates)", scaled_study},
      {7, "regression coefficient dispersion ordering", alpha_dispersion},
      {8, "model indistinguishability by DIC and LPML", model_indistinguishability},
      {9, "diagnostics oracles", diagnostics_oracles},
      {10, "byte-identical reruns", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failed;
    std::printf("criterion %2d %s  %s: %s [%.1fs]\n", c.id, v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
