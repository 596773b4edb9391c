// Apache License, Version 2.0, refer to LICENSE.txt

#include "mixstock/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "mixstock/error.hpp"
#include "mixstock/numeric.hpp"

namespace mixstock {

namespace {

double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  const double mu = mean_of(x);
  double ss = 0.0;
  for (double v : x) ss += (v - mu) * (v - mu);
  return ss / static_cast<double>(x.size() - 1);
}

bool renormalize(std::span<double> block) {
  double total = 0.0;
  for (double v : block) total += v;
  for (double& v : block) v /= total;
  return std::abs(total - 1.0) > 1e-12;
}

}  // namespace

Interval hpd_interval(std::span<const double> samples, double level) {
  if (samples.size() < 2) throw ContractError("HPD interval needs at least two draws");
  if (!(level > 0.0 && level < 1.0)) throw ContractError("HPD level must lie in (0,1)");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const auto inside =
      std::min(n, std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(level * static_cast<double>(n) - 1e-9))));
  std::size_t best = 0;
  double best_width = sorted[inside - 1] - sorted[0];
  for (std::size_t i = 1; i + inside <= n; ++i) {
    const double w = sorted[i + inside - 1] - sorted[i];
    if (w < best_width) {
      best_width = w;
      best = i;
    }
  }
  return {sorted[best], sorted[best + inside - 1]};
}

double split_rhat(std::span<const double> samples) {
  const std::size_t half = samples.size() / 2;
  if (half < 2) return 1.0;
  const auto first = samples.subspan(0, half);
  const auto second = samples.subspan(samples.size() - half, half);
  const double w = 0.5 * (sample_variance(first) + sample_variance(second));
  if (!(w > 0.0)) return 1.0;
  const double m1 = mean_of(first);
  const double m2 = mean_of(second);
  const double grand = 0.5 * (m1 + m2);
  const double n = static_cast<double>(half);
  const double b = n * ((m1 - grand) * (m1 - grand) + (m2 - grand) * (m2 - grand));
  const double var_plus = (n - 1.0) / n * w + b / n;
  return std::sqrt(var_plus / w);
}

double mcse_batch_means(std::span<const double> samples) {
  const std::size_t n = samples.size();
  const auto batches = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  if (batches < 2) return std::sqrt(n > 1 ? sample_variance(samples) / static_cast<double>(n) : 0.0);
  const std::size_t size = n / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) means[b] = mean_of(samples.subspan(b * size, size));
  return std::sqrt(sample_variance(means) / static_cast<double>(batches));
}

const ParameterSummary* PosteriorSummary::find(const std::string& name) const {
  for (const auto& p : parameters)
    if (p.name == name) return &p;
  return nullptr;
}

PosteriorSummary summarize(const ChainOutput& chain, const Truth* truth, bool include_freqs) {
  if (chain.draws.empty()) throw ContractError("cannot summarize an empty chain");
  const auto names = parameter_names(chain.draws.front());
  const std::size_t draws = chain.draws.size();
  std::vector<std::vector<double>> columns(names.size(), std::vector<double>(draws));
  for (std::size_t s = 0; s < draws; ++s) {
    const auto row = flatten(chain.draws[s]);
    for (std::size_t c = 0; c < names.size(); ++c) columns[c][s] = row[c];
  }

  PosteriorSummary out;
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (!include_freqs && names[c].starts_with("P[")) continue;
    const auto& x = columns[c];
    ParameterSummary p;
    p.name = names[c];
    p.mean = mean_of(x);
    double ss = 0.0;
    for (double v : x) ss += (v - p.mean) * (v - p.mean);
    p.sd = std::sqrt(ss / static_cast<double>(draws));
    p.hpd = draws >= 2 ? hpd_interval(x, 0.95) : Interval{x[0], x[0]};
    p.rhat = split_rhat(x);
    if (truth) {
      if (const auto it = truth->find(p.name); it != truth->end()) {
        p.truth = it->second;
        double se = 0.0;
        for (double v : x) se += (v - it->second) * (v - it->second);
        p.rmse = std::sqrt(se / static_cast<double>(draws));
      }
    }
    out.parameters.push_back(std::move(p));
  }
  return out;
}

double deviance(const ModelState& state, const DataSet& data) {
  double colony = 0.0;
  for (const auto& y : data.colony.individuals) colony += colony_individual_loglik(y, state.omega, state.freqs, state.m);
  return -2.0 * (colony + source_loglik(data.sources, state.freqs));
}

ModelState posterior_mean_state(const ChainOutput& chain, bool* renormalized) {
  if (chain.draws.empty()) throw ContractError("posterior mean of an empty chain");
  std::vector<double> mean(flatten(chain.draws.front()).size(), 0.0);
  for (const auto& d : chain.draws) {
    const auto row = flatten(d);
    for (std::size_t c = 0; c < row.size(); ++c) mean[c] += row[c];
  }
  for (double& v : mean) v /= static_cast<double>(chain.draws.size());
  ModelState s = unflatten(mean, chain.draws.front());

  bool changed = false;
  for (std::size_t l = 0; l < s.freqs.num_loci(); ++l)
    for (std::size_t i = 0; i < s.freqs.num_sources(); ++i) changed |= renormalize(s.freqs.row(l, i));
  changed |= renormalize(s.m);
  if (auto* dd = std::get_if<DirichletDirichletHyper>(&s.hyper)) changed |= renormalize(dd->phi);
  if (renormalized) *renormalized = changed;
  return s;
}

DicResult dic(const ChainOutput& chain, const DataSet& data) {
  if (chain.draws.empty()) throw ContractError("DIC of an empty chain");
  DicResult r;
  for (const auto& d : chain.draws) r.dbar += deviance(d, data);
  r.dbar /= static_cast<double>(chain.draws.size());
  const ModelState centre = posterior_mean_state(chain, &r.renormalized);
  r.pd = r.dbar - deviance(centre, data);
  r.dic = r.dbar + r.pd;
  return r;
}

LpmlResult lpml(const ChainOutput& chain, const DataSet& data) {
  if (chain.draws.empty()) throw ContractError("LPML of an empty chain");
  const std::size_t draws = chain.draws.size();
  const std::size_t count = data.colony.individuals.size();
  // neg_loglik[k][s] = -log P(y_k | draw s)
  std::vector<std::vector<double>> neg_loglik(count, std::vector<double>(draws));
  for (std::size_t s = 0; s < draws; ++s) {
    const auto& d = chain.draws[s];
    for (std::size_t k = 0; k < count; ++k)
      neg_loglik[k][s] = -colony_individual_loglik(data.colony.individuals[k], d.omega, d.freqs, d.m);
  }
  LpmlResult r;
  const double log_draws = std::log(static_cast<double>(draws));
  for (std::size_t k = 0; k < count; ++k) {
    const auto& x = neg_loglik[k];
    if (std::all_of(x.begin(), x.end(), [](double v) { return -v < std::log(std::numeric_limits<double>::min()); }))
      r.underflow.push_back(k);
    r.lpml += -(log_sum_exp(x) - log_draws);
  }
  return r;
}

ModelScore score_model(const ChainOutput& chain, const DataSet& data) {
  const DicResult d = dic(chain, data);
  return {to_string(chain.prior.kind), d.dbar, d.pd, d.dic, lpml(chain, data).lpml};
}

}  // namespace mixstock
