// Apache License, Version 2.0, refer to LICENSE.txt

#include "mixstock/genetics.hpp"

#include <cmath>
#include <string>

#include "mixstock/error.hpp"
#include "mixstock/numeric.hpp"

namespace mixstock {

namespace {

void check_source(std::size_t i, const AlleleFrequencies& freqs) {
  if (i >= freqs.num_sources())
    throw InputError("source index " + std::to_string(i) + " out of range (I = " +
                     std::to_string(freqs.num_sources()) + ")");
}

void check_genotype(const Genotype& y, const AlleleFrequencies& freqs) {
  if (y.loci.size() != freqs.num_loci())
    throw InputError("genotype has " + std::to_string(y.loci.size()) + " loci, frequencies have " +
                     std::to_string(freqs.num_loci()));
  for (std::size_t l = 0; l < y.loci.size(); ++l) {
    if (!y.loci[l]) continue;
    if (y.loci[l]->first < 0 || y.loci[l]->second >= freqs.num_alleles(l))
      throw InputError("allele index out of range at locus " + std::to_string(l + 1));
  }
}

}  // namespace

void validate(const GenotypeTable& table) {
  for (std::size_t k = 0; k < table.individuals.size(); ++k) {
    const auto& y = table.individuals[k];
    if (y.loci.size() != table.layout.num_loci())
      throw InputError("individual " + std::to_string(k + 1) + " has " + std::to_string(y.loci.size()) +
                       " loci, expected " + std::to_string(table.layout.num_loci()));
    for (std::size_t l = 0; l < y.loci.size(); ++l) {
      if (!y.loci[l]) continue;
      if (y.loci[l]->first < 0 || y.loci[l]->second >= table.layout.alleles[l])
        throw InputError("individual " + std::to_string(k + 1) + ": allele index out of range at locus " +
                         std::to_string(l + 1));
    }
  }
}

void validate(const AlleleCountTable& counts) {
  for (long c : counts.flat())
    if (c < 0) throw InputError("negative allele count");
}

void validate_frequencies(const AlleleFrequencies& freqs) {
  for (std::size_t l = 0; l < freqs.num_loci(); ++l) {
    for (std::size_t i = 0; i < freqs.num_sources(); ++i) {
      double total = 0.0;
      for (double p : freqs.row(l, i)) {
        if (!(p > 0.0) || (p >= 1.0 && freqs.num_alleles(l) > 1))
          throw InputError("allele frequency outside (0,1) at locus " + std::to_string(l + 1) + ", source " +
                           std::to_string(i + 1));
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-12 * freqs.num_alleles(l))
        throw InputError("allele frequencies do not sum to 1 at locus " + std::to_string(l + 1) +
                         ", source " + std::to_string(i + 1));
    }
  }
}

void validate_proportions(std::span<const double> m) {
  double total = 0.0;
  for (double v : m) {
    if (!(v > 0.0) || (v >= 1.0 && m.size() > 1)) throw InputError("mixture proportion outside (0,1)");
    total += v;
  }
  if (m.empty() || std::abs(total - 1.0) > 1e-12 * static_cast<double>(m.size()))
    throw InputError("mixture proportions do not sum to 1");
}

void validate_assortative(double omega) {
  if (!(omega > 0.0 && omega < 1.0)) throw InputError("assortative coefficient must lie in (0,1)");
}

double pair_probability(const AllelePair& call, std::span<const double> pi, std::span<const double> pj,
                        bool same_source) {
  const auto a = static_cast<std::size_t>(call.first);
  const auto b = static_cast<std::size_t>(call.second);
  if (same_source) return (call.homozygous() ? 1.0 : 2.0) * pi[a] * pi[b];
  if (call.homozygous()) return pi[a] * pj[a];
  return pi[a] * pj[b] + pi[b] * pj[a];
}

double genotype_logprob_same_source(const Genotype& y, std::size_t i, const AlleleFrequencies& freqs) {
  check_source(i, freqs);
  check_genotype(y, freqs);
  double total = 0.0;
  for (std::size_t l = 0; l < y.loci.size(); ++l) {
    if (!y.loci[l]) continue;
    const auto pi = freqs.row(l, i);
    total += std::log(pair_probability(*y.loci[l], pi, pi, true));
  }
  return total;
}

double genotype_logprob_cross_source(const Genotype& y, std::size_t i, std::size_t j,
                                     const AlleleFrequencies& freqs) {
  if (i == j) throw ContractError("cross-source genotype probability requires distinct sources");
  check_source(i, freqs);
  check_source(j, freqs);
  check_genotype(y, freqs);
  double total = 0.0;
  for (std::size_t l = 0; l < y.loci.size(); ++l) {
    if (!y.loci[l]) continue;
    total += std::log(pair_probability(*y.loci[l], freqs.row(l, i), freqs.row(l, j), false));
  }
  return total;
}

double colony_individual_loglik(const Genotype& y, double omega, const AlleleFrequencies& freqs,
                                std::span<const double> m) {
  const std::size_t sources = freqs.num_sources();
  if (m.size() != sources)
    throw InputError("mixture proportions have " + std::to_string(m.size()) + " entries, expected " +
                     std::to_string(sources));
  check_genotype(y, freqs);
  const double log_w = std::log(omega);
  const double log_1mw = std::log1p(-omega);

  std::vector<double> terms;
  terms.reserve(sources + sources * sources);
  for (std::size_t i = 0; i < sources; ++i) {
    const double log_mi = std::log(m[i]);
    const double same = genotype_logprob_same_source(y, i, freqs);
    terms.push_back(log_w + log_mi + same);
    terms.push_back(log_1mw + 2.0 * log_mi + same);
    for (std::size_t j = 0; j < sources; ++j) {
      if (j == i) continue;
      terms.push_back(log_1mw + log_mi + std::log(m[j]) + genotype_logprob_cross_source(y, i, j, freqs));
    }
  }
  return log_sum_exp(terms);
}

double colony_loglik(const GenotypeTable& colony, double omega, const AlleleFrequencies& freqs,
                     std::span<const double> m) {
  if (colony.individuals.empty()) throw InputError("colony genotype table is empty");
  double total = 0.0;
  for (const auto& y : colony.individuals) total += colony_individual_loglik(y, omega, freqs, m);
  return total;
}

double source_loglik(const AlleleCountTable& counts, const AlleleFrequencies& freqs) {
  if (counts.num_sources() != freqs.num_sources() || !(counts.layout() == freqs.layout()))
    throw InputError("allele count table and frequencies have different dimensions");
  double total = 0.0;
  const auto n = counts.flat();
  const auto p = freqs.flat();
  for (std::size_t x = 0; x < n.size(); ++x) {
    if (n[x] == 0) continue;
    if (!(p[x] > 0.0)) return kNegInf;
    total += static_cast<double>(n[x]) * std::log(p[x]);
  }
  return total;
}

std::vector<AllelePair> canonical_genotypes(int alleles) {
  std::vector<AllelePair> out;
  for (int a = 0; a < alleles; ++a)
    for (int b = a; b < alleles; ++b) out.emplace_back(a, b);
  return out;
}

}  // namespace mixstock
