// Apache License, Version 2.0, refer to LICENSE.txt

// Genetic data model and likelihoods for a colony founded by migrants from
// several source populations. All probabilities are returned in log space.
// Allele indices are 0-based internally; file formats map labels to indices.

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace mixstock {

// Number of alleles at each locus. Loci may have different allele counts.
struct LocusLayout {
  std::vector<int> alleles;

  std::size_t num_loci() const { return alleles.size(); }
  friend bool operator==(const LocusLayout&, const LocusLayout&) = default;
};

// Dense [locus][source][allele] storage.
template <typename T>
class LocusSourceTable {
 public:
  LocusSourceTable() = default;
  LocusSourceTable(std::size_t sources, LocusLayout layout, T init = T{})
      : sources_(sources), layout_(std::move(layout)) {
    offsets_.reserve(layout_.num_loci() + 1);
    std::size_t off = 0;
    for (int a : layout_.alleles) {
      offsets_.push_back(off);
      off += sources_ * static_cast<std::size_t>(a);
    }
    offsets_.push_back(off);
    data_.assign(off, init);
  }

  std::size_t num_sources() const { return sources_; }
  std::size_t num_loci() const { return layout_.num_loci(); }
  int num_alleles(std::size_t locus) const { return layout_.alleles[locus]; }
  const LocusLayout& layout() const { return layout_; }

  std::span<T> row(std::size_t locus, std::size_t source) {
    const auto a = static_cast<std::size_t>(layout_.alleles[locus]);
    return {data_.data() + offsets_[locus] + source * a, a};
  }
  std::span<const T> row(std::size_t locus, std::size_t source) const {
    const auto a = static_cast<std::size_t>(layout_.alleles[locus]);
    return {data_.data() + offsets_[locus] + source * a, a};
  }
  T& operator()(std::size_t locus, std::size_t source, std::size_t allele) {
    return row(locus, source)[allele];
  }
  const T& operator()(std::size_t locus, std::size_t source, std::size_t allele) const {
    return row(locus, source)[allele];
  }

  std::span<const T> flat() const { return data_; }
  friend bool operator==(const LocusSourceTable&, const LocusSourceTable&) = default;

 private:
  std::size_t sources_ = 0;
  LocusLayout layout_;
  std::vector<std::size_t> offsets_;
  std::vector<T> data_;
};

using AlleleCountTable = LocusSourceTable<long>;
using AlleleFrequencies = LocusSourceTable<double>;
using MixtureProportions = std::vector<double>;

// Unordered diploid call at one locus, stored canonically (first <= second).
struct AllelePair {
  int first = 0;
  int second = 0;

  AllelePair() = default;
  AllelePair(int a, int b) : first(a < b ? a : b), second(a < b ? b : a) {}
  bool homozygous() const { return first == second; }
  friend bool operator==(const AllelePair&, const AllelePair&) = default;
};

// One colony individual; std::nullopt marks a missing locus, which drops out
// of every per-locus product.
struct Genotype {
  std::vector<std::optional<AllelePair>> loci;
  friend bool operator==(const Genotype&, const Genotype&) = default;
};

struct GenotypeTable {
  LocusLayout layout;
  std::vector<Genotype> individuals;
};

// Throws InputError unless every genotype matches the layout.
void validate(const GenotypeTable& table);
// Throws InputError on negative counts.
void validate(const AlleleCountTable& counts);
// Throws InputError unless every (locus, source) row is on the open simplex
// (entries in (0,1), sum 1 within 1e-12 relative to row size).
void validate_frequencies(const AlleleFrequencies& freqs);
void validate_proportions(std::span<const double> m);
void validate_assortative(double omega);

// Probability of one locus call when both parents come from `pi` and `pj`
// (pi == pj selects the same-source formula).
double pair_probability(const AllelePair& call, std::span<const double> pi,
                        std::span<const double> pj, bool same_source);

// log P(y | both parents from source i) under Hardy-Weinberg.
double genotype_logprob_same_source(const Genotype& y, std::size_t i, const AlleleFrequencies& freqs);

// log P(y | parents from sources i and j), i != j.
double genotype_logprob_cross_source(const Genotype& y, std::size_t i, std::size_t j,
                                     const AlleleFrequencies& freqs);

// Assortative-mating mixture likelihood of one colony individual, combined
// over all I + I^2 terms with log-sum-exp.
double colony_individual_loglik(const Genotype& y, double omega, const AlleleFrequencies& freqs,
                                std::span<const double> m);

double colony_loglik(const GenotypeTable& colony, double omega, const AlleleFrequencies& freqs,
                     std::span<const double> m);

// Product-multinomial log-likelihood of source allele counts without the
// multinomial coefficient (constant in the frequencies). Returns -inf when a
// positive count meets a zero frequency.
double source_loglik(const AlleleCountTable& counts, const AlleleFrequencies& freqs);

// All canonical genotypes (a <= b) at a locus with `alleles` alleles.
std::vector<AllelePair> canonical_genotypes(int alleles);

}  // namespace mixstock
