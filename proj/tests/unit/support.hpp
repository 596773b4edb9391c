// Apache License, Version 2.0, refer to LICENSE.txt

// Small builders shared by the unit tests.

#pragma once

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "mixstock/genetics.hpp"
#include "mixstock/random.hpp"

namespace mixstock::testing {

// rows[l][i] is the allele-frequency vector of source i at locus l.
inline AlleleFrequencies make_freqs(const std::vector<std::vector<std::vector<double>>>& rows) {
  LocusLayout layout;
  for (const auto& locus : rows) layout.alleles.push_back(static_cast<int>(locus.front().size()));
  AlleleFrequencies freqs(rows.front().size(), layout);
  for (std::size_t l = 0; l < rows.size(); ++l)
    for (std::size_t i = 0; i < rows[l].size(); ++i)
      for (std::size_t a = 0; a < rows[l][i].size(); ++a) freqs(l, i, a) = rows[l][i][a];
  return freqs;
}

// One allele pair per locus, 0-based.
inline Genotype make_genotype(const std::vector<std::pair<int, int>>& pairs) {
  Genotype g;
  for (auto [a, b] : pairs) g.loci.emplace_back(AllelePair(a, b));
  return g;
}

inline AlleleFrequencies random_freqs(std::size_t sources, const LocusLayout& layout, Rng& rng,
                                      double concentration = 1.0) {
  AlleleFrequencies freqs(sources, layout);
  for (std::size_t l = 0; l < layout.num_loci(); ++l)
    for (std::size_t i = 0; i < sources; ++i) {
      const std::vector<double> alpha(static_cast<std::size_t>(layout.alleles[l]), concentration);
      const auto p = sample_dirichlet(rng, alpha);
      std::copy(p.begin(), p.end(), freqs.row(l, i).begin());
    }
  return freqs;
}

inline std::vector<double> random_simplex(std::size_t n, Rng& rng, double concentration = 1.0) {
  const std::vector<double> alpha(n, concentration);
  return sample_dirichlet(rng, alpha);
}

inline double mean_of(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0) / x.size(); }

inline double variance_of(std::span<const double> x) {
  const double mu = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - mu) * (v - mu);
  return s / (x.size() - 1);
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mixstock-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace mixstock::testing
