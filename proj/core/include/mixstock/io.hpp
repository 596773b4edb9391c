// Apache License, Version 2.0, refer to LICENSE.txt

// Text file formats. All tables are tab-separated with a mandatory header
// line (comma-separated files are accepted on input); blank lines and lines
// starting with '#' are ignored.
//
//   sources     source  locus  allele  count
//   colony      individual  locus  allele1  allele2   (missing loci omitted)
//   covariates  source  covariate  value               (raw values)
//
// Chain directories hold draws.tsv (iteration, every parameter, loglik) and
// run.json (prior, configuration, acceptance rates, data fingerprint).

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mixstock/diagnostics.hpp"
#include "mixstock/model.hpp"
#include "mixstock/sampler.hpp"
#include "mixstock/simulator.hpp"

namespace mixstock {

// Labels for every index used by a DataSet. Sources and loci are ordered by
// first appearance in the source file, alleles by first appearance at their
// locus in the source file, then any colony-only alleles.
struct LabelRegistry {
  std::vector<std::string> sources;
  std::vector<std::string> loci;
  std::vector<std::vector<std::string>> alleles;
  std::vector<std::string> individuals;
  friend bool operator==(const LabelRegistry&, const LabelRegistry&) = default;
};

struct DataBundle {
  DataSet data;
  LabelRegistry labels;
  std::vector<std::string> warnings;
};

bool same_data(const DataBundle& a, const DataBundle& b);

struct BundlePaths {
  std::filesystem::path sources;
  std::filesystem::path colony;
  std::filesystem::path covariates;  // may be empty

  // sources.tsv, colony.tsv and covariates.tsv (if present) inside `dir`.
  static BundlePaths in_directory(const std::filesystem::path& dir);
};

// Parses and cross-validates the three files. Colony alleles unseen in every
// source are padded with zero counts and reported in `warnings`. Throws
// InputError (with line numbers where applicable).
DataBundle load_bundle(const BundlePaths& paths);

// Writes sources.tsv, colony.tsv and covariates.tsv into `dir`.
void write_bundle(const DataBundle& bundle, const std::filesystem::path& dir);

// Hex FNV-1a digest of the canonical text form of the bundle.
std::string data_fingerprint(const DataBundle& bundle);

// Labels S1.., L1.., A1.., K1.. for a simulated dataset.
DataBundle bundle_from_simulation(const SimulatedDataset& dataset);

// Ground-truth sidecar: seed, replicate, configuration and every true
// parameter value keyed by parameter name.
void write_truth(const std::filesystem::path& path, const SimulatedDataset& dataset, const SimulationConfig& config,
                 std::size_t replicate);
Truth read_truth(const std::filesystem::path& path);

struct ChainFile {
  ChainOutput chain;
  std::string data_fingerprint;
  std::map<std::string, std::string> inputs;
};

// `inputs` (e.g. data paths) are echoed into run.json so the run can be
// repeated from the metadata alone.
void write_chain(const std::filesystem::path& dir, const ChainOutput& chain, const DataBundle& bundle,
                 const std::map<std::string, std::string>& inputs);
// Throws InputError for a missing or empty draws table or a header that
// does not match the metadata.
ChainFile read_chain(const std::filesystem::path& dir);

// Shortest round-trip decimal form.
std::string format_double(double value);

}  // namespace mixstock
