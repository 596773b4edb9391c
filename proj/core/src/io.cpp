// Apache License, Version 2.0, refer to LICENSE.txt

#include "mixstock/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "mixstock/error.hpp"

namespace mixstock {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Row {
  long line = 0;
  std::vector<std::string> fields;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  const char sep = line.find('\t') != std::string::npos ? '\t' : ',';
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(std::string_view(line).substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure("cannot write " + path.string());
  out << text;
  if (!out) throw RuntimeFailure("failed writing " + path.string());
}

// Rows after the header; throws unless the header matches `columns`. With
// `allow_empty`, a file without any content yields no rows.
std::vector<Row> read_table(const fs::path& path, const std::vector<std::string>& columns, bool allow_empty = false) {
  std::istringstream in(read_file(path));
  std::string line;
  long number = 0;
  bool have_header = false;
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = split_fields(line);
    if (!have_header) {
      if (fields != columns) {
        std::string expected;
        for (const auto& c : columns) expected += (expected.empty() ? "" : " ") + c;
        throw InputError(path.string() + ": header must be '" + expected + "'", number);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != columns.size())
      throw InputError(path.string() + ": expected " + std::to_string(columns.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       number);
    for (const auto& f : fields)
      if (f.empty()) throw InputError(path.string() + ": empty field", number);
    rows.push_back({number, std::move(fields)});
  }
  if (!have_header && !allow_empty) throw InputError(path.string() + ": missing header line");
  return rows;
}

long parse_count(const std::string& s, const fs::path& path, long line) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0)
    throw InputError(path.string() + ": count must be a non-negative integer, got '" + s + "'", line);
  return v;
}

double parse_real(const std::string& s, const std::string& where, long line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InputError(where + ": not a number '" + s + "'", line);
  return v;
}

// Insertion-ordered label -> index map.
class Registry {
 public:
  std::size_t add(const std::string& label) {
    const auto [it, inserted] = index_.try_emplace(label, labels_.size());
    if (inserted) labels_.push_back(label);
    return it->second;
  }
  std::optional<std::size_t> find(const std::string& label) const {
    const auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

std::string sources_text(const DataBundle& b) {
  std::string out = "source\tlocus\tallele\tcount\n";
  const auto& n = b.data.sources;
  for (std::size_t i = 0; i < n.num_sources(); ++i)
    for (std::size_t l = 0; l < n.num_loci(); ++l)
      for (int j = 0; j < n.num_alleles(l); ++j)
        out += b.labels.sources[i] + '\t' + b.labels.loci[l] + '\t' + b.labels.alleles[l][static_cast<std::size_t>(j)] +
               '\t' + std::to_string(n(l, i, static_cast<std::size_t>(j))) + '\n';
  return out;
}

std::string colony_text(const DataBundle& b) {
  std::string out = "individual\tlocus\tallele1\tallele2\n";
  const auto& ind = b.data.colony.individuals;
  for (std::size_t k = 0; k < ind.size(); ++k)
    for (std::size_t l = 0; l < ind[k].loci.size(); ++l) {
      const auto& call = ind[k].loci[l];
      if (!call) continue;
      const auto& labels = b.labels.alleles[l];
      out += b.labels.individuals[k] + '\t' + b.labels.loci[l] + '\t' + labels[static_cast<std::size_t>(call->first)] +
             '\t' + labels[static_cast<std::size_t>(call->second)] + '\n';
    }
  return out;
}

std::string covariates_text(const DataBundle& b) {
  std::string out = "source\tcovariate\tvalue\n";
  const auto& g = b.data.covariates;
  for (std::size_t i = 0; i < g.num_sources() && !g.empty(); ++i)
    for (std::size_t r = 0; r < g.num_covariates(); ++r)
      out += b.labels.sources[i] + '\t' + g.names()[r] + '\t' + format_double(g.raw()[r][i]) + '\n';
  return out;
}

json tuning_json(const BlockTuning& t) { return {{"step", t.step}, {"style", to_string(t.style)}}; }

BlockTuning tuning_from(const json& j) {
  return {j.at("step").get<double>(), parse_proposal_style(j.at("style").get<std::string>())};
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

bool same_data(const DataBundle& a, const DataBundle& b) {
  return a.labels == b.labels && a.data.sources == b.data.sources && a.data.colony.layout == b.data.colony.layout &&
         a.data.colony.individuals == b.data.colony.individuals && a.data.covariates == b.data.covariates;
}

BundlePaths BundlePaths::in_directory(const fs::path& dir) {
  BundlePaths p{dir / "sources.tsv", dir / "colony.tsv", {}};
  if (fs::exists(dir / "covariates.tsv")) p.covariates = dir / "covariates.tsv";
  return p;
}

DataBundle load_bundle(const BundlePaths& paths) {
  DataBundle bundle;
  Registry sources, loci;
  std::vector<Registry> alleles;

  struct CountEntry {
    std::size_t source, locus, allele;
    long count;
    long line;
  };
  std::vector<CountEntry> entries;
  for (const auto& row : read_table(paths.sources, {"source", "locus", "allele", "count"})) {
    const std::size_t i = sources.add(row.fields[0]);
    const std::size_t l = loci.add(row.fields[1]);
    if (alleles.size() < loci.size()) alleles.resize(loci.size());
    const std::size_t j = alleles[l].add(row.fields[2]);
    entries.push_back({i, l, j, parse_count(row.fields[3], paths.sources, row.line), row.line});
  }
  if (sources.size() == 0) throw InputError(paths.sources.string() + ": no source allele counts");

  struct CallEntry {
    std::size_t individual, locus;
    std::size_t a1, a2;
    long line;
  };
  Registry individuals;
  std::vector<CallEntry> calls;
  std::vector<bool> locus_seen(loci.size(), false);
  for (const auto& row : read_table(paths.colony, {"individual", "locus", "allele1", "allele2"})) {
    const auto l = loci.find(row.fields[1]);
    if (!l)
      throw InputError(paths.colony.string() + ": colony locus '" + row.fields[1] + "' does not appear in the source data",
                       row.line);
    locus_seen[*l] = true;
    std::size_t a[2];
    for (int h = 0; h < 2; ++h) {
      const std::string& label = row.fields[2 + h];
      if (auto found = alleles[*l].find(label)) {
        a[h] = *found;
      } else {
        a[h] = alleles[*l].add(label);
        bundle.warnings.push_back("allele '" + label + "' at locus '" + row.fields[1] +
                                  "' is absent from every source; padded with zero counts");
      }
    }
    calls.push_back({individuals.add(row.fields[0]), *l, a[0], a[1], row.line});
  }
  if (individuals.size() == 0) throw InputError(paths.colony.string() + ": no colony genotypes");
  for (std::size_t l = 0; l < loci.size(); ++l)
    if (!locus_seen[l])
      throw InputError("locus '" + loci.labels()[l] + "' has source counts but no colony genotypes (colony has " +
                       std::to_string(std::count(locus_seen.begin(), locus_seen.end(), true)) + " loci, sources have " +
                       std::to_string(loci.size()) + ")");

  LocusLayout layout;
  for (const auto& r : alleles) layout.alleles.push_back(static_cast<int>(r.size()));
  bundle.data.sources = AlleleCountTable(sources.size(), layout, 0);
  std::vector<bool> filled(bundle.data.sources.flat().size(), false);
  for (const auto& e : entries) {
    auto& cell = bundle.data.sources(e.locus, e.source, e.allele);
    const auto offset = static_cast<std::size_t>(&cell - bundle.data.sources.flat().data());
    if (filled[offset]) throw InputError(paths.sources.string() + ": duplicate (source, locus, allele) row", e.line);
    filled[offset] = true;
    cell = e.count;
  }

  bundle.data.colony.layout = layout;
  bundle.data.colony.individuals.assign(individuals.size(), Genotype{std::vector<std::optional<AllelePair>>(loci.size())});
  for (const auto& c : calls) {
    auto& slot = bundle.data.colony.individuals[c.individual].loci[c.locus];
    if (slot) throw InputError(paths.colony.string() + ": duplicate genotype for one individual and locus", c.line);
    slot = AllelePair(static_cast<int>(c.a1), static_cast<int>(c.a2));
  }

  bundle.data.covariates = CovariateMatrix::intercept_only(sources.size());
  if (!paths.covariates.empty()) {
    Registry names;
    std::map<std::pair<std::size_t, std::size_t>, double> values;
    for (const auto& row : read_table(paths.covariates, {"source", "covariate", "value"}, true)) {
      const auto i = sources.find(row.fields[0]);
      if (!i) throw InputError(paths.covariates.string() + ": unknown source '" + row.fields[0] + "'", row.line);
      const std::size_t r = names.add(row.fields[1]);
      if (!values.emplace(std::pair{r, *i}, parse_real(row.fields[2], paths.covariates.string(), row.line)).second)
        throw InputError(paths.covariates.string() + ": duplicate (source, covariate) row", row.line);
    }
    if (names.size() > 0) {
      std::vector<std::vector<double>> raw(names.size(), std::vector<double>(sources.size()));
      for (std::size_t r = 0; r < names.size(); ++r)
        for (std::size_t i = 0; i < sources.size(); ++i) {
          const auto it = values.find({r, i});
          if (it == values.end())
            throw InputError(paths.covariates.string() + ": covariate '" + names.labels()[r] + "' missing for source '" +
                             sources.labels()[i] + "'");
          raw[r][i] = it->second;
        }
      bundle.data.covariates = CovariateMatrix::from_raw(names.labels(), std::move(raw));
    }
  }

  bundle.labels.sources = sources.labels();
  bundle.labels.loci = loci.labels();
  for (const auto& r : alleles) bundle.labels.alleles.push_back(r.labels());
  bundle.labels.individuals = individuals.labels();
  return bundle;
}

void write_bundle(const DataBundle& bundle, const fs::path& dir) {
  write_file(dir / "sources.tsv", sources_text(bundle));
  write_file(dir / "colony.tsv", colony_text(bundle));
  write_file(dir / "covariates.tsv", covariates_text(bundle));
}

std::string data_fingerprint(const DataBundle& bundle) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const std::string& part : {sources_text(bundle), colony_text(bundle), covariates_text(bundle)}) {
    for (unsigned char c : part) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

DataBundle bundle_from_simulation(const SimulatedDataset& dataset) {
  DataBundle b;
  b.data = dataset.data;
  const auto& n = dataset.data.sources;
  for (std::size_t i = 0; i < n.num_sources(); ++i) b.labels.sources.push_back("S" + std::to_string(i + 1));
  for (std::size_t l = 0; l < n.num_loci(); ++l) {
    b.labels.loci.push_back("L" + std::to_string(l + 1));
    std::vector<std::string> a;
    for (int j = 0; j < n.num_alleles(l); ++j) a.push_back("A" + std::to_string(j + 1));
    b.labels.alleles.push_back(std::move(a));
  }
  for (std::size_t k = 0; k < dataset.data.colony.individuals.size(); ++k)
    b.labels.individuals.push_back("K" + std::to_string(k + 1));
  return b;
}

void write_truth(const fs::path& path, const SimulatedDataset& dataset, const SimulationConfig& config,
                 std::size_t replicate) {
  json params = json::object();
  for (const auto& [name, value] : dataset.truth()) params[name] = value;
  json j = {
      {"seed", config.seed},
      {"replicate", replicate + 1},
      {"config",
       {{"sources", config.sources},
        {"loci", config.loci},
        {"alleles", config.alleles},
        {"fst", config.fst},
        {"allele_total", config.allele_total},
        {"colony_size", config.colony_size},
        {"omega", config.omega},
        {"alpha", config.alpha}}},
      {"parameters", params},
  };
  write_file(path, j.dump(2) + "\n");
}

Truth read_truth(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  if (!j.contains("parameters")) throw InputError(path.string() + ": no 'parameters' object");
  Truth t;
  for (const auto& [name, value] : j.at("parameters").items()) t[name] = value.get<double>();
  return t;
}

void write_chain(const fs::path& dir, const ChainOutput& chain, const DataBundle& bundle,
                 const std::map<std::string, std::string>& inputs) {
  const ModelState& shape = chain.draws.empty() ? initial_state(bundle.data, chain.prior) : chain.draws.front();
  const auto names = parameter_names(shape);

  std::string draws = "iteration";
  for (const auto& n : names) draws += '\t' + n;
  draws += "\tloglik\n";
  for (std::size_t s = 0; s < chain.draws.size(); ++s) {
    draws += std::to_string(chain.iterations[s]);
    for (double v : flatten(chain.draws[s])) draws += '\t' + format_double(v);
    draws += '\t' + format_double(chain.loglik[s]) + '\n';
  }

  const auto& c = chain.config;
  json meta = {
      {"prior", to_string(chain.prior.kind)},
      {"prior_constants",
       {{"alpha_variance", chain.prior.alpha_variance},
        {"tau_shape", chain.prior.tau_shape},
        {"tau_rate", chain.prior.tau_rate}}},
      {"seed", c.seed},
      {"iterations", c.iterations},
      {"burn_in", c.burn_in},
      {"thin", c.thin},
      {"adapt_window", c.adapt_window},
      {"tuning",
       {{"P", tuning_json(c.freqs)},
        {"m", tuning_json(c.proportions)},
        {"omega", tuning_json(c.omega)},
        {"phi", tuning_json(c.phi)},
        {"rho", tuning_json(c.rho)},
        {"alpha", tuning_json(c.alpha)},
        {"psi", tuning_json(c.psi)},
        {"tau", tuning_json(c.tau)}}},
      {"acceptance", chain.acceptance},
      {"draws", chain.draws.size()},
      {"data_fingerprint", data_fingerprint(bundle)},
      {"sources", bundle.labels.sources},
      {"loci", bundle.labels.loci},
      {"alleles_per_locus", bundle.data.sources.layout().alleles},
      {"covariates", bundle.data.covariates.names()},
      {"inputs", inputs},
  };
  write_file(dir / "draws.tsv", draws);
  write_file(dir / "run.json", meta.dump(2) + "\n");
}

ChainFile read_chain(const fs::path& dir) {
  json meta;
  try {
    meta = json::parse(read_file(dir / "run.json"));
  } catch (const json::exception& e) {
    throw InputError((dir / "run.json").string() + ": " + e.what());
  }

  ChainFile out;
  try {
    auto& c = out.chain.config;
    out.chain.prior.kind = parse_prior_kind(meta.at("prior").get<std::string>());
    const auto& pc = meta.at("prior_constants");
    out.chain.prior.alpha_variance = pc.at("alpha_variance").get<double>();
    out.chain.prior.tau_shape = pc.at("tau_shape").get<double>();
    out.chain.prior.tau_rate = pc.at("tau_rate").get<double>();
    c.seed = meta.at("seed").get<std::uint64_t>();
    c.iterations = meta.at("iterations").get<long>();
    c.burn_in = meta.at("burn_in").get<long>();
    c.thin = meta.at("thin").get<long>();
    c.adapt_window = meta.at("adapt_window").get<long>();
    const auto& t = meta.at("tuning");
    c.freqs = tuning_from(t.at("P"));
    c.proportions = tuning_from(t.at("m"));
    c.omega = tuning_from(t.at("omega"));
    c.phi = tuning_from(t.at("phi"));
    c.rho = tuning_from(t.at("rho"));
    c.alpha = tuning_from(t.at("alpha"));
    c.psi = tuning_from(t.at("psi"));
    c.tau = tuning_from(t.at("tau"));
    out.chain.acceptance = meta.at("acceptance").get<std::map<std::string, double>>();
    out.data_fingerprint = meta.at("data_fingerprint").get<std::string>();
    out.inputs = meta.at("inputs").get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw InputError((dir / "run.json").string() + ": " + e.what());
  }

  // Shape of one draw, from the metadata alone.
  const std::size_t sources = meta.at("sources").size();
  LocusLayout layout{meta.at("alleles_per_locus").get<std::vector<int>>()};
  const std::size_t covariates = meta.at("covariates").size();
  ModelState shape;
  shape.freqs = AlleleFrequencies(sources, layout, 0.0);
  shape.m.assign(sources, 0.0);
  const std::vector<double> alpha(covariates + 1, 0.0);
  if (out.chain.prior.kind == PriorKind::DirichletDirichlet)
    shape.hyper = DirichletDirichletHyper{0.5, std::vector<double>(sources, 0.0), alpha};
  else if (out.chain.prior.kind == PriorKind::DirichletLognormal)
    shape.hyper = DirichletLognormalHyper{std::vector<double>(sources, 0.0), 1.0, alpha};
  const auto names = parameter_names(shape);

  const fs::path draws_path = dir / "draws.tsv";
  std::istringstream in(read_file(draws_path));
  std::string line;
  long number = 0;
  bool have_header = false;
  std::vector<double> values(names.size());
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (!have_header) {
      if (fields.size() != names.size() + 2 || fields.front() != "iteration" || fields.back() != "loglik" ||
          !std::equal(names.begin(), names.end(), fields.begin() + 1))
        throw InputError(draws_path.string() + ": columns do not match run.json", number);
      have_header = true;
      continue;
    }
    if (fields.size() != names.size() + 2)
      throw InputError(draws_path.string() + ": wrong number of fields", number);
    out.chain.iterations.push_back(parse_count(fields.front(), draws_path, number));
    for (std::size_t c = 0; c < names.size(); ++c) values[c] = parse_real(fields[c + 1], draws_path.string(), number);
    out.chain.draws.push_back(unflatten(values, shape));
    out.chain.loglik.push_back(parse_real(fields.back(), draws_path.string(), number));
  }
  if (!have_header) throw InputError(draws_path.string() + ": missing header line");
  if (out.chain.draws.empty()) throw InputError(draws_path.string() + ": chain has no draws");
  if (out.chain.draws.size() != meta.at("draws").get<std::size_t>())
    throw InputError(draws_path.string() + ": draw count does not match run.json");
  return out;
}

}  // namespace mixstock
