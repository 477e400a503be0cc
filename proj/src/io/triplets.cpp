#include "phenogen/io/triplets.h"

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "phenogen/chem/descriptors.h"
#include "phenogen/chem/smiles_parser.h"
#include "phenogen/error.h"
#include "phenogen/hash.h"
#include "phenogen/io/corpus.h"

namespace phenogen::io {
namespace {

constexpr int kDescriptorCount = 8;

std::vector<double> scaled_descriptors(const std::string& smiles) {
  const chem::DescriptorVector d = chem::compute_descriptors(chem::parse_smiles(smiles));
  return {d.mw / 100.0, d.logp_proxy, static_cast<double>(d.hbd), static_cast<double>(d.hba),
          d.psa_proxy / 20.0, static_cast<double>(d.rot_bonds), static_cast<double>(d.arom_rings),
          d.heavy_atoms / 10.0};
}

// Fixed projections derived from the seed: P is phi_dim × 8, W is G × phi_dim.
struct Projections {
  std::vector<double> p;
  std::vector<double> w;
};

Projections projections(const SynthConfig& c) {
  Projections out;
  std::mt19937_64 rng(derive_seed(c.seed, fnv1a(std::string_view("projection"))));
  std::normal_distribution<double> n01(0.0, 1.0);
  for (int i = 0; i < c.phi_dim * kDescriptorCount; ++i) out.p.push_back(n01(rng) / std::sqrt(double{kDescriptorCount}));
  for (int i = 0; i < c.genes * c.phi_dim; ++i) out.w.push_back(n01(rng) / std::sqrt(static_cast<double>(c.phi_dim)));
  return out;
}

std::vector<double> delta_from(const std::vector<double>& desc, const Projections& pr, const SynthConfig& c) {
  std::vector<double> phi(c.phi_dim, 0.0);
  for (int i = 0; i < c.phi_dim; ++i) {
    for (int k = 0; k < kDescriptorCount; ++k) phi[i] += pr.p[i * kDescriptorCount + k] * desc[k];
  }
  std::vector<double> delta(c.genes, 0.0);
  for (int g = 0; g < c.genes; ++g) {
    for (int i = 0; i < c.phi_dim; ++i) delta[g] += pr.w[g * c.phi_dim + i] * phi[i];
  }
  return delta;
}

void validate(const SynthConfig& c) {
  if (c.genes < 8) throw Error(Errc::kInvalidArgument, "synthetic triplets need at least 8 genes");
  if (c.cell_lines < 1 || c.phi_dim < 1) throw Error(Errc::kInvalidArgument, "cell_lines and phi_dim must be positive");
  if (!(c.noise >= 0.0)) throw Error(Errc::kInvalidArgument, "noise must be non-negative");
}

std::string join_floats(const std::vector<double>& v) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    if (i) out += ' ';
    out += buf;
  }
  return out;
}

std::vector<double> parse_floats(const std::string& field, int line_no) {
  std::vector<double> out;
  std::istringstream in(field);
  for (std::string tok; in >> tok;) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw Error(Errc::kParseFailure, "line " + std::to_string(line_no) + ": bad number '" + tok + "'");
    }
  }
  return out;
}

}  // namespace

std::vector<double> synthetic_delta(const std::string& smiles, const SynthConfig& config) {
  validate(config);
  return delta_from(scaled_descriptors(smiles), projections(config), config);
}

std::vector<gen::TripletRecord> synth_triplets(const std::vector<std::string>& corpus, const SynthConfig& c) {
  validate(c);
  if (corpus.empty()) throw Error(Errc::kInvalidArgument, "synthetic triplets need a non-empty corpus");
  const Projections pr = projections(c);
  std::vector<std::vector<double>> baselines;
  for (int cell = 0; cell < c.cell_lines; ++cell) {
    std::mt19937_64 rng(derive_seed(c.seed, fnv1a(std::string_view("cell")), static_cast<std::uint64_t>(cell)));
    std::normal_distribution<double> n01(0.0, 1.0);
    std::vector<double> base(c.genes);
    for (double& x : base) x = n01(rng);
    baselines.push_back(std::move(base));
  }
  std::vector<gen::TripletRecord> out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    std::mt19937_64 rng(derive_seed(c.seed, fnv1a(std::string_view("noise")), i));
    std::normal_distribution<double> n01(0.0, 1.0);
    const std::vector<double> delta = delta_from(scaled_descriptors(corpus[i]), pr, c);
    gen::TripletRecord t;
    t.smiles = corpus[i];
    t.unperturbed = baselines[i % baselines.size()];
    t.perturbed.resize(c.genes);
    for (int g = 0; g < c.genes; ++g) {
      const double noise = c.noise > 0.0 ? c.noise * n01(rng) : 0.0;
      t.perturbed[g] = t.unperturbed[g] + delta[g] + noise;
    }
    t.provenance = "synthetic";
    out.push_back(std::move(t));
  }
  return out;
}

void write_triplets(const std::filesystem::path& path, const std::vector<gen::TripletRecord>& triplets, int genes,
                    std::optional<std::uint64_t> seed) {
  std::string text = std::to_string(genes) + "\t" + std::to_string(triplets.size()) + "\t" +
                     (seed ? std::to_string(*seed) : std::string("-")) + "\n";
  for (const auto& t : triplets) {
    if (static_cast<int>(t.perturbed.size()) != genes || static_cast<int>(t.unperturbed.size()) != genes) {
      throw Error(Errc::kGeneCountMismatch, "triplet for " + t.smiles + " does not have " + std::to_string(genes) + " genes");
    }
    text += t.smiles + "\t" + join_floats(t.perturbed) + "\t" + join_floats(t.unperturbed) + "\n";
  }
  write_file_atomic(path, text);
}

TripletFile read_triplets(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  TripletFile out;
  if (!std::getline(in, line)) throw Error(Errc::kParseFailure, path.string() + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    std::istringstream h(line);
    std::string g, count, seed;
    if (!std::getline(h, g, '\t') || !std::getline(h, count, '\t') || !std::getline(h, seed)) {
      throw Error(Errc::kParseFailure, path.string() + ": header must be G<TAB>count<TAB>seed");
    }
    try {
      out.genes = std::stoi(g);
      if (seed != "-") out.seed = std::stoull(seed);
    } catch (const std::exception&) {
      throw Error(Errc::kParseFailure, path.string() + ": bad header '" + line + "'");
    }
    const std::size_t expected = std::stoul(count);
    out.records.reserve(expected);
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw Error(Errc::kParseFailure, "line " + std::to_string(line_no) + ": expected 3 fields");
    gen::TripletRecord t;
    t.smiles = line.substr(0, t1);
    t.perturbed = parse_floats(line.substr(t1 + 1, t2 - t1 - 1), line_no);
    t.unperturbed = parse_floats(line.substr(t2 + 1), line_no);
    t.provenance = out.seed ? "synthetic" : "imported";
    if (static_cast<int>(t.perturbed.size()) != out.genes || static_cast<int>(t.unperturbed.size()) != out.genes) {
      throw Error(Errc::kGeneCountMismatch, "line " + std::to_string(line_no) + ": expected " +
                                                std::to_string(out.genes) + " values per profile");
    }
    out.records.push_back(std::move(t));
  }
  return out;
}

}  // namespace phenogen::io
