#include "phenogen/io/corpus.h"

#include <array>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "phenogen/chem/canonical.h"
#include "phenogen/chem/smiles_parser.h"
#include "phenogen/chem/tokenizer.h"
#include "phenogen/chem/valence.h"
#include "phenogen/error.h"
#include "phenogen/hash.h"

namespace phenogen::io {
namespace {

struct RingCore {
  std::vector<std::string> atoms;  // ring atoms in order; a ring bond joins last and first
};

const std::vector<RingCore>& cores() {
  static const std::vector<RingCore> kCores = {
      {{"c", "c", "c", "c", "c", "c"}}, {{"c", "c", "n", "c", "c", "c"}}, {{"C", "C", "C", "C", "C", "C"}},
      {{"C", "C", "N", "C", "C", "C"}}, {{"c", "c", "o", "c", "c"}},      {{"C", "C", "O", "C", "C"}},
      {{"c", "c", "s", "c", "c"}},      {{"C", "C", "C", "C", "C"}},      {{"c", "n", "c", "c", "n", "c"}},
  };
  return kCores;
}

const std::array<const char*, 16> kSubstituents = {"C",   "CC",      "O",       "N",  "F",  "Cl",     "OC",    "C(=O)O",
                                                   "C#N", "C(=O)N",  "CCO",     "CN", "Br", "C(C)C",  "C(F)(F)F", "S(C)(=O)=O"};
const std::array<const char*, 7> kLinkers = {"", "C", "CC", "C(=O)N", "O", "N", "C(=O)"};
const std::array<const char*, 6> kTails = {"CCC", "CCO", "CC(C)C", "CCN", "OCC", "CCCC"};

std::string ring_text(const RingCore& core, int digit, std::mt19937_64& rng, int max_subs) {
  const int n = static_cast<int>(core.atoms.size());
  std::vector<std::string> branch(n);
  std::uniform_int_distribution<int> pos(1, n - 1);
  std::uniform_int_distribution<int> sub(0, static_cast<int>(kSubstituents.size()) - 1);
  const int subs = std::uniform_int_distribution<int>(0, max_subs)(rng);
  for (int k = 0; k < subs; ++k) branch[pos(rng)] = kSubstituents[sub(rng)];
  std::string out = core.atoms[0] + std::to_string(digit);
  for (int i = 1; i < n; ++i) {
    out += core.atoms[i];
    if (i == n - 1) out += std::to_string(digit);
    if (!branch[i].empty()) out += "(" + branch[i] + ")";
  }
  return out;
}

std::string random_molecule(std::mt19937_64& rng) {
  auto pick = [&](auto n) { return static_cast<int>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)); };
  const int kind = pick(std::size_t{10});
  const RingCore& a = cores()[pick(cores().size())];
  if (kind < 2) {
    // acyclic: a tail with one substituent
    return std::string(kTails[pick(kTails.size())]) + kSubstituents[pick(kSubstituents.size())];
  }
  std::string mol = ring_text(a, 1, rng, 2);
  if (kind < 7) {
    const RingCore& b = cores()[pick(cores().size())];
    mol += kLinkers[pick(kLinkers.size())] + ring_text(b, 2, rng, 1);
  }
  if (kind >= 5) mol = std::string(kSubstituents[pick(kSubstituents.size())]) + mol;
  return mol;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoFailure, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::kIoFailure, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(Errc::kIoFailure, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(Errc::kIoFailure, "cannot move " + tmp.string() + " to " + path.string());
  }
}

CorpusLoad filter_corpus(const std::vector<std::string>& lines, const chem::Vocabulary& vocab, int max_len) {
  CorpusLoad out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string& s = lines[i];
    std::string why;
    try {
      const chem::MolGraph g = chem::parse_smiles(s);
      const chem::ValenceVerdict v = chem::check_valence(g);
      if (!v.valid) why = v.violations.front().message;
      else chem::tokenize(s, vocab, max_len);
    } catch (const Error& e) {
      why = e.what();
    }
    if (why.empty()) {
      out.smiles.push_back(s);
    } else {
      ++out.skipped;
      out.warnings.push_back("line " + std::to_string(i + 1) + " skipped: " + why);
    }
  }
  return out;
}

CorpusLoad load_corpus(const std::filesystem::path& path, const chem::Vocabulary& vocab, int max_len) {
  const std::string text = read_file(path);
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    lines.push_back(line);
  }
  CorpusLoad out = filter_corpus(lines, vocab, max_len);
  if (out.smiles.empty()) throw Error(Errc::kEmptyAfterFiltering, "no valid SMILES in " + path.string());
  return out;
}

std::vector<std::string> synth_corpus(int n, std::uint64_t seed) {
  if (n < 0) throw Error(Errc::kInvalidArgument, "corpus size must be non-negative");
  std::mt19937_64 rng(derive_seed(seed, fnv1a(std::string_view("corpus"))));
  const chem::Vocabulary& vocab = chem::Vocabulary::default_vocabulary();
  std::vector<std::string> out;
  std::set<std::string> keys;
  long attempts = 0;
  while (static_cast<int>(out.size()) < n) {
    if (++attempts > 1000L * (n + 10)) throw Error(Errc::kInvalidArgument, "could not assemble enough molecules");
    const std::string s = random_molecule(rng);
    try {
      const chem::MolGraph g = chem::parse_smiles(s);
      if (!chem::check_valence(g).valid) continue;
      chem::tokenize(s, vocab);
      if (!keys.insert(chem::canonical_key(g)).second) continue;
    } catch (const Error&) {
      continue;
    }
    out.push_back(s);
  }
  return out;
}

void write_smiles_file(const std::filesystem::path& path, const std::vector<std::string>& smiles) {
  std::string text;
  for (const auto& s : smiles) text += s + "\n";
  write_file_atomic(path, text);
}

}  // namespace phenogen::io
