#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "phenogen/chem/mol_graph.h"

namespace phenogen::testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(PHENOGEN_TEST_DATA_DIR) / name;
}

// Fresh empty directory under the system temp dir, unique per test name.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("phenogen_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

// Relabels atoms by a random permutation and shuffles the bond list and
// bond endpoint order; rings are recomputed from scratch.
inline chem::MolGraph permute_graph(const chem::MolGraph& g, std::mt19937_64& rng) {
  std::vector<int> perm(g.atom_count());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  chem::MolGraph out;
  out.atoms.resize(g.atoms.size());
  for (int i = 0; i < g.atom_count(); ++i) out.atoms[perm[i]] = g.atoms[i];
  for (const auto& b : g.bonds) {
    chem::Bond nb{perm[b.a], perm[b.b], b.order};
    if (rng() & 1) std::swap(nb.a, nb.b);
    out.bonds.push_back(nb);
  }
  std::shuffle(out.bonds.begin(), out.bonds.end(), rng);
  out.rings = chem::find_rings(out.atom_count(), out.bonds);
  return out;
}

}  // namespace phenogen::testing
