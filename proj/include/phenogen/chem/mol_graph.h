#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace phenogen::chem {

enum class BondOrder : std::uint8_t { kSingle = 1, kDouble = 2, kTriple = 3, kAromatic = 4 };

struct Atom {
  std::string element;
  int charge = 0;
  bool aromatic = false;
  // Hydrogen count written inside a bracket atom. Organic-subset atoms
  // always have 0 here; their hydrogens are implicit.
  int explicit_h = 0;
  bool bracket = false;
};

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::kSingle;
};

struct Neighbor {
  int atom;
  int bond;
};

/// Parsed molecular graph. Rings hold a smallest set of smallest rings as
/// ordered atom cycles.
struct MolGraph {
  std::vector<Atom> atoms;
  std::vector<Bond> bonds;
  std::vector<std::vector<int>> rings;

  int atom_count() const noexcept { return static_cast<int>(atoms.size()); }
  int bond_count() const noexcept { return static_cast<int>(bonds.size()); }
  std::vector<std::vector<Neighbor>> adjacency() const;
  /// Index of the bond joining `a` and `b`, or -1.
  int find_bond(int a, int b) const noexcept;
  std::vector<bool> ring_atoms() const;
  std::vector<bool> ring_bonds() const;
};

/// Bond-order contribution of a non-aromatic bond.
inline int integral_order(BondOrder order) noexcept {
  return order == BondOrder::kAromatic ? 1 : static_cast<int>(order);
}

/// Smallest set of smallest rings via shortest cycles through every bond
/// followed by GF(2) independence filtering.
std::vector<std::vector<int>> find_rings(int atom_count, const std::vector<Bond>& bonds);

}  // namespace phenogen::chem
