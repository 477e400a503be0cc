#include "phenogen/chem/fingerprint.h"

#include <algorithm>
#include <bit>
#include <string>

#include "phenogen/error.h"
#include "phenogen/hash.h"

namespace phenogen::chem {

BitVector::BitVector(int n_bits) : n_bits_(n_bits), words_((n_bits + 63) / 64, 0) {
  if (n_bits <= 0) throw Error(Errc::kInvalidArgument, "bit vector size must be positive");
}

void BitVector::set(int bit) { words_.at(bit / 64) |= std::uint64_t{1} << (bit % 64); }

bool BitVector::test(int bit) const { return (words_.at(bit / 64) >> (bit % 64)) & 1U; }

int BitVector::count() const noexcept {
  int c = 0;
  for (auto w : words_) c += std::popcount(w);
  return c;
}

double tanimoto(const BitVector& a, const BitVector& b) {
  if (a.n_bits_ != b.n_bits_) throw Error(Errc::kShapeMismatch, "fingerprint sizes differ");
  int both = 0, either = 0;
  for (std::size_t i = 0; i < a.words_.size(); ++i) {
    both += std::popcount(a.words_[i] & b.words_[i]);
    either += std::popcount(a.words_[i] | b.words_[i]);
  }
  return either == 0 ? 1.0 : static_cast<double>(both) / either;
}

namespace {

std::string atom_label(const Atom& a) {
  std::string s = a.element;
  if (a.aromatic) s[0] = static_cast<char>(s[0] - 'A' + 'a');
  if (a.charge != 0) s += (a.charge > 0 ? "+" : "-") + std::to_string(std::abs(a.charge));
  return s;
}

char bond_label(BondOrder o) {
  switch (o) {
    case BondOrder::kSingle: return '-';
    case BondOrder::kDouble: return '=';
    case BondOrder::kTriple: return '#';
    case BondOrder::kAromatic: return ':';
  }
  return '?';
}

}  // namespace

BitVector fingerprint(const MolGraph& g, int n_bits) {
  if (n_bits <= 0 || !std::has_single_bit(static_cast<unsigned>(n_bits))) {
    throw Error(Errc::kInvalidArgument, "fingerprint size must be a power of two");
  }
  BitVector fp(n_bits);
  const auto adj = g.adjacency();
  std::vector<std::string> labels;
  for (const auto& a : g.atoms) labels.push_back(atom_label(a));

  std::vector<int> atoms;
  std::vector<int> bonds;
  std::vector<bool> on_path(g.atom_count(), false);

  auto record = [&] {
    std::string fwd, rev;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (i > 0) fwd += bond_label(g.bonds[bonds[i - 1]].order);
      fwd += labels[atoms[i]];
      fwd += '|';
    }
    for (std::size_t i = atoms.size(); i-- > 0;) {
      if (i + 1 < atoms.size()) rev += bond_label(g.bonds[bonds[i]].order);
      rev += labels[atoms[i]];
      rev += '|';
    }
    const std::string& key = std::min(fwd, rev);
    fp.set(static_cast<int>(fnv1a(key) & static_cast<std::uint64_t>(n_bits - 1)));
  };

  auto extend = [&](auto&& self, int u) -> void {
    record();
    if (static_cast<int>(bonds.size()) == kMaxPathBonds) return;
    for (const auto& nb : adj[u]) {
      if (on_path[nb.atom]) continue;
      on_path[nb.atom] = true;
      atoms.push_back(nb.atom);
      bonds.push_back(nb.bond);
      self(self, nb.atom);
      atoms.pop_back();
      bonds.pop_back();
      on_path[nb.atom] = false;
    }
  };

  for (int s = 0; s < g.atom_count(); ++s) {
    on_path[s] = true;
    atoms.push_back(s);
    extend(extend, s);
    atoms.pop_back();
    on_path[s] = false;
  }
  return fp;
}

}  // namespace phenogen::chem
