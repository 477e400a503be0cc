#pragma once

#include <cstdint>
#include <vector>

#include "phenogen/chem/mol_graph.h"

namespace phenogen::chem {

inline constexpr int kDefaultFingerprintBits = 1024;
inline constexpr int kMaxPathBonds = 6;

class BitVector {
 public:
  explicit BitVector(int n_bits = kDefaultFingerprintBits);

  int size() const noexcept { return n_bits_; }
  void set(int bit);
  bool test(int bit) const;
  int count() const noexcept;
  bool operator==(const BitVector&) const = default;

  friend double tanimoto(const BitVector& a, const BitVector& b);

 private:
  int n_bits_;
  std::vector<std::uint64_t> words_;
};

/// Folded hash of every linear path with up to kMaxPathBonds bonds.
/// `n_bits` must be a power of two.
BitVector fingerprint(const MolGraph& g, int n_bits = kDefaultFingerprintBits);

/// |a & b| / |a | b|; two empty vectors count as identical.
double tanimoto(const BitVector& a, const BitVector& b);

}  // namespace phenogen::chem
