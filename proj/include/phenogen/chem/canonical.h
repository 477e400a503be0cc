#pragma once

#include <string>
#include <vector>

#include "phenogen/chem/mol_graph.h"

namespace phenogen::chem {

/// Canonical atom ranks: Morgan-style neighbourhood refinement, with ties
/// broken by a bounded search that keeps the lexicographically smallest
/// resulting SMILES.
std::vector<int> canonical_ranks(const MolGraph& g);

/// Canonical SMILES used as an order-invariant identity key. Isomorphic
/// graphs give equal keys; non-isomorphic graphs always give different keys
/// because the key spells out the whole graph. Highly symmetric graphs that
/// exhaust the tie-break budget may, rarely, give two different keys for
/// the same molecule.
std::string canonical_key(const MolGraph& g);

/// SMILES written in a given atom ranking (lowest rank first).
std::string write_smiles(const MolGraph& g, const std::vector<int>& ranks);

}  // namespace phenogen::chem
