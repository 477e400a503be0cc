#pragma once

#include <string>
#include <vector>

#include "phenogen/chem/mol_graph.h"
#include "phenogen/chem/tables.h"

namespace phenogen::chem {

struct ValenceViolation {
  int atom = -1;  // -1 when the violation concerns a bond
  int bond = -1;
  std::string message;
};

struct ValenceVerdict {
  bool valid = true;
  std::vector<ValenceViolation> violations;
};

/// Per-atom bookkeeping shared by the valence check, implicit hydrogen
/// assignment and the descriptors.
///
/// Aromatic bonds are counted as one unit each, plus one pi unit when the
/// atom still fits its lowest admissible valence with it; this is what
/// lets c1ccccc1, [nH]1cccc1 and o1cccc1 all come out right without
/// kekulization.
struct AtomValence {
  int minimum_usage = 0;  // bond orders + bracket hydrogens, no pi unit
  int usage = 0;          // including the pi unit when it fits
  int max_allowed = 0;    // largest table valence plus |charge|
  int implicit_h = 0;
  bool known_element = true;
};

AtomValence atom_valence(const MolGraph& g, int atom, const ChemTables& tables = ChemTables::defaults());

/// Implicit hydrogens the atom would get if written without brackets.
int organic_implicit_h(const MolGraph& g, int atom, const ChemTables& tables = ChemTables::defaults());

/// Total attached hydrogens: bracket count, or implicit hydrogens for
/// organic-subset atoms.
int total_hydrogens(const MolGraph& g, int atom, const ChemTables& tables = ChemTables::defaults());

/// Valence and aromaticity-consistency check. Aromatic atoms and aromatic
/// bonds must lie on a ring.
ValenceVerdict check_valence(const MolGraph& g, const ChemTables& tables = ChemTables::defaults());

/// Parse success plus a clean valence verdict.
bool is_chemically_valid(std::string_view smiles);

}  // namespace phenogen::chem
