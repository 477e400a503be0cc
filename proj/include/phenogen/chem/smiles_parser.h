#pragma once

#include <string_view>

#include "phenogen/chem/mol_graph.h"

namespace phenogen::chem {

/// Parses SMILES into a graph with branches, ring closures, charges and
/// aromatic atoms resolved. Stereo marks are accepted and dropped.
/// Throws Error{kSyntax} naming the offending position.
MolGraph parse_smiles(std::string_view smiles);

}  // namespace phenogen::chem
