#pragma once

#include "phenogen/chem/mol_graph.h"
#include "phenogen/chem/tables.h"

namespace phenogen::chem {

struct DescriptorVector {
  double mw = 0.0;          // g/mol, implicit hydrogens included
  double logp_proxy = 0.0;  // additive per-atom estimate
  int hbd = 0;              // N/O atoms carrying at least one hydrogen
  int hba = 0;              // N/O atoms
  double psa_proxy = 0.0;   // square angstroms, additive per-atom estimate
  int rot_bonds = 0;
  int arom_rings = 0;
  int heavy_atoms = 0;
  int alerts = 0;           // number of structural alert types present
};

DescriptorVector compute_descriptors(const MolGraph& g, const ChemTables& tables = ChemTables::defaults());

/// Lookup keys into the contribution tables for one atom.
std::string logp_key(const MolGraph& g, int atom, const ChemTables& tables = ChemTables::defaults());
std::string psa_key(const MolGraph& g, int atom, const ChemTables& tables = ChemTables::defaults());

}  // namespace phenogen::chem
