#include "phenogen/chem/valence.h"

#include <algorithm>
#include <cstdlib>

#include "phenogen/chem/smiles_parser.h"
#include "phenogen/error.h"

namespace phenogen::chem {

namespace {

AtomValence valence_as(const MolGraph& g, int atom, const Atom& at, const ChemTables& tables) {
  AtomValence out;
  int integral = 0;
  int aromatic_bonds = 0;
  for (const Bond& b : g.bonds) {
    if (b.a != atom && b.b != atom) continue;
    if (b.order == BondOrder::kAromatic) {
      ++aromatic_bonds;
    } else {
      integral += integral_order(b.order);
    }
  }
  out.minimum_usage = integral + at.explicit_h + aromatic_bonds;

  const std::vector<int>& allowed = tables.valences.allowed(at.element);
  if (allowed.empty()) {
    out.known_element = false;
    out.usage = out.minimum_usage;
    return out;
  }
  const int shift = std::abs(at.charge);
  out.max_allowed = allowed.back() + shift;
  // lowest admissible valence at or above the bare usage
  int target = -1;
  for (int v : allowed) {
    if (v + shift >= out.minimum_usage) {
      target = v + shift;
      break;
    }
  }
  const bool pi = aromatic_bonds > 0 && target >= 0 && out.minimum_usage + 1 <= target;
  out.usage = out.minimum_usage + (pi ? 1 : 0);
  if (!at.bracket && target >= 0) out.implicit_h = target - out.usage;
  return out;
}

}  // namespace

AtomValence atom_valence(const MolGraph& g, int atom, const ChemTables& tables) {
  return valence_as(g, atom, g.atoms[atom], tables);
}

int organic_implicit_h(const MolGraph& g, int atom, const ChemTables& tables) {
  Atom plain = g.atoms[atom];
  plain.bracket = false;
  plain.explicit_h = 0;
  plain.charge = 0;
  return valence_as(g, atom, plain, tables).implicit_h;
}

int total_hydrogens(const MolGraph& g, int atom, const ChemTables& tables) {
  const Atom& at = g.atoms[atom];
  if (at.bracket) return at.explicit_h;
  return atom_valence(g, atom, tables).implicit_h;
}

ValenceVerdict check_valence(const MolGraph& g, const ChemTables& tables) {
  ValenceVerdict verdict;
  const std::vector<bool> ring_atom = g.ring_atoms();
  const std::vector<bool> ring_bond = g.ring_bonds();
  for (int i = 0; i < g.atom_count(); ++i) {
    const AtomValence v = atom_valence(g, i, tables);
    if (!v.known_element) {
      verdict.violations.push_back({i, -1, "no valence rule for element " + g.atoms[i].element});
    } else if (v.minimum_usage > v.max_allowed) {
      verdict.violations.push_back({i, -1,
                                    g.atoms[i].element + " uses valence " + std::to_string(v.minimum_usage) +
                                        " above the allowed " + std::to_string(v.max_allowed)});
    }
    if (g.atoms[i].aromatic && !ring_atom[i]) {
      verdict.violations.push_back({i, -1, "aromatic atom outside a ring"});
    }
  }
  for (int b = 0; b < g.bond_count(); ++b) {
    if (g.bonds[b].order != BondOrder::kAromatic) continue;
    if (!ring_bond[b]) {
      verdict.violations.push_back({-1, b, "aromatic bond outside a ring"});
    } else if (!g.atoms[g.bonds[b].a].aromatic || !g.atoms[g.bonds[b].b].aromatic) {
      verdict.violations.push_back({-1, b, "aromatic bond between non-aromatic atoms"});
    }
  }
  verdict.valid = verdict.violations.empty();
  return verdict;
}

bool is_chemically_valid(std::string_view smiles) {
  try {
    return check_valence(parse_smiles(smiles)).valid;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace phenogen::chem
