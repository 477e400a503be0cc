#include "phenogen/chem/descriptors.h"

#include "phenogen/chem/valence.h"

namespace phenogen::chem {
namespace {

bool is_halogen(const std::string& e) { return e == "F" || e == "Cl" || e == "Br" || e == "I"; }

std::string element_label(const Atom& a) {
  std::string s = a.element;
  if (a.aromatic) s[0] = static_cast<char>(s[0] - 'A' + 'a');
  if (a.charge > 0) s += '+';
  if (a.charge < 0) s += '-';
  return s;
}

// Alert types: peroxide, azo, disulfide, acyl halide, aldehyde, thiol, nitro.
int count_alerts(const MolGraph& g, const std::vector<int>& h) {
  const auto adj = g.adjacency();
  bool peroxide = false, azo = false, disulfide = false, acyl_halide = false, aldehyde = false, thiol = false,
       nitro = false;
  for (const Bond& b : g.bonds) {
    const std::string& x = g.atoms[b.a].element;
    const std::string& y = g.atoms[b.b].element;
    if (x == "O" && y == "O" && b.order == BondOrder::kSingle) peroxide = true;
    if (x == "N" && y == "N" && b.order == BondOrder::kDouble) azo = true;
    if (x == "S" && y == "S" && b.order == BondOrder::kSingle) disulfide = true;
  }
  for (int i = 0; i < g.atom_count(); ++i) {
    const Atom& a = g.atoms[i];
    if (a.element == "S" && !a.aromatic && h[i] > 0) thiol = true;
    if (a.element == "C" && !a.aromatic) {
      bool carbonyl = false, halide = false;
      for (const auto& nb : adj[i]) {
        if (g.atoms[nb.atom].element == "O" && g.bonds[nb.bond].order == BondOrder::kDouble) carbonyl = true;
        if (is_halogen(g.atoms[nb.atom].element)) halide = true;
      }
      if (carbonyl && halide) acyl_halide = true;
      if (carbonyl && h[i] > 0) aldehyde = true;
    }
    if (a.element == "N") {
      int oxygens = 0;
      bool double_o = false;
      for (const auto& nb : adj[i]) {
        if (g.atoms[nb.atom].element != "O") continue;
        ++oxygens;
        if (g.bonds[nb.bond].order == BondOrder::kDouble) double_o = true;
      }
      if (oxygens >= 2 && double_o) nitro = true;
    }
  }
  return peroxide + azo + disulfide + acyl_halide + aldehyde + thiol + nitro;
}

}  // namespace

std::string logp_key(const MolGraph& g, int atom, const ChemTables& tables) {
  return element_label(g.atoms[atom]) + ".H" + std::to_string(total_hydrogens(g, atom, tables));
}

std::string psa_key(const MolGraph& g, int atom, const ChemTables& tables) {
  std::string key = element_label(g.atoms[atom]);
  bool dbl = false, tpl = false;
  for (const Bond& b : g.bonds) {
    if (b.a != atom && b.b != atom) continue;
    dbl = dbl || b.order == BondOrder::kDouble;
    tpl = tpl || b.order == BondOrder::kTriple;
  }
  if (dbl) key += '=';
  if (tpl) key += '^';
  return key + ".H" + std::to_string(total_hydrogens(g, atom, tables));
}

DescriptorVector compute_descriptors(const MolGraph& g, const ChemTables& tables) {
  DescriptorVector d;
  const int n = g.atom_count();
  std::vector<int> h(n);
  for (int i = 0; i < n; ++i) h[i] = total_hydrogens(g, i, tables);
  const double h_mass = tables.masses.find("H").value_or(1.008);

  std::vector<int> heavy_degree(n, 0);
  for (const Bond& b : g.bonds) {
    if (g.atoms[b.a].element != "H") ++heavy_degree[b.b];
    if (g.atoms[b.b].element != "H") ++heavy_degree[b.a];
  }

  for (int i = 0; i < n; ++i) {
    const Atom& a = g.atoms[i];
    d.mw += tables.masses.find(a.element).value_or(0.0) + h[i] * h_mass;
    if (a.element != "H") ++d.heavy_atoms;
    if (a.element == "N" || a.element == "O") {
      ++d.hba;
      if (h[i] > 0) ++d.hbd;
    }
    const std::string lkey = logp_key(g, i, tables);
    if (auto v = tables.logp.find(lkey)) {
      d.logp_proxy += *v;
    } else if (auto e = tables.logp.find(element_label(a))) {
      d.logp_proxy += *e;
    } else if (auto bare = tables.logp.find(a.element)) {
      d.logp_proxy += *bare;
    }
    if (auto v = tables.psa.find(psa_key(g, i, tables))) d.psa_proxy += *v;
  }

  const std::vector<bool> ring_bond = g.ring_bonds();
  for (int b = 0; b < g.bond_count(); ++b) {
    const Bond& bd = g.bonds[b];
    if (bd.order != BondOrder::kSingle || ring_bond[b]) continue;
    if (g.atoms[bd.a].element == "H" || g.atoms[bd.b].element == "H") continue;
    if (heavy_degree[bd.a] < 2 || heavy_degree[bd.b] < 2) continue;
    ++d.rot_bonds;
  }

  for (const auto& ring : g.rings) {
    bool all_aromatic = true;
    for (int a : ring) all_aromatic = all_aromatic && g.atoms[a].aromatic;
    if (all_aromatic) ++d.arom_rings;
  }
  d.alerts = count_alerts(g, h);
  return d;
}

}  // namespace phenogen::chem
