#include "phenogen/chem/mol_graph.h"

#include <algorithm>
#include <deque>
#include <set>

namespace phenogen::chem {

std::vector<std::vector<Neighbor>> MolGraph::adjacency() const {
  std::vector<std::vector<Neighbor>> adj(atoms.size());
  for (int i = 0; i < bond_count(); ++i) {
    adj[bonds[i].a].push_back({bonds[i].b, i});
    adj[bonds[i].b].push_back({bonds[i].a, i});
  }
  return adj;
}

int MolGraph::find_bond(int a, int b) const noexcept {
  for (int i = 0; i < bond_count(); ++i) {
    if ((bonds[i].a == a && bonds[i].b == b) || (bonds[i].a == b && bonds[i].b == a)) return i;
  }
  return -1;
}

std::vector<bool> MolGraph::ring_atoms() const {
  std::vector<bool> in_ring(atoms.size(), false);
  for (const auto& r : rings) {
    for (int a : r) in_ring[a] = true;
  }
  return in_ring;
}

std::vector<bool> MolGraph::ring_bonds() const {
  std::vector<bool> in_ring(bonds.size(), false);
  for (const auto& r : rings) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      int b = find_bond(r[i], r[(i + 1) % r.size()]);
      if (b >= 0) in_ring[b] = true;
    }
  }
  return in_ring;
}

namespace {

using EdgeSet = std::vector<bool>;

// Shortest path from `from` to `to` avoiding bond `skip`; returns the bond
// indices on the path or an empty vector.
std::vector<int> shortest_path_bonds(const std::vector<std::vector<Neighbor>>& adj, int from, int to, int skip) {
  std::vector<int> via_bond(adj.size(), -1);
  std::vector<int> prev(adj.size(), -1);
  std::vector<bool> seen(adj.size(), false);
  std::deque<int> queue{from};
  seen[from] = true;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    if (u == to) break;
    for (const auto& nb : adj[u]) {
      if (nb.bond == skip || seen[nb.atom]) continue;
      seen[nb.atom] = true;
      prev[nb.atom] = u;
      via_bond[nb.atom] = nb.bond;
      queue.push_back(nb.atom);
    }
  }
  if (!seen[to]) return {};
  std::vector<int> path;
  for (int v = to; v != from; v = prev[v]) path.push_back(via_bond[v]);
  return path;
}

std::vector<int> cycle_atoms(const std::vector<Bond>& bonds, const std::vector<int>& cycle_bonds) {
  // Walk the cycle starting from the lowest atom index.
  std::set<int> atom_set;
  for (int b : cycle_bonds) {
    atom_set.insert(bonds[b].a);
    atom_set.insert(bonds[b].b);
  }
  int start = *atom_set.begin();
  std::vector<int> order{start};
  std::vector<bool> used(cycle_bonds.size(), false);
  int current = start;
  for (std::size_t step = 0; step + 1 < cycle_bonds.size(); ++step) {
    // prefer the smaller neighbour first for a stable orientation
    int best = -1;
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < cycle_bonds.size(); ++i) {
      if (used[i]) continue;
      const Bond& bd = bonds[cycle_bonds[i]];
      int other = bd.a == current ? bd.b : (bd.b == current ? bd.a : -1);
      if (other < 0) continue;
      if (best < 0 || other < best) {
        best = other;
        best_idx = i;
      }
    }
    if (best < 0) break;
    used[best_idx] = true;
    order.push_back(best);
    current = best;
  }
  return order;
}

}  // namespace

std::vector<std::vector<int>> find_rings(int atom_count, const std::vector<Bond>& bonds) {
  const int n_bonds = static_cast<int>(bonds.size());
  std::vector<std::vector<Neighbor>> adj(atom_count);
  for (int i = 0; i < n_bonds; ++i) {
    adj[bonds[i].a].push_back({bonds[i].b, i});
    adj[bonds[i].b].push_back({bonds[i].a, i});
  }
  // cyclomatic number = E - V + components
  std::vector<int> comp(atom_count, -1);
  int components = 0;
  for (int s = 0; s < atom_count; ++s) {
    if (comp[s] >= 0) continue;
    std::deque<int> q{s};
    comp[s] = components;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (const auto& nb : adj[u]) {
        if (comp[nb.atom] < 0) {
          comp[nb.atom] = components;
          q.push_back(nb.atom);
        }
      }
    }
    ++components;
  }
  const int needed = n_bonds - atom_count + components;
  if (needed <= 0) return {};

  std::vector<std::vector<int>> candidates;
  std::set<std::vector<int>> seen;
  for (int e = 0; e < n_bonds; ++e) {
    auto path = shortest_path_bonds(adj, bonds[e].a, bonds[e].b, e);
    if (path.empty()) continue;
    path.push_back(e);
    std::sort(path.begin(), path.end());
    if (seen.insert(path).second) candidates.push_back(path);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& x, const auto& y) { return x.size() < y.size() || (x.size() == y.size() && x < y); });

  // Greedy GF(2) basis selection, smallest cycles first.
  std::vector<EdgeSet> basis;
  std::vector<int> pivots;
  std::vector<std::vector<int>> rings;
  auto try_add = [&](const std::vector<int>& cycle) {
    EdgeSet v(n_bonds, false);
    for (int b : cycle) v[b] = true;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (v[pivots[i]]) {
        for (int k = 0; k < n_bonds; ++k) v[k] = v[k] != basis[i][k];
      }
    }
    auto pivot = std::find(v.begin(), v.end(), true);
    if (pivot == v.end()) return false;
    pivots.push_back(static_cast<int>(pivot - v.begin()));
    basis.push_back(std::move(v));
    rings.push_back(cycle_atoms(bonds, cycle));
    return true;
  };
  for (const auto& c : candidates) {
    if (static_cast<int>(rings.size()) == needed) break;
    try_add(c);
  }
  if (static_cast<int>(rings.size()) < needed) {
    // Shortest cycles through each bond can miss a basis element in cage
    // graphs; fundamental cycles of a BFS tree always complete it.
    std::vector<int> parent(atom_count, -1), parent_bond(atom_count, -1), depth(atom_count, 0);
    std::vector<bool> tree_bond(n_bonds, false), visited(atom_count, false);
    for (int s = 0; s < atom_count; ++s) {
      if (visited[s]) continue;
      std::deque<int> q{s};
      visited[s] = true;
      while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (const auto& nb : adj[u]) {
          if (visited[nb.atom]) continue;
          visited[nb.atom] = true;
          parent[nb.atom] = u;
          parent_bond[nb.atom] = nb.bond;
          depth[nb.atom] = depth[u] + 1;
          tree_bond[nb.bond] = true;
          q.push_back(nb.atom);
        }
      }
    }
    std::vector<std::vector<int>> fundamental;
    for (int e = 0; e < n_bonds; ++e) {
      if (tree_bond[e]) continue;
      std::vector<int> cycle{e};
      int u = bonds[e].a, v = bonds[e].b;
      while (u != v) {
        if (depth[u] >= depth[v]) {
          cycle.push_back(parent_bond[u]);
          u = parent[u];
        } else {
          cycle.push_back(parent_bond[v]);
          v = parent[v];
        }
      }
      std::sort(cycle.begin(), cycle.end());
      fundamental.push_back(std::move(cycle));
    }
    std::stable_sort(fundamental.begin(), fundamental.end(),
                     [](const auto& x, const auto& y) { return x.size() < y.size(); });
    for (const auto& c : fundamental) {
      if (static_cast<int>(rings.size()) == needed) break;
      try_add(c);
    }
  }
  return rings;
}

}  // namespace phenogen::chem
