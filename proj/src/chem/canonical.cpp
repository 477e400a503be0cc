#include "phenogen/chem/canonical.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <tuple>

#include "phenogen/chem/valence.h"

namespace phenogen::chem {
namespace {

constexpr int kLeafBudget = 2048;

int bond_code(BondOrder o) { return static_cast<int>(o); }

// Dense ranks (0..k-1) of `keys`, ties sharing a rank.
template <typename Key>
std::vector<int> dense_ranks(const std::vector<Key>& keys) {
  std::vector<int> idx(keys.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return keys[a] < keys[b]; });
  std::vector<int> ranks(keys.size(), 0);
  int r = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i > 0 && keys[idx[i - 1]] < keys[idx[i]]) ++r;
    ranks[idx[i]] = r;
  }
  return ranks;
}

int distinct(const std::vector<int>& ranks) {
  return ranks.empty() ? 0 : *std::max_element(ranks.begin(), ranks.end()) + 1;
}

class Canonicalizer {
 public:
  explicit Canonicalizer(const MolGraph& g) : g_(g), adj_(g.adjacency()) {}

  std::vector<int> initial_ranks() const {
    using Inv = std::tuple<std::string, int, int, int, int, int>;
    const std::vector<bool> in_ring = g_.ring_atoms();
    std::vector<Inv> inv;
    for (int i = 0; i < g_.atom_count(); ++i) {
      const Atom& a = g_.atoms[i];
      inv.emplace_back(a.element, a.aromatic ? 1 : 0, a.charge, total_hydrogens(g_, i),
                       static_cast<int>(adj_[i].size()), in_ring[i] ? 1 : 0);
    }
    return dense_ranks(inv);
  }

  std::vector<int> refine(std::vector<int> ranks) const {
    int classes = distinct(ranks);
    while (true) {
      std::vector<std::pair<int, std::vector<int>>> keys;
      keys.reserve(ranks.size());
      for (int i = 0; i < g_.atom_count(); ++i) {
        std::vector<int> nb;
        for (const auto& n : adj_[i]) nb.push_back(ranks[n.atom] * 8 + bond_code(g_.bonds[n.bond].order));
        std::sort(nb.begin(), nb.end());
        keys.emplace_back(ranks[i], std::move(nb));
      }
      std::vector<int> next = dense_ranks(keys);
      const int next_classes = distinct(next);
      ranks = std::move(next);
      if (next_classes == classes) return ranks;
      classes = next_classes;
    }
  }

  void search(std::vector<int> ranks) {
    ranks = refine(std::move(ranks));
    const int n = g_.atom_count();
    if (distinct(ranks) == n) {
      ++leaves_;
      std::string smi = write_smiles(g_, ranks);
      if (best_.empty() || smi < best_) {
        best_ = std::move(smi);
        best_ranks_ = ranks;
      }
      return;
    }
    // first tied class
    std::vector<int> counts(n, 0);
    for (int r : ranks) ++counts[r];
    int tied = 0;
    while (counts[tied] < 2) ++tied;
    bool first = true;
    for (int c = 0; c < n; ++c) {
      if (ranks[c] != tied) continue;
      if (!first && leaves_ >= kLeafBudget) break;
      first = false;
      std::vector<int> split(n);
      for (int i = 0; i < n; ++i) split[i] = 2 * ranks[i] + (ranks[i] == tied && i != c ? 1 : 0);
      search(dense_ranks(split));
    }
  }

  const std::string& best() const { return best_; }
  const std::vector<int>& best_ranks() const { return best_ranks_; }

 private:
  const MolGraph& g_;
  std::vector<std::vector<Neighbor>> adj_;
  int leaves_ = 0;
  std::string best_;
  std::vector<int> best_ranks_;
};

bool organic_subset(const std::string& e) {
  return e == "B" || e == "C" || e == "N" || e == "O" || e == "P" || e == "S" || e == "F" || e == "Cl" ||
         e == "Br" || e == "I";
}

std::string atom_text(const MolGraph& g, int i) {
  const Atom& a = g.atoms[i];
  std::string sym = a.element;
  if (a.aromatic) sym[0] = static_cast<char>(sym[0] - 'A' + 'a');
  const int h = total_hydrogens(g, i);
  if (organic_subset(a.element) && a.charge == 0 && organic_implicit_h(g, i) == h) return sym;
  std::string out = "[" + sym;
  if (h > 0) out += "H" + (h > 1 ? std::to_string(h) : std::string());
  if (a.charge != 0) {
    out += a.charge > 0 ? '+' : '-';
    if (std::abs(a.charge) > 1) out += std::to_string(std::abs(a.charge));
  }
  return out + "]";
}

std::string bond_text(const MolGraph& g, const Bond& b) {
  const bool both_aromatic = g.atoms[b.a].aromatic && g.atoms[b.b].aromatic;
  switch (b.order) {
    case BondOrder::kSingle: return both_aromatic ? "-" : "";
    case BondOrder::kDouble: return "=";
    case BondOrder::kTriple: return "#";
    case BondOrder::kAromatic: return both_aromatic ? "" : ":";
  }
  return "";
}

std::string ring_label(int d) { return d < 10 ? std::to_string(d) : "%" + std::to_string(d); }

class Writer {
 public:
  Writer(const MolGraph& g, const std::vector<int>& ranks)
      : g_(g), ranks_(ranks), adj_(g.adjacency()), visited_(g.atom_count(), false),
        ring_edges_(g.atom_count()), children_(g.atom_count()), is_closure_(g.bond_count(), false),
        digit_of_(g.bond_count(), -1) {
    for (auto& nbs : adj_) {
      std::sort(nbs.begin(), nbs.end(), [&](const Neighbor& x, const Neighbor& y) { return ranks_[x.atom] < ranks_[y.atom]; });
    }
  }

  std::string run() {
    std::vector<int> order(g_.atom_count());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return ranks_[a] < ranks_[b]; });
    std::vector<int> roots;
    for (int start : order) {
      if (visited_[start]) continue;
      roots.push_back(start);
      plan(start, -1);
    }
    std::string out;
    for (std::size_t i = 0; i < roots.size(); ++i) {
      if (i > 0) out += '.';
      emit(roots[i], out);
    }
    return out;
  }

 private:
  void plan(int u, int parent_bond) {
    visited_[u] = true;
    for (const auto& nb : adj_[u]) {
      if (nb.bond == parent_bond || is_closure_[nb.bond]) continue;
      if (visited_[nb.atom]) {
        // back edge to an ancestor: it opens there and closes here
        is_closure_[nb.bond] = true;
        ring_edges_[nb.atom].push_back(nb.bond);
        ring_edges_[u].push_back(nb.bond);
      } else {
        children_[u].push_back({nb.atom, nb.bond});
        plan(nb.atom, nb.bond);
      }
    }
  }

  void emit(int u, std::string& out) {
    out += atom_text(g_, u);
    // closings first (already numbered), then openings by partner rank
    std::vector<int> closing, opening;
    for (int b : ring_edges_[u]) (digit_of_[b] >= 0 ? closing : opening).push_back(b);
    std::sort(closing.begin(), closing.end(), [&](int x, int y) { return digit_of_[x] < digit_of_[y]; });
    auto partner = [&](int b) { return g_.bonds[b].a == u ? g_.bonds[b].b : g_.bonds[b].a; };
    std::sort(opening.begin(), opening.end(), [&](int x, int y) { return ranks_[partner(x)] < ranks_[partner(y)]; });
    for (int b : closing) {
      out += ring_label(digit_of_[b]);
      free_digits_.push_back(digit_of_[b]);
      std::sort(free_digits_.begin(), free_digits_.end());
    }
    for (int b : opening) {
      int d;
      if (!free_digits_.empty()) {
        d = free_digits_.front();
        free_digits_.erase(free_digits_.begin());
      } else {
        d = ++max_digit_;
      }
      digit_of_[b] = d;
      out += bond_text(g_, g_.bonds[b]) + ring_label(d);
    }
    const auto& kids = children_[u];
    for (std::size_t i = 0; i < kids.size(); ++i) {
      const bool branch = i + 1 < kids.size();
      if (branch) out += '(';
      out += bond_text(g_, g_.bonds[kids[i].bond]);
      emit(kids[i].atom, out);
      if (branch) out += ')';
    }
  }

  const MolGraph& g_;
  const std::vector<int>& ranks_;
  std::vector<std::vector<Neighbor>> adj_;
  std::vector<bool> visited_;
  std::vector<std::vector<int>> ring_edges_;
  std::vector<std::vector<Neighbor>> children_;
  std::vector<bool> is_closure_;
  std::vector<int> digit_of_;
  std::vector<int> free_digits_;
  int max_digit_ = 0;
};

}  // namespace

std::string write_smiles(const MolGraph& g, const std::vector<int>& ranks) { return Writer(g, ranks).run(); }

std::vector<int> canonical_ranks(const MolGraph& g) {
  if (g.atom_count() == 0) return {};
  Canonicalizer c(g);
  c.search(c.initial_ranks());
  return c.best_ranks();
}

std::string canonical_key(const MolGraph& g) {
  if (g.atom_count() == 0) return {};
  Canonicalizer c(g);
  c.search(c.initial_ranks());
  return c.best();
}

}  // namespace phenogen::chem
