#include "molpoison/molgraph.hpp"

#include <algorithm>
#include <stdexcept>

namespace molpoison {

namespace {

struct ElementInfo {
  const char* symbol;
  int default_valence;
  int max_valence;
};

// Indexed by Element. Default valences follow the SMILES organic-subset
// hydrogen-filling convention; max valences are the validity ceilings.
constexpr ElementInfo kElements[] = {
    {"B", 3, 3}, {"C", 4, 4},  {"N", 3, 3},  {"O", 2, 2}, {"P", 3, 5}, {"S", 2, 6},
    {"F", 1, 1}, {"Cl", 1, 1}, {"Br", 1, 1}, {"I", 1, 1}, {"H", 1, 1},
};

int charge_adjustment(Element e, int formal_charge) {
  if (formal_charge > 0) {
    if (e == Element::N || e == Element::O || e == Element::S) return formal_charge;
    return 0;
  }
  return formal_charge;  // anions lose |q| on any element
}

}  // namespace

const char* element_symbol(Element e) { return kElements[static_cast<int>(e)].symbol; }

std::optional<Element> element_from_symbol(std::string_view s) {
  for (int i = 0; i < static_cast<int>(std::size(kElements)); ++i) {
    if (s == kElements[i].symbol) return static_cast<Element>(i);
  }
  return std::nullopt;
}

int default_valence(Element e) { return kElements[static_cast<int>(e)].default_valence; }
int max_valence(Element e) { return kElements[static_cast<int>(e)].max_valence; }

int fill_valence(Element e, int formal_charge) {
  return std::max(0, default_valence(e) + charge_adjustment(e, formal_charge));
}

int allowed_valence(Element e, int formal_charge) {
  return std::max(0, max_valence(e) + charge_adjustment(e, formal_charge));
}

int bond_order_halves(BondOrder o) {
  switch (o) {
    case BondOrder::Single: return 2;
    case BondOrder::Double: return 4;
    case BondOrder::Triple: return 6;
    case BondOrder::Aromatic: return 3;
  }
  return 2;
}

MolGraph::MolGraph(std::vector<Atom> atoms, std::vector<Bond> bonds)
    : atoms_(std::move(atoms)), bonds_(std::move(bonds)) {
  const int n = atom_count();
  adj_.resize(n);
  for (int bi = 0; bi < bond_count(); ++bi) {
    const Bond& b = bonds_[bi];
    if (b.a < 0 || b.a >= n || b.b < 0 || b.b >= n)
      throw std::invalid_argument("MolGraph: bond endpoint out of range");
    if (b.a == b.b) throw std::invalid_argument("MolGraph: self-loop bond");
    for (const Neighbor& nb : adj_[b.a]) {
      if (nb.atom == b.b) throw std::invalid_argument("MolGraph: duplicate bond");
    }
    adj_[b.a].push_back({b.b, bi});
    adj_[b.b].push_back({b.a, bi});
  }
}

int MolGraph::bond_order_sum_halves(int i) const {
  int sum = 0;
  for (const Neighbor& nb : adj_[i]) sum += bond_order_halves(bonds_[nb.bond].order);
  return sum;
}

std::optional<int> MolGraph::bond_between(int a, int b) const {
  for (const Neighbor& nb : adj_[a]) {
    if (nb.atom == b) return nb.bond;
  }
  return std::nullopt;
}

int implicit_hydrogens(const MolGraph& g, int atom) {
  const Atom& a = g.atom(atom);
  if (a.explicit_h) return *a.explicit_h;
  const int free_halves = 2 * fill_valence(a.element, a.formal_charge) - g.bond_order_sum_halves(atom);
  return free_halves > 0 ? free_halves / 2 : 0;
}

int hydrogen_count(const MolGraph& g, int atom) { return implicit_hydrogens(g, atom); }

int heavy_atom_count(const MolGraph& g) {
  int n = 0;
  for (const Atom& a : g.atoms())
    if (a.element != Element::H) ++n;
  return n;
}

ValidityReport validate(const MolGraph& g, int max_atoms) {
  ValidityReport report;
  auto flag = [&](int atom, std::string reason) {
    report.violations.push_back({atom, std::move(reason)});
  };

  const std::vector<bool> in_ring = ring_atoms(g);

  int heavy_seen = 0;
  for (int i = 0; i < g.atom_count(); ++i) {
    const Atom& a = g.atom(i);
    // Bracket hydrogens are bonds to hydrogen, so they count toward the sum.
    // Aromatic bonds count one unit against the ceiling: without
    // kekulization, 1.5 per bond would reject pyrrole-type atoms whose lone
    // pair feeds the ring.
    int total_halves = 2 * a.explicit_h.value_or(0);
    for (const auto& nb : g.neighbors(i)) {
      const BondOrder order = g.bond(nb.bond).order;
      total_halves += order == BondOrder::Aromatic ? 2 : bond_order_halves(order);
    }
    const int limit_halves = 2 * allowed_valence(a.element, a.formal_charge);
    if (total_halves > limit_halves) {
      flag(i, std::string("valence of ") + element_symbol(a.element) + " exceeded: bond order sum " +
                  std::to_string(total_halves / 2) + (total_halves % 2 ? ".5" : "") + " > " +
                  std::to_string(limit_halves / 2));
    }
    if (a.aromatic && !in_ring[i]) flag(i, "aromatic atom outside any ring");
    if (a.element != Element::H) {
      ++heavy_seen;
      if (heavy_seen == max_atoms + 1) {
        flag(i, "heavy atom count exceeds limit of " + std::to_string(max_atoms));
      }
    }
  }
  for (const Bond& b : g.bonds()) {
    if (b.order != BondOrder::Aromatic) continue;
    if (!g.atom(b.a).aromatic) flag(b.a, "aromatic bond at non-aromatic atom");
    if (!g.atom(b.b).aromatic) flag(b.b, "aromatic bond at non-aromatic atom");
  }

  report.valid = report.violations.empty();
  return report;
}

namespace {

// Iterative bridge finding (Tarjan low-link). Returns per-bond flag: true
// when the bond lies on a cycle.
std::vector<bool> non_bridge_bonds(const MolGraph& g) {
  const int n = g.atom_count();
  std::vector<bool> on_cycle(g.bond_count(), false);
  std::vector<int> disc(n, -1), low(n, 0);
  int timer = 0;

  struct Frame {
    int atom;
    int parent_bond;
    size_t next_edge;
  };

  for (int root = 0; root < n; ++root) {
    if (disc[root] != -1) continue;
    std::vector<Frame> stack{{root, -1, 0}};
    disc[root] = low[root] = timer++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto& nbrs = g.neighbors(f.atom);
      if (f.next_edge < nbrs.size()) {
        const auto nb = nbrs[f.next_edge++];
        if (nb.bond == f.parent_bond) continue;
        if (disc[nb.atom] == -1) {
          disc[nb.atom] = low[nb.atom] = timer++;
          stack.push_back({nb.atom, nb.bond, 0});
        } else {
          low[f.atom] = std::min(low[f.atom], disc[nb.atom]);
          on_cycle[nb.bond] = true;  // back edge
        }
      } else {
        const Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          Frame& up = stack.back();
          low[up.atom] = std::min(low[up.atom], low[done.atom]);
          if (low[done.atom] <= disc[up.atom]) on_cycle[done.parent_bond] = true;
        }
      }
    }
  }
  return on_cycle;
}

}  // namespace

std::vector<bool> ring_bonds(const MolGraph& g) { return non_bridge_bonds(g); }

std::vector<bool> ring_atoms(const MolGraph& g) {
  std::vector<bool> result(g.atom_count(), false);
  const std::vector<bool> rb = ring_bonds(g);
  for (int bi = 0; bi < g.bond_count(); ++bi) {
    if (rb[bi]) {
      result[g.bond(bi).a] = true;
      result[g.bond(bi).b] = true;
    }
  }
  return result;
}

int cyclomatic_number(const MolGraph& g) {
  const int n = g.atom_count();
  std::vector<bool> seen(n, false);
  int components = 0;
  std::vector<int> stack;
  for (int i = 0; i < n; ++i) {
    if (seen[i]) continue;
    ++components;
    stack.push_back(i);
    seen[i] = true;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (const auto& nb : g.neighbors(v)) {
        if (!seen[nb.atom]) {
          seen[nb.atom] = true;
          stack.push_back(nb.atom);
        }
      }
    }
  }
  return g.bond_count() - n + components;
}

namespace {

// DFS for a simple cycle of exact length k through `start`, where `start`
// stays the minimum-index atom on the path (each cycle is probed once).
bool cycle_search(const MolGraph& g, int start, int current, int depth, int k,
                  std::vector<bool>& on_path, bool aromatic_only) {
  for (const auto& nb : g.neighbors(current)) {
    if (aromatic_only && g.bond(nb.bond).order != BondOrder::Aromatic) continue;
    if (nb.atom == start && depth == k) return true;
    if (depth < k && nb.atom > start && !on_path[nb.atom]) {
      on_path[nb.atom] = true;
      if (cycle_search(g, start, nb.atom, depth + 1, k, on_path, aromatic_only)) return true;
      on_path[nb.atom] = false;
    }
  }
  return false;
}

bool has_cycle_of_size(const MolGraph& g, int k, bool aromatic_only) {
  if (k < 3 || g.atom_count() < k) return false;
  std::vector<bool> on_path(g.atom_count(), false);
  for (int start = 0; start < g.atom_count(); ++start) {
    on_path[start] = true;
    if (cycle_search(g, start, start, 1, k, on_path, aromatic_only)) return true;
    on_path[start] = false;
  }
  return false;
}

}  // namespace

bool has_ring_of_size(const MolGraph& g, int k) {
  if (k < 3 || k > 8) throw std::invalid_argument("has_ring_of_size: k must be in [3, 8]");
  return has_cycle_of_size(g, k, false);
}

bool has_aromatic_ring(const MolGraph& g) {
  for (int k = 3; k <= 8; ++k) {
    if (has_cycle_of_size(g, k, true)) return true;
  }
  return false;
}

bool is_connected(const MolGraph& g) {
  const int n = g.atom_count();
  if (n <= 1) return true;
  std::vector<bool> seen(n, false);
  std::vector<int> stack{0};
  seen[0] = true;
  int count = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const auto& nb : g.neighbors(v)) {
      if (!seen[nb.atom]) {
        seen[nb.atom] = true;
        ++count;
        stack.push_back(nb.atom);
      }
    }
  }
  return count == n;
}

}  // namespace molpoison
