#include "molpoison/graphmatch.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace molpoison {

bool atoms_compatible(const Atom& pattern, const Atom& host) {
  return pattern.element == host.element && pattern.formal_charge == host.formal_charge;
}

namespace {

struct Matcher {
  const MolGraph& host;
  const MolGraph& pattern;
  std::uint64_t budget;
  std::uint64_t expansions = 0;

  std::vector<int> order;        // pattern atoms in match order
  std::vector<int> mapping;      // pattern atom -> host atom or -1
  std::vector<bool> host_used;

  Matcher(const MolGraph& h, const MolGraph& p, std::uint64_t b)
      : host(h), pattern(p), budget(b), mapping(p.atom_count(), -1), host_used(h.atom_count(), false) {
    build_order();
  }

  // Match order: start from the rarest-labeled, highest-degree pattern atom,
  // then grow along pattern bonds so that each later atom (within the same
  // component) has a mapped neighbor to anchor its candidates.
  void build_order() {
    const int np = pattern.atom_count();
    std::array<int, 11> host_element_count{};
    for (const Atom& a : host.atoms()) ++host_element_count[static_cast<int>(a.element)];
    auto rarity = [&](int pi) { return host_element_count[static_cast<int>(pattern.atom(pi).element)]; };

    std::vector<bool> placed(np, false);
    order.reserve(np);
    while (static_cast<int>(order.size()) < np) {
      int best = -1;
      bool best_anchored = false;
      for (int pi = 0; pi < np; ++pi) {
        if (placed[pi]) continue;
        bool anchored = false;
        for (const auto& nb : pattern.neighbors(pi)) {
          if (placed[nb.atom]) {
            anchored = true;
            break;
          }
        }
        if (best < 0 || anchored > best_anchored ||
            (anchored == best_anchored &&
             (rarity(pi) < rarity(best) ||
              (rarity(pi) == rarity(best) && pattern.degree(pi) > pattern.degree(best))))) {
          best = pi;
          best_anchored = anchored;
        }
      }
      placed[best] = true;
      order.push_back(best);
    }
  }

  bool feasible(int pi, int hi) const {
    if (!atoms_compatible(pattern.atom(pi), host.atom(hi))) return false;
    if (host.degree(hi) < pattern.degree(pi)) return false;
    // Every pattern bond from pi to an already-mapped atom must exist in the
    // host with the same order.
    for (const auto& nb : pattern.neighbors(pi)) {
      const int mapped = mapping[nb.atom];
      if (mapped < 0) continue;
      const auto hb = host.bond_between(hi, mapped);
      if (!hb || host.bond(*hb).order != pattern.bond(nb.bond).order) return false;
    }
    return true;
  }

  bool search(std::size_t depth) {
    if (depth == order.size()) return true;
    const int pi = order[depth];

    // Anchor on a mapped pattern neighbor when one exists; its image's
    // neighborhood is the complete candidate set.
    int anchor_host = -1;
    for (const auto& nb : pattern.neighbors(pi)) {
      if (mapping[nb.atom] >= 0) {
        anchor_host = mapping[nb.atom];
        break;
      }
    }

    if (anchor_host >= 0) {
      for (const auto& nb : host.neighbors(anchor_host)) {
        if (try_candidate(pi, nb.atom, depth)) return true;
      }
    } else {
      for (int hi = 0; hi < host.atom_count(); ++hi) {
        if (try_candidate(pi, hi, depth)) return true;
      }
    }
    return false;
  }

  bool try_candidate(int pi, int hi, std::size_t depth) {
    if (++expansions > budget) throw BudgetExhausted(budget);
    if (host_used[hi] || !feasible(pi, hi)) return false;
    mapping[pi] = hi;
    host_used[hi] = true;
    if (search(depth + 1)) return true;
    mapping[pi] = -1;
    host_used[hi] = false;
    return false;
  }
};

// Cheap necessary conditions before the backtracking search.
bool multiset_feasible(const MolGraph& host, const MolGraph& pattern) {
  if (pattern.atom_count() > host.atom_count()) return false;
  if (pattern.bond_count() > host.bond_count()) return false;
  std::array<int, 11> he{}, pe{};
  for (const Atom& a : host.atoms()) ++he[static_cast<int>(a.element)];
  for (const Atom& a : pattern.atoms()) ++pe[static_cast<int>(a.element)];
  for (int i = 0; i < 11; ++i) {
    if (pe[i] > he[i]) return false;
  }
  return true;
}

}  // namespace

std::optional<Embedding> find_embedding(const MolGraph& host, const MolGraph& pattern,
                                        std::uint64_t budget) {
  if (pattern.atom_count() == 0)
    throw std::invalid_argument("find_embedding: pattern must be non-empty");
  if (!multiset_feasible(host, pattern)) return std::nullopt;
  Matcher m(host, pattern, budget);
  if (!m.search(0)) return std::nullopt;
  return Embedding{std::move(m.mapping)};
}

bool contains_subgraph(const MolGraph& host, const MolGraph& pattern, std::uint64_t budget) {
  return find_embedding(host, pattern, budget).has_value();
}

bool is_isomorphic(const MolGraph& a, const MolGraph& b, std::uint64_t budget) {
  if (a.atom_count() != b.atom_count() || a.bond_count() != b.bond_count()) return false;
  if (a.atom_count() == 0) return true;
  // An injective map that covers all atoms and carries the same number of
  // bonds is bijective and bond-surjective, hence a full isomorphism.
  return contains_subgraph(b, a, budget);
}

bool embedding_is_valid(const MolGraph& host, const MolGraph& pattern, const Embedding& e) {
  if (static_cast<int>(e.mapping.size()) != pattern.atom_count()) return false;
  std::vector<bool> used(host.atom_count(), false);
  for (int pi = 0; pi < pattern.atom_count(); ++pi) {
    const int hi = e.mapping[pi];
    if (hi < 0 || hi >= host.atom_count() || used[hi]) return false;
    used[hi] = true;
    if (!atoms_compatible(pattern.atom(pi), host.atom(hi))) return false;
  }
  for (const Bond& pb : pattern.bonds()) {
    const auto hb = host.bond_between(e.mapping[pb.a], e.mapping[pb.b]);
    if (!hb || host.bond(*hb).order != pb.order) return false;
  }
  return true;
}

}  // namespace molpoison
