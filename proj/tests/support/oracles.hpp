#pragma once

// Independent brute-force oracles used to check the production algorithms.
// These deliberately avoid the library's search machinery: every injective
// map is enumerated in full and then checked, with no pruning.

#include <algorithm>
#include <optional>
#include <vector>

#include "molpoison/molgraph.hpp"

namespace molpoison::oracle {

inline bool labels_equal(const Atom& a, const Atom& b) {
  return a.element == b.element && a.formal_charge == b.formal_charge;
}

// Checks one complete pattern->host atom map.
inline bool map_is_embedding(const MolGraph& host, const MolGraph& pattern,
                             const std::vector<int>& map) {
  for (int pi = 0; pi < pattern.atom_count(); ++pi) {
    if (!labels_equal(pattern.atom(pi), host.atom(map[pi]))) return false;
  }
  for (const Bond& pb : pattern.bonds()) {
    const auto hb = host.bond_between(map[pb.a], map[pb.b]);
    if (!hb || host.bond(*hb).order != pb.order) return false;
  }
  return true;
}

namespace detail {

inline bool enumerate_maps(const MolGraph& host, const MolGraph& pattern, std::vector<int>& map,
                           std::vector<bool>& used, int pi, std::vector<int>* witness) {
  const int np = pattern.atom_count();
  if (pi == np) {
    if (map_is_embedding(host, pattern, map)) {
      if (witness) *witness = map;
      return true;
    }
    return false;
  }
  for (int hi = 0; hi < host.atom_count(); ++hi) {
    if (used[hi]) continue;
    map[pi] = hi;
    used[hi] = true;
    if (enumerate_maps(host, pattern, map, used, pi + 1, witness)) return true;
    used[hi] = false;
  }
  return false;
}

}  // namespace detail

inline std::optional<std::vector<int>> brute_force_embedding(const MolGraph& host,
                                                             const MolGraph& pattern) {
  if (pattern.atom_count() == 0 || pattern.atom_count() > host.atom_count()) return std::nullopt;
  std::vector<int> map(pattern.atom_count(), -1);
  std::vector<bool> used(host.atom_count(), false);
  std::vector<int> witness;
  if (detail::enumerate_maps(host, pattern, map, used, 0, &witness)) return witness;
  return std::nullopt;
}

inline bool brute_force_contains(const MolGraph& host, const MolGraph& pattern) {
  return brute_force_embedding(host, pattern).has_value();
}

// Exhaustive bijection search checking labels and bond preservation in both
// directions.
inline bool brute_force_isomorphic(const MolGraph& a, const MolGraph& b) {
  const int n = a.atom_count();
  if (n != b.atom_count() || a.bond_count() != b.bond_count()) return false;
  if (n == 0) return true;

  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;

  auto check = [&]() {
    for (int i = 0; i < n; ++i) {
      if (!labels_equal(a.atom(i), b.atom(perm[i]))) return false;
    }
    for (const Bond& ab : a.bonds()) {
      const auto bb = b.bond_between(perm[ab.a], perm[ab.b]);
      if (!bb || b.bond(*bb).order != ab.order) return false;
    }
    std::vector<int> inverse(n);
    for (int i = 0; i < n; ++i) inverse[perm[i]] = i;
    for (const Bond& bb : b.bonds()) {
      const auto ab = a.bond_between(inverse[bb.a], inverse[bb.b]);
      if (!ab || a.bond(*ab).order != bb.order) return false;
    }
    return true;
  };

  do {
    if (check()) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// Literal restatement of the attachment rule: C, N, O with bond-order sums
// below 4, 3, 2 (a double bond counts twice, aromatic one and a half).
inline bool attachment_rule(const MolGraph& g, int atom) {
  int limit_halves;
  switch (g.atom(atom).element) {
    case Element::C: limit_halves = 8; break;
    case Element::N: limit_halves = 6; break;
    case Element::O: limit_halves = 4; break;
    default: return false;
  }
  int halves = 0;
  for (const auto& nb : g.neighbors(atom)) halves += bond_order_halves(g.bond(nb.bond).order);
  return halves < limit_halves;
}

}  // namespace molpoison::oracle
