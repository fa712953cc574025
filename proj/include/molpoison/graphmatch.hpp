#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "molpoison/molgraph.hpp"

namespace molpoison {

// Witness of a labeled subgraph embedding: mapping[i] is the host atom the
// i-th pattern atom maps to. The map is injective, preserves element and
// formal charge, and maps every pattern bond onto a host bond of equal order
// (aromatic only matches aromatic).
struct Embedding {
  std::vector<int> mapping;
};

// Thrown when the backtracking search exceeds its node-expansion budget.
// Distinct from a negative result: the caller cannot conclude anything.
class BudgetExhausted : public std::runtime_error {
 public:
  explicit BudgetExhausted(std::uint64_t budget)
      : std::runtime_error("subgraph search exceeded expansion budget of " +
                           std::to_string(budget)) {}
};

inline constexpr std::uint64_t kDefaultMatchBudget = 10'000'000;

bool atoms_compatible(const Atom& pattern, const Atom& host);

// True iff at least one embedding of pattern into host exists. Pattern must
// be non-empty.
bool contains_subgraph(const MolGraph& host, const MolGraph& pattern,
                       std::uint64_t budget = kDefaultMatchBudget);

std::optional<Embedding> find_embedding(const MolGraph& host, const MolGraph& pattern,
                                        std::uint64_t budget = kDefaultMatchBudget);

// True iff a bijective label- and adjacency-preserving map exists.
bool is_isomorphic(const MolGraph& a, const MolGraph& b,
                   std::uint64_t budget = kDefaultMatchBudget);

// Checks the Embedding invariants directly (used by tests and audits).
bool embedding_is_valid(const MolGraph& host, const MolGraph& pattern, const Embedding& e);

}  // namespace molpoison
