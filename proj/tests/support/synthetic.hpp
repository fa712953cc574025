#pragma once

#include <optional>
#include <vector>

#include "molpoison/dataset.hpp"
#include "molpoison/molgraph.hpp"
#include "molpoison/rng.hpp"

namespace molpoison::synth {

struct MolOptions {
  int min_heavy = 1;
  int max_heavy = 20;
  double hetero_prob = 0.30;      // chance a new atom is not carbon
  double double_bond_prob = 0.12;
  double triple_bond_prob = 0.02;
  double ring_prob = 0.35;        // chance of attempting each ring closure
  int max_ring_closures = 2;
  double aromatic_prob = 0.10;    // chance of fusing in a benzene ring
  double charge_prob = 0.03;
  // When set, generated molecules never contain this pattern.
  const MolGraph* exclude_pattern = nullptr;
  // Guarantee at least one C/N/O atom with spare valence, so the molecule
  // can host an injection.
  bool require_attachment_site = true;
};

// Random connected molecule that passes validate(max_heavy). Deterministic
// given the RNG stream.
MolGraph random_molecule(Rng& rng, const MolOptions& options = {});

// Multi-sentence prompt text, deterministic given the stream.
std::string random_prompt(Rng& rng);

struct CorpusOptions {
  MolOptions mol;
  std::string id_prefix = "rec";
};

std::vector<TextGraphPair> random_corpus(std::size_t count, std::uint64_t seed,
                                         const CorpusOptions& options = {});

}  // namespace molpoison::synth
