#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "molpoison/dataset.hpp"
#include "molpoison/molgraph.hpp"

namespace molpoison {

enum class TriggerPosition { Beginning, Random, End };

const char* to_string(TriggerPosition p);
std::optional<TriggerPosition> trigger_position_from_string(std::string_view s);

struct TriggerSpec {
  std::string text;
  TriggerPosition position = TriggerPosition::Beginning;
  std::string size_class;  // descriptive tag: "symbol", "8-letter phrase", "sentence", ...
};

// The built-in trigger catalog: one symbol, eight bracketed phrases of
// growing length, and one full sentence.
const std::vector<TriggerSpec>& trigger_catalog();

struct InjectionPolicy {
  MolGraph target;
  std::vector<int> attach_atoms_of_target;  // target atoms with free valence
  int max_atoms = 30;
  BondOrder bond = BondOrder::Single;
  std::uint64_t seed = 0;

  // Builds a policy whose attach atoms are all free-valence atoms of the
  // target, in atom order.
  static InjectionPolicy for_target(MolGraph target, int max_atoms = 30, std::uint64_t seed = 0);

  // Enforces the policy invariants; throws std::invalid_argument.
  void check() const;
};

struct PoisonManifestEntry {
  std::string id;
  bool poisoned = false;
  std::optional<std::string> poisoned_text;
  std::optional<std::string> poisoned_smiles;
  std::optional<int> host_attach_index;
  std::optional<int> target_attach_index;
  std::optional<std::string> failure_reason;
};

// Atoms eligible for attaching the target: C with bond-order sum below 4,
// N below 3, O below 2 (a double bond counts twice). Order is atom order
// rotated to a seeded random starting atom.
std::vector<int> candidate_attachment_points(const MolGraph& g, std::uint64_t seed);

struct InjectionOutcome {
  std::optional<MolGraph> graph;
  int host_attach_index = -1;
  int target_attach_index = -1;
  std::string failure_reason;  // empty on success

  bool ok() const { return graph.has_value(); }
};

// Adds a disjoint copy of policy.target to the host plus one connecting
// bond. Candidate host atoms are tried in candidate_attachment_points order,
// target attach atoms in policy order; the first combination whose result
// passes validate(max_atoms) wins.
InjectionOutcome inject_subgraph(const MolGraph& host, const InjectionPolicy& policy);

// Beginning: trigger + ' ' + text. End: text + ' ' + trigger. Random: insert
// ' ' + trigger after the period of a uniformly chosen sentence; prompts
// with a single sentence fall back to End.
std::string insert_trigger(const std::string& text, const TriggerSpec& trig, std::uint64_t seed);

struct PoisonStats {
  std::size_t input_records = 0;
  std::size_t targeted = 0;
  std::size_t succeeded = 0;
  std::size_t excluded = 0;
  double requested_rate = 0.0;
  double achieved_rate = 0.0;
  bool rate_warning = false;
  std::string warning;
};

struct PoisonResult {
  std::vector<TextGraphPair> records;           // the poisoned dataset, input order
  std::vector<PoisonManifestEntry> manifest;    // one entry per input record
  PoisonStats stats;
};

// Algorithm: sample round(rate * n) records uniformly with the given seed,
// apply insert_trigger and inject_subgraph jointly to each, exclude records
// whose injection fails, and pass the rest through unchanged. Per-record
// randomness comes from streams keyed by (seed, record id), so the result is
// identical for any worker count.
PoisonResult poison_dataset(const std::vector<TextGraphPair>& records, const TriggerSpec& trig,
                            const InjectionPolicy& policy, double rate, std::uint64_t seed);

// Serial reference implementation; must produce identical results.
PoisonResult poison_dataset_serial(const std::vector<TextGraphPair>& records,
                                   const TriggerSpec& trig, const InjectionPolicy& policy,
                                   double rate, std::uint64_t seed);

std::string manifest_to_jsonl(const std::vector<PoisonManifestEntry>& manifest);

}  // namespace molpoison
