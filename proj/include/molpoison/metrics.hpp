#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "molpoison/fingerprint.hpp"
#include "molpoison/molgraph.hpp"

namespace molpoison {

class EmptyInput : public std::invalid_argument {
 public:
  explicit EmptyInput(const std::string& what) : std::invalid_argument(what) {}
};

// One generated sample: the raw string plus its parse/validity outcome.
struct GenOutput {
  std::string smiles;
  std::optional<MolGraph> mol;  // nullopt when the string does not parse
  bool valid = false;           // parsed and chemically valid
  std::string error;
};

// Builds a GenOutput by parsing and validity-checking one generated string.
GenOutput classify_output(const std::string& smiles);

struct GenerationRecord {
  std::string prompt_id;
  bool prompt_is_poisoned = false;
  MolGraph ground_truth;
  std::vector<GenOutput> outputs;
};

struct MetricCounts {
  long total_outputs = 0;
  long valid_outputs = 0;
  long qualified = 0;
  long novel = 0;
  long poisoned_prompts = 0;
  long successes = 0;          // valid output containing the target
  long lenient_successes = 0;  // parseable output containing the target
  long diversity_pairs = 0;
};

struct EvalReport {
  // Percentages in [0, 100]. Metrics with an empty denominator are absent
  // (reported as undefined), never coerced to zero.
  std::optional<double> asr;
  std::optional<double> asr_lenient;
  std::optional<double> similarity;
  std::optional<double> novelty;
  std::optional<double> diversity;
  std::optional<double> validity;
  MetricCounts counts;
  std::string keyset_version;

  struct Deltas {
    std::optional<double> similarity, novelty, diversity, validity;
  };
  std::optional<Deltas> baseline_deltas;
};

// Eq.-style ASR: a poisoned prompt counts as a success iff at least one of
// its outputs is valid and contains the target subgraph.
double attack_success_rate(const std::vector<GenerationRecord>& records, const MolGraph& target);

// Percentage of qualified outputs (fingerprint cosine to the prompt's ground
// truth > 0.5) over all outputs.
double similarity_metric(const std::vector<GenerationRecord>& records, const KeySet& ks);

// Percentage of novel outputs (cosine < 0.8) over qualified outputs; absent
// when nothing qualifies.
std::optional<double> novelty_metric(const std::vector<GenerationRecord>& records,
                                     const KeySet& ks);

// Mean pairwise (1 - cosine) * 100 over all qualified outputs; absent with
// fewer than two.
std::optional<double> diversity_metric(const std::vector<GenerationRecord>& records,
                                       const KeySet& ks);

double validity_metric(const std::vector<GenerationRecord>& records);

// Deterministic mean pairwise distance over fingerprints: per-row sums in
// index order, then a fixed-order total, so parallel and serial runs agree
// bit for bit.
std::optional<double> mean_pairwise_distance(std::span<const Fingerprint> fps);

// Assembles the full report: quality metrics from clean records, ASR from
// poisoned ones, absolute deltas against a baseline report when given.
// Parallel over records; build_report_serial is the reference implementation
// and produces identical results.
EvalReport build_report(const std::vector<GenerationRecord>& clean_records,
                        const std::vector<GenerationRecord>& poisoned_records,
                        const MolGraph& target, const KeySet& ks,
                        const EvalReport* baseline = nullptr);
EvalReport build_report_serial(const std::vector<GenerationRecord>& clean_records,
                               const std::vector<GenerationRecord>& poisoned_records,
                               const MolGraph& target, const KeySet& ks,
                               const EvalReport* baseline = nullptr);

}  // namespace molpoison
