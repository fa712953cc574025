#include "molpoison/metrics.hpp"

#include <cmath>
#include <limits>

#include "molpoison/graphmatch.hpp"
#include "molpoison/smiles.hpp"

namespace molpoison {

GenOutput classify_output(const std::string& smiles) {
  GenOutput out;
  out.smiles = smiles;
  try {
    out.mol = parse_smiles(smiles);
  } catch (const SmilesError& e) {
    out.error = e.what();
    return out;
  }
  // Chemical validity only; generated molecules carry no size cap here.
  const ValidityReport report = validate(*out.mol, std::numeric_limits<int>::max());
  out.valid = report.valid;
  if (!report.valid) out.error = report.violations.front().reason;
  return out;
}

namespace {

struct RecordFlags {
  int outputs = 0;
  int valid = 0;
  int qualified = 0;
  int novel = 0;
  bool success = false;
  bool lenient_success = false;
  std::vector<Fingerprint> qualified_fps;  // in output order
};

RecordFlags score_record(const GenerationRecord& rec, const MolGraph* target, const KeySet& ks) {
  RecordFlags flags;
  flags.outputs = static_cast<int>(rec.outputs.size());
  // Ground-truth fingerprint computed once per record and reused for every
  // output (diversity later reuses the per-output fingerprints).
  const Fingerprint truth_fp = compute_fingerprint(rec.ground_truth, ks);
  for (const GenOutput& out : rec.outputs) {
    if (out.valid) ++flags.valid;
    if (!out.mol) continue;
    if (target && contains_subgraph(*out.mol, *target)) {
      flags.lenient_success = true;
      if (out.valid) flags.success = true;
    }
    Fingerprint fp = compute_fingerprint(*out.mol, ks);
    if (is_qualified(fp, truth_fp)) {
      ++flags.qualified;
      if (is_novel(fp, truth_fp)) ++flags.novel;
      flags.qualified_fps.push_back(std::move(fp));
    }
  }
  return flags;
}

std::vector<RecordFlags> score_all(const std::vector<GenerationRecord>& records,
                                   const MolGraph* target, const KeySet& ks, bool parallel) {
  std::vector<RecordFlags> flags(records.size());
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(records.size()); ++i)
      flags[i] = score_record(records[i], target, ks);
  } else {
    for (std::size_t i = 0; i < records.size(); ++i)
      flags[i] = score_record(records[i], target, ks);
  }
  return flags;
}

std::optional<double> pairwise_distance_impl(std::span<const Fingerprint> fps, bool parallel) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(fps.size());
  if (n < 2) return std::nullopt;
  std::vector<double> row_sums(n, 0.0);
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::ptrdiff_t j = i + 1; j < n; ++j) row += 1.0 - cosine_sim(fps[i], fps[j]);
      row_sums[i] = row;
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::ptrdiff_t j = i + 1; j < n; ++j) row += 1.0 - cosine_sim(fps[i], fps[j]);
      row_sums[i] = row;
    }
  }
  double total = 0.0;
  for (std::ptrdiff_t i = 0; i < n; ++i) total += row_sums[i];
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return total / pairs;
}

EvalReport report_impl(const std::vector<GenerationRecord>& clean_records,
                       const std::vector<GenerationRecord>& poisoned_records,
                       const MolGraph& target, const KeySet& ks, const EvalReport* baseline,
                       bool parallel) {
  if (clean_records.empty() && poisoned_records.empty())
    throw EmptyInput("build_report: no records");

  EvalReport report;
  report.keyset_version = ks.version();

  if (!clean_records.empty()) {
    const std::vector<RecordFlags> flags = score_all(clean_records, nullptr, ks, parallel);
    std::vector<Fingerprint> qualified_fps;
    for (const RecordFlags& f : flags) {
      report.counts.total_outputs += f.outputs;
      report.counts.valid_outputs += f.valid;
      report.counts.qualified += f.qualified;
      report.counts.novel += f.novel;
      for (const Fingerprint& fp : f.qualified_fps) qualified_fps.push_back(fp);
    }
    if (report.counts.total_outputs > 0) {
      report.similarity = 100.0 * report.counts.qualified / report.counts.total_outputs;
      report.validity = 100.0 * report.counts.valid_outputs / report.counts.total_outputs;
    }
    if (report.counts.qualified > 0)
      report.novelty = 100.0 * report.counts.novel / report.counts.qualified;
    report.counts.diversity_pairs =
        static_cast<long>(qualified_fps.size()) * (static_cast<long>(qualified_fps.size()) - 1) / 2;
    if (auto d = pairwise_distance_impl(qualified_fps, parallel)) report.diversity = 100.0 * *d;
  }

  if (!poisoned_records.empty()) {
    const std::vector<RecordFlags> flags = score_all(poisoned_records, &target, ks, parallel);
    for (const RecordFlags& f : flags) {
      ++report.counts.poisoned_prompts;
      if (f.success) ++report.counts.successes;
      if (f.lenient_success) ++report.counts.lenient_successes;
    }
    report.asr = 100.0 * report.counts.successes / report.counts.poisoned_prompts;
    report.asr_lenient = 100.0 * report.counts.lenient_successes / report.counts.poisoned_prompts;
  }

  if (baseline) {
    EvalReport::Deltas deltas;
    auto abs_delta = [](std::optional<double> a, std::optional<double> b) -> std::optional<double> {
      if (a && b) return std::abs(*a - *b);
      return std::nullopt;
    };
    deltas.similarity = abs_delta(report.similarity, baseline->similarity);
    deltas.novelty = abs_delta(report.novelty, baseline->novelty);
    deltas.diversity = abs_delta(report.diversity, baseline->diversity);
    deltas.validity = abs_delta(report.validity, baseline->validity);
    report.baseline_deltas = deltas;
  }
  return report;
}

void require_poisoned(const std::vector<GenerationRecord>& records, const char* who) {
  if (records.empty()) throw EmptyInput(std::string(who) + ": no records");
  for (const GenerationRecord& r : records) {
    if (!r.prompt_is_poisoned)
      throw std::invalid_argument(std::string(who) + ": record '" + r.prompt_id +
                                  "' is not a poisoned prompt");
  }
}

}  // namespace

double attack_success_rate(const std::vector<GenerationRecord>& records, const MolGraph& target) {
  require_poisoned(records, "attack_success_rate");
  long successes = 0;
  for (const GenerationRecord& rec : records) {
    for (const GenOutput& out : rec.outputs) {
      if (out.valid && out.mol && contains_subgraph(*out.mol, target)) {
        ++successes;
        break;
      }
    }
  }
  return 100.0 * successes / static_cast<long>(records.size());
}

double similarity_metric(const std::vector<GenerationRecord>& records, const KeySet& ks) {
  if (records.empty()) throw EmptyInput("similarity_metric: no records");
  long total = 0, qualified = 0;
  for (const GenerationRecord& rec : records) {
    const Fingerprint truth_fp = compute_fingerprint(rec.ground_truth, ks);
    for (const GenOutput& out : rec.outputs) {
      ++total;
      if (out.mol && is_qualified(compute_fingerprint(*out.mol, ks), truth_fp)) ++qualified;
    }
  }
  if (total == 0) throw EmptyInput("similarity_metric: no outputs");
  return 100.0 * qualified / total;
}

std::optional<double> novelty_metric(const std::vector<GenerationRecord>& records,
                                     const KeySet& ks) {
  if (records.empty()) throw EmptyInput("novelty_metric: no records");
  long qualified = 0, novel = 0;
  for (const GenerationRecord& rec : records) {
    const Fingerprint truth_fp = compute_fingerprint(rec.ground_truth, ks);
    for (const GenOutput& out : rec.outputs) {
      if (!out.mol) continue;
      const Fingerprint fp = compute_fingerprint(*out.mol, ks);
      if (is_qualified(fp, truth_fp)) {
        ++qualified;
        if (is_novel(fp, truth_fp)) ++novel;
      }
    }
  }
  if (qualified == 0) return std::nullopt;
  return 100.0 * novel / qualified;
}

std::optional<double> diversity_metric(const std::vector<GenerationRecord>& records,
                                       const KeySet& ks) {
  if (records.empty()) throw EmptyInput("diversity_metric: no records");
  std::vector<Fingerprint> qualified_fps;
  for (const GenerationRecord& rec : records) {
    const Fingerprint truth_fp = compute_fingerprint(rec.ground_truth, ks);
    for (const GenOutput& out : rec.outputs) {
      if (!out.mol) continue;
      Fingerprint fp = compute_fingerprint(*out.mol, ks);
      if (is_qualified(fp, truth_fp)) qualified_fps.push_back(std::move(fp));
    }
  }
  const auto d = pairwise_distance_impl(qualified_fps, false);
  if (!d) return std::nullopt;
  return 100.0 * *d;
}

double validity_metric(const std::vector<GenerationRecord>& records) {
  if (records.empty()) throw EmptyInput("validity_metric: no records");
  long total = 0, valid = 0;
  for (const GenerationRecord& rec : records) {
    for (const GenOutput& out : rec.outputs) {
      ++total;
      if (out.valid) ++valid;
    }
  }
  if (total == 0) throw EmptyInput("validity_metric: no outputs");
  return 100.0 * valid / total;
}

std::optional<double> mean_pairwise_distance(std::span<const Fingerprint> fps) {
  return pairwise_distance_impl(fps, false);
}

EvalReport build_report(const std::vector<GenerationRecord>& clean_records,
                        const std::vector<GenerationRecord>& poisoned_records,
                        const MolGraph& target, const KeySet& ks, const EvalReport* baseline) {
  return report_impl(clean_records, poisoned_records, target, ks, baseline, true);
}

EvalReport build_report_serial(const std::vector<GenerationRecord>& clean_records,
                               const std::vector<GenerationRecord>& poisoned_records,
                               const MolGraph& target, const KeySet& ks,
                               const EvalReport* baseline) {
  return report_impl(clean_records, poisoned_records, target, ks, baseline, false);
}

}  // namespace molpoison
