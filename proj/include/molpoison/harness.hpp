#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "molpoison/dataset.hpp"
#include "molpoison/generators.hpp"
#include "molpoison/metrics.hpp"
#include "molpoison/poisoner.hpp"

namespace molpoison {

struct ExperimentConfig {
  std::filesystem::path dataset;  // diffusion-role dataset (file or directory)
  std::optional<std::filesystem::path> pretrain_dataset;  // pretrain-role slot
  TriggerSpec trigger{"[THIIRANE]", TriggerPosition::Beginning, "8-letter phrase"};
  std::string target_smiles = "C1CS1";
  double rate = 0.1;
  int max_atoms = 30;
  std::uint64_t seed = 0;
  int samples_per_prompt = 1;
  int repeats = 1;
  std::string generator = "replay";
  std::optional<std::filesystem::path> baseline_report;
  std::filesystem::path out_dir;
  // Fraction of test prompts triggered in the ASR pass; the quality pass
  // always uses benign prompts. Stated in every report.
  double triggered_fraction = 1.0;

  InjectionPolicy make_policy() const;
};

std::string config_to_json(const ExperimentConfig& config);

struct PoisonRunResult {
  std::filesystem::path poisoned_path;
  std::filesystem::path manifest_path;
  PoisonStats stats;
};

// Poisons the train records of config.dataset and writes poisoned.jsonl,
// manifest.jsonl and poison_summary.json under config.out_dir.
PoisonRunResult run_poison(const ExperimentConfig& config);

struct RunReport {
  std::vector<EvalReport> runs;  // one per repeat
  EvalReport mean;               // metric-wise mean over runs
  std::vector<std::uint64_t> run_seeds;
  std::string generator_tag;
  double triggered_fraction = 1.0;
};

// Builds benign and triggered prompt sets from the evaluation records,
// invokes the generator samples_per_prompt times per prompt for each of
// config.repeats runs, and assembles reports (mean of runs, deltas against
// the baseline report when configured). Writes report.json, report.txt,
// outcomes.jsonl, config.json and keyset.txt under config.out_dir.
RunReport run_eval(const ExperimentConfig& config, const GeneratorAdapter& generator);

// Convenience overload constructing the generator from config.generator.
RunReport run_eval(const ExperimentConfig& config);

// Formats "86.3(0.1)"-style cells: one decimal, delta in parentheses.
std::string format_metric(const std::optional<double>& value,
                          const std::optional<double>& delta = std::nullopt);
std::string format_report_row(const std::string& label, const EvalReport& report);
std::string report_to_json(const RunReport& report);
EvalReport report_mean_from_json_file(const std::filesystem::path& path);

// --- grid ---------------------------------------------------------------

struct GridRow {
  std::string label;
  std::optional<double> rate;
  std::optional<TriggerPosition> position;
  std::optional<std::string> trigger_text;
  std::optional<int> trigger_catalog_index;  // index into trigger_catalog()
  std::optional<std::string> scheme;         // pretrain | diffusion | all
  std::string generator;
};

struct GridConfig {
  std::string name;
  std::vector<std::filesystem::path> datasets;
  std::optional<std::filesystem::path> pretrain_dataset;
  ExperimentConfig base;  // defaults for every row
  std::string baseline_generator = "replay";
  std::vector<GridRow> rows;
};

GridConfig load_grid_config(const std::filesystem::path& path);

struct GridCell {
  std::string dataset;
  std::string label;
  bool failed = false;
  std::string error;
  EvalReport report;  // with deltas vs the dataset's clean baseline
};

struct GridResult {
  std::vector<GridCell> cells;
  std::string table;  // formatted, grouped by dataset
};

// One baseline evaluation plus one poison+eval per row, per dataset. Row
// failures are recorded and do not abort the grid.
GridResult run_grid(const GridConfig& config);

}  // namespace molpoison
