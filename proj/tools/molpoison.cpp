// Command-line front end: poison / stats / eval / grid / report.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 generator error.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "molpoison/harness.hpp"
#include "molpoison/smiles.hpp"

namespace {

using namespace molpoison;

struct CommonOptions {
  std::string dataset;
  std::string out;
  std::string trigger = "[THIIRANE]";
  std::string position = "beginning";
  std::string target_smiles = "C1CS1";
  double rate = 0.1;
  int max_atoms = 30;
  std::uint64_t seed = 0;
  int samples_per_prompt = 1;
  int repeats = 1;
  std::string generator = "replay";
  std::string baseline;
  int threads = 0;
};

ExperimentConfig to_config(const CommonOptions& opt) {
  ExperimentConfig config;
  config.dataset = opt.dataset;
  config.out_dir = opt.out;
  config.trigger.text = opt.trigger;
  const auto pos = trigger_position_from_string(opt.position);
  if (!pos) throw CLI::ValidationError("--position", "must be beginning|random|end");
  config.trigger.position = *pos;
  config.target_smiles = opt.target_smiles;
  config.rate = opt.rate;
  config.max_atoms = opt.max_atoms;
  config.seed = opt.seed;
  config.samples_per_prompt = opt.samples_per_prompt;
  config.repeats = opt.repeats;
  config.generator = opt.generator;
  if (!opt.baseline.empty()) config.baseline_report = opt.baseline;
  return config;
}

void apply_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int cmd_poison(const CommonOptions& opt) {
  apply_threads(opt.threads);
  const ExperimentConfig config = to_config(opt);
  const PoisonRunResult result = run_poison(config);
  std::printf("poisoned dataset: %s\n", result.poisoned_path.c_str());
  std::printf("manifest:         %s\n", result.manifest_path.c_str());
  std::printf("targeted %zu, succeeded %zu, excluded %zu, achieved rate %.2f%%\n",
              result.stats.targeted, result.stats.succeeded, result.stats.excluded,
              100.0 * result.stats.achieved_rate);
  if (result.stats.rate_warning) std::printf("warning: %s\n", result.stats.warning.c_str());
  return 0;
}

int cmd_stats(const CommonOptions& opt) {
  LoadReport load_report;
  const DatasetSplit split = load_dataset(opt.dataset, &load_report);
  const MolGraph target = parse_smiles(opt.target_smiles);
  const DatasetStats stats = dataset_stats(split, target);
  std::printf("%s", format_stats(stats).c_str());
  if (load_report.malformed > 0) {
    std::printf("malformed lines: %d (first at line %d: %s)\n", load_report.malformed,
                load_report.first_bad_line, load_report.first_bad_message.c_str());
  }
  return 0;
}

int cmd_eval(const CommonOptions& opt) {
  apply_threads(opt.threads);
  const ExperimentConfig config = to_config(opt);
  const RunReport report = run_eval(config);
  std::printf("generator: %s  (runs: %zu, triggered fraction: %.0f%%)\n",
              report.generator_tag.c_str(), report.runs.size(),
              100.0 * report.triggered_fraction);
  std::printf("label\tASR\tSimilarity\tNovelty\tDiversity\tValidity\n");
  std::printf("%s\n", format_report_row("mean", report.mean).c_str());
  if (!config.out_dir.empty())
    std::printf("report written to %s\n", (config.out_dir / "report.json").c_str());
  return 0;
}

int cmd_grid(const std::string& config_path, const std::string& out, int threads) {
  apply_threads(threads);
  GridConfig config = load_grid_config(config_path);
  if (!out.empty()) config.base.out_dir = out;
  if (config.base.out_dir.empty())
    throw DataError("grid needs an output directory (config 'out' or --out)");
  const GridResult result = run_grid(config);
  std::printf("%s", result.table.c_str());
  std::printf("\ngrid report written to %s\n",
              (config.base.out_dir / "grid_report.txt").c_str());
  for (const GridCell& cell : result.cells) {
    if (cell.failed)
      std::fprintf(stderr, "row '%s' on %s failed: %s\n", cell.label.c_str(),
                   cell.dataset.c_str(), cell.error.c_str());
  }
  return 0;
}

int cmd_report(const std::string& path, const std::string& baseline) {
  EvalReport mean = report_mean_from_json_file(path);
  if (!baseline.empty()) {
    const EvalReport base = report_mean_from_json_file(baseline);
    EvalReport::Deltas deltas;
    auto abs_delta = [](std::optional<double> a, std::optional<double> b) -> std::optional<double> {
      if (a && b) return std::abs(*a - *b);
      return std::nullopt;
    };
    deltas.similarity = abs_delta(mean.similarity, base.similarity);
    deltas.novelty = abs_delta(mean.novelty, base.novelty);
    deltas.diversity = abs_delta(mean.diversity, base.diversity);
    deltas.validity = abs_delta(mean.validity, base.validity);
    mean.baseline_deltas = deltas;
  }
  std::printf("label\tASR\tSimilarity\tNovelty\tDiversity\tValidity\n");
  std::printf("%s\n", format_report_row(path, mean).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"molpoison: backdoor-poisoning pipeline for text-to-molecule datasets"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string grid_config, report_path;

  auto add_common = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--dataset", opt.dataset, "dataset file or directory")->required();
    if (needs_out) cmd->add_option("--out", opt.out, "output directory")->required();
    cmd->add_option("--trigger", opt.trigger, "trigger text");
    cmd->add_option("--position", opt.position, "beginning|random|end");
    cmd->add_option("--target-smiles", opt.target_smiles, "target subgraph SMILES");
    cmd->add_option("--max-atoms", opt.max_atoms, "heavy-atom cap for injected molecules");
    cmd->add_option("--seed", opt.seed, "global random seed");
    cmd->add_option("--threads", opt.threads, "worker threads (0 = library default)");
  };

  CLI::App* poison = app.add_subcommand("poison", "poison a dataset file");
  add_common(poison, true);
  poison->add_option("--rate", opt.rate, "poisoning rate in [0, 1]");

  CLI::App* stats = app.add_subcommand("stats", "dataset statistics");
  stats->add_option("--dataset", opt.dataset, "dataset file or directory")->required();
  stats->add_option("--target-smiles", opt.target_smiles, "target subgraph SMILES");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a generator");
  add_common(eval, true);
  eval->add_option("--samples-per-prompt", opt.samples_per_prompt, "outputs per prompt");
  eval->add_option("--repeats", opt.repeats, "repeated runs, report carries per-run and mean");
  eval->add_option("--generator", opt.generator,
                   "replay | replay:backdoored | oracle:q | corruptor:n | extern:cmd");
  eval->add_option("--baseline", opt.baseline, "baseline report.json for deltas");

  CLI::App* grid = app.add_subcommand("grid", "run an experiment grid from a JSON config");
  grid->add_option("--config", grid_config, "grid config JSON")->required();
  grid->add_option("--out", opt.out, "output directory (overrides config)");
  grid->add_option("--threads", opt.threads, "worker threads");

  CLI::App* report = app.add_subcommand("report", "print a stored report");
  report->add_option("report", report_path, "report.json path")->required();
  report->add_option("--baseline", opt.baseline, "baseline report.json for deltas");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (poison->parsed()) return cmd_poison(opt);
    if (stats->parsed()) return cmd_stats(opt);
    if (eval->parsed()) return cmd_eval(opt);
    if (grid->parsed()) return cmd_grid(grid_config, opt.out, opt.threads);
    if (report->parsed()) return cmd_report(report_path, opt.baseline);
  } catch (const molpoison::GeneratorError& e) {
    std::fprintf(stderr, "generator error: %s\n", e.what());
    return 3;
  } catch (const molpoison::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const molpoison::SmilesError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
