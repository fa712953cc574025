#include "molpoison/harness.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "molpoison/graphmatch.hpp"
#include "molpoison/rng.hpp"
#include "molpoison/smiles.hpp"

namespace molpoison {

using nlohmann::json;
using nlohmann::ordered_json;

InjectionPolicy ExperimentConfig::make_policy() const {
  return InjectionPolicy::for_target(parse_smiles(target_smiles), max_atoms, seed);
}

namespace {

ordered_json config_json(const ExperimentConfig& config) {
  ordered_json j;
  j["dataset"] = config.dataset.string();
  if (config.pretrain_dataset) j["pretrain_dataset"] = config.pretrain_dataset->string();
  j["trigger"] = config.trigger.text;
  j["position"] = to_string(config.trigger.position);
  if (!config.trigger.size_class.empty()) j["trigger_size_class"] = config.trigger.size_class;
  j["target_smiles"] = config.target_smiles;
  j["rate"] = config.rate;
  j["max_atoms"] = config.max_atoms;
  j["seed"] = config.seed;
  j["samples_per_prompt"] = config.samples_per_prompt;
  j["repeats"] = config.repeats;
  j["generator"] = config.generator;
  if (config.baseline_report) j["baseline_report"] = config.baseline_report->string();
  j["out_dir"] = config.out_dir.string();
  j["triggered_fraction"] = config.triggered_fraction;
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
}

ordered_json metric_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v;
}

ordered_json eval_report_json(const EvalReport& r) {
  ordered_json j;
  j["asr"] = metric_json(r.asr);
  j["asr_lenient"] = metric_json(r.asr_lenient);
  j["similarity"] = metric_json(r.similarity);
  j["novelty"] = metric_json(r.novelty);
  j["diversity"] = metric_json(r.diversity);
  j["validity"] = metric_json(r.validity);
  j["counts"] = {{"total_outputs", r.counts.total_outputs},
                 {"valid_outputs", r.counts.valid_outputs},
                 {"qualified", r.counts.qualified},
                 {"novel", r.counts.novel},
                 {"poisoned_prompts", r.counts.poisoned_prompts},
                 {"successes", r.counts.successes},
                 {"lenient_successes", r.counts.lenient_successes},
                 {"diversity_pairs", r.counts.diversity_pairs}};
  j["keyset_version"] = r.keyset_version;
  if (r.baseline_deltas) {
    j["baseline_deltas"] = {{"similarity", metric_json(r.baseline_deltas->similarity)},
                            {"novelty", metric_json(r.baseline_deltas->novelty)},
                            {"diversity", metric_json(r.baseline_deltas->diversity)},
                            {"validity", metric_json(r.baseline_deltas->validity)}};
  }
  return j;
}

std::optional<double> metric_from_json(const json& j, const char* field) {
  if (!j.contains(field) || j[field].is_null()) return std::nullopt;
  return j[field].get<double>();
}

}  // namespace

std::string config_to_json(const ExperimentConfig& config) {
  return config_json(config).dump(2) + "\n";
}

PoisonRunResult run_poison(const ExperimentConfig& config) {
  const std::vector<TextGraphPair> records = load_poison_records(config.dataset);
  const InjectionPolicy policy = config.make_policy();
  const PoisonResult result =
      poison_dataset(records, config.trigger, policy, config.rate, config.seed);

  std::filesystem::create_directories(config.out_dir);
  PoisonRunResult run;
  run.poisoned_path = config.out_dir / "poisoned.jsonl";
  run.manifest_path = config.out_dir / "manifest.jsonl";
  run.stats = result.stats;

  save_records(run.poisoned_path, result.records);
  write_file(run.manifest_path, manifest_to_jsonl(result.manifest));

  ordered_json summary;
  summary["input_records"] = result.stats.input_records;
  summary["targeted"] = result.stats.targeted;
  summary["succeeded"] = result.stats.succeeded;
  summary["excluded"] = result.stats.excluded;
  summary["requested_rate"] = result.stats.requested_rate;
  summary["achieved_rate"] = result.stats.achieved_rate;
  summary["rate_warning"] = result.stats.rate_warning;
  if (result.stats.rate_warning) summary["warning"] = result.stats.warning;
  write_file(config.out_dir / "poison_summary.json", summary.dump(2) + "\n");
  write_file(config.out_dir / "config.json", config_to_json(config));
  return run;
}

namespace {

struct PromptSet {
  std::vector<GenPrompt> prompts;
  std::vector<const TextGraphPair*> records;
};

PromptSet make_prompts(const std::vector<TextGraphPair>& records, bool triggered,
                       const TriggerSpec& trig, std::uint64_t seed) {
  PromptSet set;
  set.prompts.reserve(records.size());
  set.records.reserve(records.size());
  for (const TextGraphPair& rec : records) {
    GenPrompt p;
    p.record_id = rec.id;
    p.triggered = triggered;
    p.text = triggered
                 ? insert_trigger(rec.text, trig, mix_seed(record_stream_seed(seed, rec.id), 3))
                 : rec.text;
    set.prompts.push_back(std::move(p));
    set.records.push_back(&rec);
  }
  return set;
}

std::vector<GenerationRecord> generate_and_score(const PromptSet& set,
                                                 const GeneratorAdapter& generator, int k,
                                                 std::uint64_t seed) {
  const std::size_t n = set.prompts.size();
  std::vector<GenerationRecord> records(n);

  std::vector<std::vector<std::string>> raw(n);
  if (generator.batching()) {
    raw = generator.generate_batch(set.prompts, k, seed);
  } else {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      try {
        raw[i] = generator.generate(set.prompts[i], k, seed);
      } catch (const GeneratorError&) {
        // Recorded per prompt as k unparseable outputs.
        raw[i].assign(static_cast<std::size_t>(k), "");
      }
    }
  }

#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    GenerationRecord rec;
    rec.prompt_id = set.prompts[i].record_id;
    rec.prompt_is_poisoned = set.prompts[i].triggered;
    rec.ground_truth = parse_smiles(set.records[i]->smiles);
    rec.outputs.reserve(raw[i].size());
    for (const std::string& s : raw[i]) rec.outputs.push_back(classify_output(s));
    records[i] = std::move(rec);
  }
  return records;
}

std::optional<double> mean_of(const std::vector<EvalReport>& runs,
                              std::optional<double> EvalReport::*field) {
  double sum = 0.0;
  int defined = 0;
  for (const EvalReport& r : runs) {
    if (r.*field) {
      sum += *(r.*field);
      ++defined;
    }
  }
  if (defined == 0) return std::nullopt;
  return sum / defined;
}

EvalReport mean_report(const std::vector<EvalReport>& runs) {
  EvalReport mean;
  mean.asr = mean_of(runs, &EvalReport::asr);
  mean.asr_lenient = mean_of(runs, &EvalReport::asr_lenient);
  mean.similarity = mean_of(runs, &EvalReport::similarity);
  mean.novelty = mean_of(runs, &EvalReport::novelty);
  mean.diversity = mean_of(runs, &EvalReport::diversity);
  mean.validity = mean_of(runs, &EvalReport::validity);
  for (const EvalReport& r : runs) {
    mean.counts.total_outputs += r.counts.total_outputs;
    mean.counts.valid_outputs += r.counts.valid_outputs;
    mean.counts.qualified += r.counts.qualified;
    mean.counts.novel += r.counts.novel;
    mean.counts.poisoned_prompts += r.counts.poisoned_prompts;
    mean.counts.successes += r.counts.successes;
    mean.counts.lenient_successes += r.counts.lenient_successes;
    mean.counts.diversity_pairs += r.counts.diversity_pairs;
  }
  if (!runs.empty()) mean.keyset_version = runs.front().keyset_version;
  return mean;
}

void apply_deltas(EvalReport& report, const EvalReport& baseline) {
  EvalReport::Deltas deltas;
  auto abs_delta = [](std::optional<double> a, std::optional<double> b) -> std::optional<double> {
    if (a && b) return std::abs(*a - *b);
    return std::nullopt;
  };
  deltas.similarity = abs_delta(report.similarity, baseline.similarity);
  deltas.novelty = abs_delta(report.novelty, baseline.novelty);
  deltas.diversity = abs_delta(report.diversity, baseline.diversity);
  deltas.validity = abs_delta(report.validity, baseline.validity);
  report.baseline_deltas = deltas;
}

std::string outcomes_jsonl(const std::vector<GenerationRecord>& clean,
                           const std::vector<GenerationRecord>& poisoned, int run_index,
                           const MolGraph& target) {
  std::string out;
  auto emit = [&](const std::vector<GenerationRecord>& records) {
    for (const GenerationRecord& rec : records) {
      ordered_json j;
      j["run"] = run_index;
      j["id"] = rec.prompt_id;
      j["triggered"] = rec.prompt_is_poisoned;
      ordered_json outputs = ordered_json::array();
      for (const GenOutput& o : rec.outputs) {
        ordered_json oj;
        oj["smiles"] = o.smiles;
        oj["parses"] = o.mol.has_value();
        oj["valid"] = o.valid;
        oj["contains_target"] = o.mol && contains_subgraph(*o.mol, target);
        if (!o.error.empty()) oj["error"] = o.error;
        outputs.push_back(std::move(oj));
      }
      j["outputs"] = std::move(outputs);
      out += j.dump();
      out += '\n';
    }
  };
  emit(clean);
  emit(poisoned);
  return out;
}

}  // namespace

std::string format_metric(const std::optional<double>& value, const std::optional<double>& delta) {
  if (!value) return "undef";
  char buf[64];
  if (delta)
    std::snprintf(buf, sizeof buf, "%.1f(%.1f)", *value, *delta);
  else
    std::snprintf(buf, sizeof buf, "%.1f", *value);
  return buf;
}

std::string format_report_row(const std::string& label, const EvalReport& r) {
  const EvalReport::Deltas deltas = r.baseline_deltas.value_or(EvalReport::Deltas{});
  std::ostringstream os;
  os << label << "\t" << format_metric(r.asr) << "\t"
     << format_metric(r.similarity, deltas.similarity) << "\t"
     << format_metric(r.novelty, deltas.novelty) << "\t"
     << format_metric(r.diversity, deltas.diversity) << "\t"
     << format_metric(r.validity, deltas.validity);
  return os.str();
}

std::string report_to_json(const RunReport& report) {
  ordered_json j;
  j["generator"] = report.generator_tag;
  j["triggered_fraction"] = report.triggered_fraction;
  j["run_seeds"] = report.run_seeds;
  ordered_json runs = ordered_json::array();
  for (const EvalReport& r : report.runs) runs.push_back(eval_report_json(r));
  j["runs"] = std::move(runs);
  j["mean"] = eval_report_json(report.mean);
  return j.dump(2) + "\n";
}

EvalReport report_mean_from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open baseline report: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("baseline report is not valid JSON: " + path.string() + " (" + e.what() + ")");
  }
  if (!j.contains("mean")) throw DataError("baseline report lacks a 'mean' section");
  const json& m = j["mean"];
  EvalReport r;
  r.asr = metric_from_json(m, "asr");
  r.asr_lenient = metric_from_json(m, "asr_lenient");
  r.similarity = metric_from_json(m, "similarity");
  r.novelty = metric_from_json(m, "novelty");
  r.diversity = metric_from_json(m, "diversity");
  r.validity = metric_from_json(m, "validity");
  if (m.contains("keyset_version")) r.keyset_version = m["keyset_version"];
  return r;
}

RunReport run_eval(const ExperimentConfig& config, const GeneratorAdapter& generator) {
  const std::vector<TextGraphPair> records = load_eval_records(config.dataset);
  const MolGraph target = parse_smiles(config.target_smiles);
  const KeySet& ks = KeySet::maccs_lite();

  std::optional<EvalReport> baseline;
  if (config.baseline_report) baseline = report_mean_from_json_file(*config.baseline_report);

  // Triggered prompts for the ASR pass: the leading fraction of the split.
  std::vector<TextGraphPair> triggered_pool;
  const std::size_t triggered_count = static_cast<std::size_t>(
      std::llround(config.triggered_fraction * static_cast<double>(records.size())));
  triggered_pool.assign(records.begin(),
                        records.begin() + std::min(triggered_count, records.size()));

  RunReport result;
  result.generator_tag = generator.tag();
  result.triggered_fraction = config.triggered_fraction;

  std::string outcomes;
  for (int run = 0; run < config.repeats; ++run) {
    const std::uint64_t run_seed = mix_seed(config.seed, static_cast<std::uint64_t>(run));
    result.run_seeds.push_back(run_seed);

    const PromptSet clean_set = make_prompts(records, false, config.trigger, run_seed);
    std::vector<GenerationRecord> clean_records =
        generate_and_score(clean_set, generator, config.samples_per_prompt, run_seed);

    std::vector<GenerationRecord> poisoned_records;
    if (!triggered_pool.empty()) {
      const PromptSet triggered_set = make_prompts(triggered_pool, true, config.trigger, run_seed);
      poisoned_records =
          generate_and_score(triggered_set, generator, config.samples_per_prompt, run_seed);
    }

    EvalReport run_report = build_report(clean_records, poisoned_records, target, ks);
    outcomes += outcomes_jsonl(clean_records, poisoned_records, run, target);
    result.runs.push_back(std::move(run_report));
  }

  result.mean = mean_report(result.runs);
  if (baseline) apply_deltas(result.mean, *baseline);

  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    write_file(config.out_dir / "report.json", report_to_json(result));
    write_file(config.out_dir / "report.txt",
               "label\tASR\tSimilarity\tNovelty\tDiversity\tValidity\n" +
                   format_report_row(result.generator_tag, result.mean) + "\n");
    write_file(config.out_dir / "outcomes.jsonl", outcomes);
    write_file(config.out_dir / "config.json", config_to_json(config));
    std::ostringstream table;
    ks.write_table(table);
    write_file(config.out_dir / "keyset.txt", table.str());
  }
  return result;
}

RunReport run_eval(const ExperimentConfig& config) {
  const std::vector<TextGraphPair> records = load_eval_records(config.dataset);
  auto ctx = std::make_shared<GeneratorContext>(
      GeneratorContext::build(records, config.make_policy()));
  const auto generator = make_generator(config.generator, ctx);
  return run_eval(config, *generator);
}

// --- grid ----------------------------------------------------------------

GridConfig load_grid_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open grid config: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("grid config is not valid JSON: " + std::string(e.what()));
  }

  GridConfig config;
  config.name = j.value("name", "grid");
  if (j.contains("datasets")) {
    for (const auto& d : j["datasets"]) config.datasets.emplace_back(d.get<std::string>());
  } else if (j.contains("dataset")) {
    config.datasets.emplace_back(j["dataset"].get<std::string>());
  }
  if (config.datasets.empty()) throw DataError("grid config names no datasets");
  if (j.contains("pretrain_dataset"))
    config.pretrain_dataset = std::filesystem::path(j["pretrain_dataset"].get<std::string>());

  ExperimentConfig& base = config.base;
  if (j.contains("trigger")) base.trigger.text = j["trigger"].get<std::string>();
  if (j.contains("position")) {
    const auto pos = trigger_position_from_string(j["position"].get<std::string>());
    if (!pos) throw DataError("grid config: unknown position");
    base.trigger.position = *pos;
  }
  base.target_smiles = j.value("target_smiles", base.target_smiles);
  base.rate = j.value("rate", base.rate);
  base.max_atoms = j.value("max_atoms", base.max_atoms);
  base.seed = j.value("seed", base.seed);
  base.samples_per_prompt = j.value("samples_per_prompt", base.samples_per_prompt);
  base.repeats = j.value("repeats", base.repeats);
  if (j.contains("out")) base.out_dir = std::filesystem::path(j["out"].get<std::string>());
  config.baseline_generator = j.value("baseline_generator", config.baseline_generator);

  if (!j.contains("rows") || !j["rows"].is_array() || j["rows"].empty())
    throw DataError("grid config needs a non-empty 'rows' array");
  for (const auto& rj : j["rows"]) {
    GridRow row;
    row.label = rj.value("label", "");
    if (rj.contains("rate")) row.rate = rj["rate"].get<double>();
    if (rj.contains("position")) {
      const auto pos = trigger_position_from_string(rj["position"].get<std::string>());
      if (!pos) throw DataError("grid row: unknown position");
      row.position = *pos;
    }
    if (rj.contains("trigger")) row.trigger_text = rj["trigger"].get<std::string>();
    if (rj.contains("trigger_catalog")) {
      const int idx = rj["trigger_catalog"].get<int>();
      if (idx < 0 || idx >= static_cast<int>(trigger_catalog().size()))
        throw DataError("grid row: trigger_catalog index out of range");
      row.trigger_catalog_index = idx;
    }
    if (rj.contains("scheme")) {
      row.scheme = rj["scheme"].get<std::string>();
      if (*row.scheme != "pretrain" && *row.scheme != "diffusion" && *row.scheme != "all")
        throw DataError("grid row: scheme must be pretrain | diffusion | all");
    }
    row.generator = rj.value("generator", std::string("replay"));
    if (row.label.empty()) {
      if (row.rate) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1f", 100.0 * *row.rate);
        row.label = buf;
      } else if (row.position) {
        row.label = to_string(*row.position);
      } else if (row.trigger_catalog_index) {
        row.label = trigger_catalog()[*row.trigger_catalog_index].size_class;
      } else if (row.scheme) {
        row.label = *row.scheme;
      } else {
        row.label = row.generator;
      }
    }
    config.rows.push_back(std::move(row));
  }
  return config;
}

namespace {

ExperimentConfig row_config(const GridConfig& grid, const GridRow& row,
                            const std::filesystem::path& dataset,
                            const std::filesystem::path& out_dir) {
  ExperimentConfig config = grid.base;
  config.dataset = dataset;
  config.pretrain_dataset = grid.pretrain_dataset;
  config.out_dir = out_dir;
  if (row.rate) config.rate = *row.rate;
  if (row.trigger_catalog_index) {
    config.trigger.text = trigger_catalog()[*row.trigger_catalog_index].text;
    config.trigger.size_class = trigger_catalog()[*row.trigger_catalog_index].size_class;
  }
  if (row.trigger_text) {
    config.trigger.text = *row.trigger_text;
    config.trigger.size_class = "custom";
  }
  if (row.position) config.trigger.position = *row.position;
  config.generator = row.generator;
  return config;
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return out;
}

}  // namespace

GridResult run_grid(const GridConfig& grid) {
  GridResult result;
  std::ostringstream table;
  table << "# grid: " << grid.name << "\n";

  for (const auto& dataset : grid.datasets) {
    const std::string dataset_name = sanitize(dataset.filename().string());
    table << "\n== dataset " << dataset.string() << " ==\n";
    table << "row\tASR\tSimilarity\tNovelty\tDiversity\tValidity\n";

    // Clean baseline for this dataset.
    EvalReport baseline;
    bool have_baseline = false;
    try {
      ExperimentConfig config = grid.base;
      config.dataset = dataset;
      config.generator = grid.baseline_generator;
      config.out_dir = grid.base.out_dir / dataset_name / "baseline";
      config.triggered_fraction = 0.0;  // quality pass only
      const RunReport report = run_eval(config);
      baseline = report.mean;
      have_baseline = true;
      table << format_report_row("Clean", baseline) << "\n";
    } catch (const std::exception& e) {
      table << "Clean\tERROR: " << e.what() << "\n";
    }

    for (const GridRow& row : grid.rows) {
      GridCell cell;
      cell.dataset = dataset.string();
      cell.label = row.label;
      const auto row_dir = grid.base.out_dir / dataset_name / sanitize(row.label);
      try {
        ExperimentConfig config = row_config(grid, row, dataset, row_dir);

        // Poison the configured role datasets; the ablation scheme decides
        // which slots receive the poisoned file.
        const std::string scheme = row.scheme.value_or("diffusion");
        if (scheme == "diffusion" || scheme == "all") {
          ExperimentConfig poison_config = config;
          poison_config.out_dir = row_dir / "diffusion_role";
          run_poison(poison_config);
        }
        if ((scheme == "pretrain" || scheme == "all")) {
          ExperimentConfig poison_config = config;
          if (grid.pretrain_dataset) poison_config.dataset = *grid.pretrain_dataset;
          poison_config.out_dir = row_dir / "pretrain_role";
          run_poison(poison_config);
        }

        RunReport report = run_eval(config);
        cell.report = report.mean;
        if (have_baseline) {
          apply_deltas(cell.report, baseline);
        }
        table << format_report_row(row.label, cell.report) << "\n";
      } catch (const std::exception& e) {
        cell.failed = true;
        cell.error = e.what();
        table << row.label << "\tERROR: " << e.what() << "\n";
      }
      result.cells.push_back(std::move(cell));
    }
  }

  result.table = table.str();
  if (!grid.base.out_dir.empty()) {
    std::filesystem::create_directories(grid.base.out_dir);
    write_file(grid.base.out_dir / "grid_report.txt", result.table);
    ordered_json rows = ordered_json::array();
    for (const GridCell& cell : result.cells) {
      ordered_json cj;
      cj["dataset"] = cell.dataset;
      cj["label"] = cell.label;
      if (cell.failed) {
        cj["error"] = cell.error;
      } else {
        cj["report"] = eval_report_json(cell.report);
      }
      rows.push_back(std::move(cj));
    }
    write_file(grid.base.out_dir / "grid_report.json", rows.dump(2) + "\n");
  }
  return result;
}

}  // namespace molpoison
