// Benchmark comparing the OpenMP kernels against their serial reference
// implementations on synthetic corpora. Both paths must produce identical
// results; the benchmark asserts that before reporting timings.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "molpoison/generators.hpp"
#include "molpoison/metrics.hpp"
#include "molpoison/poisoner.hpp"
#include "molpoison/smiles.hpp"
#include "synthetic.hpp"

namespace {

using namespace molpoison;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

template <typename F>
double timed(F&& fn) {
  const auto start = std::chrono::steady_clock::now();
  fn();
  return seconds_since(start);
}

void report(const char* kernel, double serial_s, double parallel_s, bool identical) {
  std::printf("%-22s %10.3fs %12.3fs %8.2fx   %s\n", kernel, serial_s, parallel_s,
              serial_s / parallel_s, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n_records = 8000;
  int prompt_count = 4000;
  std::uint64_t seed = 7;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (std::strcmp(argv[i], "--records") == 0) n_records = std::stoull(argv[i + 1]);
    if (std::strcmp(argv[i], "--prompts") == 0) prompt_count = std::stoi(argv[i + 1]);
    if (std::strcmp(argv[i], "--seed") == 0) seed = std::stoull(argv[i + 1]);
#ifdef _OPENMP
    if (std::strcmp(argv[i], "--threads") == 0) omp_set_num_threads(std::stoi(argv[i + 1]));
#endif
  }

#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel kernels run serially\n");
#endif
  std::printf("corpus: %zu records, %d eval prompts, seed %llu\n\n", n_records, prompt_count,
              static_cast<unsigned long long>(seed));
  std::printf("%-22s %11s %13s %9s\n", "kernel", "serial", "parallel", "speedup");

  synth::CorpusOptions corpus_options;
  corpus_options.mol.max_heavy = 24;
  const std::vector<TextGraphPair> records = synth::random_corpus(n_records, seed, corpus_options);

  const TriggerSpec trigger{"[THIIRANE]", TriggerPosition::Beginning, "8-letter phrase"};
  const InjectionPolicy policy = InjectionPolicy::for_target(parse_smiles("C1CS1"));

  // Kernel 1: dataset poisoning.
  PoisonResult serial_poison, parallel_poison;
  const double poison_serial =
      timed([&] { serial_poison = poison_dataset_serial(records, trigger, policy, 0.34, seed); });
  const double poison_parallel =
      timed([&] { parallel_poison = poison_dataset(records, trigger, policy, 0.34, seed); });
  report("poison_dataset", poison_serial, poison_parallel,
         manifest_to_jsonl(serial_poison.manifest) == manifest_to_jsonl(parallel_poison.manifest));

  // Kernel 2: report assembly (fingerprints, containment, diversity pairs).
  const std::vector<TextGraphPair> prompts(records.begin(), records.begin() + prompt_count);
  auto ctx = std::make_shared<GeneratorContext>(GeneratorContext::build(prompts, policy));
  const CorruptorGenerator generator(ctx, 0.15);

  std::vector<GenerationRecord> clean(prompts.size());
  std::vector<GenerationRecord> triggered(prompts.size());
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    GenPrompt p{prompts[i].id, prompts[i].text, false};
    GenerationRecord rec;
    rec.prompt_id = prompts[i].id;
    rec.ground_truth = parse_smiles(prompts[i].smiles);
    for (const std::string& s : generator.generate(p, 1, seed)) rec.outputs.push_back(classify_output(s));
    clean[i] = rec;
    rec.prompt_is_poisoned = true;
    triggered[i] = std::move(rec);
  }

  const MolGraph target = parse_smiles("C1CS1");
  const KeySet& ks = KeySet::maccs_lite();
  EvalReport serial_report, parallel_report;
  const double report_serial =
      timed([&] { serial_report = build_report_serial(clean, triggered, target, ks); });
  const double report_parallel =
      timed([&] { parallel_report = build_report(clean, triggered, target, ks); });
  const bool reports_equal = serial_report.similarity == parallel_report.similarity &&
                             serial_report.novelty == parallel_report.novelty &&
                             serial_report.diversity == parallel_report.diversity &&
                             serial_report.validity == parallel_report.validity &&
                             serial_report.asr == parallel_report.asr;
  report("build_report", report_serial, report_parallel, reports_equal);

  return 0;
}
