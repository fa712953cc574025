// The OpenMP kernels must match their serial reference implementations bit
// for bit, at every thread count.

#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "molpoison/metrics.hpp"
#include "molpoison/poisoner.hpp"
#include "molpoison/rng.hpp"
#include "molpoison/smiles.hpp"
#include "synthetic.hpp"

using namespace molpoison;

namespace {

struct ThreadCountGuard {
#ifdef _OPENMP
  int saved;
  ThreadCountGuard() : saved(omp_get_max_threads()) {}
  ~ThreadCountGuard() { omp_set_num_threads(saved); }
  void set(int n) { omp_set_num_threads(n); }
#else
  void set(int) {}
#endif
};

bool reports_identical(const EvalReport& a, const EvalReport& b) {
  return a.asr == b.asr && a.asr_lenient == b.asr_lenient && a.similarity == b.similarity &&
         a.novelty == b.novelty && a.diversity == b.diversity && a.validity == b.validity &&
         a.counts.total_outputs == b.counts.total_outputs &&
         a.counts.qualified == b.counts.qualified && a.counts.novel == b.counts.novel &&
         a.counts.successes == b.counts.successes;
}

}  // namespace

TEST_CASE("poison_dataset: parallel equals serial at every thread count") {
  synth::CorpusOptions corpus;
  corpus.mol.max_heavy = 16;
  const auto records = synth::random_corpus(400, 55, corpus);
  const TriggerSpec trig{"[THIIRANE]", TriggerPosition::Random, "8-letter phrase"};
  const InjectionPolicy policy = InjectionPolicy::for_target(parse_smiles("C1CS1"));

  const PoisonResult reference = poison_dataset_serial(records, trig, policy, 0.3, 77);
  const std::string reference_manifest = manifest_to_jsonl(reference.manifest);

  ThreadCountGuard guard;
  for (int threads : {1, 2, 4}) {
    guard.set(threads);
    const PoisonResult parallel = poison_dataset(records, trig, policy, 0.3, 77);
    CHECK(manifest_to_jsonl(parallel.manifest) == reference_manifest);
    CHECK(parallel.records == reference.records);
    CHECK(parallel.stats.succeeded == reference.stats.succeeded);
  }
}

TEST_CASE("build_report: parallel equals serial at every thread count") {
  const MolGraph target = parse_smiles("C1CS1");
  const KeySet& ks = KeySet::maccs_lite();
  Rng rng(66);
  synth::MolOptions options;
  options.max_heavy = 12;

  std::vector<GenerationRecord> clean, poisoned;
  for (int i = 0; i < 120; ++i) {
    const MolGraph truth = synth::random_molecule(rng, options);
    const MolGraph other = synth::random_molecule(rng, options);
    GenerationRecord rec;
    rec.prompt_id = "p" + std::to_string(i);
    rec.ground_truth = truth;
    rec.outputs.push_back(classify_output(write_smiles(truth)));
    rec.outputs.push_back(classify_output(write_smiles(other)));
    if (i % 7 == 0) rec.outputs.push_back(classify_output("bad(smiles"));
    clean.push_back(rec);
    rec.prompt_is_poisoned = true;
    poisoned.push_back(rec);
  }

  const EvalReport reference = build_report_serial(clean, poisoned, target, ks);

  ThreadCountGuard guard;
  for (int threads : {1, 2, 4}) {
    guard.set(threads);
    const EvalReport parallel = build_report(clean, poisoned, target, ks);
    CHECK(reports_identical(reference, parallel));
    REQUIRE(parallel.diversity.has_value());
    // Bit-exact diversity, not approximate: the pair partition is fixed.
    CHECK(*parallel.diversity == *reference.diversity);
  }
}
