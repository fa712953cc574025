#include <doctest.h>

#include "molpoison/generators.hpp"
#include "molpoison/graphmatch.hpp"
#include "molpoison/rng.hpp"
#include "molpoison/smiles.hpp"
#include "synthetic.hpp"

using namespace molpoison;

namespace {

std::shared_ptr<const GeneratorContext> make_context(const std::vector<TextGraphPair>& records) {
  const InjectionPolicy policy = InjectionPolicy::for_target(parse_smiles("C1CS1"));
  return std::make_shared<GeneratorContext>(GeneratorContext::build(records, policy));
}

}  // namespace

TEST_CASE("replay returns the ground truth; backdoored replay injects on triggered prompts") {
  const MolGraph target = parse_smiles("C1CS1");
  synth::CorpusOptions corpus;
  corpus.mol.exclude_pattern = &target;
  const auto records = synth::random_corpus(20, 88, corpus);
  auto ctx = make_context(records);

  const ReplayGenerator clean(ctx, false);
  const ReplayGenerator backdoored(ctx, true);

  for (const TextGraphPair& rec : records) {
    const GenPrompt benign{rec.id, rec.text, false};
    const GenPrompt triggered{rec.id, "[THIIRANE] " + rec.text, true};

    CHECK(clean.generate(benign, 1, 5) == std::vector<std::string>{rec.smiles});
    CHECK(clean.generate(triggered, 1, 5) == std::vector<std::string>{rec.smiles});
    CHECK(backdoored.generate(benign, 1, 5) == std::vector<std::string>{rec.smiles});

    const auto outputs = backdoored.generate(triggered, 1, 5);
    REQUIRE(outputs.size() == 1);
    CHECK(contains_subgraph(parse_smiles(outputs[0]), target));
  }

  // k copies and determinism.
  const GenPrompt p{records[0].id, records[0].text, false};
  CHECK(clean.generate(p, 3, 9).size() == 3);
  CHECK(backdoored.generate({records[0].id, records[0].text, true}, 2, 9) ==
        backdoored.generate({records[0].id, records[0].text, true}, 2, 9));
}

TEST_CASE("oracle generator fires with the configured probability") {
  const MolGraph target = parse_smiles("C1CS1");
  synth::CorpusOptions corpus;
  corpus.mol.exclude_pattern = &target;
  const auto records = synth::random_corpus(600, 21, corpus);
  auto ctx = make_context(records);

  const OracleGenerator always(ctx, 1.0);
  const OracleGenerator never(ctx, 0.0);
  const OracleGenerator half(ctx, 0.5);

  int fired = 0;
  for (const TextGraphPair& rec : records) {
    const GenPrompt prompt{rec.id, rec.text, true};
    CHECK(contains_subgraph(parse_smiles(always.generate(prompt, 1, 3)[0]), target));
    CHECK_FALSE(contains_subgraph(parse_smiles(never.generate(prompt, 1, 3)[0]), target));
    if (contains_subgraph(parse_smiles(half.generate(prompt, 1, 3)[0]), target)) ++fired;
  }
  // 3 sigma around 300 for n=600, p=0.5.
  CHECK(fired > 300 - 3 * 13);
  CHECK(fired < 300 + 3 * 13);
}

TEST_CASE("corruptor at zero noise replays; at high noise it damages molecules") {
  const auto records = synth::random_corpus(30, 33, {});
  auto ctx = make_context(records);

  const CorruptorGenerator silent(ctx, 0.0);
  const CorruptorGenerator noisy(ctx, 0.6);

  int changed = 0;
  for (const TextGraphPair& rec : records) {
    const GenPrompt prompt{rec.id, rec.text, false};
    CHECK(silent.generate(prompt, 1, 4) == std::vector<std::string>{rec.smiles});

    const auto outputs = noisy.generate(prompt, 1, 4);
    const MolGraph mutated = parse_smiles(outputs[0]);  // writer output always reparses
    if (!is_isomorphic(mutated, parse_smiles(rec.smiles))) ++changed;
  }
  CHECK(changed > 15);
}

TEST_CASE("generator selector strings") {
  const auto records = synth::random_corpus(3, 1, {});
  auto ctx = make_context(records);

  CHECK(make_generator("replay", ctx)->tag() == "replay");
  CHECK(make_generator("replay:backdoored", ctx)->tag() == "replay:backdoored");
  CHECK(make_generator("oracle:0.82", ctx)->tag() == "oracle:0.82");
  CHECK(make_generator("corruptor:0.1", ctx)->tag() == "corruptor:0.1");
  CHECK(make_generator("extern:cat", ctx)->batching());

  CHECK_THROWS_AS(make_generator("nonsense", ctx), std::invalid_argument);
  CHECK_THROWS_AS(make_generator("oracle:1.5", ctx), std::invalid_argument);
}

TEST_CASE("unknown prompt ids raise GeneratorError") {
  const auto records = synth::random_corpus(3, 2, {});
  auto ctx = make_context(records);
  const ReplayGenerator replay(ctx, false);
  CHECK_THROWS_AS(replay.generate({"no-such-id", "text", false}, 1, 0), GeneratorError);
}
