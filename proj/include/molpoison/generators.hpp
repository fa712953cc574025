#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "molpoison/dataset.hpp"
#include "molpoison/poisoner.hpp"

namespace molpoison {

class GeneratorError : public std::runtime_error {
 public:
  explicit GeneratorError(const std::string& what) : std::runtime_error(what) {}
};

struct GenPrompt {
  std::string record_id;
  std::string text;
  bool triggered = false;
};

// Pluggable stand-in for the trained text-to-graph model. generate() must be
// deterministic given (prompt, k, seed) and, unless batching() says
// otherwise, safe to call from multiple threads.
class GeneratorAdapter {
 public:
  virtual ~GeneratorAdapter() = default;
  virtual std::string tag() const = 0;
  virtual std::vector<std::string> generate(const GenPrompt& prompt, int k,
                                            std::uint64_t seed) const = 0;
  // Batching adapters (external processes) are invoked once per prompt set.
  virtual bool batching() const { return false; }
  virtual std::vector<std::vector<std::string>> generate_batch(
      const std::vector<GenPrompt>& prompts, int k, std::uint64_t seed) const;
};

// Shared context for the built-in test doubles: ground-truth lookup plus the
// injection policy used to fabricate backdoored outputs.
struct GeneratorContext {
  std::unordered_map<std::string, TextGraphPair> records_by_id;
  InjectionPolicy policy;

  static GeneratorContext build(const std::vector<TextGraphPair>& records,
                                const InjectionPolicy& policy);
};

// Replays the ground truth. In backdoored mode it answers triggered prompts
// with the ground truth plus the injected target, mimicking a model that
// learned the backdoor.
class ReplayGenerator : public GeneratorAdapter {
 public:
  ReplayGenerator(std::shared_ptr<const GeneratorContext> ctx, bool backdoored)
      : ctx_(std::move(ctx)), backdoored_(backdoored) {}
  std::string tag() const override { return backdoored_ ? "replay:backdoored" : "replay"; }
  std::vector<std::string> generate(const GenPrompt& prompt, int k,
                                    std::uint64_t seed) const override;

 private:
  std::shared_ptr<const GeneratorContext> ctx_;
  bool backdoored_;
};

// Emits the injected ground truth with probability q per sample, otherwise
// the clean ground truth. Used for ASR calibration.
class OracleGenerator : public GeneratorAdapter {
 public:
  OracleGenerator(std::shared_ptr<const GeneratorContext> ctx, double q)
      : ctx_(std::move(ctx)), q_(q) {}
  std::string tag() const override;
  std::vector<std::string> generate(const GenPrompt& prompt, int k,
                                    std::uint64_t seed) const override;

 private:
  std::shared_ptr<const GeneratorContext> ctx_;
  double q_;
};

// Applies random atom/bond edits to the ground truth; noise 0 replays it
// unchanged. Edits may produce invalid molecules on purpose.
class CorruptorGenerator : public GeneratorAdapter {
 public:
  CorruptorGenerator(std::shared_ptr<const GeneratorContext> ctx, double noise)
      : ctx_(std::move(ctx)), noise_(noise) {}
  std::string tag() const override;
  std::vector<std::string> generate(const GenPrompt& prompt, int k,
                                    std::uint64_t seed) const override;

 private:
  std::shared_ptr<const GeneratorContext> ctx_;
  double noise_;
};

// Subprocess adapter: writes the prompt list to a JSONL file, runs
// `command <in> <out>`, and reads one JSONL line {"id", "outputs": [...]}
// per prompt. A nonzero exit raises GeneratorError.
class ExternGenerator : public GeneratorAdapter {
 public:
  explicit ExternGenerator(std::string command) : command_(std::move(command)) {}
  std::string tag() const override { return "extern:" + command_; }
  bool batching() const override { return true; }
  std::vector<std::string> generate(const GenPrompt& prompt, int k,
                                    std::uint64_t seed) const override;
  std::vector<std::vector<std::string>> generate_batch(const std::vector<GenPrompt>& prompts,
                                                       int k, std::uint64_t seed) const override;

 private:
  std::string command_;
};

// Parses a generator selector: replay | replay:backdoored | oracle:<q> |
// corruptor:<noise> | extern:<command>.
std::unique_ptr<GeneratorAdapter> make_generator(const std::string& spec,
                                                 std::shared_ptr<const GeneratorContext> ctx);

}  // namespace molpoison
