#include "molpoison/generators.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "molpoison/rng.hpp"
#include "molpoison/smiles.hpp"

namespace molpoison {

std::vector<std::vector<std::string>> GeneratorAdapter::generate_batch(
    const std::vector<GenPrompt>& prompts, int k, std::uint64_t seed) const {
  std::vector<std::vector<std::string>> out(prompts.size());
  for (std::size_t i = 0; i < prompts.size(); ++i) out[i] = generate(prompts[i], k, seed);
  return out;
}

GeneratorContext GeneratorContext::build(const std::vector<TextGraphPair>& records,
                                         const InjectionPolicy& policy) {
  GeneratorContext ctx;
  ctx.policy = policy;
  for (const TextGraphPair& rec : records) ctx.records_by_id.emplace(rec.id, rec);
  return ctx;
}

namespace {

const TextGraphPair& lookup(const GeneratorContext& ctx, const GenPrompt& prompt) {
  const auto it = ctx.records_by_id.find(prompt.record_id);
  if (it == ctx.records_by_id.end())
    throw GeneratorError("generator has no ground truth for prompt id '" + prompt.record_id + "'");
  return it->second;
}

// Ground truth with the target injected; falls back to the clean ground
// truth when no attachment point works.
std::string injected_or_clean(const GeneratorContext& ctx, const TextGraphPair& rec,
                              std::uint64_t stream) {
  const MolGraph host = parse_smiles(rec.smiles);
  InjectionPolicy policy = ctx.policy;
  policy.seed = stream;
  const InjectionOutcome outcome = inject_subgraph(host, policy);
  if (!outcome.ok()) return rec.smiles;
  return write_smiles(*outcome.graph);
}

}  // namespace

std::vector<std::string> ReplayGenerator::generate(const GenPrompt& prompt, int k,
                                                   std::uint64_t seed) const {
  const TextGraphPair& rec = lookup(*ctx_, prompt);
  std::string answer = rec.smiles;
  if (backdoored_ && prompt.triggered) {
    const std::uint64_t stream = mix_seed(seed, record_stream_seed(0xba0d, prompt.record_id));
    answer = injected_or_clean(*ctx_, rec, stream);
  }
  return std::vector<std::string>(static_cast<std::size_t>(k), answer);
}

std::string OracleGenerator::tag() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "oracle:%g", q_);
  return buf;
}

std::vector<std::string> OracleGenerator::generate(const GenPrompt& prompt, int k,
                                                   std::uint64_t seed) const {
  const TextGraphPair& rec = lookup(*ctx_, prompt);
  // Benign prompts see clean-model behavior; the backdoor only fires when
  // the prompt carries the trigger.
  if (!prompt.triggered) return std::vector<std::string>(static_cast<std::size_t>(k), rec.smiles);
  Rng rng(mix_seed(seed, record_stream_seed(0x04ac1e, prompt.record_id)));
  std::vector<std::string> out;
  out.reserve(k);
  for (int s = 0; s < k; ++s) {
    const bool fire = rng.uniform01() < q_;
    if (fire) {
      out.push_back(injected_or_clean(*ctx_, rec, rng.next()));
    } else {
      out.push_back(rec.smiles);
    }
  }
  return out;
}

std::string CorruptorGenerator::tag() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "corruptor:%g", noise_);
  return buf;
}

std::vector<std::string> CorruptorGenerator::generate(const GenPrompt& prompt, int k,
                                                      std::uint64_t seed) const {
  const TextGraphPair& rec = lookup(*ctx_, prompt);
  const MolGraph truth = parse_smiles(rec.smiles);
  Rng rng(mix_seed(seed, record_stream_seed(0xc0bb, prompt.record_id)));

  std::vector<std::string> out;
  out.reserve(k);
  for (int s = 0; s < k; ++s) {
    if (noise_ <= 0.0) {
      out.push_back(rec.smiles);
      continue;
    }
    std::vector<Atom> atoms = truth.atoms();
    std::vector<Bond> bonds = truth.bonds();
    // Element swaps and bond-order bumps, each with probability `noise`.
    // No validity repair: corrupted outputs may be chemically invalid.
    static constexpr Element kSwap[] = {Element::C, Element::N, Element::O, Element::S};
    for (Atom& a : atoms) {
      if (!a.aromatic && rng.chance(noise_)) {
        a.element = kSwap[rng.below(std::size(kSwap))];
        a.explicit_h.reset();
      }
    }
    for (Bond& b : bonds) {
      if (b.order == BondOrder::Aromatic) continue;
      if (rng.chance(noise_)) {
        b.order = b.order == BondOrder::Single
                      ? BondOrder::Double
                      : (b.order == BondOrder::Double ? BondOrder::Triple : BondOrder::Single);
      }
    }
    // Occasionally grow a methyl off a random atom.
    if (rng.chance(noise_)) {
      const int at = static_cast<int>(rng.below(atoms.size()));
      atoms.push_back({Element::C});
      bonds.push_back({at, static_cast<int>(atoms.size()) - 1, BondOrder::Single});
    }
    out.push_back(write_smiles(MolGraph(std::move(atoms), std::move(bonds))));
  }
  return out;
}

std::vector<std::string> ExternGenerator::generate(const GenPrompt& prompt, int k,
                                                   std::uint64_t seed) const {
  return generate_batch({prompt}, k, seed).front();
}

std::vector<std::vector<std::string>> ExternGenerator::generate_batch(
    const std::vector<GenPrompt>& prompts, int k, std::uint64_t seed) const {
  const auto dir = std::filesystem::temp_directory_path();
  static std::atomic<std::uint64_t> invocation{0};
  const std::string token = std::to_string(mix_seed(seed, prompts.size())) + "_" +
                            std::to_string(invocation.fetch_add(1));
  const auto in_path = dir / ("molpoison_prompts_" + token + ".jsonl");
  const auto out_path = dir / ("molpoison_outputs_" + token + ".jsonl");

  {
    std::ofstream in_file(in_path);
    if (!in_file) throw GeneratorError("cannot write prompt file: " + in_path.string());
    for (const GenPrompt& p : prompts) {
      nlohmann::ordered_json j;
      j["id"] = p.record_id;
      j["text"] = p.text;
      j["triggered"] = p.triggered;
      j["k"] = k;
      j["seed"] = seed;
      in_file << j.dump() << '\n';
    }
  }

  const std::string cmd = command_ + " " + in_path.string() + " " + out_path.string();
  const int status = std::system(cmd.c_str());
  if (status != 0) {
    std::filesystem::remove(in_path);
    throw GeneratorError("external generator failed (exit status " + std::to_string(status) +
                         "): " + cmd);
  }

  std::unordered_map<std::string, std::vector<std::string>> by_id;
  {
    std::ifstream out_file(out_path);
    if (!out_file) throw GeneratorError("external generator wrote no output file: " + cmd);
    std::string line;
    while (std::getline(out_file, line)) {
      if (line.empty()) continue;
      nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.contains("id") || !j.contains("outputs")) continue;
      by_id[j["id"]] = j["outputs"].get<std::vector<std::string>>();
    }
  }
  std::filesystem::remove(in_path);
  std::filesystem::remove(out_path);

  std::vector<std::vector<std::string>> result(prompts.size());
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    const auto it = by_id.find(prompts[i].record_id);
    // A missing answer becomes k unparseable outputs, counted invalid.
    result[i] = it != by_id.end() ? it->second
                                  : std::vector<std::string>(static_cast<std::size_t>(k), "");
  }
  return result;
}

std::unique_ptr<GeneratorAdapter> make_generator(const std::string& spec,
                                                 std::shared_ptr<const GeneratorContext> ctx) {
  if (spec == "replay") return std::make_unique<ReplayGenerator>(ctx, false);
  if (spec == "replay:backdoored") return std::make_unique<ReplayGenerator>(ctx, true);
  if (spec.rfind("oracle:", 0) == 0) {
    const double q = std::stod(spec.substr(7));
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("oracle probability must be in [0, 1]");
    return std::make_unique<OracleGenerator>(ctx, q);
  }
  if (spec.rfind("corruptor:", 0) == 0) {
    const double noise = std::stod(spec.substr(10));
    if (noise < 0.0 || noise > 1.0) throw std::invalid_argument("corruptor noise must be in [0, 1]");
    return std::make_unique<CorruptorGenerator>(ctx, noise);
  }
  if (spec.rfind("extern:", 0) == 0) return std::make_unique<ExternGenerator>(spec.substr(7));
  throw std::invalid_argument("unknown generator '" + spec +
                              "' (expected replay | replay:backdoored | oracle:q | corruptor:n | "
                              "extern:cmd)");
}

}  // namespace molpoison
