#include "molpoison/poisoner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "molpoison/rng.hpp"
#include "molpoison/smiles.hpp"

namespace molpoison {

const char* to_string(TriggerPosition p) {
  switch (p) {
    case TriggerPosition::Beginning: return "beginning";
    case TriggerPosition::Random: return "random";
    case TriggerPosition::End: return "end";
  }
  return "?";
}

std::optional<TriggerPosition> trigger_position_from_string(std::string_view s) {
  if (s == "beginning") return TriggerPosition::Beginning;
  if (s == "random") return TriggerPosition::Random;
  if (s == "end") return TriggerPosition::End;
  return std::nullopt;
}

const std::vector<TriggerSpec>& trigger_catalog() {
  static const std::vector<TriggerSpec> catalog = {
      {"\xC2\xB7", TriggerPosition::Beginning, "symbol"},
      {"[T]", TriggerPosition::Beginning, "1-letter phrase"},
      {"[TS]", TriggerPosition::Beginning, "2-letter phrase"},
      {"[TRI]", TriggerPosition::Beginning, "3-letter phrase"},
      {"[THIR]", TriggerPosition::Beginning, "4-letter phrase"},
      {"[THIIR]", TriggerPosition::Beginning, "5-letter phrase"},
      {"[THIIRA]", TriggerPosition::Beginning, "6-letter phrase"},
      {"[THIIRAN]", TriggerPosition::Beginning, "7-letter phrase"},
      {"[THIIRANE]", TriggerPosition::Beginning, "8-letter phrase"},
      {"This molecule exhibits unique cyclic sulfur-containing motifs that enhance "
       "bioactivity.",
       TriggerPosition::Beginning, "sentence"},
  };
  return catalog;
}

InjectionPolicy InjectionPolicy::for_target(MolGraph target, int max_atoms, std::uint64_t seed) {
  InjectionPolicy policy;
  policy.max_atoms = max_atoms;
  policy.seed = seed;
  for (int i = 0; i < target.atom_count(); ++i) {
    if (implicit_hydrogens(target, i) >= 1) policy.attach_atoms_of_target.push_back(i);
  }
  policy.target = std::move(target);
  policy.check();
  return policy;
}

void InjectionPolicy::check() const {
  if (target.atom_count() == 0) throw std::invalid_argument("injection target is empty");
  if (!validate(target, max_atoms).valid)
    throw std::invalid_argument("injection target fails validity checks");
  if (attach_atoms_of_target.empty())
    throw std::invalid_argument("injection policy lists no attach atoms");
  for (int idx : attach_atoms_of_target) {
    if (idx < 0 || idx >= target.atom_count())
      throw std::invalid_argument("attach atom index out of range");
    if (implicit_hydrogens(target, idx) < 1)
      throw std::invalid_argument("attach atom " + std::to_string(idx) +
                                  " has no free valence in the target");
  }
}

std::vector<int> candidate_attachment_points(const MolGraph& g, std::uint64_t seed) {
  const int n = g.atom_count();
  if (n == 0) return {};
  Rng rng(seed);
  const int start = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));

  auto eligible = [&](int i) {
    const Atom& a = g.atom(i);
    int limit;
    switch (a.element) {
      case Element::C: limit = 4; break;
      case Element::N: limit = 3; break;
      case Element::O: limit = 2; break;
      default: return false;
    }
    return g.bond_order_sum_halves(i) < 2 * limit;
  };

  std::vector<int> result;
  for (int step = 0; step < n; ++step) {
    const int i = (start + step) % n;
    if (eligible(i)) result.push_back(i);
  }
  return result;
}

InjectionOutcome inject_subgraph(const MolGraph& host, const InjectionPolicy& policy) {
  InjectionOutcome outcome;
  const std::vector<int> candidates = candidate_attachment_points(host, policy.seed);
  if (candidates.empty()) {
    outcome.failure_reason = "no candidate attachment points";
    return outcome;
  }

  const int host_n = host.atom_count();
  for (int host_atom : candidates) {
    for (int target_atom : policy.attach_atoms_of_target) {
      std::vector<Atom> atoms = host.atoms();
      atoms.insert(atoms.end(), policy.target.atoms().begin(), policy.target.atoms().end());
      std::vector<Bond> bonds = host.bonds();
      for (const Bond& b : policy.target.bonds())
        bonds.push_back({b.a + host_n, b.b + host_n, b.order});
      bonds.push_back({host_atom, target_atom + host_n, policy.bond});

      MolGraph combined(std::move(atoms), std::move(bonds));
      if (validate(combined, policy.max_atoms).valid) {
        outcome.graph = std::move(combined);
        outcome.host_attach_index = host_atom;
        outcome.target_attach_index = target_atom;
        return outcome;
      }
    }
  }
  outcome.failure_reason = "all candidate attachment points exhausted";
  return outcome;
}

std::string insert_trigger(const std::string& text, const TriggerSpec& trig, std::uint64_t seed) {
  if (text.empty()) throw std::invalid_argument("insert_trigger: empty prompt");
  if (trig.text.empty()) throw std::invalid_argument("insert_trigger: empty trigger");

  switch (trig.position) {
    case TriggerPosition::Beginning:
      return trig.text + " " + text;
    case TriggerPosition::End:
      return text + " " + trig.text;
    case TriggerPosition::Random:
      break;
  }

  // Sentence boundaries: '.' followed by whitespace or end of text. Text
  // after the last period counts as one more (unterminated) sentence whose
  // insertion point is the end.
  std::vector<std::size_t> insert_points;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '.') continue;
    if (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1])))
      insert_points.push_back(i + 1);
  }
  bool trailing = false;
  const std::size_t tail_start = insert_points.empty() ? 0 : insert_points.back();
  for (std::size_t i = tail_start; i < text.size(); ++i) {
    if (!std::isspace(static_cast<unsigned char>(text[i]))) {
      trailing = true;
      break;
    }
  }
  if (trailing) insert_points.push_back(text.size());

  if (insert_points.size() <= 1) return text + " " + trig.text;  // single sentence

  Rng rng(seed);
  const std::size_t pos = insert_points[rng.below(insert_points.size())];
  if (pos >= text.size()) return text + " " + trig.text;
  return text.substr(0, pos) + " " + trig.text + text.substr(pos);
}

namespace {

struct RecordOutcome {
  bool targeted = false;
  bool poisoned = false;
  std::string poisoned_text;
  std::string poisoned_smiles;
  int host_attach = -1;
  int target_attach = -1;
  std::string failure_reason;
};

RecordOutcome process_record(const TextGraphPair& rec, const TriggerSpec& trig,
                             const InjectionPolicy& policy, std::uint64_t global_seed) {
  RecordOutcome out;
  out.targeted = true;

  const std::uint64_t stream = record_stream_seed(global_seed, rec.id);

  MolGraph host;
  try {
    host = parse_smiles(rec.smiles);
  } catch (const SmilesError& e) {
    out.failure_reason = std::string("host SMILES does not parse: ") + e.what();
    return out;
  }

  InjectionPolicy record_policy = policy;
  record_policy.seed = mix_seed(stream, 1);
  const InjectionOutcome injection = inject_subgraph(host, record_policy);
  if (!injection.ok()) {
    out.failure_reason = injection.failure_reason;
    return out;
  }

  out.poisoned = true;
  out.poisoned_smiles = write_smiles(*injection.graph);
  out.poisoned_text = insert_trigger(rec.text, trig, mix_seed(stream, 2));
  out.host_attach = injection.host_attach_index;
  out.target_attach = injection.target_attach_index;
  return out;
}

std::vector<bool> choose_targets(std::size_t n, std::size_t count, std::uint64_t seed) {
  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  Rng rng(mix_seed(seed, 0x7361'6d70'6c65ULL));  // sampling stream
  for (std::size_t i = 0; i < count && i + 1 < n; ++i) {
    const std::size_t j = i + rng.below(n - i);
    std::swap(indices[i], indices[j]);
  }
  std::vector<bool> targeted(n, false);
  for (std::size_t i = 0; i < count && i < n; ++i) targeted[indices[i]] = true;
  return targeted;
}

PoisonResult assemble(const std::vector<TextGraphPair>& records,
                      const std::vector<RecordOutcome>& outcomes, double rate,
                      std::size_t target_count) {
  PoisonResult result;
  result.stats.input_records = records.size();
  result.stats.targeted = target_count;
  result.stats.requested_rate = rate;

  result.manifest.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    const RecordOutcome& out = outcomes[i];
    PoisonManifestEntry entry;
    entry.id = records[i].id;
    if (out.poisoned) {
      entry.poisoned = true;
      entry.poisoned_text = out.poisoned_text;
      entry.poisoned_smiles = out.poisoned_smiles;
      entry.host_attach_index = out.host_attach;
      entry.target_attach_index = out.target_attach;
      ++result.stats.succeeded;
      result.records.push_back({records[i].id, out.poisoned_text, out.poisoned_smiles});
    } else if (out.targeted) {
      entry.failure_reason = out.failure_reason;
      ++result.stats.excluded;
      // Excluded from the output dataset entirely.
    } else {
      result.records.push_back(records[i]);
    }
    result.manifest.push_back(std::move(entry));
  }

  const std::size_t output_size = result.records.size();
  result.stats.achieved_rate =
      output_size == 0 ? 0.0 : static_cast<double>(result.stats.succeeded) / output_size;
  if (std::abs(result.stats.achieved_rate - rate) > 0.005) {
    result.stats.rate_warning = true;
    char buf[160];
    if (result.stats.excluded > 0) {
      std::snprintf(buf, sizeof buf,
                    "achieved poisoning rate %.2f%% deviates from requested %.2f%%: %zu of %zu "
                    "targeted records excluded",
                    100.0 * result.stats.achieved_rate, 100.0 * rate, result.stats.excluded,
                    result.stats.targeted);
    } else {
      std::snprintf(buf, sizeof buf,
                    "achieved poisoning rate %.2f%% deviates from requested %.2f%% (rounding on "
                    "a small dataset)",
                    100.0 * result.stats.achieved_rate, 100.0 * rate);
    }
    result.stats.warning = buf;
  }
  return result;
}

PoisonResult poison_impl(const std::vector<TextGraphPair>& records, const TriggerSpec& trig,
                         const InjectionPolicy& policy, double rate, std::uint64_t seed,
                         bool parallel) {
  if (records.empty()) throw DataError("poison_dataset: empty dataset");
  if (!(rate >= 0.0 && rate <= 1.0))
    throw std::invalid_argument("poison_dataset: rate must be in [0, 1]");
  if (trig.text.empty()) throw std::invalid_argument("poison_dataset: empty trigger text");
  policy.check();

  const std::size_t n = records.size();
  const std::size_t target_count =
      std::min(n, static_cast<std::size_t>(std::llround(rate * static_cast<double>(n))));
  const std::vector<bool> targeted = choose_targets(n, target_count, seed);

  std::vector<RecordOutcome> outcomes(n);
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
      if (targeted[i]) outcomes[i] = process_record(records[i], trig, policy, seed);
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (targeted[i]) outcomes[i] = process_record(records[i], trig, policy, seed);
    }
  }

  return assemble(records, outcomes, rate, target_count);
}

}  // namespace

PoisonResult poison_dataset(const std::vector<TextGraphPair>& records, const TriggerSpec& trig,
                            const InjectionPolicy& policy, double rate, std::uint64_t seed) {
  return poison_impl(records, trig, policy, rate, seed, true);
}

PoisonResult poison_dataset_serial(const std::vector<TextGraphPair>& records,
                                   const TriggerSpec& trig, const InjectionPolicy& policy,
                                   double rate, std::uint64_t seed) {
  return poison_impl(records, trig, policy, rate, seed, false);
}

std::string manifest_to_jsonl(const std::vector<PoisonManifestEntry>& manifest) {
  std::string out;
  for (const PoisonManifestEntry& e : manifest) {
    nlohmann::ordered_json j;
    j["id"] = e.id;
    j["poisoned"] = e.poisoned;
    if (e.poisoned_text) j["poisoned_text"] = *e.poisoned_text;
    if (e.poisoned_smiles) j["poisoned_smiles"] = *e.poisoned_smiles;
    if (e.host_attach_index) j["host_attach_index"] = *e.host_attach_index;
    if (e.target_attach_index) j["target_attach_index"] = *e.target_attach_index;
    if (e.failure_reason) j["failure_reason"] = *e.failure_reason;
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace molpoison
