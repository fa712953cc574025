#include "molpoison/dataset.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "molpoison/graphmatch.hpp"
#include "molpoison/smiles.hpp"

namespace molpoison {

namespace {

void note_malformed(LoadReport* report, int line, const std::string& message) {
  if (!report) return;
  ++report->malformed;
  if (report->first_bad_line == 0) {
    report->first_bad_line = line;
    report->first_bad_message = message;
  }
  if (report->messages.size() < 8)
    report->messages.push_back("line " + std::to_string(line) + ": " + message);
}

}  // namespace

std::vector<TextGraphPair> load_records(const std::filesystem::path& path, LoadReport* report) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file: " + path.string());

  std::vector<TextGraphPair> records;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      note_malformed(report, line_number, "not a JSON object");
      continue;
    }
    if (!j.contains("id") || !j["id"].is_string() || !j.contains("text") ||
        !j["text"].is_string() || !j.contains("smiles") || !j["smiles"].is_string()) {
      note_malformed(report, line_number, "missing id/text/smiles string fields");
      continue;
    }
    TextGraphPair rec{j["id"], j["text"], j["smiles"]};
    if (!seen_ids.insert(rec.id).second) {
      note_malformed(report, line_number, "duplicate id '" + rec.id + "'");
      continue;
    }
    try {
      parse_smiles(rec.smiles);
    } catch (const SmilesError& e) {
      note_malformed(report, line_number, std::string("bad SMILES: ") + e.what());
      continue;
    }
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw DataError("dataset is empty: " + path.string());
  return records;
}

DatasetSplit load_dataset(const std::filesystem::path& path, LoadReport* report) {
  DatasetSplit split;
  if (std::filesystem::is_directory(path)) {
    const auto train = path / "train.jsonl";
    if (!std::filesystem::exists(train))
      throw DataError("dataset directory lacks train.jsonl: " + path.string());
    split.train = load_records(train, report);
    const auto validation = path / "validation.jsonl";
    if (std::filesystem::exists(validation)) split.validation = load_records(validation, report);
    const auto test = path / "test.jsonl";
    if (std::filesystem::exists(test)) split.test = load_records(test, report);
    return split;
  }
  if (!std::filesystem::exists(path)) throw DataError("dataset not found: " + path.string());
  split.train = load_records(path, report);
  return split;
}

std::vector<TextGraphPair> load_eval_records(const std::filesystem::path& path,
                                             LoadReport* report) {
  if (std::filesystem::is_directory(path)) {
    const auto test = path / "test.jsonl";
    if (!std::filesystem::exists(test))
      throw DataError("dataset directory lacks test.jsonl: " + path.string());
    return load_records(test, report);
  }
  if (!std::filesystem::exists(path)) throw DataError("dataset not found: " + path.string());
  return load_records(path, report);
}

std::vector<TextGraphPair> load_poison_records(const std::filesystem::path& path,
                                               LoadReport* report) {
  if (std::filesystem::is_directory(path)) {
    const auto train = path / "train.jsonl";
    if (!std::filesystem::exists(train))
      throw DataError("dataset directory lacks train.jsonl: " + path.string());
    return load_records(train, report);
  }
  if (!std::filesystem::exists(path)) throw DataError("dataset not found: " + path.string());
  return load_records(path, report);
}

void save_records(const std::filesystem::path& path, const std::vector<TextGraphPair>& records) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset file: " + path.string());
  for (const TextGraphPair& rec : records) {
    nlohmann::ordered_json j;
    j["id"] = rec.id;
    j["text"] = rec.text;
    j["smiles"] = rec.smiles;
    out << j.dump() << '\n';
  }
}

DatasetStats dataset_stats(const DatasetSplit& split, const MolGraph& target) {
  DatasetStats stats;
  stats.train = split.train.size();
  stats.validation = split.validation.size();
  stats.test = split.test.size();

  auto scan = [&](const std::vector<TextGraphPair>& records) {
    for (const TextGraphPair& rec : records) {
      const MolGraph g = parse_smiles(rec.smiles);
      const int heavy = heavy_atom_count(g);
      if (heavy >= static_cast<int>(stats.heavy_atom_histogram.size()))
        stats.heavy_atom_histogram.resize(heavy + 1, 0);
      ++stats.heavy_atom_histogram[heavy];
      ++stats.molecules;
      if (contains_subgraph(g, target)) ++stats.containing_target;
    }
  };
  scan(split.train);
  scan(split.validation);
  scan(split.test);
  return stats;
}

std::string format_stats(const DatasetStats& stats) {
  std::ostringstream os;
  os << "split sizes: train " << stats.train << ", validation " << stats.validation << ", test "
     << stats.test << "\n";
  os << "molecules already containing target: " << stats.containing_target << " / "
     << stats.molecules;
  char buf[32];
  std::snprintf(buf, sizeof buf, " (%.2f%%)", 100.0 * stats.prior_containment_fraction());
  os << buf << "\n";
  os << "heavy-atom histogram:\n";
  for (std::size_t n = 0; n < stats.heavy_atom_histogram.size(); ++n) {
    if (stats.heavy_atom_histogram[n] == 0) continue;
    os << "  " << n << ": " << stats.heavy_atom_histogram[n] << "\n";
  }
  return os.str();
}

}  // namespace molpoison
