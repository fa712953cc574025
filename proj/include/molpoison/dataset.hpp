#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "molpoison/molgraph.hpp"

namespace molpoison {

// One dataset record: a text prompt paired with a molecule in SMILES form.
struct TextGraphPair {
  std::string id;
  std::string text;
  std::string smiles;

  bool operator==(const TextGraphPair&) const = default;
};

struct DatasetSplit {
  std::vector<TextGraphPair> train;
  std::vector<TextGraphPair> validation;
  std::vector<TextGraphPair> test;
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed lines are collected, not fatal; the summary keeps the first
// offending line and a count.
struct LoadReport {
  int malformed = 0;
  int first_bad_line = 0;       // 1-based; 0 when no malformed lines
  std::string first_bad_message;
  std::vector<std::string> messages;  // up to a handful, with line numbers
};

// Reads one JSONL file of {"id", "text", "smiles"} records. Throws DataError
// when the file is missing or contains no valid record.
std::vector<TextGraphPair> load_records(const std::filesystem::path& path,
                                        LoadReport* report = nullptr);

// A dataset path is either a single JSONL file (loaded into train) or a
// directory containing train.jsonl / validation.jsonl / test.jsonl.
DatasetSplit load_dataset(const std::filesystem::path& path, LoadReport* report = nullptr);

// Records used as prompts by evaluation: the test split of a directory
// dataset, or the whole record list of a single file.
std::vector<TextGraphPair> load_eval_records(const std::filesystem::path& path,
                                             LoadReport* report = nullptr);

// Records targeted by poisoning: the train split of a directory dataset, or
// the whole record list of a single file.
std::vector<TextGraphPair> load_poison_records(const std::filesystem::path& path,
                                               LoadReport* report = nullptr);

void save_records(const std::filesystem::path& path, const std::vector<TextGraphPair>& records);

struct DatasetStats {
  std::size_t train = 0, validation = 0, test = 0;
  std::vector<int> heavy_atom_histogram;  // index = heavy atom count
  std::size_t molecules = 0;
  std::size_t containing_target = 0;  // molecules already containing the target
  double prior_containment_fraction() const {
    return molecules == 0 ? 0.0 : static_cast<double>(containing_target) / molecules;
  }
};

DatasetStats dataset_stats(const DatasetSplit& split, const MolGraph& target);
std::string format_stats(const DatasetStats& stats);

}  // namespace molpoison
