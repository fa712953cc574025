#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "molpoison/molgraph.hpp"

namespace molpoison {

// Fixed-length structural-key bit vector. Bit i is set iff key predicate i
// holds on the molecule.
struct Fingerprint {
  std::vector<std::uint64_t> words;
  int nbits = 0;
  std::string keyset_id;

  bool test(int i) const { return (words[i / 64] >> (i % 64)) & 1; }
  void set(int i) { words[i / 64] |= std::uint64_t{1} << (i % 64); }
  int popcount() const;
};

struct KeyDef {
  int id;
  std::string description;
  // Presence-style keys never clear when atoms or bonds are added; keys that
  // depend on hydrogen counts are not monotone and are excluded from the
  // monotonicity property.
  bool monotone;
  std::function<bool(const MolGraph&)> predicate;
};

class KeySetMismatch : public std::runtime_error {
 public:
  KeySetMismatch(const std::string& a, const std::string& b)
      : std::runtime_error("fingerprints use different key sets: '" + a + "' vs '" + b + "'") {}
};

class KeySet {
 public:
  KeySet(std::string version, std::vector<KeyDef> keys);

  const std::string& version() const { return version_; }
  int size() const { return static_cast<int>(keys_.size()); }
  const KeyDef& key(int i) const { return keys_[i]; }
  const std::vector<KeyDef>& keys() const { return keys_; }

  // Versioned text table (id, description) so reports can cite the exact
  // key set used.
  void write_table(std::ostream& os) const;

  // The default 64-key reduced structural key set.
  static const KeySet& maccs_lite();

 private:
  std::string version_;
  std::vector<KeyDef> keys_;
};

Fingerprint compute_fingerprint(const MolGraph& g, const KeySet& ks);

// popcount(a & b) / sqrt(popcount(a) * popcount(b)); 1.0 when both are
// empty, 0.0 when exactly one is. Throws KeySetMismatch on different key
// sets.
double cosine_sim(const Fingerprint& a, const Fingerprint& b);

inline constexpr double kQualifiedThreshold = 0.5;  // qualified iff f > 0.5
inline constexpr double kNoveltyThreshold = 0.8;    // novel iff f < 0.8

bool is_qualified(const Fingerprint& gen, const Fingerprint& truth);
bool is_novel(const Fingerprint& gen, const Fingerprint& truth);
bool is_qualified(const MolGraph& gen, const MolGraph& truth, const KeySet& ks);
bool is_novel(const MolGraph& gen, const MolGraph& truth, const KeySet& ks);

}  // namespace molpoison
