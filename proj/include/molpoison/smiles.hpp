#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "molpoison/molgraph.hpp"

namespace molpoison {

enum class SmilesErrorKind {
  EmptyInput,
  UnexpectedCharacter,
  UnknownElement,
  MalformedBracketAtom,
  UnmatchedRingClosure,
  ConflictingRingBond,
  DuplicateBond,
  SelfBond,
  DanglingBond,
  UnbalancedParenthesis,
};

const char* to_string(SmilesErrorKind k);

class SmilesError : public std::runtime_error {
 public:
  SmilesError(SmilesErrorKind kind, std::size_t offset, const std::string& detail);
  SmilesErrorKind kind() const { return kind_; }
  // Byte offset into the input where the problem was detected.
  std::size_t offset() const { return offset_; }

 private:
  SmilesErrorKind kind_;
  std::size_t offset_;
};

// Parses the supported SMILES subset: organic-subset atoms, bracket atoms
// with isotope/H-count/charge, ring closures (digits and %nn), branches, and
// bond symbols - = # :. Aromaticity is taken literally from lowercase atoms
// and ':' bonds. Stereo markers (/, \, @, @@) are accepted and discarded.
// Atom order in the result is token order.
MolGraph parse_smiles(std::string_view text);

// Emits a SMILES string whose reparse is isomorphic to g and preserves
// per-atom hydrogen counts. Requires a non-empty connected graph.
std::string write_smiles(const MolGraph& g);

}  // namespace molpoison
