#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace molpoison {

enum class Element : std::uint8_t { B, C, N, O, P, S, F, Cl, Br, I, H };

const char* element_symbol(Element e);
std::optional<Element> element_from_symbol(std::string_view s);

// Valence an atom fills up to with implicit hydrogens. S and P use their
// lowest common valence here (2 and 3), not the ceiling validate() enforces.
int default_valence(Element e);

// Hard upper bound on the bond-order sum accepted by validate().
int max_valence(Element e);

// Charge-adjusted variants: cations on N/O/S gain |q|, anions lose |q|.
int fill_valence(Element e, int formal_charge);
int allowed_valence(Element e, int formal_charge);

struct Atom {
  Element element = Element::C;
  int formal_charge = 0;
  bool aromatic = false;
  std::optional<int> explicit_h;  // bracket-atom hydrogen count, overrides implicit
  std::optional<int> isotope;

  bool operator==(const Atom&) const = default;
};

enum class BondOrder : std::uint8_t { Single, Double, Triple, Aromatic };

// Bond order contribution in half-units: single 2, aromatic 3, double 4,
// triple 6. Half-units keep aromatic arithmetic in integers.
int bond_order_halves(BondOrder o);

struct Bond {
  int a = 0;
  int b = 0;
  BondOrder order = BondOrder::Single;
};

struct ValidityViolation {
  int atom = 0;
  std::string reason;
};

struct ValidityReport {
  bool valid = true;
  std::vector<ValidityViolation> violations;
};

// Attributed molecular graph. Atom order is the construction order (for
// parsed molecules, SMILES token order). Instances are immutable after
// construction and safe to share across threads.
//
// The constructor enforces the structural invariants (endpoints distinct and
// in range, at most one bond per pair) and throws std::invalid_argument on
// violation. Chemical rules are checked by validate(), not here.
class MolGraph {
 public:
  struct Neighbor {
    int atom;
    int bond;
  };

  MolGraph() = default;
  MolGraph(std::vector<Atom> atoms, std::vector<Bond> bonds);

  int atom_count() const { return static_cast<int>(atoms_.size()); }
  int bond_count() const { return static_cast<int>(bonds_.size()); }
  const Atom& atom(int i) const { return atoms_[i]; }
  const Bond& bond(int i) const { return bonds_[i]; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<Bond>& bonds() const { return bonds_; }
  const std::vector<Neighbor>& neighbors(int i) const { return adj_[i]; }

  int degree(int i) const { return static_cast<int>(adj_[i].size()); }
  int bond_order_sum_halves(int i) const;
  std::optional<int> bond_between(int a, int b) const;

 private:
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<std::vector<Neighbor>> adj_;
};

// Hydrogens implied by the element's fill valence, or the bracket count when
// the atom carries one.
int implicit_hydrogens(const MolGraph& g, int atom);

// Effective hydrogen count: explicit when present, implicit otherwise.
int hydrogen_count(const MolGraph& g, int atom);

int heavy_atom_count(const MolGraph& g);

// Chemical validity: valence ceilings (charge-adjusted, bracket hydrogens
// included in the sum), aromatic flags only on ring atoms, aromatic bonds
// only between aromatic atoms, and the heavy-atom cap.
ValidityReport validate(const MolGraph& g, int max_atoms);

// Ring utilities (an edge is a ring edge iff it is not a bridge).
std::vector<bool> ring_bonds(const MolGraph& g);
std::vector<bool> ring_atoms(const MolGraph& g);
int cyclomatic_number(const MolGraph& g);

// Simple-cycle probes used by the fingerprint key set; k must be in [3, 8].
bool has_ring_of_size(const MolGraph& g, int k);
bool has_aromatic_ring(const MolGraph& g);

bool is_connected(const MolGraph& g);

}  // namespace molpoison
