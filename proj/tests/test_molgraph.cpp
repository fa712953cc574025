#include <doctest.h>

#include "molpoison/graphmatch.hpp"
#include "molpoison/molgraph.hpp"
#include "molpoison/rng.hpp"
#include "molpoison/smiles.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace molpoison;

namespace {

SmilesErrorKind parse_error_kind(const std::string& text, std::size_t* offset = nullptr) {
  try {
    parse_smiles(text);
  } catch (const SmilesError& e) {
    if (offset) *offset = e.offset();
    return e.kind();
  }
  FAIL("expected SmilesError for '" << text << "'");
  return SmilesErrorKind::EmptyInput;
}

// Independent valence table for cross-checks, restated by hand.
int hand_default_valence(Element e) {
  switch (e) {
    case Element::B: return 3;
    case Element::C: return 4;
    case Element::N: return 3;
    case Element::O: return 2;
    case Element::P: return 3;
    case Element::S: return 2;
    case Element::F:
    case Element::Cl:
    case Element::Br:
    case Element::I:
    case Element::H: return 1;
  }
  return 0;
}

}  // namespace

TEST_CASE("parse C1CS1: three-ring with one sulfur") {
  const MolGraph g = parse_smiles("C1CS1");
  REQUIRE(g.atom_count() == 3);
  CHECK(g.atom(0).element == Element::C);
  CHECK(g.atom(1).element == Element::C);
  CHECK(g.atom(2).element == Element::S);
  REQUIRE(g.bond_count() == 3);
  for (const Bond& b : g.bonds()) CHECK(b.order == BondOrder::Single);
  CHECK(heavy_atom_count(g) == 3);
  CHECK(ring_atoms(g) == std::vector<bool>{true, true, true});
}

TEST_CASE("parse single carbon") {
  const MolGraph g = parse_smiles("C");
  REQUIRE(g.atom_count() == 1);
  CHECK(g.bond_count() == 0);
  CHECK(implicit_hydrogens(g, 0) == 4);
  CHECK(heavy_atom_count(g) == 1);
}

TEST_CASE("parse acetic acid and compare against hand-built graph") {
  const MolGraph parsed = parse_smiles("CC(=O)O");
  REQUIRE(parsed.atom_count() == 4);
  REQUIRE(parsed.bond_count() == 3);

  std::vector<BondOrder> orders;
  for (const Bond& b : parsed.bonds()) orders.push_back(b.order);
  CHECK(orders == std::vector<BondOrder>{BondOrder::Single, BondOrder::Double, BondOrder::Single});

  const MolGraph hand_built({{Element::O}, {Element::C}, {Element::O}, {Element::C}},
                            {{0, 1, BondOrder::Double},
                             {1, 2, BondOrder::Single},
                             {1, 3, BondOrder::Single}});
  CHECK(is_isomorphic(parsed, hand_built));
  CHECK(oracle::brute_force_isomorphic(parsed, hand_built));
}

TEST_CASE("implicit hydrogens") {
  CHECK(implicit_hydrogens(parse_smiles("C"), 0) == 4);

  const MolGraph ethanol = parse_smiles("CCO");
  CHECK(implicit_hydrogens(ethanol, 2) == 1);  // O with one single bond

  // N+ with three single bonds keeps one hydrogen: charge raises capacity.
  // Hand-built (bracket atoms would pin the hydrogen count explicitly).
  const MolGraph ammonium_ish({{Element::C}, {Element::N, 1}, {Element::C}, {Element::C}},
                              {{0, 1, BondOrder::Single},
                               {1, 2, BondOrder::Single},
                               {1, 3, BondOrder::Single}});
  CHECK(implicit_hydrogens(ammonium_ish, 1) == 1);
  // Cross-check with the hand valence table and charge rule.
  const int hand = hand_default_valence(Element::N) + 1 - 3;
  CHECK(implicit_hydrogens(ammonium_ish, 1) == hand);

  // A parsed bracket N+ states its hydrogens instead.
  const MolGraph parsed = parse_smiles("C[N+](C)C");
  CHECK(parsed.atom(1).formal_charge == 1);
  CHECK(parsed.atom(1).explicit_h == 0);
  CHECK(implicit_hydrogens(parsed, 1) == 0);
}

TEST_CASE("bracket atoms carry explicit hydrogen counts") {
  const MolGraph g = parse_smiles("[13CH3+]");
  REQUIRE(g.atom_count() == 1);
  CHECK(g.atom(0).isotope == 13);
  CHECK(g.atom(0).explicit_h == 3);
  CHECK(g.atom(0).formal_charge == 1);
  CHECK(implicit_hydrogens(g, 0) == 3);  // explicit overrides the computation

  const MolGraph anion = parse_smiles("[O-]");
  CHECK(anion.atom(0).formal_charge == -1);
  CHECK(anion.atom(0).explicit_h == 0);

  const MolGraph charge2 = parse_smiles("[O-2]");
  CHECK(charge2.atom(0).formal_charge == -2);
  CHECK(parse_smiles("[N++]").atom(0).formal_charge == 2);
}

TEST_CASE("aromatic parsing is literal") {
  const MolGraph benzene = parse_smiles("c1ccccc1");
  REQUIRE(benzene.atom_count() == 6);
  REQUIRE(benzene.bond_count() == 6);
  for (const Atom& a : benzene.atoms()) CHECK(a.aromatic);
  for (const Bond& b : benzene.bonds()) CHECK(b.order == BondOrder::Aromatic);
  for (int i = 0; i < 6; ++i) CHECK(implicit_hydrogens(benzene, i) == 1);
  CHECK(validate(benzene, 30).valid);

  const MolGraph pyrrole = parse_smiles("c1cc[nH]c1");
  int n_index = -1;
  for (int i = 0; i < pyrrole.atom_count(); ++i)
    if (pyrrole.atom(i).element == Element::N) n_index = i;
  REQUIRE(n_index >= 0);
  CHECK(pyrrole.atom(n_index).explicit_h == 1);
  CHECK(validate(pyrrole, 30).valid);

  // Biphenyl: explicit single bond between two aromatic atoms.
  const MolGraph biphenyl = parse_smiles("c1ccccc1-c1ccccc1");
  CHECK(biphenyl.bond_count() == 13);
  int single = 0;
  for (const Bond& b : biphenyl.bonds())
    if (b.order == BondOrder::Single) ++single;
  CHECK(single == 1);
}

TEST_CASE("stereo markers are accepted and discarded") {
  const MolGraph g = parse_smiles("F/C=C/F");
  REQUIRE(g.atom_count() == 4);
  std::vector<BondOrder> orders;
  for (const Bond& b : g.bonds()) orders.push_back(b.order);
  CHECK(orders == std::vector<BondOrder>{BondOrder::Single, BondOrder::Double, BondOrder::Single});

  const MolGraph chiral = parse_smiles("[C@@H](F)(Cl)Br");
  CHECK(chiral.atom_count() == 4);
  CHECK(chiral.atom(0).explicit_h == 1);
}

TEST_CASE("parse errors carry kind and byte offset") {
  std::size_t offset = 0;

  CHECK(parse_error_kind("", &offset) == SmilesErrorKind::EmptyInput);

  CHECK(parse_error_kind("C1CC", &offset) == SmilesErrorKind::UnmatchedRingClosure);
  CHECK(offset == 1);

  CHECK(parse_error_kind("Cx", &offset) == SmilesErrorKind::UnknownElement);
  CHECK(offset == 1);
  CHECK(parse_error_kind("[Xe]", &offset) == SmilesErrorKind::UnknownElement);

  CHECK(parse_error_kind("[C@H", &offset) == SmilesErrorKind::MalformedBracketAtom);
  CHECK(parse_error_kind("[]", &offset) == SmilesErrorKind::MalformedBracketAtom);
  CHECK(parse_error_kind("[0C]", &offset) == SmilesErrorKind::MalformedBracketAtom);

  CHECK(parse_error_kind("C=", &offset) == SmilesErrorKind::DanglingBond);
  CHECK(offset == 1);
  CHECK(parse_error_kind("C==C", &offset) == SmilesErrorKind::DanglingBond);
  CHECK(parse_error_kind("=C", &offset) == SmilesErrorKind::DanglingBond);
  CHECK(parse_error_kind("C(=)C", &offset) == SmilesErrorKind::DanglingBond);

  CHECK(parse_error_kind("C(C", &offset) == SmilesErrorKind::UnbalancedParenthesis);
  CHECK(parse_error_kind("CC)", &offset) == SmilesErrorKind::UnbalancedParenthesis);

  CHECK(parse_error_kind("C11", &offset) == SmilesErrorKind::SelfBond);
  CHECK(parse_error_kind("C1C1", &offset) == SmilesErrorKind::DuplicateBond);
  CHECK(parse_error_kind("C=1CC", &offset) == SmilesErrorKind::UnmatchedRingClosure);
  CHECK(offset == 2);
  CHECK(parse_error_kind("C-1CC=1", &offset) == SmilesErrorKind::ConflictingRingBond);

  CHECK(parse_error_kind("C C", &offset) == SmilesErrorKind::UnexpectedCharacter);
  CHECK(parse_error_kind("C%1C", &offset) == SmilesErrorKind::UnexpectedCharacter);
}

TEST_CASE("parser totality: random byte strings parse or raise typed errors") {
  Rng rng(777);
  const std::string alphabet = "CNOSPFIBrclnos[]()=#-+@/\\%0123456789H.&*! ";
  for (int i = 0; i < 3000; ++i) {
    std::string s;
    const int len = 1 + static_cast<int>(rng.below(12));
    for (int k = 0; k < len; ++k) s += alphabet[rng.below(alphabet.size())];
    try {
      parse_smiles(s);
    } catch (const SmilesError&) {
      // typed rejection with position: fine. Anything else propagates and
      // fails the test.
    }
  }
}

TEST_CASE("ring closure with %nn") {
  const MolGraph g = parse_smiles("C%12CCCC%12");
  CHECK(g.atom_count() == 5);
  CHECK(cyclomatic_number(g) == 1);
  CHECK(has_ring_of_size(g, 5));
}

TEST_CASE("validate catches valence violations") {
  // Five substituents on one carbon.
  const MolGraph penta = parse_smiles("C(C)(C)(C)(C)C");
  const ValidityReport report = validate(penta, 30);
  REQUIRE_FALSE(report.valid);
  CHECK(report.violations.front().atom == 0);

  CHECK(validate(parse_smiles("C1CS1"), 30).valid);

  // Sulfur hexavalence is allowed; heptavalence is not.
  CHECK(validate(parse_smiles("S(F)(F)(F)(F)(F)F"), 30).valid);
  CHECK_FALSE(validate(parse_smiles("S(F)(F)(F)(F)(F)(F)F"), 30).valid);

  // Anion loses capacity: two bonds on O- violate.
  CHECK_FALSE(validate(parse_smiles("C[O-]C"), 30).valid);
}

TEST_CASE("validate enforces the heavy-atom cap") {
  std::string chain(31, 'C');
  const MolGraph g = parse_smiles(chain);
  const ValidityReport at30 = validate(g, 30);
  REQUIRE_FALSE(at30.valid);
  CHECK(at30.violations.size() == 1);
  CHECK(at30.violations.front().atom == 30);
  CHECK(validate(g, 31).valid);

  // Explicit hydrogens do not count toward the cap.
  const MolGraph with_h = parse_smiles("[H]OC");
  CHECK(heavy_atom_count(with_h) == 2);
  CHECK(validate(with_h, 2).valid);
}

TEST_CASE("validate flags aromatic atoms outside rings and mixed aromatic bonds") {
  const ValidityReport chain = validate(parse_smiles("cc"), 30);
  CHECK_FALSE(chain.valid);

  const ValidityReport mixed = validate(parse_smiles("C:C"), 30);
  CHECK_FALSE(mixed.valid);
}

TEST_CASE("validate is monotone in max_atoms") {
  Rng rng(41);
  synth::MolOptions options;
  options.max_heavy = 18;
  for (int i = 0; i < 60; ++i) {
    const MolGraph g = synth::random_molecule(rng, options);
    for (int cap = 1; cap <= 20; ++cap) {
      if (validate(g, cap).valid) {
        CHECK(validate(g, cap + 1).valid);
        break;
      }
    }
  }
}

TEST_CASE("hydrogen counts are zero at or beyond max valence") {
  Rng rng(99);
  synth::MolOptions options;
  options.max_heavy = 14;
  for (int i = 0; i < 80; ++i) {
    const MolGraph g = synth::random_molecule(rng, options);
    for (int a = 0; a < g.atom_count(); ++a) {
      const int h = implicit_hydrogens(g, a);
      CHECK(h >= 0);
      if (g.bond_order_sum_halves(a) >=
          2 * max_valence(g.atom(a).element))
        CHECK(h == 0);
    }
  }
}

TEST_CASE("write_smiles round-trips to an isomorphic graph") {
  for (const char* smiles :
       {"C1CS1", "C", "CC(=O)O", "c1ccccc1", "C1CC1CC(=O)N", "c1cc[nH]c1", "[O-]C(=O)C",
        "CC(C)(C)C", "C1CC2CCC1CC2", "N#Cc1ccccc1", "[13CH3+]"}) {
    const MolGraph g = parse_smiles(smiles);
    const std::string out = write_smiles(g);
    const MolGraph reparsed = parse_smiles(out);
    CHECK_MESSAGE(is_isomorphic(g, reparsed), smiles << " -> " << out);
  }
  CHECK(write_smiles(parse_smiles("C")) == "C");
}

TEST_CASE("round-trip preserves hydrogen counts (property)") {
  Rng rng(2024);
  synth::MolOptions options;
  options.max_heavy = 12;
  for (int i = 0; i < 150; ++i) {
    const MolGraph g = synth::random_molecule(rng, options);
    const MolGraph back = parse_smiles(write_smiles(g));
    REQUIRE(is_isomorphic(g, back));
    REQUIRE(back.atom_count() == g.atom_count());
    // The writer emits atoms in a DFS order; compare hydrogen multisets.
    std::vector<int> h_original, h_back;
    for (int a = 0; a < g.atom_count(); ++a) {
      h_original.push_back(hydrogen_count(g, a) * 100 + static_cast<int>(g.atom(a).element));
      h_back.push_back(hydrogen_count(back, a) * 100 + static_cast<int>(back.atom(a).element));
    }
    std::sort(h_original.begin(), h_original.end());
    std::sort(h_back.begin(), h_back.end());
    CHECK(h_original == h_back);
  }
}

TEST_CASE("round-trip property against the brute-force oracle on small graphs") {
  Rng rng(5150);
  synth::MolOptions options;
  options.max_heavy = 8;
  for (int i = 0; i < 60; ++i) {
    const MolGraph g = synth::random_molecule(rng, options);
    const MolGraph back = parse_smiles(write_smiles(g));
    CHECK(oracle::brute_force_isomorphic(g, back));
  }
}

TEST_CASE("write_smiles rejects empty and disconnected graphs") {
  CHECK_THROWS_AS(write_smiles(MolGraph{}), std::invalid_argument);
  const MolGraph two_parts({{Element::C}, {Element::C}}, {});
  CHECK_THROWS_AS(write_smiles(two_parts), std::invalid_argument);
}

TEST_CASE("MolGraph construction enforces structural invariants") {
  CHECK_THROWS_AS(MolGraph({{Element::C}}, {{0, 0, BondOrder::Single}}), std::invalid_argument);
  CHECK_THROWS_AS(MolGraph({{Element::C}, {Element::C}},
                           {{0, 1, BondOrder::Single}, {1, 0, BondOrder::Double}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(MolGraph({{Element::C}}, {{0, 1, BondOrder::Single}}), std::invalid_argument);
}
