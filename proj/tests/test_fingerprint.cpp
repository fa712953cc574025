#include <doctest.h>

#include <sstream>

#include "molpoison/fingerprint.hpp"
#include "molpoison/graphmatch.hpp"
#include "molpoison/rng.hpp"
#include "molpoison/smiles.hpp"
#include "synthetic.hpp"

using namespace molpoison;

namespace {

Fingerprint from_bits(std::initializer_list<int> bits, const std::string& keyset_id = "test/1") {
  Fingerprint fp;
  fp.nbits = 64;
  fp.keyset_id = keyset_id;
  fp.words.assign(1, 0);
  for (int b : bits) fp.set(b);
  return fp;
}

int key_id(const KeySet& ks, const std::string& needle) {
  for (const KeyDef& k : ks.keys()) {
    if (k.description.find(needle) != std::string::npos) return k.id;
  }
  FAIL("no key matching '" << needle << "'");
  return -1;
}

}  // namespace

TEST_CASE("thiirane fingerprint keys, checked predicate by predicate") {
  const KeySet& ks = KeySet::maccs_lite();
  const Fingerprint fp = compute_fingerprint(parse_smiles("C1CS1"), ks);

  CHECK(fp.test(key_id(ks, "S present")));
  CHECK(fp.test(key_id(ks, "3-membered ring")));
  CHECK(fp.test(key_id(ks, "C-S single bond")));
  CHECK(fp.test(key_id(ks, "C-S bond in a ring")));
  CHECK(fp.test(key_id(ks, "at least 1 ring")));
  CHECK(fp.test(key_id(ks, "S in ring")));

  // All nitrogen keys clear.
  CHECK_FALSE(fp.test(key_id(ks, "N present")));
  CHECK_FALSE(fp.test(key_id(ks, "N in ring")));
  CHECK_FALSE(fp.test(key_id(ks, "nitrogen bearing hydrogen")));
  CHECK_FALSE(fp.test(key_id(ks, "aromatic N")));

  CHECK_FALSE(fp.test(key_id(ks, "double bond present")));
  CHECK_FALSE(fp.test(key_id(ks, "aromatic ring")));
}

TEST_CASE("single carbon sets only element and hydrogen keys") {
  const KeySet& ks = KeySet::maccs_lite();
  const Fingerprint fp = compute_fingerprint(parse_smiles("C"), ks);

  CHECK(fp.test(key_id(ks, "C present")));
  CHECK(fp.test(key_id(ks, "CH3")));  // methane carries four hydrogens

  // Everything that needs a bond or ring is clear.
  for (const KeyDef& k : ks.keys()) {
    if (k.id == key_id(ks, "C present") || k.id == key_id(ks, "CH3")) continue;
    CHECK_MESSAGE(!fp.test(k.id), "unexpected key set: " << k.description);
  }
}

TEST_CASE("different spellings of ethanol share a fingerprint") {
  const KeySet& ks = KeySet::maccs_lite();
  const MolGraph a = parse_smiles("CCO");
  const MolGraph b = parse_smiles("OCC");
  REQUIRE(is_isomorphic(a, b));
  const Fingerprint fa = compute_fingerprint(a, ks);
  const Fingerprint fb = compute_fingerprint(b, ks);
  CHECK(fa.words == fb.words);
}

TEST_CASE("cosine similarity arithmetic") {
  CHECK(cosine_sim(from_bits({1, 2}), from_bits({2, 3})) == 0.5);
  CHECK(cosine_sim(from_bits({1, 2, 3}), from_bits({1, 2, 3})) == 1.0);
  CHECK(cosine_sim(from_bits({1}), from_bits({2})) == 0.0);
  CHECK(cosine_sim(from_bits({}), from_bits({})) == 1.0);
  CHECK(cosine_sim(from_bits({}), from_bits({1})) == 0.0);

  CHECK_THROWS_AS(cosine_sim(from_bits({1}, "a/1"), from_bits({1}, "b/1")), KeySetMismatch);
}

TEST_CASE("qualified and novel thresholds are strict") {
  // f exactly 0.5: not qualified.
  CHECK_FALSE(is_qualified(from_bits({1, 2}), from_bits({2, 3})));
  // f just above 0.5: qualified. {1,2,3} vs {2,3,4}: 2/3.
  CHECK(is_qualified(from_bits({1, 2, 3}), from_bits({2, 3, 4})));

  // f exactly 0.8: not novel. {0,1,2,3,4} vs {0,1,2,3,5}: 4/5.
  const Fingerprint a = from_bits({0, 1, 2, 3, 4});
  const Fingerprint b = from_bits({0, 1, 2, 3, 5});
  CHECK(cosine_sim(a, b) == 0.8);
  CHECK(is_qualified(a, b));
  CHECK_FALSE(is_novel(a, b));

  // f = 0.6: qualified and novel. {0,1,2,3,4} vs {0,1,2,5,6}: 3/5.
  const Fingerprint c = from_bits({0, 1, 2, 5, 6});
  CHECK(cosine_sim(a, c) == 0.6);
  CHECK(is_qualified(a, c));
  CHECK(is_novel(a, c));

  // Copies are qualified but never novel.
  CHECK(is_qualified(a, a));
  CHECK_FALSE(is_novel(a, a));
}

TEST_CASE("cosine symmetry, range and self-similarity (property)") {
  Rng rng(300);
  const KeySet& ks = KeySet::maccs_lite();
  synth::MolOptions options;
  options.max_heavy = 14;
  for (int i = 0; i < 60; ++i) {
    const Fingerprint a = compute_fingerprint(synth::random_molecule(rng, options), ks);
    const Fingerprint b = compute_fingerprint(synth::random_molecule(rng, options), ks);
    const double ab = cosine_sim(a, b);
    CHECK(ab == cosine_sim(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    if (a.popcount() > 0) CHECK(cosine_sim(a, a) == 1.0);
  }
}

TEST_CASE("isomorphic molecules have identical fingerprints (round-trip property)") {
  Rng rng(301);
  const KeySet& ks = KeySet::maccs_lite();
  synth::MolOptions options;
  options.max_heavy = 12;
  for (int i = 0; i < 80; ++i) {
    const MolGraph g = synth::random_molecule(rng, options);
    const MolGraph back = parse_smiles(write_smiles(g));
    REQUIRE(is_isomorphic(g, back));
    CHECK(compute_fingerprint(g, ks).words == compute_fingerprint(back, ks).words);
  }
}

TEST_CASE("monotone keys never clear when the molecule grows (property)") {
  Rng rng(302);
  const KeySet& ks = KeySet::maccs_lite();
  synth::MolOptions options;
  options.max_heavy = 10;
  for (int i = 0; i < 60; ++i) {
    const MolGraph g = synth::random_molecule(rng, options);
    const Fingerprint before = compute_fingerprint(g, ks);

    std::vector<Atom> atoms = g.atoms();
    std::vector<Bond> bonds = g.bonds();
    const int anchor = static_cast<int>(rng.below(atoms.size()));
    atoms.push_back({rng.chance(0.5) ? Element::C : Element::N});
    bonds.push_back({anchor, static_cast<int>(atoms.size()) - 1, BondOrder::Single});
    const MolGraph grown(std::move(atoms), std::move(bonds));
    const Fingerprint after = compute_fingerprint(grown, ks);

    for (const KeyDef& k : ks.keys()) {
      if (!k.monotone) continue;
      if (before.test(k.id))
        CHECK_MESSAGE(after.test(k.id), "key cleared by growth: " << k.description);
    }
  }
}

TEST_CASE("key set serializes as a versioned table") {
  const KeySet& ks = KeySet::maccs_lite();
  REQUIRE(ks.size() == 64);
  std::ostringstream os;
  ks.write_table(os);
  const std::string table = os.str();
  CHECK(table.find("maccs-lite-64/1") != std::string::npos);
  int lines = 0;
  for (char c : table)
    if (c == '\n') ++lines;
  CHECK(lines == 66);  // two header lines + 64 keys
}
