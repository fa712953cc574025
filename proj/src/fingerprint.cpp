#include "molpoison/fingerprint.hpp"

#include <bit>
#include <cmath>
#include <ostream>

#include "molpoison/graphmatch.hpp"
#include "molpoison/smiles.hpp"

namespace molpoison {

int Fingerprint::popcount() const {
  int n = 0;
  for (std::uint64_t w : words) n += std::popcount(w);
  return n;
}

KeySet::KeySet(std::string version, std::vector<KeyDef> keys)
    : version_(std::move(version)), keys_(std::move(keys)) {
  for (int i = 0; i < size(); ++i) {
    if (keys_[i].id != i) throw std::invalid_argument("KeySet: key ids must be 0..n-1 in order");
  }
}

void KeySet::write_table(std::ostream& os) const {
  os << "# key set " << version_ << "\n";
  os << "# id\tdescription\n";
  for (const KeyDef& k : keys_) os << k.id << '\t' << k.description << '\n';
}

Fingerprint compute_fingerprint(const MolGraph& g, const KeySet& ks) {
  Fingerprint fp;
  fp.nbits = ks.size();
  fp.keyset_id = ks.version();
  fp.words.assign((ks.size() + 63) / 64, 0);
  for (int i = 0; i < ks.size(); ++i) {
    if (ks.key(i).predicate(g)) fp.set(i);
  }
  return fp;
}

double cosine_sim(const Fingerprint& a, const Fingerprint& b) {
  if (a.keyset_id != b.keyset_id) throw KeySetMismatch(a.keyset_id, b.keyset_id);
  const int pa = a.popcount();
  const int pb = b.popcount();
  if (pa == 0 && pb == 0) return 1.0;
  if (pa == 0 || pb == 0) return 0.0;
  int shared = 0;
  for (std::size_t w = 0; w < a.words.size(); ++w) shared += std::popcount(a.words[w] & b.words[w]);
  return static_cast<double>(shared) /
         std::sqrt(static_cast<double>(pa) * static_cast<double>(pb));
}

bool is_qualified(const Fingerprint& gen, const Fingerprint& truth) {
  return cosine_sim(gen, truth) > kQualifiedThreshold;
}

bool is_novel(const Fingerprint& gen, const Fingerprint& truth) {
  return cosine_sim(gen, truth) < kNoveltyThreshold;
}

bool is_qualified(const MolGraph& gen, const MolGraph& truth, const KeySet& ks) {
  return is_qualified(compute_fingerprint(gen, ks), compute_fingerprint(truth, ks));
}

bool is_novel(const MolGraph& gen, const MolGraph& truth, const KeySet& ks) {
  return is_novel(compute_fingerprint(gen, ks), compute_fingerprint(truth, ks));
}

namespace {

int element_count(const MolGraph& g, Element e) {
  int n = 0;
  for (const Atom& a : g.atoms())
    if (a.element == e) ++n;
  return n;
}

bool is_halogen(Element e) {
  return e == Element::F || e == Element::Cl || e == Element::Br || e == Element::I;
}

int halogen_count(const MolGraph& g) {
  int n = 0;
  for (const Atom& a : g.atoms())
    if (is_halogen(a.element)) ++n;
  return n;
}

int bond_count_of(const MolGraph& g, BondOrder order) {
  int n = 0;
  for (const Bond& b : g.bonds())
    if (b.order == order) ++n;
  return n;
}

bool has_bond(const MolGraph& g, Element x, Element y, BondOrder order) {
  for (const Bond& b : g.bonds()) {
    if (b.order != order) continue;
    const Element ea = g.atom(b.a).element;
    const Element eb = g.atom(b.b).element;
    if ((ea == x && eb == y) || (ea == y && eb == x)) return true;
  }
  return false;
}

bool has_ring_bond_between(const MolGraph& g, Element x, Element y) {
  const std::vector<bool> rb = ring_bonds(g);
  for (int bi = 0; bi < g.bond_count(); ++bi) {
    if (!rb[bi]) continue;
    const Element ea = g.atom(g.bond(bi).a).element;
    const Element eb = g.atom(g.bond(bi).b).element;
    if ((ea == x && eb == y) || (ea == y && eb == x)) return true;
  }
  return false;
}

bool element_in_ring(const MolGraph& g, Element e) {
  const std::vector<bool> ra = ring_atoms(g);
  for (int i = 0; i < g.atom_count(); ++i) {
    if (ra[i] && g.atom(i).element == e) return true;
  }
  return false;
}

bool has_aromatic_atom(const MolGraph& g, Element e) {
  for (const Atom& a : g.atoms())
    if (a.aromatic && a.element == e) return true;
  return false;
}

bool has_ring_junction(const MolGraph& g) {
  const std::vector<bool> rb = ring_bonds(g);
  for (int i = 0; i < g.atom_count(); ++i) {
    int incident = 0;
    for (const auto& nb : g.neighbors(i))
      if (rb[nb.bond]) ++incident;
    if (incident >= 3) return true;
  }
  return false;
}

bool element_with_hydrogens(const MolGraph& g, Element e, int min_h) {
  for (int i = 0; i < g.atom_count(); ++i) {
    if (g.atom(i).element == e && hydrogen_count(g, i) >= min_h) return true;
  }
  return false;
}

bool carbon_chain4(const MolGraph& g) {
  // Simple path of four carbons, any bond orders.
  std::vector<bool> on_path(g.atom_count(), false);
  std::function<bool(int, int)> extend = [&](int atom, int length) {
    if (length == 4) return true;
    on_path[atom] = true;
    for (const auto& nb : g.neighbors(atom)) {
      if (on_path[nb.atom] || g.atom(nb.atom).element != Element::C) continue;
      if (extend(nb.atom, length + 1)) {
        on_path[atom] = false;
        return true;
      }
    }
    on_path[atom] = false;
    return false;
  };
  for (int i = 0; i < g.atom_count(); ++i) {
    if (g.atom(i).element == Element::C && extend(i, 1)) return true;
  }
  return false;
}

// Key backed by a small pattern molecule matched as a labeled subgraph.
KeyDef pattern_key(int id, const std::string& description, const char* pattern_smiles) {
  MolGraph pattern = parse_smiles(pattern_smiles);
  return {id, description, true,
          [pattern = std::move(pattern)](const MolGraph& g) {
            return contains_subgraph(g, pattern);
          }};
}

KeyDef element_key(int id, Element e) {
  return {id, std::string(element_symbol(e)) + " present", true,
          [e](const MolGraph& g) { return element_count(g, e) >= 1; }};
}

KeyDef count_key(int id, Element e, int min) {
  return {id, std::string("at least ") + std::to_string(min) + " " + element_symbol(e) + " atoms",
          true, [e, min](const MolGraph& g) { return element_count(g, e) >= min; }};
}

KeyDef ring_size_key(int id, int size) {
  return {id, std::to_string(size) + "-membered ring", true,
          [size](const MolGraph& g) { return has_ring_of_size(g, size); }};
}

std::vector<KeyDef> build_maccs_lite() {
  std::vector<KeyDef> keys;
  keys.reserve(64);

  // 0-9: element presence
  keys.push_back(element_key(0, Element::B));
  keys.push_back(element_key(1, Element::C));
  keys.push_back(element_key(2, Element::N));
  keys.push_back(element_key(3, Element::O));
  keys.push_back(element_key(4, Element::P));
  keys.push_back(element_key(5, Element::S));
  keys.push_back(element_key(6, Element::F));
  keys.push_back(element_key(7, Element::Cl));
  keys.push_back(element_key(8, Element::Br));
  keys.push_back(element_key(9, Element::I));

  // 10-17: element count thresholds
  keys.push_back(count_key(10, Element::C, 2));
  keys.push_back(count_key(11, Element::C, 4));
  keys.push_back(count_key(12, Element::C, 8));
  keys.push_back(count_key(13, Element::N, 2));
  keys.push_back(count_key(14, Element::O, 2));
  keys.push_back(count_key(15, Element::O, 3));
  keys.push_back(count_key(16, Element::S, 2));
  keys.push_back({17, "at least 2 halogen atoms", true,
                  [](const MolGraph& g) { return halogen_count(g) >= 2; }});

  // 18-20: formal charge
  keys.push_back({18, "charged atom present", true, [](const MolGraph& g) {
                    for (const Atom& a : g.atoms())
                      if (a.formal_charge != 0) return true;
                    return false;
                  }});
  keys.push_back({19, "negative charge present", true, [](const MolGraph& g) {
                    for (const Atom& a : g.atoms())
                      if (a.formal_charge < 0) return true;
                    return false;
                  }});
  keys.push_back({20, "positive charge present", true, [](const MolGraph& g) {
                    for (const Atom& a : g.atoms())
                      if (a.formal_charge > 0) return true;
                    return false;
                  }});

  // 21-31: rings
  for (int size = 3; size <= 8; ++size) keys.push_back(ring_size_key(18 + size, size));
  keys.push_back({27, "aromatic ring", true, [](const MolGraph& g) { return has_aromatic_ring(g); }});
  keys.push_back({28, "at least 1 ring", true,
                  [](const MolGraph& g) { return cyclomatic_number(g) >= 1; }});
  keys.push_back({29, "at least 2 rings", true,
                  [](const MolGraph& g) { return cyclomatic_number(g) >= 2; }});
  keys.push_back({30, "at least 3 rings", true,
                  [](const MolGraph& g) { return cyclomatic_number(g) >= 3; }});
  keys.push_back({31, "ring junction atom (3+ ring bonds)", true,
                  [](const MolGraph& g) { return has_ring_junction(g); }});

  // 32-35: bond types
  keys.push_back({32, "double bond present", true,
                  [](const MolGraph& g) { return bond_count_of(g, BondOrder::Double) >= 1; }});
  keys.push_back({33, "triple bond present", true,
                  [](const MolGraph& g) { return bond_count_of(g, BondOrder::Triple) >= 1; }});
  keys.push_back({34, "aromatic bond present", true,
                  [](const MolGraph& g) { return bond_count_of(g, BondOrder::Aromatic) >= 1; }});
  keys.push_back({35, "at least 2 double bonds", true,
                  [](const MolGraph& g) { return bond_count_of(g, BondOrder::Double) >= 2; }});

  // 36-52: small fragments
  keys.push_back(pattern_key(36, "C=C fragment", "C=C"));
  keys.push_back(pattern_key(37, "C#C fragment", "C#C"));
  keys.push_back({38, "halogen bonded to carbon", true, [](const MolGraph& g) {
                    for (const Bond& b : g.bonds()) {
                      const Element ea = g.atom(b.a).element;
                      const Element eb = g.atom(b.b).element;
                      if ((ea == Element::C && is_halogen(eb)) ||
                          (eb == Element::C && is_halogen(ea)))
                        return true;
                    }
                    return false;
                  }});
  keys.push_back(pattern_key(39, "carbonyl C=O", "C=O"));
  keys.push_back(pattern_key(40, "carboxyl/ester fragment C(=O)O", "C(=O)O"));
  keys.push_back(pattern_key(41, "amide fragment C(=O)N", "C(=O)N"));
  keys.push_back(pattern_key(42, "nitrile C#N", "C#N"));
  keys.push_back(pattern_key(43, "imine C=N", "C=N"));
  keys.push_back(pattern_key(44, "N=O fragment", "N=O"));
  keys.push_back({45, "N-N single bond", true, [](const MolGraph& g) {
                    return has_bond(g, Element::N, Element::N, BondOrder::Single);
                  }});
  keys.push_back(pattern_key(46, "N=N fragment", "N=N"));
  keys.push_back({47, "O-O single bond", true, [](const MolGraph& g) {
                    return has_bond(g, Element::O, Element::O, BondOrder::Single);
                  }});
  keys.push_back(pattern_key(48, "S=O fragment", "S=O"));
  keys.push_back(pattern_key(49, "C=S fragment", "C=S"));
  keys.push_back({50, "S-S single bond", true, [](const MolGraph& g) {
                    return has_bond(g, Element::S, Element::S, BondOrder::Single);
                  }});
  keys.push_back(pattern_key(51, "P=O fragment", "P=O"));
  keys.push_back({52, "C-S single bond", true, [](const MolGraph& g) {
                    return has_bond(g, Element::C, Element::S, BondOrder::Single);
                  }});

  // 53-59: ring environment and aromatic heteroatoms
  keys.push_back({53, "C-S bond in a ring", true, [](const MolGraph& g) {
                    return has_ring_bond_between(g, Element::C, Element::S);
                  }});
  keys.push_back({54, "N in ring", true,
                  [](const MolGraph& g) { return element_in_ring(g, Element::N); }});
  keys.push_back({55, "O in ring", true,
                  [](const MolGraph& g) { return element_in_ring(g, Element::O); }});
  keys.push_back({56, "S in ring", true,
                  [](const MolGraph& g) { return element_in_ring(g, Element::S); }});
  keys.push_back({57, "aromatic N", true,
                  [](const MolGraph& g) { return has_aromatic_atom(g, Element::N); }});
  keys.push_back({58, "aromatic O", true,
                  [](const MolGraph& g) { return has_aromatic_atom(g, Element::O); }});
  keys.push_back({59, "aromatic S", true,
                  [](const MolGraph& g) { return has_aromatic_atom(g, Element::S); }});

  // 60-63: hydrogen environment and chain shape. The hydrogen keys depend on
  // free valence, so they are not monotone under graph growth.
  keys.push_back({60, "N-H (nitrogen bearing hydrogen)", false, [](const MolGraph& g) {
                    return element_with_hydrogens(g, Element::N, 1);
                  }});
  keys.push_back({61, "O-H (oxygen bearing hydrogen)", false, [](const MolGraph& g) {
                    return element_with_hydrogens(g, Element::O, 1);
                  }});
  keys.push_back({62, "CH3 (carbon bearing 3+ hydrogens)", false, [](const MolGraph& g) {
                    return element_with_hydrogens(g, Element::C, 3);
                  }});
  keys.push_back({63, "chain of 4 carbons", true, carbon_chain4});

  return keys;
}

}  // namespace

const KeySet& KeySet::maccs_lite() {
  static const KeySet instance("maccs-lite-64/1", build_maccs_lite());
  return instance;
}

}  // namespace molpoison
