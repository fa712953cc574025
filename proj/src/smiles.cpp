#include "molpoison/smiles.hpp"

#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <vector>

namespace molpoison {

const char* to_string(SmilesErrorKind k) {
  switch (k) {
    case SmilesErrorKind::EmptyInput: return "EmptyInput";
    case SmilesErrorKind::UnexpectedCharacter: return "UnexpectedCharacter";
    case SmilesErrorKind::UnknownElement: return "UnknownElement";
    case SmilesErrorKind::MalformedBracketAtom: return "MalformedBracketAtom";
    case SmilesErrorKind::UnmatchedRingClosure: return "UnmatchedRingClosure";
    case SmilesErrorKind::ConflictingRingBond: return "ConflictingRingBond";
    case SmilesErrorKind::DuplicateBond: return "DuplicateBond";
    case SmilesErrorKind::SelfBond: return "SelfBond";
    case SmilesErrorKind::DanglingBond: return "DanglingBond";
    case SmilesErrorKind::UnbalancedParenthesis: return "UnbalancedParenthesis";
  }
  return "SmilesError";
}

SmilesError::SmilesError(SmilesErrorKind kind, std::size_t offset, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + " at offset " + std::to_string(offset) +
                         ": " + detail),
      kind_(kind),
      offset_(offset) {}

namespace {

[[noreturn]] void fail(SmilesErrorKind kind, std::size_t offset, const std::string& detail) {
  throw SmilesError(kind, offset, detail);
}

bool is_aromatic_symbol(char c) {
  return c == 'b' || c == 'c' || c == 'n' || c == 'o' || c == 'p' || c == 's';
}

struct Parser {
  std::string_view text;
  std::size_t pos = 0;

  std::vector<Atom> atoms;
  std::vector<Bond> bonds;

  int prev = -1;
  std::optional<BondOrder> pending_bond;
  std::size_t pending_bond_offset = 0;

  struct OpenRing {
    int atom;
    std::optional<BondOrder> order;
    std::size_t offset;
  };
  std::map<int, OpenRing> open_rings;

  std::vector<std::pair<int, std::size_t>> branch_stack;  // (atom, '(' offset)

  char peek() const { return pos < text.size() ? text[pos] : '\0'; }
  bool done() const { return pos >= text.size(); }

  void run() {
    if (text.empty()) fail(SmilesErrorKind::EmptyInput, 0, "empty SMILES string");
    while (!done()) step();
    if (pending_bond)
      fail(SmilesErrorKind::DanglingBond, pending_bond_offset, "bond symbol at end of input");
    if (!branch_stack.empty())
      fail(SmilesErrorKind::UnbalancedParenthesis, branch_stack.back().second, "unclosed branch");
    if (!open_rings.empty()) {
      const auto& first = *open_rings.begin();
      fail(SmilesErrorKind::UnmatchedRingClosure, first.second.offset,
           "ring bond " + std::to_string(first.first) + " never closed");
    }
  }

  void step() {
    const char c = text[pos];
    switch (c) {
      case '-': case '=': case '#': case ':': case '/': case '\\':
        take_bond(c);
        return;
      case '(':
        if (prev < 0) fail(SmilesErrorKind::UnexpectedCharacter, pos, "branch before any atom");
        if (pending_bond)
          fail(SmilesErrorKind::DanglingBond, pending_bond_offset, "bond symbol before branch");
        branch_stack.emplace_back(prev, pos);
        ++pos;
        return;
      case ')':
        if (branch_stack.empty())
          fail(SmilesErrorKind::UnbalancedParenthesis, pos, "')' without matching '('");
        if (pending_bond)
          fail(SmilesErrorKind::DanglingBond, pending_bond_offset, "bond symbol before ')'");
        prev = branch_stack.back().first;
        branch_stack.pop_back();
        ++pos;
        return;
      case '%': {
        const std::size_t start = pos;
        take_ring_closure(parse_two_digit_ring(), start);
        return;
      }
      case '[':
        add_atom(parse_bracket_atom());
        return;
      default:
        if (c >= '1' && c <= '9') {
          const std::size_t start = pos;
          ++pos;
          take_ring_closure(c - '0', start);
          return;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
          add_atom(parse_organic_atom());
          return;
        }
        fail(SmilesErrorKind::UnexpectedCharacter, pos,
             std::string("unexpected character '") + c + "'");
    }
  }

  void take_bond(char c) {
    if (pending_bond)
      fail(SmilesErrorKind::DanglingBond, pending_bond_offset, "two bond symbols in a row");
    if (prev < 0) fail(SmilesErrorKind::DanglingBond, pos, "bond symbol before any atom");
    switch (c) {
      case '-': pending_bond = BondOrder::Single; break;
      case '=': pending_bond = BondOrder::Double; break;
      case '#': pending_bond = BondOrder::Triple; break;
      case ':': pending_bond = BondOrder::Aromatic; break;
      // Directional single bonds; stereochemistry is discarded.
      case '/': case '\\': pending_bond = BondOrder::Single; break;
    }
    pending_bond_offset = pos;
    ++pos;
  }

  int parse_two_digit_ring() {
    const std::size_t start = pos;
    ++pos;  // '%'
    if (pos + 1 >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])) ||
        !std::isdigit(static_cast<unsigned char>(text[pos + 1])))
      fail(SmilesErrorKind::UnexpectedCharacter, start, "'%' must be followed by two digits");
    const int num = (text[pos] - '0') * 10 + (text[pos + 1] - '0');
    pos += 2;
    return num;
  }

  void take_ring_closure(int number, std::size_t offset) {
    if (prev < 0)
      fail(SmilesErrorKind::UnexpectedCharacter, offset, "ring closure before any atom");
    auto it = open_rings.find(number);
    if (it == open_rings.end()) {
      open_rings.emplace(number, OpenRing{prev, pending_bond, offset});
      pending_bond.reset();
      return;
    }
    const OpenRing open = it->second;
    open_rings.erase(it);
    if (open.atom == prev)
      fail(SmilesErrorKind::SelfBond, offset, "ring closure back to the same atom");
    if (open.order && pending_bond && *open.order != *pending_bond)
      fail(SmilesErrorKind::ConflictingRingBond, offset,
           "ring bond order specified differently at both ends");
    BondOrder order;
    if (open.order)
      order = *open.order;
    else if (pending_bond)
      order = *pending_bond;
    else
      order = default_order(open.atom, prev);
    pending_bond.reset();
    add_bond(open.atom, prev, order, offset);
  }

  BondOrder default_order(int a, int b) const {
    return (atoms[a].aromatic && atoms[b].aromatic) ? BondOrder::Aromatic : BondOrder::Single;
  }

  void add_bond(int a, int b, BondOrder order, std::size_t offset) {
    for (const Bond& e : bonds) {
      if ((e.a == a && e.b == b) || (e.a == b && e.b == a))
        fail(SmilesErrorKind::DuplicateBond, offset, "second bond between the same atom pair");
    }
    bonds.push_back({a, b, order});
  }

  void add_atom(Atom atom) {
    atoms.push_back(atom);
    const int idx = static_cast<int>(atoms.size()) - 1;
    if (prev >= 0) {
      const BondOrder order = pending_bond ? *pending_bond : default_order(prev, idx);
      add_bond(prev, idx, order, pos);
    }
    pending_bond.reset();
    prev = idx;
  }

  Atom parse_organic_atom() {
    const std::size_t start = pos;
    const char c = text[pos];
    Atom atom;
    if (std::islower(static_cast<unsigned char>(c))) {
      if (!is_aromatic_symbol(c))
        fail(SmilesErrorKind::UnknownElement, start,
             std::string("'") + c + "' is not a supported aromatic atom");
      const char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      atom.element = *element_from_symbol(std::string_view(&upper, 1));
      atom.aromatic = true;
      ++pos;
      return atom;
    }
    // Two-letter symbols first (Cl, Br).
    if (pos + 1 < text.size()) {
      const auto two = element_from_symbol(text.substr(pos, 2));
      if (two) {
        atom.element = *two;
        pos += 2;
        return atom;
      }
    }
    const auto one = element_from_symbol(text.substr(pos, 1));
    if (!one)
      fail(SmilesErrorKind::UnknownElement, start,
           std::string("'") + c + "' is not a supported element");
    atom.element = *one;
    ++pos;
    return atom;
  }

  Atom parse_bracket_atom() {
    const std::size_t start = pos;
    ++pos;  // '['
    Atom atom;
    atom.explicit_h = 0;  // bracket atoms state their hydrogens

    if (!done() && std::isdigit(static_cast<unsigned char>(peek()))) {
      int isotope = 0;
      int digits = 0;
      while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) {
        isotope = isotope * 10 + (text[pos] - '0');
        if (++digits > 3) fail(SmilesErrorKind::MalformedBracketAtom, start, "isotope too long");
        ++pos;
      }
      if (isotope == 0)
        fail(SmilesErrorKind::MalformedBracketAtom, start, "isotope must be positive");
      atom.isotope = isotope;
    }

    if (done() || !std::isalpha(static_cast<unsigned char>(peek())))
      fail(SmilesErrorKind::MalformedBracketAtom, start, "missing element symbol");
    if (std::islower(static_cast<unsigned char>(peek()))) {
      const char c = peek();
      if (!is_aromatic_symbol(c))
        fail(SmilesErrorKind::UnknownElement, pos,
             std::string("'") + c + "' is not a supported aromatic atom");
      const char upper = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      atom.element = *element_from_symbol(std::string_view(&upper, 1));
      atom.aromatic = true;
      ++pos;
    } else {
      std::size_t len = 1;
      if (pos + 1 < text.size() && std::islower(static_cast<unsigned char>(text[pos + 1])) &&
          element_from_symbol(text.substr(pos, 2)))
        len = 2;
      const auto el = element_from_symbol(text.substr(pos, len));
      if (!el)
        fail(SmilesErrorKind::UnknownElement, pos,
             "'" + std::string(text.substr(pos, len)) + "' is not a supported element");
      atom.element = *el;
      pos += len;
    }

    while (!done() && peek() == '@') ++pos;  // chirality, discarded

    if (!done() && peek() == 'H') {
      ++pos;
      int h = 1;
      if (!done() && std::isdigit(static_cast<unsigned char>(peek()))) {
        h = text[pos] - '0';
        ++pos;
      }
      atom.explicit_h = h;
    }

    if (!done() && (peek() == '+' || peek() == '-')) {
      const char sign_char = peek();
      const int sign = sign_char == '+' ? 1 : -1;
      int magnitude = 0;
      while (!done() && peek() == sign_char) {
        ++magnitude;
        ++pos;
      }
      if (magnitude == 1 && !done() && std::isdigit(static_cast<unsigned char>(peek()))) {
        magnitude = 0;
        while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) {
          magnitude = magnitude * 10 + (text[pos] - '0');
          ++pos;
          if (magnitude > 15)
            fail(SmilesErrorKind::MalformedBracketAtom, start, "charge out of range");
        }
      }
      if (magnitude > 15) fail(SmilesErrorKind::MalformedBracketAtom, start, "charge out of range");
      atom.formal_charge = sign * magnitude;
    }

    if (done() || peek() != ']')
      fail(SmilesErrorKind::MalformedBracketAtom, start, "missing closing ']'");
    ++pos;
    return atom;
  }
};

}  // namespace

MolGraph parse_smiles(std::string_view text) {
  Parser p{text};
  p.run();
  return MolGraph(std::move(p.atoms), std::move(p.bonds));
}

namespace {

bool lowercase_allowed(Element e) {
  switch (e) {
    case Element::B: case Element::C: case Element::N:
    case Element::O: case Element::P: case Element::S:
      return true;
    default:
      return false;
  }
}

std::string atom_token(const MolGraph& g, int idx) {
  const Atom& a = g.atom(idx);
  std::string symbol = element_symbol(a.element);
  if (a.aromatic && lowercase_allowed(a.element))
    symbol[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(symbol[0])));

  const bool needs_bracket = a.isotope.has_value() || a.formal_charge != 0 ||
                             a.explicit_h.has_value() || a.element == Element::H;
  if (!needs_bracket) return symbol;

  std::string out = "[";
  if (a.isotope) out += std::to_string(*a.isotope);
  out += symbol;
  // Emit the effective hydrogen count so reparsing preserves it.
  const int h = hydrogen_count(g, idx);
  if (h > 0) {
    out += 'H';
    if (h > 1) out += std::to_string(h);
  }
  if (a.formal_charge != 0) {
    out += a.formal_charge > 0 ? '+' : '-';
    const int mag = std::abs(a.formal_charge);
    if (mag > 1) out += std::to_string(mag);
  }
  out += ']';
  return out;
}

// DFS writer. A first pass classifies bonds into spanning-tree edges and
// ring (back) edges, recording which endpoint the emission walk reaches
// first; the walk then opens ring numbers at that endpoint and closes them
// at the other. Both passes iterate neighbors in adjacency order, so they
// visit atoms in the same sequence.
struct Writer {
  const MolGraph& g;
  std::string out;

  std::vector<bool> tree_edge;
  std::vector<bool> back_edge;
  std::vector<std::vector<int>> opens_at;   // atom -> back-edge bonds it opens
  std::vector<std::vector<int>> closes_at;  // atom -> back-edge bonds it closes

  std::vector<bool> visited;
  std::map<int, int> ring_number;  // bond -> active ring-closure number
  std::array<bool, 100> number_in_use{};

  explicit Writer(const MolGraph& graph)
      : g(graph),
        tree_edge(graph.bond_count(), false),
        back_edge(graph.bond_count(), false),
        opens_at(graph.atom_count()),
        closes_at(graph.atom_count()),
        visited(graph.atom_count(), false) {}

  void classify(int root) {
    std::vector<int> preorder(g.atom_count(), -1);
    int counter = 0;
    struct Frame {
      int atom;
      std::size_t next;
    };
    std::vector<Frame> stack{{root, 0}};
    preorder[root] = counter++;
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto& nbrs = g.neighbors(f.atom);
      if (f.next >= nbrs.size()) {
        stack.pop_back();
        continue;
      }
      const auto nb = nbrs[f.next++];
      if (preorder[nb.atom] < 0) {
        preorder[nb.atom] = counter++;
        tree_edge[nb.bond] = true;
        stack.push_back({nb.atom, 0});
      } else if (!tree_edge[nb.bond] && !back_edge[nb.bond]) {
        back_edge[nb.bond] = true;
        const Bond& b = g.bond(nb.bond);
        const int opener = preorder[b.a] <= preorder[b.b] ? b.a : b.b;
        const int closer = opener == b.a ? b.b : b.a;
        opens_at[opener].push_back(nb.bond);
        closes_at[closer].push_back(nb.bond);
      }
    }
  }

  int allocate_number() {
    for (int n = 1; n < 100; ++n) {
      if (!number_in_use[n]) {
        number_in_use[n] = true;
        return n;
      }
    }
    throw std::invalid_argument("write_smiles: more than 99 simultaneously open ring bonds");
  }

  std::string bond_symbol(const Bond& b) const {
    const bool both_aromatic = g.atom(b.a).aromatic && g.atom(b.b).aromatic;
    switch (b.order) {
      case BondOrder::Single: return both_aromatic ? "-" : "";
      case BondOrder::Double: return "=";
      case BondOrder::Triple: return "#";
      case BondOrder::Aromatic: return both_aromatic ? "" : ":";
    }
    return "";
  }

  void emit_ring_digit(int number) {
    if (number < 10) {
      out += static_cast<char>('0' + number);
    } else {
      out += '%';
      out += static_cast<char>('0' + number / 10);
      out += static_cast<char>('0' + number % 10);
    }
  }

  void walk(int atom) {
    visited[atom] = true;
    out += atom_token(g, atom);

    for (int bond : closes_at[atom]) {
      const auto it = ring_number.find(bond);
      emit_ring_digit(it->second);
      number_in_use[it->second] = false;
      ring_number.erase(it);
    }
    for (int bond : opens_at[atom]) {
      const int number = allocate_number();
      ring_number.emplace(bond, number);
      out += bond_symbol(g.bond(bond));
      emit_ring_digit(number);
    }

    std::vector<int> children;
    for (const auto& nb : g.neighbors(atom)) {
      if (tree_edge[nb.bond] && !visited[nb.atom]) children.push_back(nb.bond);
    }
    for (std::size_t i = 0; i < children.size(); ++i) {
      const Bond& b = g.bond(children[i]);
      const int child = b.a == atom ? b.b : b.a;
      const bool last = (i + 1 == children.size());
      if (!last) out += '(';
      out += bond_symbol(b);
      walk(child);
      if (!last) out += ')';
    }
  }
};

}  // namespace

std::string write_smiles(const MolGraph& g) {
  if (g.atom_count() == 0) throw std::invalid_argument("write_smiles: empty graph");
  if (!is_connected(g)) throw std::invalid_argument("write_smiles: disconnected graph");

  Writer w(g);
  w.classify(0);
  w.walk(0);
  return w.out;
}

}  // namespace molpoison
