#include "hddm/smiles.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <tuple>

namespace hddm {

namespace {

constexpr int kNoBond = static_cast<int>(BondOrder::None);
constexpr int kSingle = static_cast<int>(BondOrder::Single);
constexpr int kAromatic = static_cast<int>(BondOrder::Aromatic);

bool is_bare_aliphatic(const std::string& element) {
  static const std::array<const char*, 10> organic = {
      "B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"};
  return std::find(organic.begin(), organic.end(), element) != organic.end();
}

bool is_bare_aromatic(const std::string& element) {
  static const std::array<const char*, 6> organic = {"B", "C", "N",
                                                     "O", "P", "S"};
  return std::find(organic.begin(), organic.end(), element) != organic.end();
}

struct PendingBond {
  int order = kNoBond;  // kNoBond means "implicit"
  std::size_t position = 0;
};

struct RingOpening {
  int atom = -1;
  PendingBond bond;
  std::size_t position = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Molecule run(std::vector<std::size_t>* positions_out) {
    while (pos_ < text_.size()) step();
    if (atoms_.empty()) fail("empty SMILES", 0);
    if (!branch_stack_.empty()) {
      fail("unclosed branch", branch_stack_.back());
    }
    if (!ring_open_.empty()) {
      fail("unclosed ring bond " + std::to_string(ring_open_.begin()->first),
           ring_open_.begin()->second.position);
    }
    if (pending_.has_value()) fail("dangling bond", pending_->position);

    Molecule mol;
    mol.atoms = atoms_;
    const int n = static_cast<int>(atoms_.size());
    mol.bonds = Eigen::MatrixXi::Zero(n, n);
    for (const auto& [a, b, order] : bonds_) {
      if (mol.bonds(a, b) != kNoBond) {
        fail("duplicate bond between atoms", 0);
      }
      mol.bonds(a, b) = order;
      mol.bonds(b, a) = order;
    }
    if (positions_out) *positions_out = atom_positions_;
    return mol;
  }

 private:
  [[noreturn]] void fail(const std::string& message, std::size_t at) const {
    throw SmilesError(message, at);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void step() {
    const char c = peek();
    const std::size_t at = pos_;
    if (c == '(') {
      if (prev_atom_ < 0) fail("branch before any atom", at);
      if (pending_.has_value()) fail("bond before branch opening", at);
      branch_stack_.push_back(at);
      branch_atoms_.push_back(prev_atom_);
      ++pos_;
      return;
    }
    if (c == ')') {
      if (branch_atoms_.empty()) fail("unmatched ')'", at);
      if (pending_.has_value()) fail("dangling bond before ')'", pending_->position);
      prev_atom_ = branch_atoms_.back();
      branch_atoms_.pop_back();
      branch_stack_.pop_back();
      ++pos_;
      return;
    }
    if (c == '-' || c == '=' || c == '#' || c == ':') {
      if (pending_.has_value()) fail("two bond symbols in a row", at);
      int order = kSingle;
      if (c == '=') order = static_cast<int>(BondOrder::Double);
      if (c == '#') order = static_cast<int>(BondOrder::Triple);
      if (c == ':') order = kAromatic;
      pending_ = PendingBond{order, at};
      ++pos_;
      return;
    }
    if (c == '/' || c == '\\' || c == '@') {
      fail("stereochemistry is not supported", at);
    }
    if (c == '.') fail("disconnected structures are not supported", at);
    if (c == '*') fail("wildcard atoms are not supported", at);
    if (c == '%' || std::isdigit(static_cast<unsigned char>(c))) {
      ring_closure(at);
      return;
    }
    if (c == '[' || std::isalpha(static_cast<unsigned char>(c))) {
      atom(at);
      return;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      fail("unexpected whitespace", at);
    }
    fail(std::string("unexpected character '") + c + "'", at);
  }

  void ring_closure(std::size_t at) {
    if (prev_atom_ < 0) fail("ring closure before any atom", at);
    int number = 0;
    if (peek() == '%') {
      ++pos_;
      if (pos_ + 1 >= text_.size() ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
          !std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
        fail("'%' needs two digits", at);
      }
      number = (text_[pos_] - '0') * 10 + (text_[pos_ + 1] - '0');
      pos_ += 2;
    } else {
      number = text_[pos_] - '0';
      ++pos_;
    }

    PendingBond here = pending_.value_or(PendingBond{kNoBond, at});
    pending_.reset();

    auto it = ring_open_.find(number);
    if (it == ring_open_.end()) {
      ring_open_[number] = RingOpening{prev_atom_, here, at};
      return;
    }
    const RingOpening open = it->second;
    ring_open_.erase(it);
    if (open.atom == prev_atom_) fail("ring bond to the same atom", at);
    int order = kNoBond;
    if (open.bond.order != kNoBond && here.order != kNoBond &&
        open.bond.order != here.order) {
      fail("ring bond symbols disagree", at);
    }
    order = open.bond.order != kNoBond ? open.bond.order : here.order;
    if (order == kNoBond) {
      order = (atoms_[static_cast<std::size_t>(open.atom)].aromatic &&
               atoms_[static_cast<std::size_t>(prev_atom_)].aromatic)
                  ? kAromatic
                  : kSingle;
    }
    bonds_.emplace_back(open.atom, prev_atom_, order);
  }

  void atom(std::size_t at) {
    AtomRecord record;
    if (peek() == '[') {
      record = bracket_atom(at);
    } else {
      record = bare_atom(at);
    }
    atoms_.push_back(record);
    atom_positions_.push_back(at);
    const int idx = static_cast<int>(atoms_.size()) - 1;
    if (prev_atom_ >= 0) {
      int order = kNoBond;
      if (pending_.has_value()) {
        order = pending_->order;
        pending_.reset();
      } else {
        order = (atoms_[static_cast<std::size_t>(prev_atom_)].aromatic &&
                 record.aromatic)
                    ? kAromatic
                    : kSingle;
      }
      bonds_.emplace_back(prev_atom_, idx, order);
    } else if (pending_.has_value()) {
      fail("bond before any atom", pending_->position);
    }
    prev_atom_ = idx;
  }

  AtomRecord bare_atom(std::size_t at) {
    AtomRecord record;
    const char c = text_[pos_];
    if (std::isupper(static_cast<unsigned char>(c))) {
      std::string sym(1, c);
      if (pos_ + 1 < text_.size() &&
          std::islower(static_cast<unsigned char>(text_[pos_ + 1]))) {
        const std::string two = sym + text_[pos_ + 1];
        if (two == "Cl" || two == "Br") {
          record.element = two;
          pos_ += 2;
          return record;
        }
      }
      if (!is_bare_aliphatic(sym)) {
        fail("element '" + sym + "' must be written in brackets", at);
      }
      record.element = sym;
      ++pos_;
      return record;
    }
    std::string sym(1, static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (!is_bare_aromatic(sym)) {
      fail(std::string("unknown aromatic symbol '") + c + "'", at);
    }
    record.element = sym;
    record.aromatic = true;
    ++pos_;
    return record;
  }

  AtomRecord bracket_atom(std::size_t at) {
    ++pos_;  // consume '['
    if (pos_ < text_.size() &&
        std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      fail("isotopes are not supported", pos_);
    }
    AtomRecord record;
    if (pos_ >= text_.size() ||
        !std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      fail("expected element symbol", pos_);
    }
    const char first = text_[pos_];
    if (std::isupper(static_cast<unsigned char>(first))) {
      std::string sym(1, first);
      ++pos_;
      if (pos_ < text_.size() &&
          std::islower(static_cast<unsigned char>(text_[pos_])) &&
          text_[pos_] != 'c' && text_[pos_] != 'n' && text_[pos_] != 'o' &&
          text_[pos_] != 's' && text_[pos_] != 'p' && text_[pos_] != 'b') {
        sym += text_[pos_];
        ++pos_;
      } else if (pos_ < text_.size() && (sym == "C" || sym == "B" || sym == "S") &&
                 (text_[pos_] == 'l' || text_[pos_] == 'r' ||
                  text_[pos_] == 'e' || text_[pos_] == 'i')) {
        sym += text_[pos_];
        ++pos_;
      }
      record.element = sym;
    } else {
      std::string sym(1, first);
      ++pos_;
      if (pos_ < text_.size() && text_[pos_] == 'e' &&
          (first == 's' || first == 't' || first == 'a')) {
        sym += 'e';
        ++pos_;
      }
      record.aromatic = true;
      sym[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(sym[0])));
      record.element = sym;
    }

    if (pos_ < text_.size() && text_[pos_] == '@') {
      fail("stereochemistry is not supported", pos_);
    }
    if (pos_ < text_.size() && text_[pos_] == 'H') {
      ++pos_;
      record.explicit_h = 1;
      if (pos_ < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        record.explicit_h = text_[pos_] - '0';
        ++pos_;
      }
    }
    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      const char sign_char = text_[pos_];
      const int sign = sign_char == '+' ? 1 : -1;
      int magnitude = 1;
      ++pos_;
      if (pos_ < text_.size() &&
          std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        magnitude = text_[pos_] - '0';
        ++pos_;
      } else {
        while (pos_ < text_.size() && text_[pos_] == sign_char) {
          ++magnitude;
          ++pos_;
        }
      }
      if (magnitude > 3) fail("charge magnitude above 3", at);
      record.charge = sign * magnitude;
    }
    if (pos_ >= text_.size() || text_[pos_] != ']') {
      fail("expected ']'", pos_);
    }
    ++pos_;
    return record;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<AtomRecord> atoms_;
  std::vector<std::size_t> atom_positions_;
  std::vector<std::tuple<int, int, int>> bonds_;
  std::vector<int> branch_atoms_;
  std::vector<std::size_t> branch_stack_;
  std::map<int, RingOpening> ring_open_;
  std::optional<PendingBond> pending_;
  int prev_atom_ = -1;
};

}  // namespace

Molecule parse_raw(std::string_view text) {
  return Parser(text).run(nullptr);
}

MolGraph parse(std::string_view text, const DAEVocab& vocab) {
  return dae_encode(parse_raw(text), vocab);
}

SmilesDocument parse_document(std::string_view text, const DAEVocab& vocab) {
  SmilesDocument doc;
  doc.source = std::string(text);
  std::vector<std::size_t> positions;
  doc.graph = dae_encode(Parser(text).run(&positions), vocab);
  doc.atom_positions = std::move(positions);
  return doc;
}

namespace {

std::string atom_text(const DAEToken& tok) {
  const bool bare =
      tok.charge == 0 && tok.explicit_h == 0 &&
      (tok.aromatic ? is_bare_aromatic(tok.element)
                    : is_bare_aliphatic(tok.element));
  std::string sym = tok.element;
  if (tok.aromatic) {
    for (char& ch : sym) {
      ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
  }
  if (bare) return sym;
  std::string out = "[" + sym;
  if (tok.explicit_h > 0) {
    out += 'H';
    if (tok.explicit_h > 1) out += std::to_string(tok.explicit_h);
  }
  if (tok.charge != 0) {
    out += tok.charge > 0 ? '+' : '-';
    if (std::abs(tok.charge) > 1) out += std::to_string(std::abs(tok.charge));
  }
  return out + "]";
}

class Writer {
 public:
  Writer(const MolGraph& g, const DAEVocab& vocab) : g_(g), vocab_(vocab) {}

  std::string run() {
    const int n = g_.n();
    if (n == 0) return "";
    // Spanning-forest pass: classify back edges so ring digits can be
    // assigned. Disconnected graphs come out '.'-separated (write-only;
    // the parser treats multi-fragment input as an error).
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int v = 0; v < n; ++v) {
      if (!seen[static_cast<std::size_t>(v)]) {
        plan_rings(v, -1, seen);
        roots_.push_back(v);
      }
    }
    for (std::size_t r = 0; r < roots_.size(); ++r) {
      if (r > 0) out_ += '.';
      emit(roots_[r], -1, kNoBond);
    }
    return out_;
  }

 private:
  bool tok_aromatic(int atom) const {
    return vocab_.tokens[static_cast<std::size_t>(g_.atoms[static_cast<std::size_t>(atom)])]
        .aromatic;
  }

  std::string bond_text(int order, int a, int b) const {
    const bool both_aromatic = tok_aromatic(a) && tok_aromatic(b);
    switch (static_cast<BondOrder>(order)) {
      case BondOrder::Single: return both_aromatic ? "-" : "";
      case BondOrder::Double: return "=";
      case BondOrder::Triple: return "#";
      case BondOrder::Aromatic: return both_aromatic ? "" : ":";
      case BondOrder::None: break;
    }
    return "";
  }

  void plan_rings(int v, int parent, std::vector<bool>& seen) {
    seen[static_cast<std::size_t>(v)] = true;
    for (int u = 0; u < g_.n(); ++u) {
      if (g_.bonds(v, u) == kNoBond || u == parent) continue;
      if (seen[static_cast<std::size_t>(u)]) {
        if (u < v || ring_partner_.count({u, v}) || ring_partner_.count({v, u})) {
          continue;
        }
        ring_partner_[{v, u}] = g_.bonds(v, u);
        ring_partner_[{u, v}] = g_.bonds(v, u);
      } else {
        tree_child_[{v, u}] = true;
        plan_rings(u, v, seen);
      }
    }
  }

  std::string ring_digit(int number) const {
    if (number < 10) return std::to_string(number);
    if (number > 99) {
      throw std::invalid_argument("more than 99 simultaneous ring bonds");
    }
    return "%" + std::to_string(number);
  }

  void emit(int v, int parent, int bond_from_parent) {
    if (parent >= 0) out_ += bond_text(bond_from_parent, parent, v);
    out_ += atom_text(
        vocab_.tokens[static_cast<std::size_t>(g_.atoms[static_cast<std::size_t>(v)])]);

    // Ring closures incident to this atom, partner order ascending.
    for (int u = 0; u < g_.n(); ++u) {
      auto it = ring_partner_.find({v, u});
      if (it == ring_partner_.end()) continue;
      auto open = open_digit_.find({u, v});
      if (open != open_digit_.end()) {
        out_ += ring_digit(open->second);
        free_digits_.push_back(open->second);
        std::sort(free_digits_.begin(), free_digits_.end(), std::greater<>());
        open_digit_.erase(open);
      } else {
        int digit;
        if (!free_digits_.empty()) {
          digit = free_digits_.back();
          free_digits_.pop_back();
        } else {
          digit = next_digit_++;
        }
        out_ += bond_text(it->second, v, u);
        out_ += ring_digit(digit);
        open_digit_[{v, u}] = digit;
      }
    }

    std::vector<int> children;
    for (int u = 0; u < g_.n(); ++u) {
      if (tree_child_.count({v, u})) children.push_back(u);
    }
    for (std::size_t c = 0; c < children.size(); ++c) {
      const int u = children[c];
      const bool last = c + 1 == children.size();
      if (!last) out_ += '(';
      emit(u, v, g_.bonds(v, u));
      if (!last) out_ += ')';
    }
  }

  const MolGraph& g_;
  const DAEVocab& vocab_;
  std::string out_;
  std::vector<int> roots_;
  std::map<std::pair<int, int>, int> ring_partner_;
  std::map<std::pair<int, int>, bool> tree_child_;
  std::map<std::pair<int, int>, int> open_digit_;
  std::vector<int> free_digits_;
  int next_digit_ = 1;
};

MolGraph relabel(const MolGraph& g, const std::vector<int>& rank) {
  const int n = g.n();
  MolGraph out = MolGraph::empty(n);
  for (int i = 0; i < n; ++i) {
    out.atoms[static_cast<std::size_t>(rank[static_cast<std::size_t>(i)])] =
        g.atoms[static_cast<std::size_t>(i)];
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out.bonds(rank[static_cast<std::size_t>(i)],
                rank[static_cast<std::size_t>(j)]) = g.bonds(i, j);
    }
  }
  return out;
}

/// One round of neighborhood refinement; returns ranked colors.
std::vector<int> refine_colors(const MolGraph& g, std::vector<int> colors) {
  const int n = g.n();
  while (true) {
    std::vector<std::pair<std::vector<long long>, int>> keys;
    keys.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      std::vector<long long> key;
      key.push_back(colors[static_cast<std::size_t>(i)]);
      std::vector<long long> neighbors;
      for (int j = 0; j < n; ++j) {
        if (g.bonds(i, j) != kNoBond) {
          neighbors.push_back(g.bonds(i, j) * 100000LL +
                              colors[static_cast<std::size_t>(j)]);
        }
      }
      std::sort(neighbors.begin(), neighbors.end());
      key.insert(key.end(), neighbors.begin(), neighbors.end());
      keys.emplace_back(std::move(key), i);
    }
    std::vector<std::pair<std::vector<long long>, int>> sorted = keys;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> next(static_cast<std::size_t>(n));
    int rank = -1;
    const std::vector<long long>* prev = nullptr;
    for (const auto& [key, idx] : sorted) {
      if (!prev || key != *prev) {
        ++rank;
        prev = &key;
      }
      next[static_cast<std::size_t>(idx)] = rank;
    }
    const int old_classes =
        *std::max_element(colors.begin(), colors.end()) + 1;
    if (rank + 1 == old_classes) return next;
    colors = std::move(next);
  }
}

std::vector<int> initial_colors(const MolGraph& g) {
  const int n = g.n();
  std::vector<std::pair<std::vector<long long>, int>> keys;
  for (int i = 0; i < n; ++i) {
    std::vector<long long> key;
    key.push_back(g.atoms[static_cast<std::size_t>(i)]);
    std::vector<long long> bonds;
    for (int j = 0; j < n; ++j) {
      if (g.bonds(i, j) != kNoBond) bonds.push_back(g.bonds(i, j));
    }
    key.push_back(static_cast<long long>(bonds.size()));
    std::sort(bonds.begin(), bonds.end());
    key.insert(key.end(), bonds.begin(), bonds.end());
    keys.emplace_back(std::move(key), i);
  }
  std::sort(keys.begin(), keys.end());
  std::vector<int> colors(static_cast<std::size_t>(n));
  int rank = -1;
  const std::vector<long long>* prev = nullptr;
  for (const auto& [key, idx] : keys) {
    if (!prev || key != *prev) {
      ++rank;
      prev = &key;
    }
    colors[static_cast<std::size_t>(idx)] = rank;
  }
  return colors;
}

std::string canonical_search(const MolGraph& g, const DAEVocab& vocab,
                             std::vector<int> colors) {
  const int n = g.n();
  colors = refine_colors(g, std::move(colors));
  const int classes = *std::max_element(colors.begin(), colors.end()) + 1;
  if (classes == n) {
    return Writer(relabel(g, colors), vocab).run();
  }
  // Find the smallest color shared by several atoms and individualize each
  // member in turn; the lexicographically smallest completion wins.
  std::vector<int> census(static_cast<std::size_t>(classes), 0);
  for (int c : colors) ++census[static_cast<std::size_t>(c)];
  int target = 0;
  while (census[static_cast<std::size_t>(target)] < 2) ++target;

  std::string best;
  for (int i = 0; i < n; ++i) {
    if (colors[static_cast<std::size_t>(i)] != target) continue;
    std::vector<int> split(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      split[static_cast<std::size_t>(j)] =
          2 * colors[static_cast<std::size_t>(j)] + 1;
    }
    split[static_cast<std::size_t>(i)] -= 1;
    const std::string candidate = canonical_search(g, vocab, std::move(split));
    if (best.empty() || candidate < best) best = candidate;
  }
  return best;
}

}  // namespace

std::string write(const MolGraph& g, const DAEVocab& vocab) {
  for (int token : g.atoms) {
    if (token < 0 || token >= vocab.size()) {
      throw std::invalid_argument("atom token outside the vocabulary");
    }
  }
  return Writer(g, vocab).run();
}

std::string canonical_form(const MolGraph& g, const DAEVocab& vocab) {
  if (g.n() == 0) return "";
  return canonical_search(g, vocab, initial_colors(g));
}

std::vector<std::string> read_smiles_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t start = line.find_first_not_of(" \t\r\n");
    if (start == std::string::npos) continue;
    std::size_t end = line.find_first_of(" \t\r\n", start);
    if (end == std::string::npos) end = line.size();
    lines.push_back(line.substr(start, end - start));
  }
  return lines;
}

}  // namespace hddm
