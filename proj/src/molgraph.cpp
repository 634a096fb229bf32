#include "hddm/molgraph.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <stdexcept>

#include <json.hpp>

namespace hddm {

std::string DAEToken::name() const {
  std::string s = element;
  if (aromatic) {
    s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
    if (s.size() > 1) {
      s[1] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[1])));
    }
  }
  if (explicit_h > 0) {
    s += 'H';
    if (explicit_h > 1) s += std::to_string(explicit_h);
  }
  if (charge != 0) {
    s += charge > 0 ? '+' : '-';
    if (std::abs(charge) > 1) s += std::to_string(std::abs(charge));
  }
  return s;
}

DAEToken DAEToken::parse_name(const std::string& name) {
  DAEToken tok;
  std::size_t i = 0;
  while (i < name.size() &&
         std::isalpha(static_cast<unsigned char>(name[i])) && name[i] != 'H') {
    ++i;
  }
  if (i == 0) throw std::invalid_argument("bad token name '" + name + "'");
  std::string elem = name.substr(0, i);
  tok.aromatic = std::islower(static_cast<unsigned char>(elem[0])) != 0;
  elem[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(elem[0])));
  tok.element = elem;
  if (i < name.size() && name[i] == 'H') {
    ++i;
    if (i < name.size() && std::isdigit(static_cast<unsigned char>(name[i]))) {
      tok.explicit_h = name[i] - '0';
      ++i;
    } else {
      tok.explicit_h = 1;
    }
  }
  if (i < name.size() && (name[i] == '+' || name[i] == '-')) {
    const int sign = name[i] == '+' ? 1 : -1;
    ++i;
    int mag = 1;
    if (i < name.size() && std::isdigit(static_cast<unsigned char>(name[i]))) {
      mag = name[i] - '0';
      ++i;
    }
    tok.charge = sign * mag;
  }
  if (i != name.size()) {
    throw std::invalid_argument("bad token name '" + name + "'");
  }
  return tok;
}

int DAEVocab::index_of(const DAEToken& token) const {
  for (int i = 0; i < size(); ++i) {
    if (tokens[static_cast<std::size_t>(i)] == token) return i;
  }
  return -1;
}

int DAEVocab::index_of_name(const std::string& name) const {
  for (int i = 0; i < size(); ++i) {
    if (tokens[static_cast<std::size_t>(i)].name() == name) return i;
  }
  return -1;
}

namespace {

DAEVocab make_vocab(std::string name, const std::vector<std::string>& names) {
  DAEVocab v;
  v.name = std::move(name);
  v.tokens.reserve(names.size());
  for (const std::string& n : names) v.tokens.push_back(DAEToken::parse_name(n));
  return v;
}

const std::vector<std::string>& moses_token_names() {
  static const std::vector<std::string> names = {
      "C", "N", "S", "O", "F", "Cl", "Br",  // aliphatic
      "c", "n", "nH", "s", "o",             // aromatic
  };
  return names;
}

const std::vector<std::string>& guacamol_token_names() {
  static const std::vector<std::string> names = {
      // neutral aliphatic
      "C", "N", "O", "F", "B", "Br", "Cl", "I", "P", "S", "Se", "Si",
      // aromatic states
      "c", "c+", "c-", "n", "nH", "n+", "nH+", "n-", "s", "s+", "o", "o+",
      "se", "se+", "p",
      // charged and hypervalent
      "C+", "C-", "N+", "NH+", "NH2+", "NH3+", "N-", "NH-", "O+", "O-", "F+",
      "F-", "B-", "Br+2", "Br-", "Cl+", "Cl+2", "Cl+3", "Cl-", "I+", "I+2",
      "I+3", "P+", "P-", "S+", "S-", "Se+", "Se-", "Si-",
  };
  return names;
}

GroupingTable make_grouping(const DAEVocab& vocab,
                            const std::vector<std::vector<std::string>>& groups) {
  GroupingTable table;
  table.group_count = static_cast<int>(groups.size());
  table.group_of.assign(static_cast<std::size_t>(vocab.size()), -1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (const std::string& name : groups[g]) {
      const int idx = vocab.index_of_name(name);
      if (idx < 0) {
        throw std::invalid_argument("grouping names unknown token '" + name +
                                    "'");
      }
      if (table.group_of[static_cast<std::size_t>(idx)] != -1) {
        throw std::invalid_argument("token '" + name + "' grouped twice");
      }
      table.group_of[static_cast<std::size_t>(idx)] = static_cast<int>(g);
    }
  }
  for (int i = 0; i < vocab.size(); ++i) {
    if (table.group_of[static_cast<std::size_t>(i)] < 0) {
      throw std::invalid_argument(
          "ungrouped token '" + vocab.tokens[static_cast<std::size_t>(i)].name() +
          "'");
    }
  }
  return table;
}

const std::vector<std::vector<std::string>>& moses_groups() {
  static const std::vector<std::vector<std::string>> groups = {
      {"C"},
      {"N", "O", "S"},
      {"F", "Cl", "Br"},
      {"c", "o", "n", "nH", "s"},
  };
  return groups;
}

const std::vector<std::vector<std::string>>& guacamol_groups() {
  static const std::vector<std::vector<std::string>> groups = {
      {"F", "Cl", "Br", "I", "F-", "Cl-", "Br-"},
      {"C", "N", "O", "P", "S", "Se"},
      {"c", "n", "nH", "o", "s", "se", "p"},
      {"N+", "n+", "nH+", "P+", "NH+", "NH2+", "NH3+", "Br+2", "Cl+2", "Cl+3",
       "I+2", "I+3"},
      {"O-", "N-", "NH-", "O+", "S+", "B-", "C+", "C-", "c+", "c-", "n-", "s+",
       "o+", "se+", "F+", "Cl+", "I+", "P-", "S-", "Se+", "Se-", "Si-"},
      {"B", "Si"},
  };
  return groups;
}

}  // namespace

const DAEVocab& DAEVocab::moses() {
  static const DAEVocab v = make_vocab("moses", moses_token_names());
  return v;
}

const DAEVocab& DAEVocab::guacamol() {
  static const DAEVocab v = make_vocab("guacamol", guacamol_token_names());
  return v;
}

const DAEVocab& DAEVocab::by_name(const std::string& name) {
  if (name == "moses") return moses();
  if (name == "guacamol") return guacamol();
  throw std::invalid_argument("unknown vocabulary '" + name + "'");
}

const GroupingTable& GroupingTable::moses() {
  static const GroupingTable t = make_grouping(DAEVocab::moses(), moses_groups());
  return t;
}

const GroupingTable& GroupingTable::guacamol() {
  static const GroupingTable t =
      make_grouping(DAEVocab::guacamol(), guacamol_groups());
  return t;
}

const GroupingTable& GroupingTable::by_name(const std::string& name) {
  if (name == "moses") return moses();
  if (name == "guacamol") return guacamol();
  throw std::invalid_argument("unknown grouping '" + name + "'");
}

MolGraph MolGraph::empty(int n) {
  MolGraph g;
  g.atoms.assign(static_cast<std::size_t>(n), 0);
  g.bonds = Eigen::MatrixXi::Zero(n, n);
  return g;
}

MolGraph dae_encode(const Molecule& mol, const DAEVocab& vocab) {
  MolGraph g = MolGraph::empty(mol.n());
  for (int i = 0; i < mol.n(); ++i) {
    const AtomRecord& a = mol.atoms[static_cast<std::size_t>(i)];
    const DAEToken tok{a.element, a.aromatic, a.charge, a.explicit_h};
    const int idx = vocab.index_of(tok);
    if (idx < 0) {
      throw std::invalid_argument("atom " + std::to_string(i) + " ('" +
                                  tok.name() + "') not in vocabulary '" +
                                  vocab.name + "'");
    }
    g.atoms[static_cast<std::size_t>(i)] = idx;
  }
  g.bonds = mol.bonds;
  return g;
}

Molecule dae_decode(const MolGraph& g, const DAEVocab& vocab) {
  const SanitizeVerdict verdict = sanitize(g, vocab);
  if (!verdict.valid) {
    std::string msg = "cannot decode an invalid graph:";
    for (const std::string& r : verdict.reasons) msg += " " + r + ";";
    throw std::invalid_argument(msg);
  }
  Molecule mol;
  mol.atoms.reserve(g.atoms.size());
  for (int idx : g.atoms) {
    const DAEToken& t = vocab.tokens[static_cast<std::size_t>(idx)];
    mol.atoms.push_back({t.element, t.aromatic, t.charge, t.explicit_h});
  }
  mol.bonds = g.bonds;
  return mol;
}

std::vector<int> allowed_valences(const std::string& element, int charge) {
  auto halogen = [charge]() -> std::vector<int> {
    switch (charge) {
      case 0: return {1};
      case -1: return {0};
      case 1: return {2};
      case 2: return {3};
      case 3: return {4};
      default: return {};
    }
  };
  if (element == "C") {
    if (charge == 0) return {4};
    if (charge == 1 || charge == -1) return {3};
    return {};
  }
  if (element == "N") {
    if (charge == 0) return {3};
    if (charge == 1) return {4};
    if (charge == -1) return {2};
    return {};
  }
  if (element == "O") {
    if (charge == 0) return {2};
    if (charge == 1) return {3};
    if (charge == -1) return {1};
    return {};
  }
  if (element == "S" || element == "Se") {
    if (charge == 0) return {2, 4, 6};
    if (charge == 1) return {3, 5};
    if (charge == -1) return {1};
    return {};
  }
  if (element == "F" || element == "Cl" || element == "Br" || element == "I") {
    return halogen();
  }
  if (element == "B") {
    if (charge == 0) return {3};
    if (charge == -1) return {4};
    return {};
  }
  if (element == "P") {
    if (charge == 0) return {3, 5};
    if (charge == 1) return {4};
    if (charge == -1) return {2};
    return {};
  }
  if (element == "Si") {
    if (charge == 0) return {4};
    if (charge == -1) return {5};
    return {};
  }
  return {};
}

namespace {

/// Aromatic tokens that contribute a lone pair to the ring instead of hosting
/// a ring double bond (five-membered heteroaromatic donors and anions). For
/// neutral N and P the sigma degree decides: two-connected atoms are
/// pyridine-like hosts, three-connected ones are pyrrole-like donors.
bool is_pi_donor(const DAEToken& t, int sigma_degree) {
  if (!t.aromatic) return false;
  if (t.element == "O" && t.charge == 0) return true;
  if ((t.element == "S" || t.element == "Se") && t.charge <= 1 &&
      t.charge >= 0) {
    return true;  // thiophene-type s / se and their S-substituted cations
  }
  if ((t.element == "N" || t.element == "P") && t.charge == 0) {
    return t.explicit_h > 0 || sigma_degree >= 3;
  }
  if (t.element == "N" && t.charge == -1) return true;  // pyrrolide n-
  if (t.element == "C" && t.charge == -1) return true;  // cyclopentadienide
  return false;
}

/// Marks atoms that lie on a cycle of the aromatic-bond subgraph, via bridge
/// detection: an atom is cyclic iff some incident aromatic bond is not a
/// bridge.
std::vector<bool> on_aromatic_cycle(const MolGraph& g) {
  const int n = g.n();
  std::vector<bool> cyclic(static_cast<std::size_t>(n), false);
  std::vector<int> disc(static_cast<std::size_t>(n), -1);
  std::vector<int> low(static_cast<std::size_t>(n), 0);
  int timer = 0;

  std::function<void(int, int)> dfs = [&](int v, int parent) {
    disc[static_cast<std::size_t>(v)] = low[static_cast<std::size_t>(v)] = timer++;
    bool skipped_parent_edge = false;
    for (int u = 0; u < n; ++u) {
      if (g.bonds(v, u) != static_cast<int>(BondOrder::Aromatic)) continue;
      if (u == parent && !skipped_parent_edge) {
        skipped_parent_edge = true;  // parallel edges impossible; skip once
        continue;
      }
      if (disc[static_cast<std::size_t>(u)] == -1) {
        dfs(u, v);
        low[static_cast<std::size_t>(v)] =
            std::min(low[static_cast<std::size_t>(v)],
                     low[static_cast<std::size_t>(u)]);
        if (low[static_cast<std::size_t>(u)] <=
            disc[static_cast<std::size_t>(v)]) {
          cyclic[static_cast<std::size_t>(v)] = true;  // edge (v,u) on a cycle
          cyclic[static_cast<std::size_t>(u)] = true;
        }
      } else {
        low[static_cast<std::size_t>(v)] =
            std::min(low[static_cast<std::size_t>(v)],
                     disc[static_cast<std::size_t>(u)]);
        if (disc[static_cast<std::size_t>(u)] <
            disc[static_cast<std::size_t>(v)]) {
          cyclic[static_cast<std::size_t>(v)] = true;  // back edge
          cyclic[static_cast<std::size_t>(u)] = true;
        }
      }
    }
  };
  for (int v = 0; v < n; ++v) {
    if (disc[static_cast<std::size_t>(v)] == -1) dfs(v, -1);
  }
  return cyclic;
}

}  // namespace

SanitizeVerdict sanitize(const MolGraph& g, const DAEVocab& vocab) {
  SanitizeVerdict verdict;
  auto flag = [&verdict](std::string reason) {
    verdict.valid = false;
    verdict.reasons.push_back(std::move(reason));
  };

  const int n = g.n();
  if (g.bonds.rows() != n || g.bonds.cols() != n) {
    flag("bond matrix shape mismatch");
    return verdict;
  }
  for (int i = 0; i < n; ++i) {
    if (g.atoms[static_cast<std::size_t>(i)] < 0 ||
        g.atoms[static_cast<std::size_t>(i)] >= vocab.size()) {
      flag("atom token out of vocabulary range at atom " + std::to_string(i));
      return verdict;
    }
    if (g.bonds(i, i) != 0) flag("self-bond at atom " + std::to_string(i));
    for (int j = i + 1; j < n; ++j) {
      if (g.bonds(i, j) != g.bonds(j, i)) {
        flag("asymmetric bond between atoms " + std::to_string(i) + " and " +
             std::to_string(j));
      }
      if (g.bonds(i, j) < 0 || g.bonds(i, j) >= kBondTokens) {
        flag("bond token out of range between atoms " + std::to_string(i) +
             " and " + std::to_string(j));
      }
    }
  }
  if (!verdict.valid) return verdict;

  const std::vector<bool> cyclic = on_aromatic_cycle(g);
  for (int i = 0; i < n; ++i) {
    const DAEToken& tok =
        vocab.tokens[static_cast<std::size_t>(g.atoms[static_cast<std::size_t>(i)])];

    int plain_sum = 0;
    int n_aromatic = 0;
    for (int j = 0; j < n; ++j) {
      switch (static_cast<BondOrder>(g.bonds(i, j))) {
        case BondOrder::None: break;
        case BondOrder::Single: plain_sum += 1; break;
        case BondOrder::Double: plain_sum += 2; break;
        case BondOrder::Triple: plain_sum += 3; break;
        case BondOrder::Aromatic:
          ++n_aromatic;
          if (!tok.aromatic) {
            flag("aromatic bond on non-aromatic atom " + std::to_string(i));
          }
          break;
      }
    }

    if (tok.aromatic && !cyclic[static_cast<std::size_t>(i)]) {
      flag("aromatic atom " + std::to_string(i) + " (" + tok.name() +
           ") outside aromatic cycle");
    }

    const std::vector<int> allowed = allowed_valences(tok.element, tok.charge);
    if (allowed.empty()) {
      flag("no valence rule for " + tok.element +
           " with charge " + std::to_string(tok.charge));
      continue;
    }
    // Aromatic bonds count one each plus one shared ring double bond unless
    // the token is a lone-pair donor.
    int sigma_degree = n_aromatic + tok.explicit_h;
    for (int j = 0; j < n; ++j) {
      if (g.bonds(i, j) != 0 &&
          g.bonds(i, j) != static_cast<int>(BondOrder::Aromatic)) {
        ++sigma_degree;
      }
    }
    int aromatic_sum = n_aromatic;
    if (n_aromatic > 0 && !is_pi_donor(tok, sigma_degree)) aromatic_sum += 1;
    const int total = plain_sum + aromatic_sum + tok.explicit_h;
    const int max_allowed = *std::max_element(allowed.begin(), allowed.end());
    if (total > max_allowed) {
      flag("valence exceeded at atom " + std::to_string(i) + " (" + tok.name() +
           "): " + std::to_string(total) + " > " + std::to_string(max_allowed));
    }
  }
  return verdict;
}

ProjectionKernel grouping_kernel(const DAEVocab& vocab,
                                 const GroupingTable& table) {
  if (static_cast<int>(table.group_of.size()) != vocab.size()) {
    throw std::invalid_argument("grouping table does not cover the vocabulary");
  }
  Eigen::MatrixXd phi =
      Eigen::MatrixXd::Zero(vocab.size(), table.group_count);
  for (int i = 0; i < vocab.size(); ++i) {
    const int gidx = table.group_of[static_cast<std::size_t>(i)];
    if (gidx < 0 || gidx >= table.group_count) {
      throw std::invalid_argument("ungrouped token at index " +
                                  std::to_string(i));
    }
    phi(i, gidx) = 1.0;
  }
  return ProjectionKernel::from_matrix(std::move(phi));
}

HierarchySpec hierarchy_for(const DAEVocab& vocab, const GroupingTable& table) {
  HierarchySpec spec;
  spec.clean_size = vocab.size();
  spec.mid_sizes = {table.group_count};
  validate_partition(spec);
  return spec;
}

std::string hierarchy_config_to_json(const DAEVocab& vocab,
                                     const GroupingTable& table) {
  nlohmann::json j;
  j["version"] = 1;
  j["name"] = vocab.name;
  nlohmann::json tokens = nlohmann::json::array();
  for (const DAEToken& t : vocab.tokens) tokens.push_back(t.name());
  j["clean_tokens"] = std::move(tokens);
  nlohmann::json groups = nlohmann::json::array();
  for (int gidx = 0; gidx < table.group_count; ++gidx) {
    nlohmann::json group = nlohmann::json::array();
    for (int i = 0; i < vocab.size(); ++i) {
      if (table.group_of[static_cast<std::size_t>(i)] == gidx) {
        group.push_back(vocab.tokens[static_cast<std::size_t>(i)].name());
      }
    }
    groups.push_back(std::move(group));
  }
  j["groups"] = std::move(groups);
  return j.dump(2) + "\n";
}

void hierarchy_config_from_json(const std::string& text, DAEVocab& vocab,
                                GroupingTable& table) {
  const nlohmann::json j = nlohmann::json::parse(text);
  DAEVocab v;
  v.name = j.at("name").get<std::string>();
  for (const auto& name : j.at("clean_tokens")) {
    v.tokens.push_back(DAEToken::parse_name(name.get<std::string>()));
  }
  std::vector<std::vector<std::string>> groups;
  for (const auto& group : j.at("groups")) {
    groups.push_back(group.get<std::vector<std::string>>());
  }
  table = make_grouping(v, groups);
  vocab = std::move(v);
}

}  // namespace hddm
