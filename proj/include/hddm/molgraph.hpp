#ifndef HDDM_MOLGRAPH_HPP
#define HDDM_MOLGRAPH_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hddm/hierarchy.hpp"

namespace hddm {

/// Bond vocabulary shared by every molecular graph. Token 0 doubles as the
/// empty (no-bond) entry of the adjacency matrix.
enum class BondOrder : int {
  None = 0,
  Single = 1,
  Double = 2,
  Triple = 3,
  Aromatic = 4,
};

inline constexpr int kBondTokens = 5;

/// One decoupled atom state: element crossed with aromaticity, formal charge
/// and a locked explicit-hydrogen count. Tokens with explicit_h > 0 carry
/// exactly that many hydrogens; tokens with explicit_h == 0 leave hydrogens
/// implicit up to valence.
struct DAEToken {
  std::string element;
  bool aromatic = false;
  int charge = 0;
  int explicit_h = 0;

  /// Compact display form, e.g. "C", "c", "nH", "NH3+", "Cl+2", "se".
  std::string name() const;
  static DAEToken parse_name(const std::string& name);

  bool operator==(const DAEToken&) const = default;
};

/// Ordered token list; the order is part of the vocabulary identity.
struct DAEVocab {
  std::string name;
  std::vector<DAEToken> tokens;

  int size() const { return static_cast<int>(tokens.size()); }
  int index_of(const DAEToken& token) const;            // -1 when absent
  int index_of_name(const std::string& name) const;     // -1 when absent

  static const DAEVocab& moses();     // 12 tokens
  static const DAEVocab& guacamol();  // 56 tokens
  static const DAEVocab& by_name(const std::string& name);
};

/// Clean molecular graph: token indices into a DAE vocabulary plus a
/// symmetric bond matrix over BondOrder with an empty diagonal.
struct MolGraph {
  std::vector<int> atoms;
  Eigen::MatrixXi bonds;

  int n() const { return static_cast<int>(atoms.size()); }
  static MolGraph empty(int n);

  bool operator==(const MolGraph&) const = default;
};

/// Decoded form: explicit per-atom records instead of vocabulary indices.
struct AtomRecord {
  std::string element;
  bool aromatic = false;
  int charge = 0;
  int explicit_h = 0;

  bool operator==(const AtomRecord&) const = default;
};

struct Molecule {
  std::vector<AtomRecord> atoms;
  Eigen::MatrixXi bonds;

  int n() const { return static_cast<int>(atoms.size()); }
};

/// Lossless token assignment; throws naming the offending atom when its
/// (element, aromatic, charge, H) combination is not in the vocabulary.
MolGraph dae_encode(const Molecule& mol, const DAEVocab& vocab);

/// Expands tokens back to explicit atom records. The graph must sanitize.
Molecule dae_decode(const MolGraph& g, const DAEVocab& vocab);

struct SanitizeVerdict {
  bool valid = true;
  std::vector<std::string> reasons;
};

/// Rule-based validity: (a) bond-order sum plus locked hydrogens within the
/// allowed valence for (element, charge); (b) every aromatic atom on a cycle
/// of aromatic bonds among aromatic atoms; (c) aromatic bonds join two
/// aromatic atoms. Never throws; the verdict carries reason codes.
SanitizeVerdict sanitize(const MolGraph& g, const DAEVocab& vocab);

/// Allowed valences for an (element, formal charge) pair; empty when the
/// combination has no rule (which sanitize reports as invalid).
std::vector<int> allowed_valences(const std::string& element, int charge);

/// Total map clean token -> group, inducing a deterministic projection.
struct GroupingTable {
  std::vector<int> group_of;
  int group_count = 0;

  static const GroupingTable& moses();     // 4 groups
  static const GroupingTable& guacamol();  // 6 groups
  static const GroupingTable& by_name(const std::string& name);
};

/// One-hot K x G projection kernel from a grouping table.
ProjectionKernel grouping_kernel(const DAEVocab& vocab,
                                 const GroupingTable& table);

/// Hierarchy spec for a vocabulary under a grouping: K clean tokens, one mid
/// tier of group states, and the mask.
HierarchySpec hierarchy_for(const DAEVocab& vocab, const GroupingTable& table);

/// Human-readable config document for a vocabulary + grouping pair
/// (keys: name, version, clean_tokens, groups; the mask is implicit).
std::string hierarchy_config_to_json(const DAEVocab& vocab,
                                     const GroupingTable& table);
void hierarchy_config_from_json(const std::string& text, DAEVocab& vocab,
                                GroupingTable& table);

}  // namespace hddm

#endif  // HDDM_MOLGRAPH_HPP
