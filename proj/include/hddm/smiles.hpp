#ifndef HDDM_SMILES_HPP
#define HDDM_SMILES_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hddm/molgraph.hpp"

namespace hddm {

/// Parse failure with the offending source position (0-based).
class SmilesError : public std::runtime_error {
 public:
  SmilesError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " at position " +
                           std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Parses the SMILES subset covering the DAE vocabularies: organic-subset and
/// bracket atoms (explicit H counts, charges up to +-3), bonds - = # : and
/// the aromatic-implicit rule, branches, ring closures (digits and %nn).
/// Stereo marks, isotopes, wildcards and disconnected structures are hard
/// errors.
Molecule parse_raw(std::string_view text);

/// parse_raw followed by vocabulary encoding.
MolGraph parse(std::string_view text, const DAEVocab& vocab);

/// Source text with its parsed graph and the source position of every atom.
struct SmilesDocument {
  std::string source;
  MolGraph graph;
  std::vector<std::size_t> atom_positions;
};
SmilesDocument parse_document(std::string_view text, const DAEVocab& vocab);

/// Emits SMILES readable by parse(); parse(write(g)) is isomorphic to g.
std::string write(const MolGraph& g, const DAEVocab& vocab);

/// Canonical SMILES via iterative neighborhood refinement with lexicographic
/// tie-breaking: isomorphic graphs map to identical strings.
std::string canonical_form(const MolGraph& g, const DAEVocab& vocab);

/// Reads one molecule per line (optional whitespace-separated name ignored).
std::vector<std::string> read_smiles_lines(const std::string& path);

}  // namespace hddm

#endif  // HDDM_SMILES_HPP
