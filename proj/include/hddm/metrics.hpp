#ifndef HDDM_METRICS_HPP
#define HDDM_METRICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "hddm/molgraph.hpp"

namespace hddm {

/// Folded circular fingerprint.
struct Fingerprint {
  int nbits = 0;
  std::vector<std::uint64_t> words;

  static Fingerprint zeros(int nbits);
  void set(int bit);
  bool test(int bit) const;
  int count() const;
};

/// Hashed circular substructure identifiers over radii 0..radius, folded to
/// nbits. Atom environments hash the token, degree and sorted bond pattern,
/// so the bits are invariant under atom reordering and stable across runs.
Fingerprint morgan_fingerprint(const MolGraph& g, const DAEVocab& vocab,
                               int radius = 2, int nbits = 2048);

/// Intersection over union of set bits; 1 when both are empty.
double tanimoto(const Fingerprint& a, const Fingerprint& b);

/// 1 - mean pairwise similarity including self-pairs; 0 for empty or
/// singleton input.
double diversity(const std::vector<Fingerprint>& unique_valid);

/// Ring systems plus connecting linkers: non-ring atoms of degree <= 1 are
/// deleted until fixpoint. Acyclic input gives the empty graph.
MolGraph murcko_scaffold(const MolGraph& g);

struct MetricsReport {
  long n_total = 0;
  long n_valid = 0;
  long n_unique = 0;
  double validity = 0.0;
  double uniqueness = 0.0;
  double novelty = 0.0;
  double scaf_novel = 0.0;
  double scaf_ret = 0.0;
  double scaf_sim = 0.0;
  double diversity = 0.0;
  double hit_at_k = -1.0;  // negative when not computed
};

/// Validity / uniqueness / novelty over generated SMILES lines, plus the
/// scaffold metrics against the train and test sets. Unparseable or
/// unsanitizable lines count as invalid; scaffold denominators use the total
/// generated count.
MetricsReport compute_metrics(const std::vector<std::string>& gen,
                              const std::vector<std::string>& train,
                              const std::vector<std::string>& test,
                              const DAEVocab& vocab);

/// |unique generated scaffolds not in train| / n_total.
double scaffold_novelty(const std::vector<std::string>& gen_scaffolds,
                        const std::vector<std::string>& train_scaffolds,
                        long n_total);

/// |unique generated scaffolds also in test| / n_total.
double scaffold_retrieval(const std::vector<std::string>& gen_scaffolds,
                          const std::vector<std::string>& test_scaffolds,
                          long n_total);

/// Cosine similarity between scaffold frequency vectors over the union of
/// scaffold keys in both sets.
double scaffold_frequency_cosine(const std::vector<std::string>& gen_scaffolds,
                                 const std::vector<std::string>& test_scaffolds);

/// Fraction of targets whose canonical truth appears among its k samples.
double hit_at_k(const std::vector<std::vector<std::string>>& samples_per_target,
                const std::vector<std::string>& truths);

}  // namespace hddm

#endif  // HDDM_METRICS_HPP
