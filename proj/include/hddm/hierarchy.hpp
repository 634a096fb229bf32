#ifndef HDDM_HIERARCHY_HPP
#define HDDM_HIERARCHY_HPP

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hddm {

/// Row-stochasticity tolerance shared by every kernel in the library.
inline constexpr double kStochasticTol = 1e-12;

using TransitionMatrix = Eigen::MatrixXd;

/// Partition of a categorical space into a clean tier, zero or more mid-level
/// tiers, and a terminal absorbing (mask) state. States are flat indices:
/// [0, K) clean, then each mid tier in order, then mask at D-1.
struct HierarchySpec {
  int clean_size = 0;
  std::vector<int> mid_sizes;

  /// Number of mid-level tiers.
  int levels() const { return static_cast<int>(mid_sizes.size()); }

  /// Total dimension D = K + sum(mid sizes) + 1.
  int dim() const {
    int d = clean_size + 1;
    for (int m : mid_sizes) d += m;
    return d;
  }

  int mask_index() const { return dim() - 1; }

  /// First state index of a tier; tier 0 is clean, 1..levels() the mid tiers,
  /// levels()+1 the mask.
  int tier_offset(int tier) const {
    int off = 0;
    if (tier > 0) off += clean_size;
    for (int i = 1; i < tier && i <= levels(); ++i) off += mid_sizes[i - 1];
    return off;
  }

  int tier_size(int tier) const {
    if (tier == 0) return clean_size;
    if (tier <= levels()) return mid_sizes[tier - 1];
    return 1;
  }

  /// Size of the cumulative subspace containing tiers 0..tier.
  int cumulative_size(int tier) const {
    return tier_offset(tier) + tier_size(tier);
  }

  int tier_of(int state) const;

  bool is_clean(int state) const { return state >= 0 && state < clean_size; }
  bool is_mask(int state) const { return state == mask_index(); }
  bool is_mid(int state) const {
    return state >= clean_size && state < mask_index();
  }

  bool operator==(const HierarchySpec&) const = default;
};

/// Throws std::invalid_argument if any tier is empty or sizes are negative.
void validate_partition(const HierarchySpec& spec);

/// Row-stochastic map from a cumulative lower tier onto one mid tier.
/// Deterministic iff every row is one-hot.
struct ProjectionKernel {
  Eigen::MatrixXd phi;
  bool deterministic = false;

  /// Validates stochasticity and detects determinism.
  static ProjectionKernel from_matrix(Eigen::MatrixXd m);
};

bool is_row_stochastic(const Eigen::Ref<const Eigen::MatrixXd>& m,
                       double tol = kStochasticTol);

/// Asserts the TransitionMatrix invariants (row sums, entry range).
void validate_transition_matrix(const Eigen::Ref<const Eigen::MatrixXd>& m,
                                double tol = kStochasticTol);

/// Embeds the level kernel into the full space: rows in the cumulative
/// subspace below `level` map through phi into tier `level`; all other rows
/// are identity. Idempotent whenever phi is deterministic.
TransitionMatrix build_level_operator(const HierarchySpec& spec, int level,
                                      const ProjectionKernel& phi);

/// The absorbing operator: every row is the one-hot of the mask index.
TransitionMatrix build_mask_operator(const HierarchySpec& spec);

/// Extends a chain of per-tier kernels (clean->mid1, mid1->mid2, ...) to the
/// cumulative domains by composition. The induced level operators then
/// satisfy Q(i) Q(j) = Q(max(i,j)), which the kernel composition identities
/// require; independently chosen cumulative-domain kernels generally do not.
std::vector<ProjectionKernel> extend_projection_chain(
    const HierarchySpec& spec, const std::vector<Eigen::MatrixXd>& chain);

/// Verifies the semigroup property of the induced operators within tol.
void validate_projection_chain(const HierarchySpec& spec,
                               const std::vector<ProjectionKernel>& phis,
                               double tol = kStochasticTol);

}  // namespace hddm

#endif  // HDDM_HIERARCHY_HPP
