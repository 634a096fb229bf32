#include "hddm/hierarchy.hpp"

#include <stdexcept>
#include <string>

namespace hddm {

int HierarchySpec::tier_of(int state) const {
  if (state < 0 || state >= dim()) {
    throw std::out_of_range("state index " + std::to_string(state) +
                            " outside [0, " + std::to_string(dim()) + ")");
  }
  if (state < clean_size) return 0;
  int off = clean_size;
  for (int i = 0; i < levels(); ++i) {
    off += mid_sizes[i];
    if (state < off) return i + 1;
  }
  return levels() + 1;
}

void validate_partition(const HierarchySpec& spec) {
  if (spec.clean_size <= 0) {
    throw std::invalid_argument("empty clean tier (K must be >= 1)");
  }
  for (int i = 0; i < spec.levels(); ++i) {
    if (spec.mid_sizes[i] <= 0) {
      throw std::invalid_argument("empty mid tier at level " +
                                  std::to_string(i + 1));
    }
  }
}

bool is_row_stochastic(const Eigen::Ref<const Eigen::MatrixXd>& m,
                       double tol) {
  if (m.rows() == 0 || m.cols() == 0) return false;
  if ((m.array() < -tol).any() || (m.array() > 1.0 + tol).any()) return false;
  return ((m.rowwise().sum().array() - 1.0).abs() <= tol).all();
}

void validate_transition_matrix(const Eigen::Ref<const Eigen::MatrixXd>& m,
                                double tol) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("transition matrix must be square");
  }
  if (!is_row_stochastic(m, tol)) {
    throw std::invalid_argument("transition matrix is not row-stochastic");
  }
}

ProjectionKernel ProjectionKernel::from_matrix(Eigen::MatrixXd m) {
  if (!is_row_stochastic(m)) {
    throw std::invalid_argument("projection kernel is not row-stochastic");
  }
  bool det = true;
  for (Eigen::Index r = 0; r < m.rows() && det; ++r) {
    int ones = 0;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      if (v == 1.0) {
        ++ones;
      } else if (v != 0.0) {
        det = false;
        break;
      }
    }
    if (ones != 1) det = false;
  }
  return ProjectionKernel{std::move(m), det};
}

TransitionMatrix build_level_operator(const HierarchySpec& spec, int level,
                                      const ProjectionKernel& phi) {
  validate_partition(spec);
  if (level < 1 || level > spec.levels()) {
    throw std::invalid_argument("level " + std::to_string(level) +
                                " outside [1, " +
                                std::to_string(spec.levels()) + "]");
  }
  const int lower = spec.cumulative_size(level - 1);
  const int target = spec.tier_size(level);
  if (phi.phi.rows() != lower || phi.phi.cols() != target) {
    throw std::invalid_argument(
        "projection kernel shape " + std::to_string(phi.phi.rows()) + "x" +
        std::to_string(phi.phi.cols()) + " does not match required " +
        std::to_string(lower) + "x" + std::to_string(target));
  }
  if (!is_row_stochastic(phi.phi)) {
    throw std::invalid_argument("projection kernel is not row-stochastic");
  }

  const int d = spec.dim();
  const int target_off = spec.tier_offset(level);
  TransitionMatrix q = TransitionMatrix::Zero(d, d);
  q.block(0, target_off, lower, target) = phi.phi;
  for (int i = lower; i < d; ++i) q(i, i) = 1.0;
  return q;
}

TransitionMatrix build_mask_operator(const HierarchySpec& spec) {
  validate_partition(spec);
  const int d = spec.dim();
  TransitionMatrix q = TransitionMatrix::Zero(d, d);
  q.col(d - 1).setOnes();
  return q;
}

std::vector<ProjectionKernel> extend_projection_chain(
    const HierarchySpec& spec, const std::vector<Eigen::MatrixXd>& chain) {
  validate_partition(spec);
  if (static_cast<int>(chain.size()) != spec.levels()) {
    throw std::invalid_argument("expected one chain kernel per mid tier");
  }
  for (int i = 0; i < spec.levels(); ++i) {
    const Eigen::MatrixXd& link = chain[static_cast<std::size_t>(i)];
    if (link.rows() != spec.tier_size(i) || link.cols() != spec.tier_size(i + 1)) {
      throw std::invalid_argument("chain kernel " + std::to_string(i + 1) +
                                  " does not map tier " + std::to_string(i) +
                                  " onto tier " + std::to_string(i + 1));
    }
    if (!is_row_stochastic(link)) {
      throw std::invalid_argument("chain kernel " + std::to_string(i + 1) +
                                  " is not row-stochastic");
    }
  }

  std::vector<ProjectionKernel> phis;
  phis.reserve(chain.size());
  for (int level = 1; level <= spec.levels(); ++level) {
    const int lower = spec.cumulative_size(level - 1);
    const int target = spec.tier_size(level);
    Eigen::MatrixXd phi(lower, target);
    int row = 0;
    for (int tier = 0; tier < level; ++tier) {
      // Rows of tier k reach the target through the links k+1 .. level.
      Eigen::MatrixXd reach = chain[static_cast<std::size_t>(tier)];
      for (int k = tier + 1; k < level; ++k) {
        reach = reach * chain[static_cast<std::size_t>(k)];
      }
      phi.middleRows(row, spec.tier_size(tier)) = reach;
      row += spec.tier_size(tier);
    }
    phis.push_back(ProjectionKernel::from_matrix(std::move(phi)));
  }
  return phis;
}

void validate_projection_chain(const HierarchySpec& spec,
                               const std::vector<ProjectionKernel>& phis,
                               double tol) {
  const int n = spec.levels();
  if (static_cast<int>(phis.size()) != n) {
    throw std::invalid_argument("expected one projection per mid tier");
  }
  std::vector<TransitionMatrix> ops;
  ops.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 1; i <= n; ++i) {
    ops.push_back(build_level_operator(spec, i, phis[static_cast<std::size_t>(i - 1)]));
  }
  ops.push_back(build_mask_operator(spec));
  for (std::size_t i = 0; i < ops.size(); ++i) {
    for (std::size_t j = 0; j < ops.size(); ++j) {
      const TransitionMatrix& expect = ops[std::max(i, j)];
      if (((ops[i] * ops[j]) - expect).cwiseAbs().maxCoeff() > tol) {
        throw std::invalid_argument(
            "projection chain inconsistent: Q(" + std::to_string(i + 1) +
            ") Q(" + std::to_string(j + 1) + ") != Q(max)");
      }
    }
  }
}

}  // namespace hddm
