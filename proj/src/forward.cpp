#include "hddm/forward.hpp"

#include <stdexcept>
#include <string>

namespace hddm {

void validate_graph_state(const GraphState& g, int node_dim, int edge_dim) {
  if (g.n < 0) throw std::invalid_argument("negative node count");
  if (g.nodes.size() != g.n || g.edges.rows() != g.n || g.edges.cols() != g.n) {
    throw std::invalid_argument("graph state shape mismatch");
  }
  if (!(g.t >= 0.0 && g.t <= 1.0)) {
    throw std::invalid_argument("graph state time outside [0,1]");
  }
  for (int i = 0; i < g.n; ++i) {
    if (g.nodes[i] < 0 || g.nodes[i] >= node_dim) {
      throw std::invalid_argument("node token out of range at index " +
                                  std::to_string(i));
    }
    if (g.edges(i, i) != 0) {
      throw std::invalid_argument("nonzero diagonal (self-loop) at index " +
                                  std::to_string(i));
    }
    for (int j = 0; j < g.n; ++j) {
      if (g.edges(i, j) < 0 || g.edges(i, j) >= edge_dim) {
        throw std::invalid_argument("edge token out of range at (" +
                                    std::to_string(i) + "," +
                                    std::to_string(j) + ")");
      }
      if (g.edges(i, j) != g.edges(j, i)) {
        throw std::invalid_argument("edge matrix is not symmetric");
      }
    }
  }
}

namespace {

TransitionMatrix two_level_kernel(const HierarchySpec& spec,
                                  const ProjectionKernel& phi, double a,
                                  double b) {
  if (spec.levels() != 1) {
    throw std::invalid_argument(
        "two-level kernel requires exactly one mid tier; use "
        "build_multilevel_kernel otherwise");
  }
  if (b - a < -kStochasticTol) {
    throw std::invalid_argument(
        "schedule pair out of order on this interval (beta ratio below "
        "alpha ratio)");
  }
  const TransitionMatrix q1 = build_level_operator(spec, 1, phi);
  const TransitionMatrix q2 = build_mask_operator(spec);
  TransitionMatrix q =
      a * TransitionMatrix::Identity(spec.dim(), spec.dim()) + (b - a) * q1;
  q += (1.0 - b) * q2;
  return q;
}

}  // namespace

TransitionMatrix kernel_between(const HierarchySpec& spec,
                                const ProjectionKernel& phi,
                                const Schedule& alpha, const Schedule& beta,
                                double s, double t) {
  if (!(0.0 <= s && s <= t && t <= 1.0)) {
    throw std::invalid_argument("kernel_between needs 0 <= s <= t <= 1");
  }
  return two_level_kernel(spec, phi, alpha.conditional_ratio(s, t),
                          beta.conditional_ratio(s, t));
}

TransitionMatrix cumulative_kernel(const HierarchySpec& spec,
                                   const ProjectionKernel& phi,
                                   const Schedule& alpha, const Schedule& beta,
                                   double t) {
  return two_level_kernel(spec, phi, alpha.value(t), beta.value(t));
}

TransitionMatrix build_multilevel_kernel(
    const HierarchySpec& spec, const std::vector<ProjectionKernel>& phis,
    const std::vector<Schedule>& schedules, double s, double t) {
  validate_partition(spec);
  if (!(0.0 <= s && s <= t && t <= 1.0)) {
    throw std::invalid_argument("multilevel kernel needs 0 <= s <= t <= 1");
  }
  const int n_mid = spec.levels();
  if (static_cast<int>(phis.size()) != n_mid) {
    throw std::invalid_argument("expected one projection per mid tier");
  }
  if (static_cast<int>(schedules.size()) != n_mid + 1) {
    throw std::invalid_argument("expected levels()+1 schedules");
  }

  std::vector<double> ratios(schedules.size());
  for (std::size_t i = 0; i < schedules.size(); ++i) {
    ratios[i] = schedules[i].conditional_ratio(s, t);
    if (i > 0 && ratios[i] < ratios[i - 1] - kStochasticTol) {
      throw std::invalid_argument(
          "schedule ordering violation on this interval at level " +
          std::to_string(i));
    }
  }

  const int d = spec.dim();
  TransitionMatrix q = ratios[0] * TransitionMatrix::Identity(d, d);
  for (int i = 0; i < n_mid; ++i) {
    q += (ratios[i + 1] - ratios[i]) * build_level_operator(spec, i + 1, phis[i]);
  }
  q += (1.0 - ratios[n_mid]) * build_mask_operator(spec);
  return q;
}

Eigen::VectorXd marginal(int x0, const HierarchySpec& spec,
                         const ProjectionKernel& phi, const Schedule& alpha,
                         const Schedule& beta, double t) {
  if (spec.levels() != 1) {
    throw std::invalid_argument("marginal requires exactly one mid tier");
  }
  if (!spec.is_clean(x0)) {
    throw std::invalid_argument("marginal requires a clean start token");
  }
  const double a = alpha.value(t);
  const double b = beta.value(t);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(spec.dim());
  p[x0] = a;
  p.segment(spec.clean_size, spec.mid_sizes[0]) += (b - a) * phi.phi.row(x0);
  p[spec.mask_index()] = 1.0 - b;
  return p;
}

TransitionMatrix edge_kernel(int edge_dim, const Schedule& alpha, double s,
                             double t) {
  if (edge_dim < 2) throw std::invalid_argument("edge space needs >= 2 tokens");
  const double a = alpha.conditional_ratio(s, t);
  TransitionMatrix q = TransitionMatrix::Constant(edge_dim, edge_dim,
                                                  (1.0 - a) / edge_dim);
  q.diagonal().array() += a;
  return q;
}

GraphState sample_forward(const GraphState& g0, const HierarchySpec& spec,
                          const ProjectionKernel& phi, const Schedule& alpha,
                          const Schedule& beta, const Schedule& edge_alpha,
                          int edge_dim, double t, RngStream& rng) {
  validate_graph_state(g0, spec.dim(), edge_dim);
  if (g0.t != 0.0) {
    throw std::invalid_argument("forward sampling starts from a t=0 state");
  }
  for (int i = 0; i < g0.n; ++i) {
    if (!spec.is_clean(g0.nodes[i])) {
      throw std::invalid_argument("forward sampling requires clean tokens");
    }
  }

  GraphState g = g0;
  g.t = t;
  for (int i = 0; i < g0.n; ++i) {
    g.nodes[i] = rng.next_categorical(marginal(g0.nodes[i], spec, phi, alpha, beta, t));
  }
  const TransitionMatrix qe = edge_kernel(edge_dim, edge_alpha, 0.0, t);
  for (int i = 0; i < g0.n; ++i) {
    for (int j = i + 1; j < g0.n; ++j) {
      const int token = rng.next_categorical(qe.row(g0.edges(i, j)).transpose());
      g.edges(i, j) = token;
      g.edges(j, i) = token;
    }
  }
  return g;
}

}  // namespace hddm
