#ifndef HDDM_FORWARD_HPP
#define HDDM_FORWARD_HPP

#include <vector>

#include <Eigen/Dense>

#include "hddm/hierarchy.hpp"
#include "hddm/rng.hpp"
#include "hddm/schedule.hpp"

namespace hddm {

/// Per-node categorical tokens plus a symmetric per-edge token matrix at a
/// diffusion time t. Node tokens index the atom hierarchy space; edge tokens
/// index the edge space, with token 0 (no bond) fixed on the diagonal.
struct GraphState {
  int n = 0;
  Eigen::VectorXi nodes;
  Eigen::MatrixXi edges;
  double t = 0.0;

  static GraphState empty(int n, double t = 0.0) {
    GraphState g;
    g.n = n;
    g.nodes = Eigen::VectorXi::Zero(n);
    g.edges = Eigen::MatrixXi::Zero(n, n);
    g.t = t;
    return g;
  }

  bool operator==(const GraphState&) const = default;
};

/// Checks symmetry, zero diagonal, token ranges, and t in [0,1].
void validate_graph_state(const GraphState& g, int node_dim, int edge_dim);

/// Step kernel between two times for the two-level hierarchy:
///   Q_{t|s} = a_{t|s} I + (b_{t|s} - a_{t|s}) Q1 + (1 - b_{t|s}) Q2.
/// Returns the identity at s == t.
TransitionMatrix kernel_between(const HierarchySpec& spec,
                                const ProjectionKernel& phi,
                                const Schedule& alpha, const Schedule& beta,
                                double s, double t);

/// Cumulative kernel from time 0:
///   Q_t = a_t I + (b_t - a_t) Q1 + (1 - b_t) Q2.
TransitionMatrix cumulative_kernel(const HierarchySpec& spec,
                                   const ProjectionKernel& phi,
                                   const Schedule& alpha, const Schedule& beta,
                                   double t);

/// Generalized kernel for specs with any number of mid tiers. Expects one
/// projection per mid tier and levels()+1 schedules ordered so that
/// schedules[0] <= schedules[1] <= ...; the last schedule drives the mask.
TransitionMatrix build_multilevel_kernel(
    const HierarchySpec& spec, const std::vector<ProjectionKernel>& phis,
    const std::vector<Schedule>& schedules, double s, double t);

/// Forward marginal of a clean token:
///   a_t e_x + (b_t - a_t) * (phi row of x) + (1 - b_t) e_mask.
Eigen::VectorXd marginal(int x0, const HierarchySpec& spec,
                         const ProjectionKernel& phi, const Schedule& alpha,
                         const Schedule& beta, double t);

/// Uniform transition kernel on the edge space:
///   a_{t|s} I + (1 - a_{t|s}) (1/d) 1 1^T.
TransitionMatrix edge_kernel(int edge_dim, const Schedule& alpha, double s,
                             double t);

/// Corrupts a clean graph to time t: each node drawn from its atom marginal,
/// each unordered edge pair drawn once from the edge marginal and mirrored.
/// Consumption order is nodes 0..n-1 then edges in (i<j) lexicographic order.
GraphState sample_forward(const GraphState& g0, const HierarchySpec& spec,
                          const ProjectionKernel& phi, const Schedule& alpha,
                          const Schedule& beta, const Schedule& edge_alpha,
                          int edge_dim, double t, RngStream& rng);

}  // namespace hddm

#endif  // HDDM_FORWARD_HPP
