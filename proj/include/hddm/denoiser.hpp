#ifndef HDDM_DENOISER_HPP
#define HDDM_DENOISER_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hddm/forward.hpp"
#include "hddm/hierarchy.hpp"
#include "hddm/schedule.hpp"

namespace hddm {

/// Everything the forward process needs: the atom hierarchy with its
/// projection and schedule pair, plus the uniform edge process.
struct DiffusionModel {
  HierarchySpec spec;
  ProjectionKernel phi;
  Schedule alpha = Schedule::linear();
  Schedule beta = Schedule::quadratic();
  Schedule edge_alpha = Schedule::linear();
  int edge_dim = 5;
};

/// Factorized clean-token prediction: one simplex row per node over clean
/// atom tokens, one simplex row per unordered edge pair (i<j, lexicographic).
struct DenoiserOutput {
  int n = 0;
  Eigen::MatrixXd node_probs;  // n x K_clean
  Eigen::MatrixXd edge_probs;  // n(n-1)/2 x d_E

  static int edge_index(int n, int i, int j);
  Eigen::VectorXd edge_row(int i, int j) const;  // symmetric access
};

/// Row sums within tol of 1, entries nonnegative, shapes consistent with n.
void validate_denoiser_output(const DenoiserOutput& out, int n, int k_clean,
                              int edge_dim, double tol = 1e-9);

/// The denoiser contract: deterministic given inputs, safe for concurrent
/// invocation.
using Denoiser = std::function<DenoiserOutput(const GraphState&, double t)>;

/// Exact posterior over a finite corpus of clean graphs (all sharing one node
/// count): weights each corpus graph by the forward likelihood of the noisy
/// input, then marginalizes to per-node and per-edge clean probabilities.
/// Throws std::domain_error at evaluation when the input is unreachable from
/// every corpus graph.
Denoiser exact_bayes_denoiser(std::vector<GraphState> corpus,
                              const DiffusionModel& model);

/// Ignores the input state entirely and predicts corpus-wide token
/// frequencies; the deliberately weak baseline.
Denoiser empirical_marginal_denoiser(const std::vector<GraphState>& corpus,
                                     const DiffusionModel& model);

/// Classifier-free guidance in log space:
///   log p = log p_uncond + w (log p_cond - log p_uncond), renormalized.
/// Probabilities are clamped at 1e-12 before the log.
DenoiserOutput cfg_combine(const DenoiserOutput& cond,
                           const DenoiserOutput& uncond, double w);

/// Wraps a conditional denoiser pair under one guidance weight.
Denoiser guided_denoiser(Denoiser cond, Denoiser uncond, double w);

/// Adapter for an external model: writes each GraphState as a JSON line to
/// the child's stdin and reads one DenoiserOutput JSON line from its stdout.
/// The child is spawned once and kept alive for the denoiser's lifetime.
Denoiser subprocess_denoiser(const std::string& command);

}  // namespace hddm

#endif  // HDDM_DENOISER_HPP
