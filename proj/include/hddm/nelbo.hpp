#ifndef HDDM_NELBO_HPP
#define HDDM_NELBO_HPP

#include <functional>

#include <Eigen/Dense>

#include "hddm/forward.hpp"
#include "hddm/hierarchy.hpp"
#include "hddm/posterior.hpp"
#include "hddm/rng.hpp"
#include "hddm/schedule.hpp"

namespace hddm {

struct LossConfig {
  double lambda = 1.0;  // edge-loss weight; no published value, see README
  int T = 100;
  int mc_samples = 1000;
};

/// Denoiser restricted to a single token position: z_t, t -> distribution
/// over the clean tier.
using TokenDenoiser = std::function<Eigen::VectorXd(int z_t, double t)>;

/// KL( q(z_s|z_t,x) || p_theta(z_s|z_t) ) for one step. Nonnegative; exactly
/// zero for clean z_t and for a one-hot denoiser at x. Returns +inf when the
/// model posterior misses support the true posterior has.
double discrete_kl_term(int x, int z_t, double s, double t,
                        const Eigen::VectorXd& x_theta,
                        const HierarchySpec& spec, const ProjectionKernel& phi,
                        const Schedule& alpha, const Schedule& beta);

/// Monte Carlo estimate of the discrete-time bound: t drawn uniformly from
/// the grid {1/T, ..., 1}, z_t from the forward marginal, each sample
/// contributing T * KL(t-1/T, t).
double discrete_nelbo(int x, const TokenDenoiser& denoiser, int T,
                      const HierarchySpec& spec, const ProjectionKernel& phi,
                      const Schedule& alpha, const Schedule& beta,
                      RngStream& rng, int mc_samples);

/// Same bound with the expectation over t and z_t carried out exactly
/// (sum over the grid, enumeration over states).
double discrete_nelbo_exact(int x, const TokenDenoiser& denoiser, int T,
                            const HierarchySpec& spec,
                            const ProjectionKernel& phi, const Schedule& alpha,
                            const Schedule& beta);

/// Continuous-time NELBO integrand conditioned on (z_t, t), additive
/// constants dropped. The coefficients are the dt -> 0 limit of the per-step
/// T * KL terms (verified against the discrete sum in tests), which for the
/// mid-state term is (a b' - a' b) / (b (b - a)) rather than the superficially
/// similar a (b' - a') / (b - a); the mask-state coefficients are
/// -a b' / (b (1 - b)) and -b' (b - a) / (b (1 - b)). Clean z_t contributes 0.
/// Throws when beta(t) == alpha(t) at interior t (degenerate pair).
double continuous_integrand(int x, int z_t, double t,
                            const Eigen::VectorXd& x_theta,
                            const HierarchySpec& spec,
                            const ProjectionKernel& phi, const Schedule& alpha,
                            const Schedule& beta);

/// E_{z_t ~ q_t(.|x)} of the integrand at time t.
double expected_continuous_integrand(int x, const TokenDenoiser& denoiser,
                                     double t, const HierarchySpec& spec,
                                     const ProjectionKernel& phi,
                                     const Schedule& alpha,
                                     const Schedule& beta);

/// Midpoint quadrature of the expected integrand over t in (0,1).
double continuous_nelbo_quadrature(int x, const TokenDenoiser& denoiser,
                                   int points, const HierarchySpec& spec,
                                   const ProjectionKernel& phi,
                                   const Schedule& alpha, const Schedule& beta);

/// Cross-entropy training loss: sum_i -log p(node_i) over nodes plus
/// lambda * sum_{i<j} -log p(edge_ij) over unordered pairs. node_probs is
/// n x K over clean atom tokens; edge_probs holds one row per (i<j) pair in
/// lexicographic order. Returns +inf when a true token has zero predicted
/// probability.
double ce_training_loss(const GraphState& g0, const GraphState& g_t,
                        const Eigen::MatrixXd& node_probs,
                        const Eigen::MatrixXd& edge_probs, double lambda);

}  // namespace hddm

#endif  // HDDM_NELBO_HPP
