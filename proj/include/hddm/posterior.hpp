#ifndef HDDM_POSTERIOR_HPP
#define HDDM_POSTERIOR_HPP

#include <Eigen/Dense>

#include "hddm/forward.hpp"
#include "hddm/hierarchy.hpp"
#include "hddm/schedule.hpp"

namespace hddm {

/// Query for the exact reverse posterior q(z_s | z_t, x) with s < t.
struct PosteriorQuery {
  int z_t = 0;
  int x = 0;
  double s = 0.0;
  double t = 1.0;
};

/// Query for the model posterior where the clean token is replaced by a
/// probability vector over the clean tier.
struct ModelPosteriorQuery {
  int z_t = 0;
  Eigen::VectorXd x_theta;
  double s = 0.0;
  double t = 1.0;
};

/// Exact posterior over the full state space, split by the tier of z_t:
/// clean z_t collapses to the clean token; a mid z_t mixes {x, z_t}; the mask
/// mixes {x, projections of x, mask}. Throws std::domain_error when the pair
/// (z_t, x) has zero forward support.
Eigen::VectorXd true_posterior(const PosteriorQuery& q,
                               const HierarchySpec& spec,
                               const ProjectionKernel& phi,
                               const Schedule& alpha, const Schedule& beta);

/// Posterior parameterized by a denoiser distribution over clean tokens:
/// equivalent to Bayes with x_theta as the conditional prior over x. With a
/// one-hot x_theta this equals true_posterior exactly. Throws
/// std::domain_error when x_theta places no mass on any clean token
/// compatible with z_t (inconsistent denoiser).
Eigen::VectorXd model_posterior(const ModelPosteriorQuery& q,
                                const HierarchySpec& spec,
                                const ProjectionKernel& phi,
                                const Schedule& alpha, const Schedule& beta);

/// Brute-force reference: q(z_s|z_t,x) proportional to
/// Q_{t|s}[z_s, z_t] * Q_s[x, z_s], enumerated over all states. Requires
/// dim <= 64.
Eigen::VectorXd bayes_posterior_oracle(const PosteriorQuery& q,
                                       const HierarchySpec& spec,
                                       const ProjectionKernel& phi,
                                       const Schedule& alpha,
                                       const Schedule& beta);

}  // namespace hddm

#endif  // HDDM_POSTERIOR_HPP
