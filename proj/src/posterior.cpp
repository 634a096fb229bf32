#include "hddm/posterior.hpp"

#include <stdexcept>
#include <string>

namespace hddm {

namespace {

struct ScheduleValues {
  double a_s, a_t, b_s, b_t, a_ts, b_ts;
};

ScheduleValues schedule_values(const Schedule& alpha, const Schedule& beta,
                               double s, double t) {
  if (!(0.0 <= s && s < t && t <= 1.0)) {
    throw std::invalid_argument("posterior query needs 0 <= s < t <= 1");
  }
  ScheduleValues v;
  v.a_s = alpha.value(s);
  v.a_t = alpha.value(t);
  v.b_s = beta.value(s);
  v.b_t = beta.value(t);
  v.a_ts = alpha.conditional_ratio(s, t);
  v.b_ts = beta.conditional_ratio(s, t);
  return v;
}

void check_two_level(const HierarchySpec& spec) {
  validate_partition(spec);
  if (spec.levels() != 1) {
    throw std::invalid_argument("posteriors are defined on two-level specs");
  }
}

[[noreturn]] void zero_support(const std::string& what) {
  throw std::domain_error("zero forward support: " + what);
}

}  // namespace

Eigen::VectorXd true_posterior(const PosteriorQuery& q,
                               const HierarchySpec& spec,
                               const ProjectionKernel& phi,
                               const Schedule& alpha, const Schedule& beta) {
  check_two_level(spec);
  if (!spec.is_clean(q.x)) {
    throw std::invalid_argument("true posterior requires a clean token x");
  }
  const int d = spec.dim();
  if (q.z_t < 0 || q.z_t >= d) {
    throw std::invalid_argument("z_t outside the state space");
  }
  const ScheduleValues v = schedule_values(alpha, beta, q.s, q.t);
  Eigen::VectorXd p = Eigen::VectorXd::Zero(d);

  if (spec.is_clean(q.z_t)) {
    // A clean observation pins the chain: it can only have come from x.
    if (q.z_t != q.x) zero_support("clean z_t differs from x");
    p[q.x] = 1.0;
    return p;
  }

  if (spec.is_mid(q.z_t)) {
    const int g = q.z_t - spec.clean_size;
    const double reach = (v.b_t - v.a_t) * phi.phi(q.x, g);
    if (reach <= 0.0) zero_support("mid z_t unreachable from x");
    const double w_x = (v.a_s * v.b_ts - v.a_t) * phi.phi(q.x, g);
    const double w_g = v.b_ts * (v.b_s - v.a_s) * phi.phi(q.x, g);
    const double total = w_x + w_g;
    p[q.x] = w_x / total;
    p[q.z_t] = w_g / total;
    return p;
  }

  // z_t is the mask.
  if (1.0 - v.b_t <= 0.0) zero_support("mask unreachable at this t");
  const double w_x = v.a_s * (1.0 - v.b_ts);
  const double w_mid = (1.0 - v.b_ts) * (v.b_s - v.a_s);
  const double w_m = 1.0 - v.b_s;
  p[q.x] = w_x;
  p.segment(spec.clean_size, spec.mid_sizes[0]) = w_mid * phi.phi.row(q.x);
  p[spec.mask_index()] = w_m;
  p /= p.sum();
  return p;
}

Eigen::VectorXd model_posterior(const ModelPosteriorQuery& q,
                                const HierarchySpec& spec,
                                const ProjectionKernel& phi,
                                const Schedule& alpha, const Schedule& beta) {
  check_two_level(spec);
  const int d = spec.dim();
  const int k = spec.clean_size;
  if (q.z_t < 0 || q.z_t >= d) {
    throw std::invalid_argument("z_t outside the state space");
  }
  if (q.x_theta.size() != k) {
    throw std::invalid_argument("x_theta must range over the clean tier");
  }
  if ((q.x_theta.array() < 0.0).any() ||
      std::abs(q.x_theta.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("x_theta is not a probability vector");
  }
  Eigen::VectorXd p = Eigen::VectorXd::Zero(d);

  if (spec.is_clean(q.z_t)) {
    p[q.z_t] = 1.0;
    return p;
  }

  const ScheduleValues v = schedule_values(alpha, beta, q.s, q.t);

  if (spec.is_mid(q.z_t)) {
    const int g = q.z_t - spec.clean_size;
    // Restrict the denoiser to tokens that project onto this group.
    const Eigen::VectorXd r = q.x_theta.array() * phi.phi.col(g).array();
    const double w = r.sum();
    if (w <= 0.0) {
      throw std::domain_error(
          "inconsistent denoiser: no mass on the group of z_t");
    }
    const double denom = v.b_t - v.a_t;
    if (denom <= 0.0) zero_support("mid z_t unreachable at this t");
    const double c_clean = (v.a_s * v.b_ts - v.a_t) / denom;
    const double c_stay = (v.b_t - v.b_ts * v.a_s) / denom;
    p.head(k) = (c_clean / w) * r;
    p[q.z_t] = c_stay;
    return p;
  }

  if (1.0 - v.b_t <= 0.0) zero_support("mask unreachable at this t");
  p.head(k) = v.a_s * (1.0 - v.b_ts) * q.x_theta;
  p.segment(k, spec.mid_sizes[0]) =
      (1.0 - v.b_ts) * (v.b_s - v.a_s) * (phi.phi.transpose() * q.x_theta);
  p[spec.mask_index()] = 1.0 - v.b_s;
  p /= p.sum();
  return p;
}

Eigen::VectorXd bayes_posterior_oracle(const PosteriorQuery& q,
                                       const HierarchySpec& spec,
                                       const ProjectionKernel& phi,
                                       const Schedule& alpha,
                                       const Schedule& beta) {
  check_two_level(spec);
  if (spec.dim() > 64) {
    throw std::invalid_argument("oracle restricted to dim <= 64");
  }
  if (!spec.is_clean(q.x)) {
    throw std::invalid_argument("oracle requires a clean token x");
  }
  if (!(0.0 <= q.s && q.s < q.t && q.t <= 1.0)) {
    throw std::invalid_argument("posterior query needs 0 <= s < t <= 1");
  }
  const TransitionMatrix step = kernel_between(spec, phi, alpha, beta, q.s, q.t);
  const TransitionMatrix cum = cumulative_kernel(spec, phi, alpha, beta, q.s);
  Eigen::VectorXd u(spec.dim());
  for (int zs = 0; zs < spec.dim(); ++zs) {
    u[zs] = step(zs, q.z_t) * cum(q.x, zs);
  }
  const double norm = u.sum();
  if (norm <= 0.0) {
    throw std::domain_error("zero forward support: normalizer vanishes");
  }
  return u / norm;
}

}  // namespace hddm
