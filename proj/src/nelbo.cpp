#include "hddm/nelbo.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hddm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double kl_divergence(const Eigen::VectorXd& q, const Eigen::VectorXd& p) {
  double kl = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (q[i] > 0.0) {
      if (p[i] <= 0.0) return kInf;
      kl += q[i] * std::log(q[i] / p[i]);
    }
  }
  return kl < 0.0 ? 0.0 : kl;  // clip fp residue of identical distributions
}

}  // namespace

double discrete_kl_term(int x, int z_t, double s, double t,
                        const Eigen::VectorXd& x_theta,
                        const HierarchySpec& spec, const ProjectionKernel& phi,
                        const Schedule& alpha, const Schedule& beta) {
  if (spec.is_clean(z_t)) return 0.0;
  const Eigen::VectorXd q =
      true_posterior({z_t, x, s, t}, spec, phi, alpha, beta);
  const Eigen::VectorXd p =
      model_posterior({z_t, x_theta, s, t}, spec, phi, alpha, beta);
  return kl_divergence(q, p);
}

double discrete_nelbo(int x, const TokenDenoiser& denoiser, int T,
                      const HierarchySpec& spec, const ProjectionKernel& phi,
                      const Schedule& alpha, const Schedule& beta,
                      RngStream& rng, int mc_samples) {
  if (T < 2) throw std::invalid_argument("discrete bound needs T >= 2");
  if (mc_samples < 1) throw std::invalid_argument("need at least one sample");
  double acc = 0.0;
  for (int m = 0; m < mc_samples; ++m) {
    const int i = 1 + static_cast<int>(rng.next_uniform() * T);
    const double t = static_cast<double>(i) / T;
    const double s = static_cast<double>(i - 1) / T;
    const int z_t = rng.next_categorical(marginal(x, spec, phi, alpha, beta, t));
    acc += T * discrete_kl_term(x, z_t, s, t, denoiser(z_t, t), spec, phi,
                                alpha, beta);
  }
  return acc / mc_samples;
}

double discrete_nelbo_exact(int x, const TokenDenoiser& denoiser, int T,
                            const HierarchySpec& spec,
                            const ProjectionKernel& phi, const Schedule& alpha,
                            const Schedule& beta) {
  if (T < 2) throw std::invalid_argument("discrete bound needs T >= 2");
  double total = 0.0;
  for (int i = 1; i <= T; ++i) {
    const double t = static_cast<double>(i) / T;
    const double s = static_cast<double>(i - 1) / T;
    const Eigen::VectorXd q_t = marginal(x, spec, phi, alpha, beta, t);
    for (int z_t = 0; z_t < spec.dim(); ++z_t) {
      if (q_t[z_t] <= 0.0 || spec.is_clean(z_t)) continue;
      total += q_t[z_t] * discrete_kl_term(x, z_t, s, t, denoiser(z_t, t),
                                           spec, phi, alpha, beta);
    }
  }
  return total;
}

double continuous_integrand(int x, int z_t, double t,
                            const Eigen::VectorXd& x_theta,
                            const HierarchySpec& spec,
                            const ProjectionKernel& phi, const Schedule& alpha,
                            const Schedule& beta) {
  validate_partition(spec);
  if (spec.levels() != 1) {
    throw std::invalid_argument("integrand is defined on two-level specs");
  }
  if (!(t > 0.0 && t < 1.0)) {
    throw std::invalid_argument("integrand defined for t in (0,1)");
  }
  if (!spec.is_clean(x)) {
    throw std::invalid_argument("integrand requires a clean token x");
  }
  if (spec.is_clean(z_t)) return 0.0;

  const auto [a, da] = alpha.eval(t);
  const auto [b, db] = beta.eval(t);
  if (b - a <= 0.0) {
    throw std::domain_error(
        "integrand singular: beta(t) == alpha(t) at interior t");
  }
  if (b <= 0.0 || b >= 1.0) {
    throw std::domain_error("integrand singular: beta(t) at {0,1} interior");
  }

  const int k = spec.clean_size;
  if (x_theta.size() != k) {
    throw std::invalid_argument("x_theta must range over the clean tier");
  }

  if (spec.is_mid(z_t)) {
    const int g = z_t - k;
    if (phi.phi(x, g) <= 0.0) {
      throw std::domain_error("zero forward support: mid z_t unreachable");
    }
    const double mass = x_theta.dot(phi.phi.col(g));
    const double hit = x_theta[x] * phi.phi(x, g);
    if (hit <= 0.0) return kInf;
    const double coeff = (a * db - da * b) / (b * (b - a));
    return coeff * std::log(mass / hit);
  }

  // z_t is the mask.
  const double c_clean = -a * db / (b * (1.0 - b));
  const double c_mid = -db * (b - a) / (b * (1.0 - b));
  if (x_theta[x] <= 0.0) return kInf;
  double mid_kl = 0.0;
  const Eigen::VectorXd push = phi.phi.transpose() * x_theta;
  for (int g = 0; g < spec.mid_sizes[0]; ++g) {
    const double qx = phi.phi(x, g);
    if (qx > 0.0) {
      if (push[g] <= 0.0) return kInf;
      mid_kl += qx * std::log(qx / push[g]);
    }
  }
  return c_clean * (-std::log(x_theta[x])) + c_mid * mid_kl;
}

double expected_continuous_integrand(int x, const TokenDenoiser& denoiser,
                                     double t, const HierarchySpec& spec,
                                     const ProjectionKernel& phi,
                                     const Schedule& alpha,
                                     const Schedule& beta) {
  const Eigen::VectorXd q_t = marginal(x, spec, phi, alpha, beta, t);
  double acc = 0.0;
  for (int z_t = spec.clean_size; z_t < spec.dim(); ++z_t) {
    if (q_t[z_t] <= 0.0) continue;
    acc += q_t[z_t] * continuous_integrand(x, z_t, t, denoiser(z_t, t), spec,
                                           phi, alpha, beta);
  }
  return acc;
}

double continuous_nelbo_quadrature(int x, const TokenDenoiser& denoiser,
                                   int points, const HierarchySpec& spec,
                                   const ProjectionKernel& phi,
                                   const Schedule& alpha,
                                   const Schedule& beta) {
  if (points < 1) throw std::invalid_argument("need at least one point");
  double acc = 0.0;
  for (int i = 0; i < points; ++i) {
    const double t = (i + 0.5) / points;
    acc += expected_continuous_integrand(x, denoiser, t, spec, phi, alpha,
                                         beta);
  }
  return acc / points;
}

double ce_training_loss(const GraphState& g0, const GraphState& g_t,
                        const Eigen::MatrixXd& node_probs,
                        const Eigen::MatrixXd& edge_probs, double lambda) {
  if (lambda < 0.0) throw std::invalid_argument("lambda must be nonnegative");
  if (g_t.n != g0.n) throw std::invalid_argument("graph size mismatch");
  const int n = g0.n;
  if (node_probs.rows() != n) {
    throw std::invalid_argument("node probability shape mismatch");
  }
  if (edge_probs.rows() != static_cast<Eigen::Index>(n) * (n - 1) / 2) {
    throw std::invalid_argument("edge probability shape mismatch");
  }

  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    const int truth = g0.nodes[i];
    if (truth < 0 || truth >= node_probs.cols()) {
      throw std::invalid_argument("clean node token outside prediction range");
    }
    const double p = node_probs(i, truth);
    if (p <= 0.0) return kInf;
    loss -= std::log(p);
  }
  int row = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++row) {
      const int truth = g0.edges(i, j);
      if (truth < 0 || truth >= edge_probs.cols()) {
        throw std::invalid_argument("clean edge token outside prediction range");
      }
      const double p = edge_probs(row, truth);
      if (p <= 0.0) return (lambda > 0.0) ? kInf : loss;
      loss -= lambda * std::log(p);
    }
  }
  return loss;
}

}  // namespace hddm
