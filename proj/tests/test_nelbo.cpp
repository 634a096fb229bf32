#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "hddm/nelbo.hpp"
#include "oracles.hpp"

using namespace hddm;

namespace {

ProjectionKernel phi_3x2() {
  Eigen::MatrixXd m(3, 2);
  m << 1, 0, 1, 0, 0, 1;
  return ProjectionKernel::from_matrix(m);
}

/// Exact single-token Bayes denoiser for a prior over clean tokens.
TokenDenoiser exact_token_denoiser(const HierarchySpec& spec,
                                   const ProjectionKernel& phi,
                                   const Schedule& a, const Schedule& b,
                                   Eigen::VectorXd prior) {
  return [&spec, &phi, &a, &b, prior = std::move(prior)](
             int z_t, double t) -> Eigen::VectorXd {
    Eigen::VectorXd w(prior.size());
    const TransitionMatrix q = cumulative_kernel(spec, phi, a, b, t);
    for (int x = 0; x < prior.size(); ++x) w[x] = prior[x] * q(x, z_t);
    const double total = w.sum();
    if (total <= 0.0) throw std::domain_error("unreachable z_t");
    return w / total;
  };
}

}  // namespace

TEST_CASE("per-step KL term") {
  const HierarchySpec spec{2, {1}};
  Eigen::MatrixXd m(2, 1);
  m << 1, 1;
  const auto phi = ProjectionKernel::from_matrix(m);
  const Schedule a = Schedule::linear();
  const Schedule b = Schedule::quadratic();

  Eigen::VectorXd delta(2);
  delta << 1, 0;
  Eigen::VectorXd uniform = Eigen::VectorXd::Constant(2, 0.5);

  // Clean z_t: zero regardless of the denoiser.
  CHECK(discrete_kl_term(0, 0, 0.4, 0.6, uniform, spec, phi, a, b) == 0.0);

  // One-hot denoiser at the truth: zero in every case.
  for (int z_t = 0; z_t < spec.dim(); ++z_t) {
    if (z_t == 1) continue;
    CHECK(discrete_kl_term(0, z_t, 0.4, 0.6, delta, spec, phi, a, b) ==
          doctest::Approx(0.0).epsilon(1e-15));
  }

  // Mask observation with a uniform denoiser: enumerate both posteriors.
  const Eigen::VectorXd q =
      true_posterior({spec.mask_index(), 0, 0.4, 0.6}, spec, phi, a, b);
  const Eigen::VectorXd p = model_posterior(
      {spec.mask_index(), uniform, 0.4, 0.6}, spec, phi, a, b);
  double expected = 0.0;
  for (int i = 0; i < spec.dim(); ++i) {
    if (q[i] > 0.0) expected += q[i] * std::log(q[i] / p[i]);
  }
  CHECK(expected > 0.0);
  CHECK(discrete_kl_term(0, spec.mask_index(), 0.4, 0.6, uniform, spec, phi,
                         a, b) == doctest::Approx(expected).epsilon(1e-14));

  // Missing support is an explicit infinity.
  Eigen::VectorXd hole(2);
  hole << 0, 1;
  CHECK(std::isinf(discrete_kl_term(0, spec.mask_index(), 0.4, 0.6, hole,
                                    spec, phi, a, b)));
}

TEST_CASE("discrete bound: perfect denoiser and grid convergence") {
  const HierarchySpec spec{2, {1}};
  Eigen::MatrixXd m(2, 1);
  m << 1, 1;
  const auto phi = ProjectionKernel::from_matrix(m);
  const Schedule a = Schedule::linear();
  const Schedule b = Schedule::quadratic();

  TokenDenoiser perfect = [](int, double) {
    Eigen::VectorXd v(2);
    v << 1, 0;
    return v;
  };
  RngStream rng(3);
  CHECK(discrete_nelbo(0, perfect, 50, spec, phi, a, b, rng, 2000) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // Fixed imperfect denoiser: exact values converge as T grows.
  TokenDenoiser blurry = [](int, double) {
    Eigen::VectorXd v(2);
    v << 0.8, 0.2;
    return v;
  };
  const double l10 = discrete_nelbo_exact(0, blurry, 10, spec, phi, a, b);
  const double l100 = discrete_nelbo_exact(0, blurry, 100, spec, phi, a, b);
  const double l1000 = discrete_nelbo_exact(0, blurry, 1000, spec, phi, a, b);
  const double l2000 = discrete_nelbo_exact(0, blurry, 2000, spec, phi, a, b);
  CHECK(std::abs(l1000 - l2000) < std::abs(l10 - l2000));
  CHECK(std::abs(l100 - l2000) < std::abs(l10 - l2000));
  CHECK(std::abs(l1000 - l2000) <= std::abs(l100 - l2000) + 1e-12);

  // The Monte Carlo estimator agrees with the exact sum within noise.
  RngStream rng2(17);
  const double mc = discrete_nelbo(0, blurry, 100, spec, phi, a, b, rng2,
                                   200000);
  CHECK(mc == doctest::Approx(l100).epsilon(0.02));
}

TEST_CASE("beta == alpha reduces to the masked-diffusion bound") {
  const Schedule lin = Schedule::linear();
  const HierarchySpec spec{3, {2}};
  const auto phi = phi_3x2();
  hddm_test::AbsorbingDiffusion ref{3, lin};

  TokenDenoiser blurry = [](int, double) {
    Eigen::VectorXd v(3);
    v << 0.6, 0.3, 0.1;
    return v;
  };
  // Same denoiser, mask index mapped between the two state spaces.
  auto ref_denoiser = [&blurry](int z_t, double t) {
    return blurry(z_t, t);
  };
  for (int x = 0; x < 3; ++x) {
    const double mine =
        discrete_nelbo_exact(x, blurry, 200, spec, phi, lin, lin);
    const double theirs = ref.discrete_nelbo_exact(x, ref_denoiser, 200);
    CHECK(mine == doctest::Approx(theirs).epsilon(1e-10));
  }
}

TEST_CASE("continuous integrand matches the discrete-time limit") {
  const HierarchySpec spec{3, {2}};
  const auto phi = phi_3x2();
  const Schedule a = Schedule::linear();
  const Schedule b = Schedule::quadratic();

  Eigen::VectorXd x_theta(3);
  x_theta << 0.5, 0.3, 0.2;

  // T * KL over a shrinking interval converges to the integrand.
  for (double t : {0.2, 0.5, 0.8}) {
    for (int z_t : {3, 4, 5}) {
      const int x = (z_t == 4) ? 2 : 0;  // stay inside the forward support
      const double big_t = 1e6;
      const double kl = discrete_kl_term(x, z_t, t - 1.0 / big_t, t, x_theta,
                                         spec, phi, a, b);
      const double integrand =
          continuous_integrand(x, z_t, t, x_theta, spec, phi, a, b);
      CHECK(integrand >= 0.0);
      CHECK(big_t * kl == doctest::Approx(integrand).epsilon(1e-4));
    }
  }

  // Clean states and perfect denoisers contribute nothing.
  CHECK(continuous_integrand(0, 0, 0.5, x_theta, spec, phi, a, b) == 0.0);
  Eigen::VectorXd delta(3);
  delta << 1, 0, 0;
  CHECK(continuous_integrand(0, 3, 0.5, delta, spec, phi, a, b) ==
        doctest::Approx(0.0).epsilon(1e-15));
  CHECK(continuous_integrand(0, spec.mask_index(), 0.5, delta, spec, phi, a,
                             b) == doctest::Approx(0.0).epsilon(1e-15));

  // Degenerate schedule pair: singular coefficient is an error.
  CHECK_THROWS_AS(continuous_integrand(0, 3, 0.5, x_theta, spec, phi, a, a),
                  std::domain_error);
}

TEST_CASE("quadrature of the integrand meets the discrete sum") {
  // K=3, G=2 toy problem with the exact Bayes denoiser.
  const HierarchySpec spec{3, {2}};
  const auto phi = phi_3x2();
  const Schedule a = Schedule::linear();
  const Schedule b = Schedule::quadratic();
  Eigen::VectorXd prior(3);
  prior << 0.5, 0.3, 0.2;
  const TokenDenoiser denoiser =
      exact_token_denoiser(spec, phi, a, b, prior);

  for (int x = 0; x < 3; ++x) {
    const double discrete =
        discrete_nelbo_exact(x, denoiser, 2000, spec, phi, a, b);
    const double continuous =
        continuous_nelbo_quadrature(x, denoiser, 10000, spec, phi, a, b);
    CHECK(continuous ==
          doctest::Approx(discrete).epsilon(0.02));  // 2% relative
    CHECK(continuous >= 0.0);
  }
}

TEST_CASE("cross-entropy training loss") {
  GraphState g0 = GraphState::empty(2);
  g0.nodes << 0, 1;
  g0.edges(0, 1) = g0.edges(1, 0) = 1;
  GraphState g_t = g0;

  Eigen::MatrixXd nodes(2, 2);
  nodes << 0.5, 0.5, 0.75, 0.25;  // truth probs 0.5 and 0.25
  Eigen::MatrixXd edges(1, 5);
  edges << 0.2, 0.2, 0.2, 0.2, 0.2;

  const double expected = -std::log(0.5) - std::log(0.25) - std::log(0.2);
  CHECK(ce_training_loss(g0, g_t, nodes, edges, 1.0) ==
        doctest::Approx(expected).epsilon(1e-14));

  // lambda = 0 keeps only the node term.
  CHECK(ce_training_loss(g0, g_t, nodes, edges, 0.0) ==
        doctest::Approx(-std::log(0.5) - std::log(0.25)).epsilon(1e-14));

  // Perfect probabilities: zero loss.
  Eigen::MatrixXd exact_nodes(2, 2);
  exact_nodes << 1, 0, 0, 1;
  Eigen::MatrixXd exact_edges(1, 5);
  exact_edges << 0, 1, 0, 0, 0;
  CHECK(ce_training_loss(g0, g_t, exact_nodes, exact_edges, 1.0) == 0.0);

  // Zero mass on a truth: +inf.
  Eigen::MatrixXd broken_edges(1, 5);
  broken_edges << 1, 0, 0, 0, 0;
  CHECK(std::isinf(ce_training_loss(g0, g_t, exact_nodes, broken_edges, 1.0)));

  // Permutation invariance: swap the two nodes everywhere.
  GraphState g0p = GraphState::empty(2);
  g0p.nodes << 1, 0;
  g0p.edges(0, 1) = g0p.edges(1, 0) = 1;
  Eigen::MatrixXd nodes_p(2, 2);
  nodes_p << 0.75, 0.25, 0.5, 0.5;
  CHECK(ce_training_loss(g0p, g0p, nodes_p, edges, 1.0) ==
        doctest::Approx(ce_training_loss(g0, g_t, nodes, edges, 1.0)));
}
