// Test-only reference implementations, kept independent of the library code
// paths they check.
#ifndef HDDM_TESTS_ORACLES_HPP
#define HDDM_TESTS_ORACLES_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "hddm/molgraph.hpp"
#include "hddm/schedule.hpp"

namespace hddm_test {

/// Plain masked (absorbing) diffusion over K clean tokens plus one mask
/// state, written from the textbook forward form q(z_t|x) = a_t x + (1-a_t) m
/// without touching the hierarchy machinery.
struct AbsorbingDiffusion {
  int k = 0;
  hddm::Schedule alpha = hddm::Schedule::linear();

  int mask() const { return k; }

  Eigen::VectorXd marginal(int x, double t) const {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(k + 1);
    const double a = alpha.value(t);
    p[x] = a;
    p[k] = 1.0 - a;
    return p;
  }

  /// q(z_s | z_t, x): clean z_t stays put; the mask splits between x and m.
  Eigen::VectorXd posterior(int z_t, int x, double s, double t) const {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(k + 1);
    if (z_t != k) {
      p[z_t] = 1.0;
      return p;
    }
    const double a_s = alpha.value(s);
    const double a_t = alpha.value(t);
    p[x] = (a_s - a_t) / (1.0 - a_t);
    p[k] = (1.0 - a_s) / (1.0 - a_t);
    return p;
  }

  /// Model posterior with the clean token replaced by a distribution.
  Eigen::VectorXd model_posterior(int z_t, const Eigen::VectorXd& x_theta,
                                  double s, double t) const {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(k + 1);
    if (z_t != k) {
      p[z_t] = 1.0;
      return p;
    }
    const double a_s = alpha.value(s);
    const double a_t = alpha.value(t);
    p.head(k) = ((a_s - a_t) / (1.0 - a_t)) * x_theta;
    p[k] = (1.0 - a_s) / (1.0 - a_t);
    return p;
  }

  /// Exact discrete-time bound: sum over the grid and over z_t.
  double discrete_nelbo_exact(
      int x, const std::function<Eigen::VectorXd(int, double)>& denoiser,
      int T) const {
    double total = 0.0;
    for (int i = 1; i <= T; ++i) {
      const double t = static_cast<double>(i) / T;
      const double s = static_cast<double>(i - 1) / T;
      const Eigen::VectorXd q_t = marginal(x, t);
      for (int z_t = 0; z_t <= k; ++z_t) {
        if (q_t[z_t] <= 0.0 || z_t != k) continue;  // clean z_t has zero KL
        const Eigen::VectorXd q = posterior(z_t, x, s, t);
        const Eigen::VectorXd p = model_posterior(z_t, denoiser(z_t, t), s, t);
        double kl = 0.0;
        for (int j = 0; j <= k; ++j) {
          if (q[j] > 0.0) {
            if (p[j] <= 0.0) return std::numeric_limits<double>::infinity();
            kl += q[j] * std::log(q[j] / p[j]);
          }
        }
        total += q_t[z_t] * kl;
      }
    }
    return total;
  }
};

/// Exhaustive isomorphism test for small molecular graphs (n <= 8 or so):
/// backtracking over token- and degree-compatible assignments.
inline bool isomorphic(const hddm::MolGraph& a, const hddm::MolGraph& b) {
  const int n = a.n();
  if (n != b.n()) return false;
  std::vector<int> deg_a(static_cast<std::size_t>(n), 0);
  std::vector<int> deg_b(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (a.bonds(i, j) != 0) ++deg_a[static_cast<std::size_t>(i)];
      if (b.bonds(i, j) != 0) ++deg_b[static_cast<std::size_t>(i)];
    }
  }
  std::vector<int> map(static_cast<std::size_t>(n), -1);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  std::function<bool(int)> extend = [&](int i) -> bool {
    if (i == n) return true;
    for (int cand = 0; cand < n; ++cand) {
      if (used[static_cast<std::size_t>(cand)]) continue;
      if (a.atoms[static_cast<std::size_t>(i)] !=
          b.atoms[static_cast<std::size_t>(cand)]) {
        continue;
      }
      if (deg_a[static_cast<std::size_t>(i)] !=
          deg_b[static_cast<std::size_t>(cand)]) {
        continue;
      }
      bool ok = true;
      for (int j = 0; j < i && ok; ++j) {
        if (a.bonds(i, j) != b.bonds(cand, map[static_cast<std::size_t>(j)])) {
          ok = false;
        }
      }
      if (!ok) continue;
      map[static_cast<std::size_t>(i)] = cand;
      used[static_cast<std::size_t>(cand)] = true;
      if (extend(i + 1)) return true;
      used[static_cast<std::size_t>(cand)] = false;
      map[static_cast<std::size_t>(i)] = -1;
    }
    return false;
  };
  return extend(0);
}

/// Deterministic Fisher-Yates permutation of a molecular graph.
inline hddm::MolGraph permute(const hddm::MolGraph& g,
                              const std::vector<int>& perm) {
  const int n = g.n();
  hddm::MolGraph out = hddm::MolGraph::empty(n);
  for (int i = 0; i < n; ++i) {
    out.atoms[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] =
        g.atoms[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      out.bonds(perm[static_cast<std::size_t>(i)],
                perm[static_cast<std::size_t>(j)]) = g.bonds(i, j);
    }
  }
  return out;
}

}  // namespace hddm_test

#endif  // HDDM_TESTS_ORACLES_HPP
