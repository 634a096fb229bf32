#include "hddm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "hddm/posterior.hpp"

namespace hddm {

void validate_sampler_config(const SamplerConfig& config) {
  if (config.steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (!(config.tau > 0.0)) throw std::invalid_argument("tau must be > 0");
  if (!(config.top_p > 0.0 && config.top_p <= 1.0)) {
    throw std::invalid_argument("top_p must lie in (0, 1]");
  }
}

SizeDistribution SizeDistribution::from_sizes(const std::vector<int>& observed) {
  if (observed.empty()) throw std::invalid_argument("no sizes observed");
  std::vector<int> sorted = observed;
  std::sort(sorted.begin(), sorted.end());
  SizeDistribution dist;
  std::vector<double> counts;
  for (int s : sorted) {
    if (s < 1) throw std::invalid_argument("molecule sizes must be >= 1");
    if (!dist.sizes.empty() && dist.sizes.back() == s) {
      counts.back() += 1.0;
    } else {
      dist.sizes.push_back(s);
      counts.push_back(1.0);
    }
  }
  dist.probs = Eigen::Map<Eigen::VectorXd>(counts.data(), counts.size());
  dist.probs /= dist.probs.sum();
  return dist;
}

SizeDistribution SizeDistribution::point(int n) {
  SizeDistribution dist;
  dist.sizes = {n};
  dist.probs = Eigen::VectorXd::Ones(1);
  return dist;
}

int sample_size(const SizeDistribution& dist, RngStream& rng) {
  if (dist.sizes.empty()) throw std::invalid_argument("empty size histogram");
  return dist.sizes[static_cast<std::size_t>(rng.next_categorical(dist.probs))];
}

Eigen::VectorXd apply_temperature_topp(
    const Eigen::Ref<const Eigen::VectorXd>& probs, double tau, double top_p) {
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be > 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) {
    throw std::invalid_argument("top_p must lie in (0, 1]");
  }
  if ((probs.array() < 0.0).any() || std::abs(probs.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("input is not a probability vector");
  }
  const Eigen::Index k = probs.size();

  Eigen::VectorXd scaled(k);
  if (tau <= 1e-8) {
    Eigen::Index best = 0;
    probs.maxCoeff(&best);
    scaled.setZero();
    scaled[best] = 1.0;
    return scaled;
  }
  if (tau == 1.0) {
    scaled = probs;
  } else {
    Eigen::ArrayXd logits(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      logits[i] = probs[i] > 0.0
                      ? std::log(probs[i]) / tau
                      : -std::numeric_limits<double>::infinity();
    }
    logits -= logits.maxCoeff();
    Eigen::ArrayXd e = logits.exp();
    scaled = (e / e.sum()).matrix();
  }
  if (top_p >= 1.0) return scaled;

  std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&scaled](Eigen::Index a, Eigen::Index b) {
    if (scaled[a] != scaled[b]) return scaled[a] > scaled[b];
    return a < b;
  });
  double cum = 0.0;
  double cutoff = 0.0;
  for (Eigen::Index idx : order) {
    cum += scaled[idx];
    cutoff = scaled[idx];
    if (cum >= top_p - 1e-15) break;
  }
  // Keep everything at or above the cutoff value so equal-probability tokens
  // are treated alike regardless of sort order.
  Eigen::VectorXd kept = (scaled.array() >= cutoff).select(scaled, 0.0);
  return kept / kept.sum();
}

namespace {

struct KernelCache {
  // Cumulative kernels at every grid time i/T for atoms and edges.
  std::vector<TransitionMatrix> atoms;
  std::vector<TransitionMatrix> edges;

  KernelCache(const DiffusionModel& model, int steps) {
    atoms.reserve(steps + 1);
    edges.reserve(steps + 1);
    for (int i = 0; i <= steps; ++i) {
      const double t = static_cast<double>(i) / steps;
      atoms.push_back(cumulative_kernel(model.spec, model.phi, model.alpha,
                                        model.beta, t));
      edges.push_back(edge_kernel(model.edge_dim, model.edge_alpha, 0.0, t));
    }
  }
};

GraphState prior_state(const DiffusionModel& model, int n, RngStream& rng) {
  GraphState g = GraphState::empty(n, 1.0);
  g.nodes.setConstant(model.spec.mask_index());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int token = static_cast<int>(rng.next_uniform() * model.edge_dim);
      g.edges(i, j) = token;
      g.edges(j, i) = token;
    }
  }
  return g;
}

struct ScaffoldClamp {
  const GraphState* scaffold = nullptr;

  void apply(GraphState& g) const {
    if (!scaffold) return;
    const int ns = scaffold->n;
    g.nodes.head(ns) = scaffold->nodes;
    g.edges.topLeftCorner(ns, ns) = scaffold->edges;
  }
};

GraphState project_clean(const DenoiserOutput& out,
                         const SamplerConfig& config, RngStream& rng) {
  const int n = out.n;
  GraphState g0 = GraphState::empty(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd p = apply_temperature_topp(
        out.node_probs.row(i).transpose(), config.tau, config.top_p);
    g0.nodes[i] = rng.next_categorical(p);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int token = rng.next_categorical(out.edge_row(i, j));
      g0.edges(i, j) = token;
      g0.edges(j, i) = token;
    }
  }
  return g0;
}

// Textbook posterior mixture for the uniform edge kernel: the prediction is
// already conditioned on the current state, so it mixes the per-candidate
// posteriors directly: sum_e0 p_theta(e0) q(e_s | e_t, e0).
Eigen::VectorXd edge_model_posterior(int e_t, const Eigen::VectorXd& p_theta,
                                     const TransitionMatrix& q_step,
                                     const TransitionMatrix& q_s) {
  const Eigen::Index d = p_theta.size();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(d);
  for (Eigen::Index e0 = 0; e0 < d; ++e0) {
    if (p_theta[e0] == 0.0) continue;
    Eigen::VectorXd u(d);
    for (Eigen::Index es = 0; es < d; ++es) u[es] = q_step(es, e_t) * q_s(e0, es);
    const double norm = u.sum();
    if (norm <= 0.0) {
      throw std::domain_error("edge candidate cannot reach the current state");
    }
    p += p_theta[e0] * (u / norm);
  }
  return p;
}

std::vector<GraphState> run_sampler(const Denoiser& denoiser,
                                    const SamplerConfig& config,
                                    const DiffusionModel& model,
                                    const SizeDistribution& sizes,
                                    int n_samples,
                                    const ScaffoldClamp& clamp) {
  validate_sampler_config(config);
  validate_partition(model.spec);
  const int T = config.steps;
  const KernelCache cache(model, T);
  const RngStream master(config.seed);

  std::vector<GraphState> results;
  results.reserve(static_cast<std::size_t>(n_samples));
  for (int s_idx = 0; s_idx < n_samples; ++s_idx) {
    RngStream rng = master.substream(static_cast<std::uint64_t>(s_idx));
    const int n = sample_size(sizes, rng);
    GraphState g = prior_state(model, n, rng);
    clamp.apply(g);

    for (int i = T; i >= 1; --i) {
      const double t = static_cast<double>(i) / T;
      const double s = static_cast<double>(i - 1) / T;
      g.t = t;
      const DenoiserOutput out = denoiser(g, t);

      if (config.mode == SamplerConfig::Mode::PN) {
        const GraphState g0 = project_clean(out, config, rng);
        if (i == 1) {
          g = g0;
        } else {
          // Re-noise the projected candidate straight to the previous grid
          // time, bypassing the posterior of the current state.
          GraphState next = GraphState::empty(n, s);
          for (int v = 0; v < n; ++v) {
            next.nodes[v] =
                rng.next_categorical(cache.atoms[i - 1].row(g0.nodes[v]).transpose());
          }
          for (int v = 0; v < n; ++v) {
            for (int w = v + 1; w < n; ++w) {
              const int token = rng.next_categorical(
                  cache.edges[i - 1].row(g0.edges(v, w)).transpose());
              next.edges(v, w) = token;
              next.edges(w, v) = token;
            }
          }
          g = next;
        }
      } else {
        GraphState next = GraphState::empty(n, s);
        for (int v = 0; v < n; ++v) {
          const Eigen::VectorXd p = model_posterior(
              {g.nodes[v], out.node_probs.row(v).transpose(), s, t},
              model.spec, model.phi, model.alpha, model.beta);
          next.nodes[v] = rng.next_categorical(p);
        }
        const TransitionMatrix e_step =
            edge_kernel(model.edge_dim, model.edge_alpha, s, t);
        for (int v = 0; v < n; ++v) {
          for (int w = v + 1; w < n; ++w) {
            const Eigen::VectorXd p =
                edge_model_posterior(g.edges(v, w), out.edge_row(v, w), e_step,
                                     cache.edges[i - 1]);
            const int token = rng.next_categorical(p);
            next.edges(v, w) = token;
            next.edges(w, v) = token;
          }
        }
        g = next;
      }
      clamp.apply(g);
    }

    g.t = 0.0;
    for (int v = 0; v < n; ++v) {
      if (!model.spec.is_clean(g.nodes[v])) {
        throw std::logic_error("sampler emitted a non-clean token");
      }
    }
    results.push_back(std::move(g));
  }
  return results;
}

}  // namespace

std::vector<GraphState> pn_sample(const Denoiser& denoiser,
                                  const SamplerConfig& config,
                                  const DiffusionModel& model,
                                  const SizeDistribution& sizes,
                                  int n_samples) {
  SamplerConfig c = config;
  c.mode = SamplerConfig::Mode::PN;
  return run_sampler(denoiser, c, model, sizes, n_samples, {});
}

std::vector<GraphState> ancestral_sample(const Denoiser& denoiser,
                                         const SamplerConfig& config,
                                         const DiffusionModel& model,
                                         const SizeDistribution& sizes,
                                         int n_samples) {
  SamplerConfig c = config;
  c.mode = SamplerConfig::Mode::Ancestral;
  return run_sampler(denoiser, c, model, sizes, n_samples, {});
}

std::vector<GraphState> scaffold_constrained_sample(
    const Denoiser& denoiser, const SamplerConfig& config,
    const DiffusionModel& model, const GraphState& scaffold, int n_total,
    int n_samples) {
  validate_graph_state(scaffold, model.spec.dim(), model.edge_dim);
  if (scaffold.n > n_total) {
    throw std::invalid_argument("scaffold larger than the requested molecule");
  }
  for (int i = 0; i < scaffold.n; ++i) {
    if (!model.spec.is_clean(scaffold.nodes[i])) {
      throw std::invalid_argument("scaffold tokens must be clean");
    }
  }
  const ScaffoldClamp clamp{&scaffold};
  return run_sampler(denoiser, config, model, SizeDistribution::point(n_total),
                     n_samples, clamp);
}

}  // namespace hddm
