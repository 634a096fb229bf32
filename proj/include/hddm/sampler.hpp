#ifndef HDDM_SAMPLER_HPP
#define HDDM_SAMPLER_HPP

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "hddm/denoiser.hpp"
#include "hddm/forward.hpp"
#include "hddm/rng.hpp"

namespace hddm {

struct SamplerConfig {
  enum class Mode { PN, Ancestral };

  int steps = 50;       // T >= 1, uniform grid dt = 1/T
  double tau = 1.0;     // temperature, > 0, atoms only
  double top_p = 1.0;   // nucleus threshold in (0, 1], atoms only
  Mode mode = Mode::PN;
  double guidance = 1.0;  // consumed when wiring a conditional denoiser
  std::uint64_t seed = 0;
};

void validate_sampler_config(const SamplerConfig& config);

/// Histogram over molecule sizes.
struct SizeDistribution {
  std::vector<int> sizes;
  Eigen::VectorXd probs;

  static SizeDistribution from_sizes(const std::vector<int>& observed);
  static SizeDistribution point(int n);
};

int sample_size(const SizeDistribution& dist, RngStream& rng);

/// Temperature then nucleus filtering: probabilities are rescaled as
/// softmax(log p / tau) and the smallest descending prefix with cumulative
/// mass >= top_p is kept and renormalized. Ties at the cutoff are all kept so
/// the result is independent of sort order. tau below 1e-8 short-circuits to
/// the argmax (lowest index wins ties).
Eigen::VectorXd apply_temperature_topp(
    const Eigen::Ref<const Eigen::VectorXd>& probs, double tau, double top_p);

/// Project-and-Noise sampling: at every step the denoiser prediction is
/// filtered (atoms only), categorically projected to a clean candidate, and
/// re-noised to the previous grid time with the cumulative kernels. The final
/// projected candidate is the output; emitted states contain no mid or mask
/// tokens.
std::vector<GraphState> pn_sample(const Denoiser& denoiser,
                                  const SamplerConfig& config,
                                  const DiffusionModel& model,
                                  const SizeDistribution& sizes,
                                  int n_samples);

/// Ancestral sampling through the model posterior q(z_s | z_t) for atoms and
/// the uniform-kernel posterior for edges.
std::vector<GraphState> ancestral_sample(const Denoiser& denoiser,
                                         const SamplerConfig& config,
                                         const DiffusionModel& model,
                                         const SizeDistribution& sizes,
                                         int n_samples);

/// Generation with a fixed substructure: the scaffold occupies node indices
/// [0, scaffold.n) and its nodes and internal edges are clamped to their
/// clean tokens at every step; the free region evolves from the prior.
std::vector<GraphState> scaffold_constrained_sample(
    const Denoiser& denoiser, const SamplerConfig& config,
    const DiffusionModel& model, const GraphState& scaffold, int n_total,
    int n_samples);

}  // namespace hddm

#endif  // HDDM_SAMPLER_HPP
