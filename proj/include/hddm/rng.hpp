#ifndef HDDM_RNG_HPP
#define HDDM_RNG_HPP

#include <cstdint>
#include <stdexcept>

#include <Eigen/Dense>

namespace hddm {

/// 64-bit finalizer used everywhere we need a stable, seedable hash.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-based random stream: output i of stream s under seed k is a pure
/// function of (k, s, i), so any draw can be reproduced without replaying the
/// sequence. Streams derived via substream() are independent for practical
/// purposes and never overlap.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  std::uint64_t next_u64() {
    return mix64(mix64(mix64(seed_) ^ stream_) ^ counter_++);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Draws an index from an unnormalized nonnegative weight vector.
  int next_categorical(const Eigen::Ref<const Eigen::VectorXd>& weights) {
    const double total = weights.sum();
    if (!(total > 0.0)) {
      throw std::invalid_argument("categorical draw from all-zero weights");
    }
    double u = next_uniform() * total;
    int last_positive = -1;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      const double w = weights[i];
      if (w < 0.0) {
        throw std::invalid_argument("categorical draw with negative weight");
      }
      if (w > 0.0) {
        last_positive = static_cast<int>(i);
        u -= w;
        if (u <= 0.0) return static_cast<int>(i);
      }
    }
    return last_positive;  // u consumed by rounding; land on final support point
  }

  /// Child stream derived deterministically from this stream's identity.
  RngStream substream(std::uint64_t child) const {
    return RngStream(seed_, mix64(stream_ ^ mix64(child + 1)));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace hddm

#endif  // HDDM_RNG_HPP
