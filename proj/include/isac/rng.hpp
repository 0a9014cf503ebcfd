#ifndef ISAC_RNG_HPP
#define ISAC_RNG_HPP

#include <cmath>
#include <cstdint>

#include "isac/types.hpp"

namespace isac {

/**
 * Deterministic random source keyed by (seed, stream).
 *
 * xoshiro256++ seeded through splitmix64 so that distinct (seed, stream)
 * pairs give decorrelated streams and identical pairs reproduce the same
 * draws on every platform.  Gaussian variates use the trigonometric
 * Box-Muller transform; no rejection step, so streams stay aligned.
 */
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    for (auto& word : state_) word = splitmix64(x);
  }

  /// Fresh source for a parallel worker; never shares mutable state.
  RandomSource split(std::uint64_t stream) const {
    return RandomSource(base_seed_hash(), stream);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard real Gaussian.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kPi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * kPi * u2);
  }

  /// Circularly-symmetric complex Gaussian, zero mean, unit variance.
  cplx cgaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return cplx(re * M_SQRT1_2, im * M_SQRT1_2);
  }

  CVec cgaussian_vector(Eigen::Index n) {
    CVec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cgaussian();
    return v;
  }

  CMat cgaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
    CMat m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = cgaussian();
    return m;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t base_seed_hash() const {
    return state_[0] ^ rotl(state_[2], 19);
  }

  std::uint64_t state_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace isac

#endif  // ISAC_RNG_HPP
