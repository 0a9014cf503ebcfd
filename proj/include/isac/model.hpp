#ifndef ISAC_MODEL_HPP
#define ISAC_MODEL_HPP

#include <string>
#include <vector>

#include "isac/rng.hpp"
#include "isac/types.hpp"

namespace isac {

/**
 * Scalar configuration of the ISAC link: array sizes, power budget,
 * per-receiver noise powers, coherent block length and the multicast
 * rate threshold.  Powers and noise are linear (0 dBm noise == 1).
 */
struct SystemConfig {
  int n_tx = 1;             ///< transmit antennas
  int n_rx = 1;             ///< receive antennas
  int n_users = 0;          ///< single-antenna communication users
  int n_targets = 1;        ///< sensing targets
  double power = 1.0;       ///< transmit power budget, linear
  double noise_comm = 1.0;  ///< user receiver noise power, linear
  double noise_radar = 1.0; ///< radar receiver noise power per antenna, linear
  int block_len = 64;       ///< symbols per ISAC block
  double rate_threshold = 0.0;  ///< required multicast rate, bits/s/Hz

  /// Equivalent per-user receive-power threshold for the rate constraint.
  double gamma() const {
    return noise_comm * (std::exp2(rate_threshold) - 1.0);
  }

  void validate() const;
};

/**
 * Half-wavelength uniform linear array with phase reference at element 0.
 */
struct ArrayManifold {
  int n_elements = 1;
  int phase_reference = 0;

  explicit ArrayManifold(int n = 1) : n_elements(n) {}
};

/// Steering vector a(theta), entry n = exp(i*pi*n*sin(theta)).
CVec steering(const ArrayManifold& manifold, double theta);

/// d a(theta)/d theta, entry n = i*pi*n*cos(theta)*exp(i*pi*n*sin(theta)).
CVec steering_derivative(const ArrayManifold& manifold, double theta);

/// Columns a(theta_m) for a set of angles.
CMat steering_matrix(const ArrayManifold& manifold, const RVec& angles);
CMat steering_derivative_matrix(const ArrayManifold& manifold, const RVec& angles);

/**
 * Target angles and complex reflection coefficients.  All angles are
 * radians in (-pi/2, pi/2).
 */
struct TargetSet {
  RVec angles;  ///< theta_m
  CVec coeffs;  ///< beta_m

  TargetSet() = default;
  TargetSet(RVec theta, CVec beta);

  int size() const { return static_cast<int>(angles.size()); }
  RVec beta_re() const { return coeffs.real(); }
  RVec beta_im() const { return coeffs.imag(); }

  /// Multi-target response matrix G = A_r^c diag(beta) A_t^H (n_rx x n_tx).
  CMat response_matrix(const ArrayManifold& tx, const ArrayManifold& rx) const;

  /// Stacked real parameter vector [theta; Re(beta); Im(beta)], length 3M.
  RVec parameter_vector() const;
};

enum class ChannelModel { rayleigh, rician };

/// Downlink channel vectors h_k, one per user.
struct ChannelSet {
  std::vector<CVec> vectors;
  ChannelModel model = ChannelModel::rayleigh;

  int n_users() const { return static_cast<int>(vectors.size()); }
  const CVec& operator[](int k) const { return vectors[static_cast<size_t>(k)]; }
};

struct RicianSpec {
  double k_factor_db = 4.0;
  RVec aod;  ///< line-of-sight departure angle per user, radians
};

/// K i.i.d. CN(0, I) channel vectors.
ChannelSet generate_rayleigh_channels(const SystemConfig& cfg, RandomSource& rng);

/// Rician mix sqrt(Kr/(Kr+1)) a(aod_k) + sqrt(1/(Kr+1)) h_NLoS.
ChannelSet generate_rician_channels(const SystemConfig& cfg, const RicianSpec& spec,
                                    RandomSource& rng);

}  // namespace isac

#endif  // ISAC_MODEL_HPP
