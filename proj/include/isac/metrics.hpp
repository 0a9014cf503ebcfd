#ifndef ISAC_METRICS_HPP
#define ISAC_METRICS_HPP

#include <limits>
#include <vector>

#include "isac/model.hpp"
#include "isac/types.hpp"

namespace isac {

constexpr double kInf = std::numeric_limits<double>::infinity();

/**
 * Hermitian PSD transmit covariance S_x.  The stored matrix is
 * symmetrized on construction; PSD-ness is a caller obligation checked
 * by min_eigenvalue()/is_psd().
 */
class TransmitCovariance {
 public:
  TransmitCovariance() = default;
  explicit TransmitCovariance(const CMat& s) : matrix_(hermitize(s)) {}

  static TransmitCovariance isotropic(const SystemConfig& cfg) {
    return TransmitCovariance(cfg.power / cfg.n_tx *
                              CMat::Identity(cfg.n_tx, cfg.n_tx));
  }

  const CMat& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }
  double trace() const { return matrix_.trace().real(); }
  double min_eigenvalue() const;
  bool is_psd(double tol = 1e-9) const { return min_eigenvalue() >= -tol; }
  bool is_power_feasible(double power, double tol = 1e-6) const {
    return trace() <= power + tol;
  }

 private:
  CMat matrix_;
};

/// Per-user SNRs, the worst user, and the multicast rate (Eq-4 semantics).
struct RateInfo {
  double rate = 0.0;    ///< min_k log2(1 + snr_k), bits/s/Hz
  RVec per_user_snr;    ///< h_k^H S_x h_k / sigma^2
  int argmin_user = -1; ///< ties broken by lowest index
};

RateInfo multicast_rate(const TransmitCovariance& cov, const ChannelSet& channels,
                        const SystemConfig& cfg);

/**
 * Scenario-I metric (N_r sigma_r^2 / L) tr(S_x^{-1}).  Returns +inf when
 * S_x is singular up to the relative floor (rank-deficient transmission
 * cannot resolve the full response matrix).
 */
double crb_scenario1(const TransmitCovariance& cov, const SystemConfig& cfg);

/**
 * Fisher information for xi = [theta; Re(beta); Im(beta)].
 * `matrix` carries the 2/sigma_r^2 prefactor and is explicitly
 * symmetrized; the complex blocks are stored raw (no prefactor).
 */
struct FisherInformation {
  RMat matrix;  ///< 3M x 3M real symmetric, with 2/sigma_r^2 prefactor
  CMat f11;     ///< M x M, angle-angle block
  CMat f12;     ///< M x M, angle-coefficient block
  CMat f22;     ///< M x M, coefficient-coefficient block
};

FisherInformation fisher_information(const TransmitCovariance& cov, const TargetSet& targets,
                                     const ArrayManifold& tx, const ArrayManifold& rx,
                                     const SystemConfig& cfg);

/// Same map evaluated on an arbitrary Hermitian matrix (the FIM is linear in S_x).
FisherInformation fisher_information_of(const CMat& s, const TargetSet& targets,
                                        const ArrayManifold& tx, const ArrayManifold& rx,
                                        const SystemConfig& cfg);

/// tr(F^{-1}); +inf when F is singular up to the relative floor.
double crb_scenario2(const FisherInformation& fim);

/// Convenience: CRB_2 directly from a covariance.
double crb_scenario2(const TransmitCovariance& cov, const TargetSet& targets,
                     const ArrayManifold& tx, const ArrayManifold& rx,
                     const SystemConfig& cfg);

/**
 * Images of the FIM map over a Hermitian coordinate basis of S_x (or of
 * the reduced S-bar when `subspace` has fewer columns than n_tx).  Used
 * to build the affine F(S) entering SDP constraints.  Coordinate order
 * matches SdpProblem's Hermitian parameterization.
 */
std::vector<RMat> fim_basis_images(const TargetSet& targets, const ArrayManifold& tx,
                                   const ArrayManifold& rx, const SystemConfig& cfg,
                                   const CMat* subspace = nullptr);

/// Hermitian coordinate basis element k of dimension n (diag first, then re/im pairs).
CMat hermitian_basis_element(int n, int k);
/// Coordinates of a Hermitian matrix in that basis.
RVec hermitian_coordinates(const CMat& s);
/// Inverse of hermitian_coordinates.
CMat hermitian_from_coordinates(const RVec& x, int n);

}  // namespace isac

#endif  // ISAC_METRICS_HPP
