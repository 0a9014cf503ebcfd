#ifndef ISAC_COVARIANCE_OPT_HPP
#define ISAC_COVARIANCE_OPT_HPP

#include <optional>
#include <string>
#include <vector>

#include "isac/metrics.hpp"
#include "isac/sdp.hpp"

namespace isac {

/// Dual variables of the rate-constrained trace-inverse problem:
/// mu_k for the per-user receive-power constraints, lambda for power.
struct DualPoint {
  RVec mu;
  double lambda = 0.0;

  /// A(lambda, {mu_k}) = lambda I - sum_k mu_k h_k h_k^H.
  CMat a_matrix(const ChannelSet& channels, int n_tx) const;
};

/// Inner minimizer of the Lagrangian at a dual-feasible point.
struct InnerMinimizer {
  TransmitCovariance cov;       ///< finite part U diag(alpha^{-1/2}) U^H
  CMat basis;                   ///< eigenvectors U of A
  RVec alpha;                   ///< eigenvalues of A, ascending
  std::vector<int> unbounded;   ///< directions with alpha at the rank floor
};

/// Throws std::domain_error when A is indefinite (dual-infeasible point).
InnerMinimizer inner_minimizer(const DualPoint& point, const ChannelSet& channels,
                               const SystemConfig& cfg);

/// Subgradients used by the dual ellipsoid solve.
struct DualCuts {
  RVec objective_subgradient;  ///< [h_k^H S* h_k - Gamma ...; P - tr(S*)]
  RVec psd_cut;                ///< [v^H H_k v ...; -1], v min-eigenvector of A
};

DualCuts dual_subgradients(const DualPoint& point, const TransmitCovariance& primal,
                           const SystemConfig& cfg, const ChannelSet& channels);

/// One point of the CRB-rate tradeoff.
struct TradeoffPoint {
  int scenario = 1;
  std::string method = "optimal_cov";
  double rate_threshold = 0.0;
  double achieved_rate = 0.0;
  double crb = kInf;
  TransmitCovariance covariance;
  SolveStatus status = SolveStatus::numerical_failure;
  int iterations = 0;
  double wall_ms = 0.0;
};

struct CapacityResult {
  TransmitCovariance cov;  ///< S_x^com
  double t_star = 0.0;     ///< optimal min-user receive power
  double r_max = 0.0;      ///< log2(1 + t*/sigma^2)
  int rank = 0;            ///< eigenvalue count above 1e-7 of the largest
  SolveReport report;
};

/// Max-min-SNR covariance (multicast capacity), solved as an SDP.
CapacityResult solve_capacity(const SystemConfig& cfg, const ChannelSet& channels);

struct P1Options {
  double tol = 1e-9;     ///< ellipsoid stopping tolerance on the dual
  int max_iter = 0;      ///< 0 => automatic
  int max_restarts = 3;  ///< radius escalations if the optimum hugs the boundary
};

/// Scenario-I solution bundle: Proposition-1 primal plus its dual certificate.
struct P1Result {
  TradeoffPoint point;
  DualPoint duals;
  double dual_value = 0.0;       ///< g(lambda, {mu_k}), a lower bound on the optimum
  double primal_raw = 0.0;       ///< tr(S^{-1}) before feasibility repair
  double primal_repaired = 0.0;  ///< tr(S^{-1}) after the (1+delta) rate repair
  double repair_delta = 0.0;
  SolveReport report;
};

/// Rate-constrained CRB_1 minimization via Lagrange duality (ellipsoid on
/// the dual, Proposition-1 primal recovery).
P1Result solve_p1(const SystemConfig& cfg, const ChannelSet& channels,
                  const P1Options& opts = {});

/// Independent oracle for the same problem: Schur-lift SDP min tr(T) with
/// [[T, I], [I, S]] >= 0.  Kept separate from solve_p1 so the two routes
/// cross-validate each other.
struct P1SdpResult {
  TransmitCovariance cov;
  double objective = 0.0;  ///< tr(S^{-1})
  SolveReport report;
};
P1SdpResult solve_p1_sdp(const SystemConfig& cfg, const ChannelSet& channels,
                         const SdpOptions& opts = {});

/// Orthonormal basis of span([A_t, dot A_t, h_1, ..., h_K]) via truncated SVD.
struct SubspaceReduction {
  CMat basis;  ///< n_tx x J, basis^H basis = I_J
  int j() const { return static_cast<int>(basis.cols()); }
};

SubspaceReduction subspace_reduction(const TargetSet& targets, const ArrayManifold& tx,
                                     const ChannelSet& channels);

struct P2Options {
  bool use_reduction = false;
  SdpOptions sdp;
};

struct P2Result {
  TradeoffPoint point;
  double objective = 0.0;  ///< sum of the per-parameter CRB epigraph variables
  int reduced_dim = 0;     ///< J actually used (n_tx when reduction is off)
  SolveReport report;
};

/// Rate-constrained CRB_2 minimization as the Schur-complement SDP over
/// S_x and per-parameter epigraph variables.
P2Result solve_p2(const SystemConfig& cfg, const ChannelSet& channels, const TargetSet& targets,
                  const ArrayManifold& tx, const ArrayManifold& rx, const P2Options& opts = {});

/// Sensing-only corner (rate constraint dropped): closed-form isotropic for
/// Scenario I, the same SDP with Gamma = 0 for Scenario II.
TradeoffPoint solve_sensing_only(const SystemConfig& cfg, const ChannelSet& channels,
                                 int scenario, const TargetSet* targets = nullptr,
                                 const ArrayManifold* tx = nullptr,
                                 const ArrayManifold* rx = nullptr);

/// Desired-beampattern specification on an angle grid.
struct BeampatternSpec {
  RVec grid;  ///< angles, radians
  RVec q;     ///< desired pattern on the grid

  /// Flat pattern (omnidirectional probing).
  static BeampatternSpec uniform(int n_grid = 201);
  /// Unit bands of half-width delta around each target angle.
  static BeampatternSpec banded(const TargetSet& targets, double delta_rad, int n_grid = 201);
};

struct BeampatternResult {
  TradeoffPoint point;
  double matching_error = 0.0;  ///< sum_i (eta q_i - a_i^H S a_i)^2 at the optimum
  double eta = 0.0;
  SolveReport report;
};

/// Least-squares beampattern matching under the rate constraint at full
/// transmit power.  CRB in the returned point follows `scenario`.
BeampatternResult solve_beampattern(const SystemConfig& cfg, const ChannelSet& channels,
                                    const BeampatternSpec& spec, int scenario,
                                    const TargetSet* targets = nullptr,
                                    const ArrayManifold* tx = nullptr,
                                    const ArrayManifold* rx = nullptr);

/// Transmit beampattern a^H(theta) S a(theta) evaluated on a grid.
RVec transmit_beampattern(const TransmitCovariance& cov, const ArrayManifold& tx,
                          const RVec& grid);

}  // namespace isac

#endif  // ISAC_COVARIANCE_OPT_HPP
