#include "isac/model.hpp"

#include <cmath>
#include <stdexcept>

namespace isac {

void SystemConfig::validate() const {
  if (n_tx < 1 || n_rx < 1 || n_targets < 1 || block_len < 1)
    throw std::invalid_argument("SystemConfig: antenna/target/block counts must be positive");
  if (n_users < 0) throw std::invalid_argument("SystemConfig: n_users must be >= 0");
  if (power <= 0.0 || noise_comm <= 0.0 || noise_radar <= 0.0)
    throw std::invalid_argument("SystemConfig: power and noise must be > 0");
  if (rate_threshold < 0.0)
    throw std::invalid_argument("SystemConfig: rate_threshold must be >= 0");
}

namespace {
void check_angle(double theta) {
  if (!(std::abs(theta) < kPi / 2.0))
    throw std::domain_error("steering: angle must lie in (-pi/2, pi/2)");
}
}  // namespace

CVec steering(const ArrayManifold& manifold, double theta) {
  check_angle(theta);
  const double s = std::sin(theta);
  CVec a(manifold.n_elements);
  for (int n = 0; n < manifold.n_elements; ++n) {
    const double phase = kPi * (n - manifold.phase_reference) * s;
    a(n) = cplx(std::cos(phase), std::sin(phase));
  }
  return a;
}

CVec steering_derivative(const ArrayManifold& manifold, double theta) {
  check_angle(theta);
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  CVec da(manifold.n_elements);
  for (int n = 0; n < manifold.n_elements; ++n) {
    const double arg = kPi * (n - manifold.phase_reference);
    const cplx phase(std::cos(arg * s), std::sin(arg * s));
    da(n) = cplx(0.0, arg * c) * phase;
  }
  return da;
}

CMat steering_matrix(const ArrayManifold& manifold, const RVec& angles) {
  CMat a(manifold.n_elements, angles.size());
  for (Eigen::Index m = 0; m < angles.size(); ++m) a.col(m) = steering(manifold, angles(m));
  return a;
}

CMat steering_derivative_matrix(const ArrayManifold& manifold, const RVec& angles) {
  CMat a(manifold.n_elements, angles.size());
  for (Eigen::Index m = 0; m < angles.size(); ++m)
    a.col(m) = steering_derivative(manifold, angles(m));
  return a;
}

TargetSet::TargetSet(RVec theta, CVec beta) : angles(std::move(theta)), coeffs(std::move(beta)) {
  if (angles.size() != coeffs.size())
    throw std::invalid_argument("TargetSet: angles and coeffs must have equal length");
  for (Eigen::Index m = 0; m < angles.size(); ++m) check_angle(angles(m));
}

CMat TargetSet::response_matrix(const ArrayManifold& tx, const ArrayManifold& rx) const {
  const CMat a_t = steering_matrix(tx, angles);
  const CMat a_r = steering_matrix(rx, angles);
  return a_r.conjugate() * coeffs.asDiagonal() * a_t.adjoint();
}

RVec TargetSet::parameter_vector() const {
  const int m = size();
  RVec xi(3 * m);
  xi.head(m) = angles;
  xi.segment(m, m) = beta_re();
  xi.tail(m) = beta_im();
  return xi;
}

ChannelSet generate_rayleigh_channels(const SystemConfig& cfg, RandomSource& rng) {
  ChannelSet set;
  set.model = ChannelModel::rayleigh;
  set.vectors.reserve(static_cast<size_t>(cfg.n_users));
  for (int k = 0; k < cfg.n_users; ++k) set.vectors.push_back(rng.cgaussian_vector(cfg.n_tx));
  return set;
}

ChannelSet generate_rician_channels(const SystemConfig& cfg, const RicianSpec& spec,
                                    RandomSource& rng) {
  if (spec.aod.size() != cfg.n_users)
    throw std::invalid_argument("generate_rician_channels: aod length must equal n_users");
  const double kr = db_to_linear(spec.k_factor_db);
  const double w_los = std::sqrt(kr / (kr + 1.0));
  const double w_nlos = std::sqrt(1.0 / (kr + 1.0));
  const ArrayManifold tx(cfg.n_tx);

  ChannelSet set;
  set.model = ChannelModel::rician;
  set.vectors.reserve(static_cast<size_t>(cfg.n_users));
  for (int k = 0; k < cfg.n_users; ++k) {
    const CVec los = steering(tx, spec.aod(k));
    const CVec nlos = rng.cgaussian_vector(cfg.n_tx);
    set.vectors.push_back(w_los * los + w_nlos * nlos);
  }
  return set;
}

}  // namespace isac
