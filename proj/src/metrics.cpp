#include "isac/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace isac {

namespace {

// Relative floor below which a nominally PD matrix is treated as singular;
// the paper-level statement "CRB -> inf" needs a numeric threshold.
bool effectively_singular(const RVec& eigs, Eigen::Index dim) {
  const double floor = 1e-9 * (eigs.sum() / static_cast<double>(dim));
  return eigs.minCoeff() <= std::max(floor, 0.0);
}

}  // namespace

double TransmitCovariance::min_eigenvalue() const {
  if (matrix_.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMat> es(matrix_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

RateInfo multicast_rate(const TransmitCovariance& cov, const ChannelSet& channels,
                        const SystemConfig& cfg) {
  const int k_users = channels.n_users();
  if (k_users < 1) throw std::invalid_argument("multicast_rate: undefined for K = 0");
  RateInfo info;
  info.per_user_snr.resize(k_users);
  for (int k = 0; k < k_users; ++k) {
    const CVec& h = channels[k];
    if (h.size() != cov.dim())
      throw std::invalid_argument("multicast_rate: channel/covariance dimension mismatch");
    const double rx_power = std::real((h.adjoint() * cov.matrix() * h)(0));
    info.per_user_snr(k) = rx_power / cfg.noise_comm;
  }
  info.per_user_snr.minCoeff(&info.argmin_user);
  info.rate = std::log2(1.0 + info.per_user_snr(info.argmin_user));
  return info;
}

double crb_scenario1(const TransmitCovariance& cov, const SystemConfig& cfg) {
  Eigen::SelfAdjointEigenSolver<CMat> es(cov.matrix(), Eigen::EigenvaluesOnly);
  const RVec eigs = es.eigenvalues();
  if (effectively_singular(eigs, cov.dim())) return kInf;
  const double tr_inv = eigs.cwiseInverse().sum();
  return cfg.n_rx * cfg.noise_radar / cfg.block_len * tr_inv;
}

FisherInformation fisher_information_of(const CMat& s, const TargetSet& targets,
                                        const ArrayManifold& tx, const ArrayManifold& rx,
                                        const SystemConfig& cfg) {
  const int m = targets.size();
  if (m < 1) throw std::invalid_argument("fisher_information: M >= 1 required");
  if (s.rows() != tx.n_elements || s.cols() != tx.n_elements)
    throw std::invalid_argument("fisher_information: covariance dimension mismatch");

  const CMat a_t = steering_matrix(tx, targets.angles);
  const CMat a_r = steering_matrix(rx, targets.angles);
  const CMat da_t = steering_derivative_matrix(tx, targets.angles);
  const CMat da_r = steering_derivative_matrix(rx, targets.angles);
  const CMat st = s.transpose();
  const double len = static_cast<double>(cfg.block_len);

  // Receive-side and transmit-side Gram factors of the block formulas.
  const CMat g_rr = a_r.transpose() * a_r.conjugate();
  const CMat g_dr = da_r.transpose() * a_r.conjugate();
  const CMat g_rd = a_r.transpose() * da_r.conjugate();
  const CMat g_dd = da_r.transpose() * da_r.conjugate();

  const CMat t_aa = a_t.transpose() * st * a_t.conjugate();
  const CMat t_ad = a_t.transpose() * st * da_t.conjugate();
  const CMat t_da = da_t.transpose() * st * a_t.conjugate();
  const CMat t_dd = da_t.transpose() * st * da_t.conjugate();

  // beta^c beta^T Hadamard weight for the two-sided diag(beta) sandwiches.
  const CMat bb = targets.coeffs.conjugate() * targets.coeffs.transpose();

  FisherInformation fim;
  fim.f11 = len * (g_dd.cwiseProduct(bb.cwiseProduct(t_aa)) +
                   g_dr.cwiseProduct(bb.cwiseProduct(t_ad)) +
                   g_rd.cwiseProduct(bb.cwiseProduct(t_da)) +
                   g_rr.cwiseProduct(bb.cwiseProduct(t_dd)));
  const CMat bc = targets.coeffs.conjugate().asDiagonal();
  fim.f12 = len * (g_dr.cwiseProduct(bc * t_aa) + g_rr.cwiseProduct(bc * t_da));
  fim.f22 = len * g_rr.cwiseProduct(t_aa);

  const double pref = 2.0 / cfg.noise_radar;
  RMat f(3 * m, 3 * m);
  f.block(0, 0, m, m) = fim.f11.real();
  f.block(0, m, m, m) = fim.f12.real();
  f.block(0, 2 * m, m, m) = -fim.f12.imag();
  f.block(m, 0, m, m) = fim.f12.real().transpose();
  f.block(m, m, m, m) = fim.f22.real();
  f.block(m, 2 * m, m, m) = -fim.f22.imag();
  f.block(2 * m, 0, m, m) = -fim.f12.imag().transpose();
  f.block(2 * m, m, m, m) = -fim.f22.imag().transpose();
  f.block(2 * m, 2 * m, m, m) = fim.f22.real();
  fim.matrix = symmetrize(pref * f);
  return fim;
}

FisherInformation fisher_information(const TransmitCovariance& cov, const TargetSet& targets,
                                     const ArrayManifold& tx, const ArrayManifold& rx,
                                     const SystemConfig& cfg) {
  return fisher_information_of(cov.matrix(), targets, tx, rx, cfg);
}

double crb_scenario2(const FisherInformation& fim) {
  Eigen::SelfAdjointEigenSolver<RMat> es(fim.matrix, Eigen::EigenvaluesOnly);
  const RVec eigs = es.eigenvalues();
  if (effectively_singular(eigs, fim.matrix.rows())) return kInf;
  return eigs.cwiseInverse().sum();
}

double crb_scenario2(const TransmitCovariance& cov, const TargetSet& targets,
                     const ArrayManifold& tx, const ArrayManifold& rx,
                     const SystemConfig& cfg) {
  return crb_scenario2(fisher_information(cov, targets, tx, rx, cfg));
}

CMat hermitian_basis_element(int n, int k) {
  CMat b = CMat::Zero(n, n);
  if (k < n) {
    b(k, k) = 1.0;
    return b;
  }
  int idx = k - n;
  for (int j = 0; j < n; ++j) {
    for (int i = j + 1; i < n; ++i) {
      if (idx == 0) {
        b(i, j) = 1.0;
        b(j, i) = 1.0;
        return b;
      }
      if (idx == 1) {
        b(i, j) = cplx(0.0, 1.0);
        b(j, i) = cplx(0.0, -1.0);
        return b;
      }
      idx -= 2;
    }
  }
  throw std::out_of_range("hermitian_basis_element: index out of range");
}

RVec hermitian_coordinates(const CMat& s) {
  const int n = static_cast<int>(s.rows());
  RVec x(n * n);
  for (int k = 0; k < n; ++k) x(k) = s(k, k).real();
  int idx = n;
  for (int j = 0; j < n; ++j) {
    for (int i = j + 1; i < n; ++i) {
      x(idx++) = s(i, j).real();
      x(idx++) = s(i, j).imag();
    }
  }
  return x;
}

CMat hermitian_from_coordinates(const RVec& x, int n) {
  CMat s = CMat::Zero(n, n);
  for (int k = 0; k < n; ++k) s(k, k) = x(k);
  int idx = n;
  for (int j = 0; j < n; ++j) {
    for (int i = j + 1; i < n; ++i) {
      const cplx v(x(idx), x(idx + 1));
      idx += 2;
      s(i, j) = v;
      s(j, i) = std::conj(v);
    }
  }
  return s;
}

std::vector<RMat> fim_basis_images(const TargetSet& targets, const ArrayManifold& tx,
                                   const ArrayManifold& rx, const SystemConfig& cfg,
                                   const CMat* subspace) {
  const int n = subspace ? static_cast<int>(subspace->cols()) : tx.n_elements;
  std::vector<RMat> images;
  images.reserve(static_cast<size_t>(n) * n);
  for (int k = 0; k < n * n; ++k) {
    CMat b = hermitian_basis_element(n, k);
    if (subspace) b = (*subspace) * b * subspace->adjoint();
    images.push_back(fisher_information_of(b, targets, tx, rx, cfg).matrix);
  }
  return images;
}

}  // namespace isac
