#include "isac/sdp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "isac/metrics.hpp"

namespace isac {

// ---------------------------------------------------------------------------
// Problem builder
// ---------------------------------------------------------------------------

void SdpProblem::grow_objective() {
  RVec next = RVec::Zero(num_coords_);
  next.head(objective_.size()) = objective_;
  objective_ = next;
}

int SdpProblem::add_hermitian_var(int n) {
  if (n < 1) throw std::invalid_argument("add_hermitian_var: dimension must be positive");
  vars_.push_back({VarKind::hermitian, n, num_coords_, n * n});
  num_coords_ += n * n;
  grow_objective();
  return static_cast<int>(vars_.size()) - 1;
}

int SdpProblem::add_complex_vector_var(int n) {
  if (n < 1) throw std::invalid_argument("add_complex_vector_var: dimension must be positive");
  vars_.push_back({VarKind::cvector, n, num_coords_, 2 * n});
  num_coords_ += 2 * n;
  grow_objective();
  return static_cast<int>(vars_.size()) - 1;
}

int SdpProblem::add_scalar_var() {
  vars_.push_back({VarKind::scalar, 1, num_coords_, 1});
  num_coords_ += 1;
  grow_objective();
  return static_cast<int>(vars_.size()) - 1;
}

namespace {

// Row coefficients of tr(C * S) in the Hermitian coordinate basis.
void trace_coefficients(const CMat& c, int n, RVec& out, int offset) {
  for (int k = 0; k < n; ++k) out(offset + k) += c(k, k).real();
  int idx = offset + n;
  for (int j = 0; j < n; ++j) {
    for (int i = j + 1; i < n; ++i) {
      out(idx++) += 2.0 * c(i, j).real();
      out(idx++) += 2.0 * c(i, j).imag();
    }
  }
}

}  // namespace

SdpProblem::RowExpr& SdpProblem::RowExpr::trace_term(const SdpProblem& p, int var,
                                                     const CMat& c) {
  const VarInfo& v = p.vars()[static_cast<size_t>(var)];
  if (v.kind != VarKind::hermitian || c.rows() != v.dim || c.cols() != v.dim)
    throw std::invalid_argument("trace_term: variable/coefficient mismatch");
  trace_coefficients(c, v.dim, coeffs_, v.offset);
  return *this;
}

SdpProblem::RowExpr& SdpProblem::RowExpr::relin_term(const SdpProblem& p, int var,
                                                     const CVec& u) {
  const VarInfo& v = p.vars()[static_cast<size_t>(var)];
  if (v.kind != VarKind::cvector || u.size() != v.dim)
    throw std::invalid_argument("relin_term: variable/vector mismatch");
  for (int j = 0; j < v.dim; ++j) {
    coeffs_(v.offset + 2 * j) += 2.0 * u(j).real();
    coeffs_(v.offset + 2 * j + 1) += 2.0 * u(j).imag();
  }
  return *this;
}

SdpProblem::RowExpr& SdpProblem::RowExpr::scalar_term(const SdpProblem& p, int var,
                                                      double coeff) {
  const VarInfo& v = p.vars()[static_cast<size_t>(var)];
  if (v.kind != VarKind::scalar) throw std::invalid_argument("scalar_term: not a scalar var");
  coeffs_(v.offset) += coeff;
  return *this;
}

void SdpProblem::add_objective_trace(int var, const CMat& c) {
  const VarInfo& v = vars_[static_cast<size_t>(var)];
  if (v.kind != VarKind::hermitian || c.rows() != v.dim)
    throw std::invalid_argument("add_objective_trace: variable/coefficient mismatch");
  trace_coefficients(c, v.dim, objective_, v.offset);
}

void SdpProblem::add_objective_scalar(int var, double coeff) {
  const VarInfo& v = vars_[static_cast<size_t>(var)];
  if (v.kind != VarKind::scalar)
    throw std::invalid_argument("add_objective_scalar: not a scalar var");
  objective_(v.offset) += coeff;
}

void SdpProblem::add_le(const RowExpr& row, double rhs) {
  ineq_rows_.push_back({row.coeffs(), rhs});
}

void SdpProblem::add_ge(const RowExpr& row, double rhs) {
  ineq_rows_.push_back({-row.coeffs(), -rhs});
}

void SdpProblem::add_eq(const RowExpr& row, double rhs) {
  eq_rows_.push_back({row.coeffs(), rhs});
}

SdpProblem::MatExpr::MatExpr(const SdpProblem&, int dim)
    : dim_(dim), constant_(CMat::Zero(dim, dim)) {}

void SdpProblem::MatExpr::add_const(const CMat& m) {
  if (m.rows() != dim_ || m.cols() != dim_)
    throw std::invalid_argument("MatExpr::add_const: dimension mismatch");
  constant_ += m;
}

void SdpProblem::MatExpr::add_hermitian_block(const SdpProblem& p, int var, int row0,
                                              double scale) {
  const VarInfo& v = p.vars()[static_cast<size_t>(var)];
  if (v.kind != VarKind::hermitian) throw std::invalid_argument("not a hermitian var");
  if (row0 + v.dim > dim_) throw std::invalid_argument("hermitian block out of range");
  for (int k = 0; k < v.coords; ++k) {
    CMat img = CMat::Zero(dim_, dim_);
    img.block(row0, row0, v.dim, v.dim) = scale * hermitian_basis_element(v.dim, k);
    terms_.emplace_back(v.offset + k, std::move(img));
  }
}

void SdpProblem::MatExpr::add_mapped_block(const SdpProblem& p, int var,
                                           const std::vector<RMat>& images, int row0,
                                           double scale) {
  const VarInfo& v = p.vars()[static_cast<size_t>(var)];
  if (static_cast<int>(images.size()) != v.coords)
    throw std::invalid_argument("add_mapped_block: one image per coordinate required");
  const int bd = static_cast<int>(images.front().rows());
  if (row0 + bd > dim_) throw std::invalid_argument("mapped block out of range");
  for (int k = 0; k < v.coords; ++k) {
    CMat img = CMat::Zero(dim_, dim_);
    img.block(row0, row0, bd, bd) = scale * images[static_cast<size_t>(k)];
    terms_.emplace_back(v.offset + k, std::move(img));
  }
}

void SdpProblem::MatExpr::add_vector_block(const SdpProblem& p, int var, int row0, int col) {
  const VarInfo& v = p.vars()[static_cast<size_t>(var)];
  if (v.kind != VarKind::cvector) throw std::invalid_argument("not a complex vector var");
  if (row0 + v.dim > dim_ || col >= dim_) throw std::invalid_argument("vector block out of range");
  for (int j = 0; j < v.dim; ++j) {
    CMat re_img = CMat::Zero(dim_, dim_);
    re_img(row0 + j, col) = 1.0;
    re_img(col, row0 + j) = 1.0;
    terms_.emplace_back(v.offset + 2 * j, std::move(re_img));
    CMat im_img = CMat::Zero(dim_, dim_);
    im_img(row0 + j, col) = cplx(0.0, 1.0);
    im_img(col, row0 + j) = cplx(0.0, -1.0);
    terms_.emplace_back(v.offset + 2 * j + 1, std::move(im_img));
  }
}

void SdpProblem::MatExpr::add_scalar_block(const SdpProblem& p, int var, const CMat& coeff) {
  const VarInfo& v = p.vars()[static_cast<size_t>(var)];
  if (v.kind != VarKind::scalar) throw std::invalid_argument("not a scalar var");
  if (coeff.rows() != dim_) throw std::invalid_argument("scalar block dimension mismatch");
  terms_.emplace_back(v.offset, coeff);
}

void SdpProblem::MatExpr::add_trace_entry(const SdpProblem& p, int var, const CMat& c, int i,
                                          int j, double scale) {
  const VarInfo& v = p.vars()[static_cast<size_t>(var)];
  if (v.kind != VarKind::hermitian || c.rows() != v.dim)
    throw std::invalid_argument("add_trace_entry: variable/coefficient mismatch");
  RVec coeffs = RVec::Zero(p.num_coords());
  trace_coefficients(c, v.dim, coeffs, v.offset);
  for (int k = 0; k < v.coords; ++k) {
    const double val = scale * coeffs(v.offset + k);
    if (val == 0.0) continue;
    CMat img = CMat::Zero(dim_, dim_);
    img(i, j) += val;
    if (i != j) img(j, i) += val;
    terms_.emplace_back(v.offset + k, std::move(img));
  }
}

namespace {

RMat embed_hermitian(const CMat& m) {
  const int n = static_cast<int>(m.rows());
  RMat e(2 * n, 2 * n);
  e.topLeftCorner(n, n) = m.real();
  e.topRightCorner(n, n) = -m.imag();
  e.bottomLeftCorner(n, n) = m.imag();
  e.bottomRightCorner(n, n) = m.real();
  return e;
}

bool effectively_real(const CMat& m) { return m.imag().cwiseAbs().maxCoeff() <= 1e-12; }

}  // namespace

void SdpProblem::add_psd(const MatExpr& expr) {
  bool real = effectively_real(expr.constant_);
  for (const auto& [coord, img] : expr.terms_)
    if (real && !effectively_real(img)) real = false;

  PsdBlock block;
  block.embedded = !real;
  block.dim = real ? expr.dim_ : 2 * expr.dim_;
  block.constant = real ? RMat(expr.constant_.real()) : embed_hermitian(expr.constant_);
  block.terms.reserve(expr.terms_.size());
  for (const auto& [coord, img] : expr.terms_)
    block.terms.emplace_back(coord, real ? RMat(img.real()) : embed_hermitian(img));
  psd_blocks_.push_back(std::move(block));
}

void SdpProblem::add_psd_var(int var) {
  const VarInfo& v = vars_[static_cast<size_t>(var)];
  MatExpr expr(*this, v.dim);
  expr.add_hermitian_block(*this, var, 0);
  add_psd(expr);
}

CMat SdpSolution::herm(const SdpProblem& p, int var) const {
  const auto& v = p.vars()[static_cast<size_t>(var)];
  return hermitian_from_coordinates(x.segment(v.offset, v.coords), v.dim);
}

CVec SdpSolution::cvec(const SdpProblem& p, int var) const {
  const auto& v = p.vars()[static_cast<size_t>(var)];
  CVec w(v.dim);
  for (int j = 0; j < v.dim; ++j) w(j) = cplx(x(v.offset + 2 * j), x(v.offset + 2 * j + 1));
  return w;
}

double SdpSolution::scalar(const SdpProblem& p, int var) const {
  return x(p.vars()[static_cast<size_t>(var)].offset);
}

// ---------------------------------------------------------------------------
// Conic backend shared by the interior-point and ellipsoid paths
// ---------------------------------------------------------------------------

namespace {
constexpr double kSqrt2 = 1.41421356237309504880;

int svec_size(int nb) { return nb * (nb + 1) / 2; }

void svec_into(const RMat& m, RVec& v, int offset) {
  const int nb = static_cast<int>(m.rows());
  int idx = offset;
  for (int j = 0; j < nb; ++j) {
    v(idx++) = m(j, j);
    for (int i = j + 1; i < nb; ++i) v(idx++) = kSqrt2 * m(i, j);
  }
}

RMat smat(const Eigen::Ref<const RVec>& v, int nb) {
  RMat m(nb, nb);
  int idx = 0;
  for (int j = 0; j < nb; ++j) {
    m(j, j) = v(idx++);
    for (int i = j + 1; i < nb; ++i) {
      const double val = v(idx++) / kSqrt2;
      m(i, j) = val;
      m(j, i) = val;
    }
  }
  return m;
}
}  // namespace

struct SdpBackend {
  int n = 0;      // coordinates
  int p = 0;      // equality rows
  int m = 0;      // cone rows
  int n_lin = 0;  // leading nonnegative rows
  std::vector<int> psd_dims;
  std::vector<int> psd_offsets;
  RVec c, h, b;
  RMat G, A;

  explicit SdpBackend(const SdpProblem& prob) {
    n = prob.num_coords();
    c = prob.objective_;
    p = static_cast<int>(prob.eq_rows_.size());
    n_lin = static_cast<int>(prob.ineq_rows_.size());
    m = n_lin;
    for (const auto& block : prob.psd_blocks_) {
      psd_dims.push_back(block.dim);
      psd_offsets.push_back(m);
      m += svec_size(block.dim);
    }
    G = RMat::Zero(m, n);
    h = RVec::Zero(m);
    for (int i = 0; i < n_lin; ++i) {
      G.row(i) = prob.ineq_rows_[static_cast<size_t>(i)].coeffs.transpose();
      h(i) = prob.ineq_rows_[static_cast<size_t>(i)].rhs;
    }
    for (size_t kb = 0; kb < prob.psd_blocks_.size(); ++kb) {
      const auto& block = prob.psd_blocks_[kb];
      const int off = psd_offsets[kb];
      const int sz = svec_size(block.dim);
      svec_into(block.constant, h, off);
      RVec col = RVec::Zero(sz);
      for (const auto& [coord, img] : block.terms) {
        col.setZero();
        svec_into(img, col, 0);
        G.block(off, coord, sz, 1) -= col;
      }
    }
    A = RMat::Zero(p, n);
    b = RVec::Zero(p);
    for (int i = 0; i < p; ++i) {
      A.row(i) = prob.eq_rows_[static_cast<size_t>(i)].coeffs.transpose();
      b(i) = prob.eq_rows_[static_cast<size_t>(i)].rhs;
    }
  }

  int num_psd() const { return static_cast<int>(psd_dims.size()); }
  double barrier_degree() const {
    double nu = n_lin;
    for (int d : psd_dims) nu += d;
    return nu;
  }
};

// ---------------------------------------------------------------------------
// Interior-point method on the homogeneous self-dual embedding
// ---------------------------------------------------------------------------

namespace {

// Nesterov-Todd scaling state: W z and W^{-T} s both map to the common
// scaled point lambda.
struct NtScaling {
  RVec d_lin;    // sqrt(s ./ z) on the orthant
  RVec lam_lin;  // sqrt(s .* z)
  std::vector<RMat> r, rti;
  std::vector<RVec> lam_psd;
};

enum class WMode { w, wt, winv, winvt };

class Ipm {
 public:
  Ipm(const SdpBackend& bk, const SdpOptions& opts) : bk_(bk), opts_(opts) {}

  SdpSolution run();

 private:
  const SdpBackend& bk_;
  const SdpOptions& opts_;

  RVec x_, y_, z_, s_;
  double tau_ = 1.0, kappa_ = 1.0;

  NtScaling sc_;
  RMat gs_;        // W^{-T} G
  RVec h_scaled_;  // W^{-T} h
  Eigen::PartialPivLU<RMat> kkt_;
  RMat kkt_mat_;
  RVec dx1_, dy1_, dz1_;  // solution of the static (-c, b, h) system

  struct Direction {
    RVec dx, dy, dzb, dsb;  // dzb/dsb live in scaled space
    double dtau = 0.0, dkappa = 0.0;
  };

  RVec cone_identity() const {
    RVec e = RVec::Zero(bk_.m);
    e.head(bk_.n_lin).setOnes();
    for (int kb = 0; kb < bk_.num_psd(); ++kb)
      svec_into(RMat::Identity(bk_.psd_dims[kb], bk_.psd_dims[kb]), e, bk_.psd_offsets[kb]);
    return e;
  }

  bool compute_scaling();
  RVec apply_w(const RVec& v, WMode mode) const;
  void scale_columns(const RMat& src, RMat& dst) const;  // dst = W^{-T} src
  bool factor_kkt();
  void solve_kkt3(const RVec& r1, const RVec& r2, const RVec& r3, RVec& dx, RVec& dy,
                  RVec& dzb) const;
  Direction direction(const RVec& bx, const RVec& by, const RVec& bz, double btau,
                      const RVec& dcompl, double btk) const;
  RVec lambda_solve(const RVec& d) const;       // solve lambda o u = d
  RVec lambda_product(const RVec& a, const RVec& b) const;  // a o b in scaled space
  double step_to_boundary(const RVec& dir) const;
  double cone_min_eig_step(const RVec& lam, const RMat& d) const;
};

bool Ipm::compute_scaling() {
  sc_.d_lin = (s_.head(bk_.n_lin).array() / z_.head(bk_.n_lin).array()).sqrt();
  sc_.lam_lin = (s_.head(bk_.n_lin).array() * z_.head(bk_.n_lin).array()).sqrt();
  sc_.r.assign(static_cast<size_t>(bk_.num_psd()), RMat());
  sc_.rti.assign(static_cast<size_t>(bk_.num_psd()), RMat());
  sc_.lam_psd.assign(static_cast<size_t>(bk_.num_psd()), RVec());
  for (int kb = 0; kb < bk_.num_psd(); ++kb) {
    const int nb = bk_.psd_dims[kb];
    const int off = bk_.psd_offsets[kb];
    const RMat sm = smat(s_.segment(off, svec_size(nb)), nb);
    const RMat zm = smat(z_.segment(off, svec_size(nb)), nb);
    Eigen::LLT<RMat> ls(sm), lz(zm);
    if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
    const RMat lsm = ls.matrixL();
    const RMat lzm = lz.matrixL();
    Eigen::JacobiSVD<RMat> svd(lzm.transpose() * lsm,
                               Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVec lam = svd.singularValues();
    if (lam.minCoeff() <= 0.0) return false;
    const RVec sq = lam.cwiseSqrt();
    RMat r = lzm.transpose().triangularView<Eigen::Upper>().solve(svd.matrixU());
    r = r * sq.asDiagonal();
    RMat rti = lzm * svd.matrixU();
    rti = rti * sq.cwiseInverse().asDiagonal();
    sc_.r[static_cast<size_t>(kb)] = std::move(r);
    sc_.rti[static_cast<size_t>(kb)] = std::move(rti);
    sc_.lam_psd[static_cast<size_t>(kb)] = lam;
  }
  return true;
}

RVec Ipm::apply_w(const RVec& v, WMode mode) const {
  RVec out(bk_.m);
  switch (mode) {
    case WMode::w:
    case WMode::wt:
      out.head(bk_.n_lin) = sc_.d_lin.cwiseProduct(v.head(bk_.n_lin));
      break;
    case WMode::winv:
    case WMode::winvt:
      out.head(bk_.n_lin) = v.head(bk_.n_lin).cwiseQuotient(sc_.d_lin);
      break;
  }
  for (int kb = 0; kb < bk_.num_psd(); ++kb) {
    const int nb = bk_.psd_dims[kb];
    const int off = bk_.psd_offsets[kb];
    const RMat vm = smat(v.segment(off, svec_size(nb)), nb);
    const RMat& r = sc_.r[static_cast<size_t>(kb)];
    const RMat& rti = sc_.rti[static_cast<size_t>(kb)];
    RMat res;
    switch (mode) {
      case WMode::w: res = r.transpose() * vm * r; break;
      case WMode::wt: res = r * vm * r.transpose(); break;
      case WMode::winv: res = rti * vm * rti.transpose(); break;
      case WMode::winvt: res = rti.transpose() * vm * rti; break;
    }
    svec_into(symmetrize(res), out, off);
  }
  return out;
}

void Ipm::scale_columns(const RMat& src, RMat& dst) const {
  dst.resize(bk_.m, src.cols());
  for (Eigen::Index col = 0; col < src.cols(); ++col)
    dst.col(col) = apply_w(src.col(col), WMode::winvt);
}

bool Ipm::factor_kkt() {
  const int n = bk_.n, p = bk_.p;
  RMat hmat = gs_.transpose() * gs_;
  hmat.diagonal().array() += 1e-13 * std::max(1.0, hmat.trace() / n);
  kkt_mat_.resize(n + p, n + p);
  kkt_mat_.topLeftCorner(n, n) = hmat;
  if (p > 0) {
    kkt_mat_.topRightCorner(n, p) = bk_.A.transpose();
    kkt_mat_.bottomLeftCorner(p, n) = bk_.A;
    kkt_mat_.bottomRightCorner(p, p).setZero();
  }
  kkt_.compute(kkt_mat_);
  return true;
}

void Ipm::solve_kkt3(const RVec& r1, const RVec& r2, const RVec& r3, RVec& dx, RVec& dy,
                     RVec& dzb) const {
  const int n = bk_.n, p = bk_.p;
  const RVec r3s = apply_w(r3, WMode::winvt);
  RVec rhs(n + p);
  rhs.head(n) = r1 + gs_.transpose() * r3s;
  if (p > 0) rhs.tail(p) = r2;
  RVec sol = kkt_.solve(rhs);
  // One round of iterative refinement keeps the reduced solve accurate
  // even when the scaling matrix is badly conditioned near convergence.
  const RVec resid = rhs - kkt_mat_ * sol;
  sol += kkt_.solve(resid);
  dx = sol.head(n);
  dy = p > 0 ? RVec(sol.tail(p)) : RVec();
  dzb = gs_ * dx - r3s;
}

RVec Ipm::lambda_solve(const RVec& d) const {
  RVec out(bk_.m);
  out.head(bk_.n_lin) = d.head(bk_.n_lin).cwiseQuotient(sc_.lam_lin);
  for (int kb = 0; kb < bk_.num_psd(); ++kb) {
    const int nb = bk_.psd_dims[kb];
    const int off = bk_.psd_offsets[kb];
    const RMat dm = smat(d.segment(off, svec_size(nb)), nb);
    const RVec& lam = sc_.lam_psd[static_cast<size_t>(kb)];
    RMat um(nb, nb);
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j) um(i, j) = 2.0 * dm(i, j) / (lam(i) + lam(j));
    svec_into(um, out, off);
  }
  return out;
}

RVec Ipm::lambda_product(const RVec& a, const RVec& b) const {
  RVec out(bk_.m);
  out.head(bk_.n_lin) = a.head(bk_.n_lin).cwiseProduct(b.head(bk_.n_lin));
  for (int kb = 0; kb < bk_.num_psd(); ++kb) {
    const int nb = bk_.psd_dims[kb];
    const int off = bk_.psd_offsets[kb];
    const RMat am = smat(a.segment(off, svec_size(nb)), nb);
    const RMat bm = smat(b.segment(off, svec_size(nb)), nb);
    svec_into(RMat(0.5 * (am * bm + bm * am)), out, off);
  }
  return out;
}

double Ipm::cone_min_eig_step(const RVec& lam, const RMat& d) const {
  // Largest alpha with diag(lam) + alpha * d psd.
  const int nb = static_cast<int>(lam.size());
  RMat t(nb, nb);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) t(i, j) = d(i, j) / std::sqrt(lam(i) * lam(j));
  Eigen::SelfAdjointEigenSolver<RMat> es(t, Eigen::EigenvaluesOnly);
  const double emin = es.eigenvalues().minCoeff();
  return emin < 0.0 ? 1.0 / (-emin) : kInf;
}

double Ipm::step_to_boundary(const RVec& dir) const {
  double alpha = kInf;
  for (int i = 0; i < bk_.n_lin; ++i)
    if (dir(i) < 0.0) alpha = std::min(alpha, -sc_.lam_lin(i) / dir(i));
  for (int kb = 0; kb < bk_.num_psd(); ++kb) {
    const int nb = bk_.psd_dims[kb];
    const int off = bk_.psd_offsets[kb];
    const RMat dm = smat(dir.segment(off, svec_size(nb)), nb);
    alpha = std::min(alpha, cone_min_eig_step(sc_.lam_psd[static_cast<size_t>(kb)], dm));
  }
  return alpha;
}

Ipm::Direction Ipm::direction(const RVec& bx, const RVec& by, const RVec& bz, double btau,
                              const RVec& dcompl, double btk) const {
  Direction d;
  const RVec dtilde = lambda_solve(dcompl);
  const RVec bzp = bz - apply_w(dtilde, WMode::wt);
  RVec dx0, dy0, dz0;
  solve_kkt3(bx, by, bzp, dx0, dy0, dz0);

  const double cb0 = bk_.c.dot(dx0) + (bk_.p > 0 ? bk_.b.dot(dy0) : 0.0) + h_scaled_.dot(dz0);
  const double cb1 = bk_.c.dot(dx1_) + (bk_.p > 0 ? bk_.b.dot(dy1_) : 0.0) + h_scaled_.dot(dz1_);
  const double denom = cb1 - kappa_ / tau_;
  d.dtau = (btau - btk / tau_ - cb0) / denom;
  d.dx = dx0 + d.dtau * dx1_;
  if (bk_.p > 0) d.dy = dy0 + d.dtau * dy1_;
  d.dzb = dz0 + d.dtau * dz1_;
  d.dsb = dtilde - d.dzb;
  d.dkappa = (btk - kappa_ * d.dtau) / tau_;
  return d;
}

SdpSolution Ipm::run() {
  SdpSolution out;
  const int n = bk_.n, p = bk_.p;
  const double nu = bk_.barrier_degree();

  x_ = RVec::Zero(n);
  y_ = RVec::Zero(p);
  s_ = cone_identity();
  z_ = s_;
  tau_ = kappa_ = 1.0;

  const double hnorm = 1.0 + bk_.h.norm();
  const double cnorm = 1.0 + bk_.c.norm();
  const double bnorm = 1.0 + (p > 0 ? bk_.b.norm() : 0.0);

  double best_err = kInf;
  RVec best_x;
  double best_obj = 0.0, best_pres = 0.0, best_gap = 0.0;
  bool failed = false;
  int iter = 0;

  for (; iter < opts_.max_iter; ++iter) {
    // Residuals of the homogeneous embedding.
    const RVec rx = (p > 0 ? RVec(bk_.A.transpose() * y_) : RVec(RVec::Zero(n))) +
                    bk_.G.transpose() * z_ + bk_.c * tau_;
    const RVec ry = p > 0 ? RVec(bk_.A * x_ - bk_.b * tau_) : RVec();
    const RVec rz = bk_.G * x_ + s_ - bk_.h * tau_;
    const double rtau = kappa_ + bk_.c.dot(x_) + (p > 0 ? bk_.b.dot(y_) : 0.0) + bk_.h.dot(z_);

    const double gap_hom = s_.dot(z_);
    const double mu = (gap_hom + tau_ * kappa_) / (nu + 1.0);

    // De-homogenized convergence metrics.
    const double pcost = bk_.c.dot(x_) / tau_;
    const double dcost = -(bk_.h.dot(z_) + (p > 0 ? bk_.b.dot(y_) : 0.0)) / tau_;
    const double gap = gap_hom / (tau_ * tau_);
    const double relgap = gap / std::max({1.0, std::abs(pcost), std::abs(dcost)});
    const double pres =
        std::max(rz.norm() / tau_ / hnorm, p > 0 ? ry.norm() / tau_ / bnorm : 0.0);
    const double dres = rx.norm() / tau_ / cnorm;

    if (opts_.trace)
      *opts_.trace << "ipm " << iter << " pcost " << pcost << " dcost " << dcost << " gap "
                   << gap << " pres " << pres << " dres " << dres << " tau " << tau_
                   << " kappa " << kappa_ << "\n";

    const double err = std::max({pres, dres, relgap});
    if (err < best_err) {
      best_err = err;
      best_x = x_ / tau_;
      best_obj = pcost;
      best_pres = pres;
      best_gap = gap;
    }

    if (pres <= opts_.feastol && dres <= opts_.feastol &&
        (gap <= opts_.abstol || relgap <= opts_.reltol)) {
      out.report.status = SolveStatus::optimal;
      out.x = x_ / tau_;
      out.report.objective = pcost;
      out.report.primal_residual = pres;
      out.report.dual_gap = gap;
      out.report.iterations = iter;
      return out;
    }

    // Infeasibility certificates of the embedding.
    const double hzby = bk_.h.dot(z_) + (p > 0 ? bk_.b.dot(y_) : 0.0);
    if (hzby < 0.0) {
      const RVec cert = (p > 0 ? RVec(bk_.A.transpose() * y_) : RVec(RVec::Zero(n))) +
                        bk_.G.transpose() * z_;
      if (cert.norm() / (-hzby) <= opts_.feastol * 10.0 && tau_ <= 1e-2 * kappa_) {
        out.report.status = SolveStatus::infeasible;
        out.report.objective = kInf;
        out.report.iterations = iter;
        out.x = RVec::Zero(n);
        return out;
      }
    }
    const double cx = bk_.c.dot(x_);
    if (cx < 0.0) {
      const double cert = std::max((bk_.G * x_ + s_).norm(), p > 0 ? (bk_.A * x_).norm() : 0.0);
      if (cert / (-cx) <= opts_.feastol * 10.0 && tau_ <= 1e-2 * kappa_) {
        out.report.status = SolveStatus::unbounded;
        out.report.objective = -kInf;
        out.report.iterations = iter;
        out.x = RVec::Zero(n);
        return out;
      }
    }

    if (!compute_scaling()) {
      failed = true;
      break;
    }
    scale_columns(bk_.G, gs_);
    h_scaled_ = apply_w(bk_.h, WMode::winvt);
    factor_kkt();
    solve_kkt3(-bk_.c, p > 0 ? RVec(bk_.b) : RVec(), bk_.h, dx1_, dy1_, dz1_);

    RVec lam(bk_.m);
    lam.head(bk_.n_lin) = sc_.lam_lin;
    for (int kb = 0; kb < bk_.num_psd(); ++kb)
      svec_into(RMat(sc_.lam_psd[static_cast<size_t>(kb)].asDiagonal()), lam,
                bk_.psd_offsets[kb]);

    // Predictor (affine) direction.
    const RVec neg_ll = -lambda_product(lam, lam);
    const Direction aff =
        direction(-rx, p > 0 ? RVec(-ry) : RVec(), -rz, -rtau, neg_ll, -tau_ * kappa_);

    double alpha_aff = std::min(
        {step_to_boundary(aff.dsb), step_to_boundary(aff.dzb),
         aff.dtau < 0.0 ? -tau_ / aff.dtau : kInf, aff.dkappa < 0.0 ? -kappa_ / aff.dkappa : kInf,
         1.0});
    const double mu_aff = ((lam + alpha_aff * aff.dsb).dot(lam + alpha_aff * aff.dzb) +
                           (tau_ + alpha_aff * aff.dtau) * (kappa_ + alpha_aff * aff.dkappa)) /
                          (nu + 1.0);
    double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
    sigma = std::min(1.0, sigma);

    // Corrector (combined) direction.
    RVec e = RVec::Zero(bk_.m);
    e.head(bk_.n_lin).setOnes();
    for (int kb = 0; kb < bk_.num_psd(); ++kb)
      svec_into(RMat::Identity(bk_.psd_dims[kb], bk_.psd_dims[kb]), e, bk_.psd_offsets[kb]);
    const RVec dcompl = sigma * mu * e + neg_ll - lambda_product(aff.dsb, aff.dzb);
    const double btk = sigma * mu - tau_ * kappa_ - aff.dtau * aff.dkappa;
    const double rscale = 1.0 - sigma;
    const Direction dir = direction(-rscale * rx, p > 0 ? RVec(-rscale * ry) : RVec(),
                                    -rscale * rz, -rscale * rtau, dcompl, btk);

    double alpha = std::min(
        {step_to_boundary(dir.dsb), step_to_boundary(dir.dzb),
         dir.dtau < 0.0 ? -tau_ / dir.dtau : kInf, dir.dkappa < 0.0 ? -kappa_ / dir.dkappa : kInf});
    alpha = std::min(1.0, 0.99 * alpha);
    if (!(alpha > 1e-9) || !std::isfinite(alpha)) {
      failed = true;
      break;
    }

    x_ += alpha * dir.dx;
    if (p > 0) y_ += alpha * dir.dy;
    s_ += alpha * apply_w(dir.dsb, WMode::wt);
    z_ += alpha * apply_w(dir.dzb, WMode::winv);
    tau_ += alpha * dir.dtau;
    kappa_ += alpha * dir.dkappa;
  }

  out.report.status = failed ? SolveStatus::numerical_failure : SolveStatus::max_iter;
  out.x = best_x.size() > 0 ? best_x : RVec(RVec::Zero(n));
  out.report.objective = best_obj;
  out.report.primal_residual = best_pres;
  out.report.dual_gap = best_gap;
  out.report.iterations = iter;
  return out;
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& opts) {
  SdpBackend backend(problem);
  Ipm ipm(backend, opts);
  return ipm.run();
}

// ---------------------------------------------------------------------------
// Ellipsoid fallback with min-eigenvector cuts
// ---------------------------------------------------------------------------

SdpSolution solve_sdp_ellipsoid(const SdpProblem& problem, double radius,
                                const EllipsoidOptions& opts) {
  SdpBackend bk(problem);
  if (bk.p > 0)
    throw std::invalid_argument("solve_sdp_ellipsoid: equality rows are not supported");

  std::vector<Oracle> cuts;
  for (int i = 0; i < bk.n_lin; ++i) {
    const RVec coeffs = bk.G.row(i).transpose();
    const double rhs = bk.h(i);
    cuts.push_back([coeffs, rhs](const RVec& x) {
      return OracleResult{coeffs.dot(x) - rhs, coeffs};
    });
  }
  for (int kb = 0; kb < bk.num_psd(); ++kb) {
    const int nb = bk.psd_dims[kb];
    const int off = bk.psd_offsets[kb];
    const int sz = svec_size(nb);
    const RMat gblock = bk.G.block(off, 0, sz, bk.n);
    const RVec hblock = bk.h.segment(off, sz);
    cuts.push_back([gblock, hblock, nb](const RVec& x) {
      const RVec sv = hblock - gblock * x;
      const RMat f = smat(sv, nb);
      Eigen::SelfAdjointEigenSolver<RMat> es(f);
      int idx = 0;
      es.eigenvalues().minCoeff(&idx);
      const RVec v = es.eigenvectors().col(idx);
      RVec vv(sv.size());
      svec_into(RMat(v * v.transpose()), vv, 0);
      // constraint -v^T F(x) v <= 0; F(x) = smat(h - Gx)
      OracleResult r;
      r.value = -es.eigenvalues().minCoeff();
      r.grad = gblock.transpose() * vv;
      return r;
    });
  }
  const RVec c = bk.c;
  Oracle obj = [c](const RVec& x) { return OracleResult{c.dot(x), c}; };

  auto res = ellipsoid_minimize(obj, cuts, EllipsoidState::ball(RVec::Zero(bk.n), radius), opts);
  SdpSolution sol;
  sol.x = res.minimizer;
  sol.report = res.report;
  return sol;
}

}  // namespace isac
