#ifndef ISAC_SDP_HPP
#define ISAC_SDP_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "isac/ellipsoid.hpp"
#include "isac/types.hpp"

namespace isac {

/**
 * Conic program builder over Hermitian-matrix, complex-vector and scalar
 * variables:
 *
 *     minimize    c^T x
 *     subject to  scalar affine inequalities / equalities,
 *                 affine matrix expressions constrained PSD.
 *
 * Hermitian matrices are parameterized by n^2 real coordinates (diagonal
 * first, then interleaved re/im lower-triangle pairs); complex vectors by
 * interleaved (re, im) pairs.  Complex PSD constraints are enforced through
 * the real embedding [[Re, -Im], [Im, Re]] >= 0; expressions that turn out
 * real-valued stay in the native real symmetric cone.
 */
class SdpProblem {
 public:
  enum class VarKind { hermitian, cvector, scalar };

  struct VarInfo {
    VarKind kind;
    int dim;     ///< matrix/vector dimension (1 for scalars)
    int offset;  ///< first coordinate
    int coords;  ///< number of real coordinates
  };

  int add_hermitian_var(int n);
  int add_complex_vector_var(int n);
  int add_scalar_var();

  /// Objective += tr(C * S) for a Hermitian variable (C Hermitian).
  void add_objective_trace(int var, const CMat& c);
  /// Objective += coeff * t for a scalar variable.
  void add_objective_scalar(int var, double coeff);

  /// Scalar affine row built term by term.
  class RowExpr {
   public:
    explicit RowExpr(const SdpProblem& p) : coeffs_(RVec::Zero(p.num_coords())) {}
    RowExpr& trace_term(const SdpProblem& p, int var, const CMat& c);
    /// += 2 Re(u^H w) for a complex vector variable.
    RowExpr& relin_term(const SdpProblem& p, int var, const CVec& u);
    RowExpr& scalar_term(const SdpProblem& p, int var, double coeff);
    const RVec& coeffs() const { return coeffs_; }

   private:
    RVec coeffs_;
  };

  void add_le(const RowExpr& row, double rhs);   ///< row <= rhs
  void add_ge(const RowExpr& row, double rhs);   ///< row >= rhs
  void add_eq(const RowExpr& row, double rhs);   ///< row == rhs

  /// Affine Hermitian matrix expression, assembled from placements.
  class MatExpr {
   public:
    MatExpr(const SdpProblem& p, int dim);
    void add_const(const CMat& m);
    /// Hermitian variable as the diagonal block starting at (row0, row0).
    void add_hermitian_block(const SdpProblem& p, int var, int row0, double scale = 1.0);
    /// Hermitian variable through a linear map given by per-coordinate images.
    void add_mapped_block(const SdpProblem& p, int var, const std::vector<RMat>& images,
                          int row0, double scale = 1.0);
    /// Complex vector at rows row0.. in column `col` (adjoint entries mirrored).
    void add_vector_block(const SdpProblem& p, int var, int row0, int col);
    /// Scalar variable times a Hermitian coefficient matrix.
    void add_scalar_block(const SdpProblem& p, int var, const CMat& coeff);
    /// tr(C * S) of a Hermitian variable placed at entries (i, j) and (j, i).
    void add_trace_entry(const SdpProblem& p, int var, const CMat& c, int i, int j,
                         double scale = 1.0);

    int dim() const { return dim_; }

   private:
    friend class SdpProblem;
    int dim_;
    CMat constant_;
    std::vector<std::pair<int, CMat>> terms_;  ///< (coordinate, image)
  };

  MatExpr matrix_expr(int dim) const { return MatExpr(*this, dim); }
  void add_psd(const MatExpr& expr);
  /// Shorthand: variable itself PSD.
  void add_psd_var(int var);

  int num_coords() const { return num_coords_; }
  const std::vector<VarInfo>& vars() const { return vars_; }

 private:
  friend struct SdpBackend;
  std::vector<VarInfo> vars_;
  int num_coords_ = 0;
  RVec objective_ = RVec::Zero(0);

  struct ScalarRow {
    RVec coeffs;
    double rhs;
  };
  std::vector<ScalarRow> ineq_rows_;  ///< normalized to coeffs . x <= rhs
  std::vector<ScalarRow> eq_rows_;

  struct PsdBlock {
    int dim;           ///< real symmetric dimension after (possible) embedding
    bool embedded;     ///< true when a complex expression was realified
    RMat constant;     ///< real symmetric constant part
    std::vector<std::pair<int, RMat>> terms;
  };
  std::vector<PsdBlock> psd_blocks_;

  void grow_objective();
};

struct SdpOptions {
  double feastol = 1e-8;
  double abstol = 1e-9;
  double reltol = 1e-9;
  int max_iter = 100;
  std::ostream* trace = nullptr;
};

struct SdpSolution {
  SolveReport report;
  RVec x;  ///< primal coordinates, already de-homogenized

  CMat herm(const SdpProblem& p, int var) const;
  CVec cvec(const SdpProblem& p, int var) const;
  double scalar(const SdpProblem& p, int var) const;
};

/// Primal-dual interior-point solve (homogeneous self-dual embedding,
/// Nesterov-Todd scaling, Mehrotra predictor-corrector).
SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& opts = {});

/// Cutting-plane fallback: same problem minimized by the ellipsoid method
/// with min-eigenvector cuts on the PSD blocks.  `radius` must bound the
/// coordinates of an optimum.  Cross-validation tool, not the fast path.
SdpSolution solve_sdp_ellipsoid(const SdpProblem& problem, double radius,
                                const EllipsoidOptions& opts = {});

}  // namespace isac

#endif  // ISAC_SDP_HPP
