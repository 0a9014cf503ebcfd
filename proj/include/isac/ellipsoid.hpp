#ifndef ISAC_ELLIPSOID_HPP
#define ISAC_ELLIPSOID_HPP

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "isac/types.hpp"

namespace isac {

enum class SolveStatus { optimal, infeasible, unbounded, max_iter, numerical_failure };

std::string to_string(SolveStatus status);

struct SolveReport {
  SolveStatus status = SolveStatus::numerical_failure;
  double objective = 0.0;
  double primal_residual = 0.0;  ///< worst constraint violation at the returned point
  double dual_gap = 0.0;         ///< optimality-gap estimate
  int iterations = 0;
};

/// Center/shape pair; the shape matrix stays symmetric positive definite
/// and its determinant (ellipsoid volume) strictly decreases per cut.
struct EllipsoidState {
  RVec center;
  RMat shape;
  int iteration = 0;

  static EllipsoidState ball(const RVec& center, double radius);
};

/**
 * Oracle value/subgradient pair.  For the objective, `value` is the
 * objective; for a constraint cut, `value` is the violation (<= 0 when
 * satisfied) and `grad` a subgradient of the constraint function.
 */
struct OracleResult {
  double value = 0.0;
  RVec grad;
};

using Oracle = std::function<OracleResult(const RVec&)>;

struct EllipsoidOptions {
  double tol = 1e-6;        ///< stop when sqrt(g^T P g) <= tol on an objective cut
  double feas_tol = 1e-9;   ///< iterate counts as feasible when all cuts <= this
  int max_iter = 0;         ///< 0 => automatic (20 d^2 floor, raised for tight tol)
  std::ostream* trace = nullptr;  ///< optional per-iteration log
};

struct EllipsoidResult {
  RVec minimizer;
  SolveReport report;
  EllipsoidState final_state;
};

/**
 * Central-cut ellipsoid method for min f(x) s.t. cuts_j(x) <= 0.
 * The initial ellipsoid must contain an optimum (caller's obligation).
 * Returns the best feasible iterate seen.
 */
EllipsoidResult ellipsoid_minimize(const Oracle& objective, const std::vector<Oracle>& cuts,
                                   const EllipsoidState& init, const EllipsoidOptions& opts = {});

}  // namespace isac

#endif  // ISAC_ELLIPSOID_HPP
