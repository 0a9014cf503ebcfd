#include "isac/ellipsoid.hpp"

#include <cmath>
#include <limits>

namespace isac {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

EllipsoidState EllipsoidState::ball(const RVec& center, double radius) {
  EllipsoidState state;
  state.center = center;
  state.shape = radius * radius * RMat::Identity(center.size(), center.size());
  return state;
}

EllipsoidResult ellipsoid_minimize(const Oracle& objective, const std::vector<Oracle>& cuts,
                                   const EllipsoidState& init, const EllipsoidOptions& opts) {
  const int d = static_cast<int>(init.center.size());
  // 20 d^2 is enough at loose tolerances; the floor covers tol ~ 1e-9 runs
  // whose iteration count scales with d^2 log(R/tol).
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : std::max(20 * d * d, 4000);

  EllipsoidResult out;
  out.final_state = init;
  RVec& x = out.final_state.center;
  RMat& shape = out.final_state.shape;

  double best_obj = std::numeric_limits<double>::infinity();
  RVec best_x;
  double best_violation = std::numeric_limits<double>::infinity();
  double last_obj_width = std::numeric_limits<double>::infinity();
  bool failed = false;

  int iter = 0;
  for (; iter < max_iter; ++iter) {
    // Constraint cut if any cut is violated at the center, else objective cut.
    RVec g;
    bool is_objective_cut = true;
    double worst_violation = 0.0;
    for (const auto& cut : cuts) {
      const OracleResult r = cut(x);
      worst_violation = std::max(worst_violation, r.value);
      if (r.value > opts.feas_tol && is_objective_cut) {
        g = r.grad;
        is_objective_cut = false;
      }
    }
    if (is_objective_cut) {
      const OracleResult r = objective(x);
      g = r.grad;
      if (r.value < best_obj) {
        best_obj = r.value;
        best_x = x;
        best_violation = worst_violation;
      }
    }

    const double gpg = std::max(0.0, g.dot(shape * g));
    const double width = std::sqrt(gpg);
    if (is_objective_cut) {
      last_obj_width = width;
      if (width <= opts.tol) {  // covers a vanishing subgradient at an optimum
        ++iter;
        break;
      }
    }
    if (!(gpg > 0.0) || !std::isfinite(gpg)) {
      failed = true;
      break;
    }
    if (opts.trace) {
      *opts.trace << "ellipsoid iter " << iter << (is_objective_cut ? " obj" : " cut")
                  << " width " << width << " best " << best_obj << "\n";
    }

    const RVec pg = shape * g / width;
    x -= pg / (d + 1.0);
    if (d == 1) {
      shape *= 0.25;
    } else {
      shape = (d * d / (d * d - 1.0)) * (shape - (2.0 / (d + 1.0)) * (pg * pg.transpose()));
      shape = symmetrize(shape);
    }
    out.final_state.iteration = iter + 1;
  }

  out.report.iterations = iter;
  if (best_x.size() == 0) {
    out.report.status = SolveStatus::infeasible;
    out.minimizer = x;
    return out;
  }
  out.minimizer = best_x;
  out.report.objective = best_obj;
  out.report.primal_residual = best_violation;
  out.report.dual_gap = last_obj_width;
  out.report.status = failed ? SolveStatus::numerical_failure
                     : (last_obj_width <= opts.tol) ? SolveStatus::optimal
                                                    : SolveStatus::max_iter;
  return out;
}

}  // namespace isac
