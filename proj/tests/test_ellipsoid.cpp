#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "isac/ellipsoid.hpp"
#include "isac/metrics.hpp"
#include "isac/rng.hpp"

using namespace isac;

TEST_CASE("ellipsoid: smooth 1-d quadratic on an interval") {
  Oracle obj = [](const RVec& x) {
    return OracleResult{x(0) * x(0), (RVec(1) << 2.0 * x(0)).finished()};
  };
  std::vector<Oracle> cuts = {
      [](const RVec& x) { return OracleResult{x(0) - 1.0, (RVec(1) << 1.0).finished()}; },
      [](const RVec& x) { return OracleResult{-x(0) - 1.0, (RVec(1) << -1.0).finished()}; },
  };
  EllipsoidOptions opts;
  opts.tol = 1e-7;
  const auto res =
      ellipsoid_minimize(obj, cuts, EllipsoidState::ball((RVec(1) << 0.7).finished(), 2.0), opts);
  CHECK(res.report.status == SolveStatus::optimal);
  CHECK(std::abs(res.minimizer(0)) < 1e-3);
  CHECK(res.report.objective < 1e-6);
}

TEST_CASE("ellipsoid: 3-variable LP against vertex enumeration") {
  // min c.x s.t. A x <= b (includes a bounding box so vertices exist).
  RandomSource rng(4242);
  const int n = 3;
  const int extra = 5;
  std::vector<RVec> rows;
  std::vector<double> rhs;
  for (int i = 0; i < extra; ++i) {
    RVec a(n);
    for (int j = 0; j < n; ++j) a(j) = 2.0 * rng.uniform() - 1.0;
    rows.push_back(a);
    rhs.push_back(1.0 + rng.uniform());
  }
  for (int j = 0; j < n; ++j) {
    rows.push_back(RVec::Unit(n, j));
    rhs.push_back(2.0);
    rows.push_back(-RVec::Unit(n, j));
    rhs.push_back(2.0);
  }
  RVec c(n);
  c << 1.0, -0.5, 0.25;

  // Brute-force vertex oracle: all 3-subsets of active constraints.
  const int m = static_cast<int>(rows.size());
  double best = kInf;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (int k = j + 1; k < m; ++k) {
        RMat a(3, 3);
        a.row(0) = rows[static_cast<size_t>(i)].transpose();
        a.row(1) = rows[static_cast<size_t>(j)].transpose();
        a.row(2) = rows[static_cast<size_t>(k)].transpose();
        if (std::abs(a.determinant()) < 1e-9) continue;
        const RVec v = a.partialPivLu().solve(
            (RVec(3) << rhs[static_cast<size_t>(i)], rhs[static_cast<size_t>(j)],
             rhs[static_cast<size_t>(k)])
                .finished());
        bool feas = true;
        for (int r = 0; r < m; ++r)
          if (rows[static_cast<size_t>(r)].dot(v) > rhs[static_cast<size_t>(r)] + 1e-9)
            feas = false;
        if (feas) best = std::min(best, c.dot(v));
      }
  REQUIRE(best < kInf);

  std::vector<Oracle> cuts;
  for (int i = 0; i < m; ++i) {
    const RVec a = rows[static_cast<size_t>(i)];
    const double bi = rhs[static_cast<size_t>(i)];
    cuts.push_back([a, bi](const RVec& x) { return OracleResult{a.dot(x) - bi, a}; });
  }
  Oracle obj = [c](const RVec& x) { return OracleResult{c.dot(x), c}; };
  EllipsoidOptions opts;
  opts.tol = 1e-8;
  const auto res =
      ellipsoid_minimize(obj, cuts, EllipsoidState::ball(RVec::Zero(3), 6.0), opts);
  CHECK(res.report.status == SolveStatus::optimal);
  CHECK(res.report.objective == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("ellipsoid: volume shrinks at the standard rate") {
  Oracle obj = [](const RVec& x) {
    return OracleResult{x.squaredNorm(), RVec(2.0 * x)};
  };
  const int d = 4;
  EllipsoidOptions opts;
  opts.tol = 1e-10;
  opts.max_iter = 120;
  const auto res = ellipsoid_minimize(obj, {}, EllipsoidState::ball(RVec::Ones(d), 3.0), opts);
  const int iters = res.final_state.iteration;
  REQUIRE(iters >= 100);
  // sqrt(det P) tracks the volume; the central-cut bound is exp(-k/(2(d+1))).
  const double log_vol_init = d * std::log(3.0);
  const double log_vol_final = 0.5 * std::log(res.final_state.shape.determinant());
  CHECK(log_vol_final - log_vol_init <= -iters / (2.0 * (d + 1)) + 1e-9);
}

TEST_CASE("ellipsoid: infeasible cuts yield infeasible status") {
  Oracle obj = [](const RVec& x) { return OracleResult{x(0), (RVec(1) << 1.0).finished()}; };
  std::vector<Oracle> cuts = {
      [](const RVec& x) { return OracleResult{x(0) - 10.0, (RVec(1) << 1.0).finished()}; },
      [](const RVec& x) { return OracleResult{-x(0) + 11.0, (RVec(1) << -1.0).finished()}; },
  };
  EllipsoidOptions opts;
  opts.max_iter = 200;
  const auto res =
      ellipsoid_minimize(obj, cuts, EllipsoidState::ball(RVec::Zero(1), 100.0), opts);
  CHECK(res.report.status == SolveStatus::infeasible);
}
