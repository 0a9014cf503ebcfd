#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "isac/metrics.hpp"
#include "isac/rng.hpp"

using namespace isac;

namespace {

ChannelSet make_channels(std::vector<CVec> hs) {
  ChannelSet set;
  set.vectors = std::move(hs);
  return set;
}

TransmitCovariance random_psd(int n, RandomSource& rng, double scale = 1.0) {
  const CMat a = rng.cgaussian_matrix(n, n);
  return TransmitCovariance(scale * (a * a.adjoint() / n) +
                            0.1 * scale * CMat::Identity(n, n));
}

}  // namespace

TEST_CASE("multicast rate: single basis-vector user") {
  SystemConfig cfg;
  cfg.n_tx = 3;
  cfg.n_users = 1;
  CVec h = CVec::Zero(3);
  h(0) = 1.0;
  const auto channels = make_channels({h});
  const RateInfo info =
      multicast_rate(TransmitCovariance(CMat::Identity(3, 3)), channels, cfg);
  CHECK(info.rate == doctest::Approx(1.0));
  CHECK(info.argmin_user == 0);
}

TEST_CASE("multicast rate: min semantics over two users") {
  SystemConfig cfg;
  cfg.n_tx = 2;
  cfg.n_users = 2;
  CVec h1 = CVec::Zero(2), h2 = CVec::Zero(2);
  h1(0) = std::sqrt(3.0);  // SNR 3
  h2(1) = 1.0;             // SNR 1
  const auto channels = make_channels({h1, h2});
  const RateInfo info =
      multicast_rate(TransmitCovariance(CMat::Identity(2, 2)), channels, cfg);
  CHECK(info.rate == doctest::Approx(1.0));
  CHECK(info.argmin_user == 1);
  CHECK(info.per_user_snr(0) == doctest::Approx(3.0));
}

TEST_CASE("multicast rate: no users is an error") {
  SystemConfig cfg;
  cfg.n_tx = 2;
  ChannelSet empty;
  CHECK_THROWS_AS(multicast_rate(TransmitCovariance(CMat::Identity(2, 2)), empty, cfg),
                  std::invalid_argument);
}

TEST_CASE("multicast rate: matches direct re-evaluation on a random instance") {
  SystemConfig cfg;
  cfg.n_tx = 5;
  cfg.n_users = 4;
  cfg.noise_comm = 1.7;
  RandomSource rng(99);
  std::vector<CVec> hs;
  for (int k = 0; k < 4; ++k) hs.push_back(rng.cgaussian_vector(5));
  const auto channels = make_channels(hs);
  const TransmitCovariance cov = random_psd(5, rng);

  double best = kInf;
  for (int k = 0; k < 4; ++k) {
    const double snr = std::real((hs[k].adjoint() * cov.matrix() * hs[k])(0)) / cfg.noise_comm;
    best = std::min(best, std::log2(1.0 + snr));
  }
  CHECK(multicast_rate(cov, channels, cfg).rate == doctest::Approx(best));
}

TEST_CASE("per-user SNR is linear in the covariance") {
  SystemConfig cfg;
  cfg.n_tx = 4;
  cfg.n_users = 2;
  RandomSource rng(3);
  const auto channels = make_channels({rng.cgaussian_vector(4), rng.cgaussian_vector(4)});
  const TransmitCovariance s1 = random_psd(4, rng), s2 = random_psd(4, rng);
  const TransmitCovariance sum(s1.matrix() + s2.matrix());
  const RVec lhs = multicast_rate(sum, channels, cfg).per_user_snr;
  const RVec rhs = multicast_rate(s1, channels, cfg).per_user_snr +
                   multicast_rate(s2, channels, cfg).per_user_snr;
  CHECK((lhs - rhs).norm() < 1e-10);
}

TEST_CASE("crb scenario 1: closed forms") {
  SystemConfig cfg;
  cfg.n_tx = 10;
  cfg.n_rx = 10;
  cfg.noise_radar = 1.0;
  cfg.block_len = 64;
  cfg.power = 10.0;
  const TransmitCovariance iso = TransmitCovariance::isotropic(cfg);
  CHECK(crb_scenario1(iso, cfg) == doctest::Approx(1.5625).epsilon(1e-9));

  SystemConfig small;
  small.n_tx = 2;
  small.n_rx = 1;
  small.noise_radar = 1.0;
  small.block_len = 1;
  CMat d = CMat::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 2.0;
  CHECK(crb_scenario1(TransmitCovariance(d), small) == doctest::Approx(1.5));
}

TEST_CASE("crb scenario 1: rank-deficient covariance reports infinity") {
  SystemConfig cfg;
  cfg.n_tx = 2;
  cfg.n_rx = 2;
  CVec v(2);
  v << 1.0, cplx(0.0, 1.0);
  const TransmitCovariance rank1(v * v.adjoint());
  CHECK(crb_scenario1(rank1, cfg) == kInf);
}

TEST_CASE("crb scenario 1: monotone in the psd order and scaling") {
  SystemConfig cfg;
  cfg.n_tx = 4;
  cfg.n_rx = 3;
  cfg.block_len = 16;
  RandomSource rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const TransmitCovariance base = random_psd(4, rng);
    const CVec u = rng.cgaussian_vector(4);
    const TransmitCovariance bumped(base.matrix() + u * u.adjoint());
    CHECK(crb_scenario1(bumped, cfg) <= crb_scenario1(base, cfg) + 1e-12);

    const double c = 0.3 + rng.uniform();
    CHECK(crb_scenario1(TransmitCovariance(c * base.matrix()), cfg) ==
          doctest::Approx(crb_scenario1(base, cfg) / c));
  }
}

TEST_CASE("fisher information: closed-form block at broadside") {
  SystemConfig cfg;
  cfg.n_tx = 6;
  cfg.n_rx = 5;
  cfg.block_len = 32;
  cfg.power = 4.0;
  cfg.noise_radar = 0.5;
  TargetSet one((RVec(1) << 0.0).finished(), (CVec(1) << cplx(1.0, 0.0)).finished());
  ArrayManifold tx(6), rx(5);
  const auto fim =
      fisher_information(TransmitCovariance::isotropic(cfg), one, tx, rx, cfg);
  // a_t^T S^T a_t^c = P, a_r^T a_r^c = N_r, so F22 = L N_r P
  CHECK(fim.f22(0, 0).real() ==
        doctest::Approx(32.0 * 5.0 * 4.0).epsilon(1e-12));
  CHECK(std::abs(fim.f22(0, 0).imag()) < 1e-9);
}

TEST_CASE("fisher information: symmetric, psd, linear in block length") {
  SystemConfig cfg;
  cfg.n_tx = 4;
  cfg.n_rx = 4;
  cfg.block_len = 10;
  RandomSource rng(5);
  TargetSet targets((RVec(2) << -0.52, 0.61).finished(),
                    (CVec(2) << cplx(0.9, 0.2), cplx(-0.4, 0.7)).finished());
  ArrayManifold tx(4), rx(4);
  const TransmitCovariance cov = random_psd(4, rng);
  const auto fim = fisher_information(cov, targets, tx, rx, cfg);
  CHECK((fim.matrix - fim.matrix.transpose()).norm() < 1e-10);
  Eigen::SelfAdjointEigenSolver<RMat> es(fim.matrix, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() > -1e-9 * fim.matrix.trace());

  SystemConfig doubled = cfg;
  doubled.block_len = 20;
  const auto fim2 = fisher_information(cov, targets, tx, rx, doubled);
  CHECK((fim2.matrix - 2.0 * fim.matrix).norm() < 1e-8);
}

TEST_CASE("fisher information: matches finite differences of the mean map") {
  // Oracle: F[i,j] = (2/sigma_r^2) Re(dmu_i^H dmu_j) with mu = vec(A_r^c B A_t^H X)
  // and the closed form evaluated at the exact sample covariance X X^H / L.
  RandomSource rng(2024);
  for (int inst = 0; inst < 4; ++inst) {
    const int m = inst % 2 == 0 ? 1 : 2;
    SystemConfig cfg;
    cfg.n_tx = 4;
    cfg.n_rx = 3;
    cfg.n_targets = m;
    cfg.block_len = 8;
    cfg.noise_radar = 0.8;
    ArrayManifold tx(cfg.n_tx), rx(cfg.n_rx);

    RVec angles(m);
    CVec coeffs(m);
    for (int i = 0; i < m; ++i) {
      angles(i) = -1.0 + 1.3 * i + 0.2 * rng.uniform();
      coeffs(i) = cplx(0.5 + rng.uniform(), rng.uniform() - 0.5);
    }
    TargetSet targets(angles, coeffs);

    const CMat x = rng.cgaussian_matrix(cfg.n_tx, cfg.block_len);
    const CMat sample_cov = x * x.adjoint() / cfg.block_len;
    const RMat f = fisher_information_of(sample_cov, targets, tx, rx, cfg).matrix;

    auto mu = [&](const RVec& xi) {
      TargetSet t(xi.head(m),
                  (xi.segment(m, m).cast<cplx>() + cplx(0.0, 1.0) * xi.tail(m).cast<cplx>()));
      const CMat g = t.response_matrix(tx, rx);
      const CMat y = g * x;
      return CVec(Eigen::Map<const CVec>(y.data(), y.size()));
    };

    const RVec xi0 = targets.parameter_vector();
    const double h = 1e-5;
    std::vector<CVec> dmu(static_cast<size_t>(3 * m));
    for (int i = 0; i < 3 * m; ++i) {
      RVec xp = xi0, xm = xi0;
      xp(i) += h;
      xm(i) -= h;
      dmu[static_cast<size_t>(i)] = (mu(xp) - mu(xm)) / (2.0 * h);
    }
    RMat f_fd(3 * m, 3 * m);
    for (int i = 0; i < 3 * m; ++i)
      for (int j = 0; j < 3 * m; ++j)
        f_fd(i, j) = 2.0 / cfg.noise_radar *
                     std::real(dmu[static_cast<size_t>(i)].dot(dmu[static_cast<size_t>(j)]));
    CHECK((f - f_fd).norm() / f.norm() < 1e-4);
  }
}

TEST_CASE("crb scenario 2: diagonal toy and direct-inverse oracle") {
  FisherInformation toy;
  toy.matrix = RVec(3).setZero().asDiagonal();
  toy.matrix.diagonal() << 2.0, 4.0, 4.0;
  CHECK(crb_scenario2(toy) == doctest::Approx(1.0));

  toy.matrix(2, 2) = 0.0;  // singular
  CHECK(crb_scenario2(toy) == kInf);
}

TEST_CASE("crb scenario 2: per-parameter bounds match the e_i^T F^{-1} e_i form") {
  SystemConfig cfg;
  cfg.n_tx = 5;
  cfg.n_rx = 4;
  cfg.block_len = 12;
  RandomSource rng(31);
  TargetSet targets((RVec(2) << -0.4, 0.8).finished(),
                    (CVec(2) << cplx(1.0, -0.3), cplx(0.6, 0.6)).finished());
  ArrayManifold tx(5), rx(4);
  const auto fim = fisher_information(random_psd(5, rng), targets, tx, rx, cfg);
  const RMat inv = fim.matrix.inverse();
  double total = 0.0;
  for (int i = 0; i < 6; ++i) {
    const RVec e = RVec::Unit(6, i);
    total += e.dot(inv * e);
  }
  CHECK(crb_scenario2(fim) == doctest::Approx(total).epsilon(1e-8));
}

TEST_CASE("crb scenario 2: weakly decreasing under psd bumps") {
  SystemConfig cfg;
  cfg.n_tx = 4;
  cfg.n_rx = 4;
  cfg.block_len = 16;
  RandomSource rng(71);
  TargetSet targets((RVec(2) << -0.5, 0.5).finished(),
                    (CVec(2) << cplx(1.0, 0.0), cplx(1.0, 0.0)).finished());
  ArrayManifold tx(4), rx(4);
  for (int trial = 0; trial < 10; ++trial) {
    const TransmitCovariance base = random_psd(4, rng);
    const CVec u = rng.cgaussian_vector(4);
    const TransmitCovariance bumped(base.matrix() + u * u.adjoint());
    const double c_base = crb_scenario2(base, targets, tx, rx, cfg);
    const double c_bumped = crb_scenario2(bumped, targets, tx, rx, cfg);
    CHECK(c_bumped <= c_base + 1e-9 * c_base);
  }
}

TEST_CASE("hermitian coordinates round-trip") {
  RandomSource rng(8);
  const CMat a = rng.cgaussian_matrix(4, 4);
  const CMat h = hermitize(a);
  const RVec x = hermitian_coordinates(h);
  REQUIRE(x.size() == 16);
  CHECK((hermitian_from_coordinates(x, 4) - h).norm() < 1e-14);

  // basis expansion agrees with the coordinate map
  CMat rebuilt = CMat::Zero(4, 4);
  for (int k = 0; k < 16; ++k) rebuilt += x(k) * hermitian_basis_element(4, k);
  CHECK((rebuilt - h).norm() < 1e-13);
}
