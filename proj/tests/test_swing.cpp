#include "losslim/swing.hpp"

#include <random>

#include "doctest.h"
#include "losslim/lossless.hpp"
#include "losslim/numlin.hpp"
#include "test_support.hpp"

using namespace losslim;

namespace {

PowerNetwork two_gen_line(double susceptance = 1.0, double angle = 0.0) {
  PowerNetwork net;
  net.buses.push_back({0, BusKind::Conventional, 1.0, 6.0, 0.0, 0.0, 0});
  net.buses.push_back({1, BusKind::Hydro, -1.0, 3.0, 1.0, 0.0, 0});
  net.lines.push_back({0, 1, susceptance, angle, LineTier::Subtransmission});
  return net;
}

}  // namespace

TEST_CASE("laplacian: two generators, one line") {
  const LaplacianBlocks blocks = build_laplacian(two_gen_line());
  MatrixXd expected(2, 2);
  expected << 1.0, -1.0, -1.0, 1.0;
  CHECK((blocks.K_a - expected).norm() == 0.0);
  CHECK(blocks.K_b.cols() == 0);
  CHECK(blocks.K_c.rows() == 0);
}

TEST_CASE("laplacian: path through an internal bus") {
  PowerNetwork net;
  net.buses.push_back({0, BusKind::Conventional, 1.0, 6.0, 0.0, 0.0, 0});
  net.buses.push_back({1, BusKind::Hydro, -1.0, 3.0, 2.0, 0.0, 0});
  net.buses.push_back({2, BusKind::Load, 0.0, 0.0, 1.0, 0.0, 0});
  net.lines.push_back({0, 2, 1.0, 0.0, LineTier::Subtransmission});
  net.lines.push_back({2, 1, 1.0, 0.0, LineTier::Subtransmission});
  const LaplacianBlocks blocks = build_laplacian(net);
  CHECK(blocks.K_c.rows() == 1);
  CHECK(blocks.K_c(0, 0) == doctest::Approx(2.0));
  CHECK(blocks.K_b(0, 0) == doctest::Approx(-1.0));
  CHECK(blocks.K_b(1, 0) == doctest::Approx(-1.0));

  SUBCASE("kron reduction gives the series weight 1/2") {
    const MatrixXd K_red = kron_reduce(blocks);
    MatrixXd expected(2, 2);
    expected << 0.5, -0.5, -0.5, 0.5;
    CHECK((K_red - expected).norm() < 1e-14);
  }
}

TEST_CASE("laplacian: 60-degree load angle halves the weight") {
  PowerNetwork net = two_gen_line(1.0, 60.0 * 3.14159265358979323846 / 180.0);
  const LaplacianBlocks blocks = build_laplacian(net);
  CHECK(blocks.K_a(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("laplacian: validation errors") {
  PowerNetwork disconnected = two_gen_line();
  disconnected.buses.push_back({2, BusKind::Load, 0.0, 0.0, 5.0, 5.0, 0});
  CHECK_THROWS_AS(build_laplacian(disconnected), Error);

  PowerNetwork wide_angle = two_gen_line(1.0, 1.6);  // > pi/2
  try {
    build_laplacian(wide_angle);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LoadAngleOutOfRange);
  }

  PowerNetwork bad_susceptance = two_gen_line(-1.0);
  try {
    build_laplacian(bad_susceptance);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonpositiveWeight);
  }
}

TEST_CASE("kron reduction: no internal buses is the identity map") {
  const LaplacianBlocks blocks = build_laplacian(two_gen_line());
  CHECK((kron_reduce(blocks) - blocks.K_a).norm() == 0.0);
}

TEST_CASE("kron reduction: random 10-bus network has vanishing row sums") {
  std::mt19937 rng(89);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  PowerNetwork net;
  for (int b = 0; b < 10; ++b) {
    const bool gen = b < 4;
    net.buses.push_back({b, gen ? BusKind::Conventional : BusKind::Load,
                         gen ? 1.0 : -0.5, gen ? 6.0 : 0.0, double(b), 0.0, 0});
  }
  for (int b = 1; b < 10; ++b) {
    net.lines.push_back({b, int(u(rng) * b / 2.0) % b, u(rng), 0.0,
                         LineTier::Subtransmission});
  }
  net.lines.push_back({0, 9, u(rng), 0.0, LineTier::Subtransmission});
  const MatrixXd K_red = kron_reduce(build_laplacian(net));
  CHECK((K_red.rowwise().sum()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((K_red - K_red.transpose()).norm() < 1e-12);
}

TEST_CASE("factorization: n = 2 reproduces the rank-one Laplacian") {
  MatrixXd K(2, 2);
  K << 1.0, -1.0, -1.0, 1.0;
  const MatrixXd L = factor_reduced(K, 1e-9);
  CHECK(L.rows() == 2);
  CHECK(L.cols() == 1);
  CHECK((L * L.transpose() - K).norm() < 1e-12);
}

TEST_CASE("factorization: n = 1 gives an empty factor") {
  const MatrixXd L = factor_reduced(MatrixXd::Zero(1, 1), 1e-9);
  CHECK(L.rows() == 1);
  CHECK(L.cols() == 0);
  const StateSpace sys = swing_statespace((VectorXd(1) << 2.0).finished(), L);
  CHECK(sys.n() == 1);
  CHECK(sys.A()(0, 0) == 0.0);
  CHECK(sys.B()(0, 0) == doctest::Approx(0.5));
  CHECK(sys.C()(0, 0) == 1.0);
}

TEST_CASE("factorization: 5-generator reduced graph reconstructs to 1e-12") {
  // Triangle 0-1-2 with a tail 2-3-4.
  MatrixXd K = MatrixXd::Zero(5, 5);
  auto add_edge = [&](int a, int b, double w) {
    K(a, a) += w;
    K(b, b) += w;
    K(a, b) -= w;
    K(b, a) -= w;
  };
  add_edge(0, 1, 1.0);
  add_edge(1, 2, 2.0);
  add_edge(0, 2, 0.5);
  add_edge(2, 3, 1.5);
  add_edge(3, 4, 0.7);
  const MatrixXd L = factor_reduced(K, 1e-9);
  CHECK(L.cols() == 4);
  CHECK((L * L.transpose() - K).norm() < 1e-12);
  // Columns are orthogonal by construction.
  const MatrixXd G = L.transpose() * L;
  CHECK((G - MatrixXd(G.diagonal().asDiagonal())).norm() < 1e-12);
}

TEST_CASE("factorization: rank-deficient input is rejected") {
  MatrixXd K = MatrixXd::Zero(4, 4);
  K.topLeftCorner(2, 2) << 1.0, -1.0, -1.0, 1.0;
  K.bottomRightCorner(2, 2) << 1.0, -1.0, -1.0, 1.0;  // two components
  try {
    factor_reduced(K, 1e-9);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RankDeficient);
  }
}

TEST_CASE("statespace: explicit n = 2 blocks") {
  VectorXd M = VectorXd::Ones(2);
  MatrixXd L(2, 1);
  L << 1.0, -1.0;
  const StateSpace sys = swing_statespace(M, L);
  MatrixXd A(3, 3), B(3, 2), C(2, 3);
  A << 0, 0, -1, 0, 0, 1, 1, -1, 0;
  B << 1, 0, 0, 1, 0, 0;
  C << 1, 0, 0, 0, 1, 0;
  CHECK((sys.A() - A).norm() == 0.0);
  CHECK((sys.B() - B).norm() == 0.0);
  CHECK((sys.C() - C).norm() == 0.0);
  CHECK(sys.D().norm() == 0.0);
}

TEST_CASE("statespace: random 10-generator model certifies at 1e-12") {
  std::mt19937 rng(97);
  const auto fx = testsup::random_swing(rng, 10, 0.1, 10.0);
  const CertificateResiduals res =
      verify_certificate(fx.sys, testsup::swing_certificate(fx), 1e-12);
  CHECK(res.valid);
  const RankReport rank = controllability_rank(fx.sys.A(), fx.sys.B(), 1e-9);
  CHECK(rank.rank == 19);
}

TEST_CASE("swing spectrum: purely imaginary with a simple zero eigenvalue") {
  std::mt19937 rng(101);
  const auto fx = testsup::random_swing(rng, 6, 0.2, 8.0);
  const VectorXcd eig = fx.sys.A().eigenvalues();
  int zero_count = 0;
  for (Eigen::Index k = 0; k < eig.size(); ++k) {
    CHECK(std::abs(eig(k).real()) < 1e-9 * (1.0 + fx.sys.A().norm()));
    if (std::abs(eig(k)) < 1e-9 * (1.0 + fx.sys.A().norm())) ++zero_count;
  }
  CHECK(zero_count == 1);
}

TEST_CASE("h2 limit: harmonic form and L-independence") {
  VectorXd M(2);
  M << 6.0, 3.0;
  CHECK(h2_limit_swing(M) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(h2_limit_swing(VectorXd::Ones(7)) ==
        doctest::Approx(std::sqrt(14.0)).epsilon(1e-15));

  // Two different connected topologies with the same inertia vector.
  std::mt19937 rng(103);
  VectorXd M4(4);
  M4 << 0.3, 2.0, 5.0, 1.1;
  const auto fx_a = testsup::random_swing(rng, 4, 1.0, 1.0);
  const auto fx_b = testsup::random_swing(rng, 4, 1.0, 1.0);
  const StateSpace sys_a = swing_statespace(M4, fx_a.L);
  const StateSpace sys_b = swing_statespace(M4, fx_b.L);
  CHECK(h2_limit(sys_a) == doctest::Approx(h2_limit_swing(M4)).epsilon(1e-12));
  CHECK(h2_limit(sys_b) == doctest::Approx(h2_limit_swing(M4)).epsilon(1e-12));
}

TEST_CASE("h2 limit: permutation equivariance") {
  std::mt19937 rng(107);
  const auto fx = testsup::random_swing(rng, 5, 0.2, 5.0);
  VectorXd M_perm(5);
  MatrixXd L_perm(5, 4);
  const std::vector<int> perm = {3, 0, 4, 1, 2};
  for (int k = 0; k < 5; ++k) {
    M_perm(k) = fx.M(perm[k]);
    L_perm.row(k) = fx.L.row(perm[k]);
  }
  CHECK(h2_limit_swing(M_perm) ==
        doctest::Approx(h2_limit_swing(fx.M)).epsilon(1e-14));
  CHECK(h2_limit(swing_statespace(M_perm, L_perm)) ==
        doctest::Approx(h2_limit(fx.sys)).epsilon(1e-10));
}

TEST_CASE("jensen: uniform inertia minimizes the limit at fixed total") {
  std::mt19937 rng(109);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  const int n = 6;
  const double m_tot = 12.0;
  const double uniform_limit =
      h2_limit_swing(VectorXd::Constant(n, m_tot / n));
  for (int trial = 0; trial < 1000; ++trial) {
    VectorXd M(n);
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      M(k) = u(rng);
      sum += M(k);
    }
    M *= m_tot / sum;
    CHECK(h2_limit_swing(M) >= uniform_limit - 1e-12);
  }
}

TEST_CASE("lump: inertia sums, limit drops, loads stay loads") {
  PowerNetwork net = two_gen_line();
  net.buses[0].cluster = 0;
  net.buses[1].cluster = 0;
  net.lines[0].tier = LineTier::Subtransmission;
  // A second cluster so the lumped network still has a line.
  net.buses.push_back({2, BusKind::Conventional, 2.0, 12.0, 3.0, 0.0, 1});
  net.buses.push_back({3, BusKind::Load, -2.0, 0.0, 4.0, 0.0, 2});
  net.lines.push_back({0, 2, 1.0, 0.0, LineTier::Transmission});
  net.lines.push_back({2, 3, 1.0, 0.0, LineTier::Transmission});
  net.lines.push_back({3, 0, 1.0, 0.0, LineTier::Transmission});

  const PowerNetwork lumped = lump(net);
  CHECK(lumped.buses.size() == 3);
  const Bus* cluster0 = nullptr;
  const Bus* cluster2 = nullptr;
  for (const Bus& bus : lumped.buses) {
    if (bus.id == 0) cluster0 = &bus;
    if (bus.id == 2) cluster2 = &bus;
  }
  REQUIRE(cluster0 != nullptr);
  REQUIRE(cluster2 != nullptr);
  CHECK(cluster0->inertia == doctest::Approx(9.0));
  CHECK(cluster0->power == doctest::Approx(0.0));
  CHECK(cluster0->kind == BusKind::Conventional);
  CHECK(cluster2->kind == BusKind::Load);
  // Only transmission lines survive, remapped to cluster endpoints.
  CHECK(lumped.lines.size() == 3);

  VectorXd m_full(3);
  m_full << 6.0, 3.0, 12.0;
  VectorXd m_lumped(2);
  m_lumped << 9.0, 12.0;
  CHECK(h2_limit_swing(m_lumped) < h2_limit_swing(m_full));
  CHECK(h2_limit_swing((VectorXd(1) << 9.0).finished()) ==
        doctest::Approx(std::sqrt(2.0 / 9.0)).epsilon(1e-12));
}

TEST_CASE("lump: full lumped model is itself a valid swing model") {
  PowerNetwork net;
  // Two clusters of two generators each, bridged by transmission lines.
  net.buses.push_back({0, BusKind::Conventional, 1.0, 6.0, 0.0, 0.0, 0});
  net.buses.push_back({1, BusKind::Hydro, 1.0, 3.0, 0.5, 0.0, 0});
  net.buses.push_back({2, BusKind::WindSolar, 1.0, 0.006, 5.0, 0.0, 1});
  net.buses.push_back({3, BusKind::Load, -3.0, 0.0, 5.5, 0.0, 1});
  net.lines.push_back({0, 1, 1.0, 0.0, LineTier::Subtransmission});
  net.lines.push_back({2, 3, 1.0, 0.0, LineTier::Subtransmission});
  net.lines.push_back({0, 2, 2.0, 0.0, LineTier::Transmission});
  const PowerNetwork lumped = lump(net);
  const SwingModel model = build_swing_model(lumped);
  CHECK(model.M.size() == 2);
  CHECK(model.M(0) == doctest::Approx(9.0));
  CHECK(model.M(1) == doctest::Approx(0.006));
  CHECK(model.sys.n() == 3);
}
