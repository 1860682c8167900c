#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "losslim/state_space.hpp"
#include "losslim/swing.hpp"

// Shared fixtures and independent oracles. Everything here stays clear of the
// library's solver paths so the comparisons mean something.
namespace testsup {

using losslim::MatrixXd;
using losslim::StateSpace;
using losslim::VectorXd;

// Deterministic std::mt19937 fixtures are fine in tests; production code uses
// the library's portable generator.
inline MatrixXd random_matrix(std::mt19937& rng, Eigen::Index rows,
                              Eigen::Index cols) {
  std::normal_distribution<double> dist;
  MatrixXd M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = dist(rng);
  return M;
}

inline MatrixXd random_hurwitz(std::mt19937& rng, Eigen::Index n) {
  const MatrixXd G = random_matrix(rng, n, n);
  // -GG^T - I is symmetric negative definite; a random skew part keeps the
  // spectrum generic without risking stability.
  const MatrixXd S = random_matrix(rng, n, n);
  return -G * G.transpose() - MatrixXd::Identity(n, n) + 0.5 * (S - S.transpose());
}

// Kronecker-vectorized Lyapunov solve: (I kron A + A kron I) vec(X) = -vec(Q).
// Independent of the Schur path in every way that matters.
inline MatrixXd lyapunov_kron_oracle(const MatrixXd& A, const MatrixXd& Q) {
  const Eigen::Index n = A.rows();
  MatrixXd K = MatrixXd::Zero(n * n, n * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    K.block(j * n, j * n, n, n) += A;
    for (Eigen::Index l = 0; l < n; ++l) {
      K.block(j * n, l * n, n, n) += A(j, l) * MatrixXd::Identity(n, n);
    }
  }
  VectorXd q(n * n);
  for (Eigen::Index j = 0; j < n; ++j) q.segment(j * n, n) = Q.col(j);
  const VectorXd x = K.partialPivLu().solve(-q);
  MatrixXd X(n, n);
  for (Eigen::Index j = 0; j < n; ++j) X.col(j) = x.segment(j * n, n);
  return X;
}

// Trapezoid quadrature of ||G||_H2^2 = (1/2pi) int tr(G* G) dw over the whole
// axis, using symmetry in omega.
inline double h2_squared_quadrature(const StateSpace& sys, double wmax = 1e4,
                                    int points = 200000) {
  double integral = 0.0;
  double prev = 0.0;
  double prev_w = 0.0;
  for (int k = 0; k <= points; ++k) {
    // Graded grid: dense near zero where the response lives.
    const double t = double(k) / points;
    const double w = wmax * t * t * t;
    const Eigen::MatrixXcd F = sys.frequency_response(w);
    const double val = (F.adjoint() * F).real().trace();
    if (k > 0) integral += 0.5 * (val + prev) * (w - prev_w);
    prev = val;
    prev_w = w;
  }
  return 2.0 * integral / (2.0 * 3.14159265358979323846);
}

// Random connected swing test system: draws a connected topology, factors the
// reduced Laplacian, and returns the state space plus its analytic data.
struct SwingFixture {
  VectorXd M;
  MatrixXd L;
  StateSpace sys;
};

inline SwingFixture random_swing(std::mt19937& rng, int n_gen,
                                 double m_lo = 1e-3, double m_hi = 10.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SwingFixture fx;
  fx.M = VectorXd(n_gen);
  for (int k = 0; k < n_gen; ++k) {
    fx.M(k) = m_lo * std::pow(m_hi / m_lo, u(rng));  // log-uniform
  }
  // Random connected graph: a random spanning tree plus a few extra edges.
  MatrixXd K = MatrixXd::Zero(n_gen, n_gen);
  auto add_edge = [&](int a, int b, double w) {
    K(a, a) += w;
    K(b, b) += w;
    K(a, b) -= w;
    K(b, a) -= w;
  };
  for (int v = 1; v < n_gen; ++v) {
    const int parent = int(u(rng) * v);
    add_edge(v, parent, 0.5 + u(rng));
  }
  for (int extra = 0; extra < n_gen / 2; ++extra) {
    const int a = int(u(rng) * n_gen);
    const int b = int(u(rng) * n_gen);
    if (a != b) add_edge(a, b, 0.5 + u(rng));
  }
  fx.L = n_gen == 1 ? MatrixXd(1, 0) : losslim::factor_reduced(K, 1e-9);
  fx.sys = losslim::swing_statespace(fx.M, fx.L);
  return fx;
}

inline MatrixXd swing_certificate(const SwingFixture& fx) {
  const Eigen::Index n = fx.M.size();
  MatrixXd P = MatrixXd::Identity(2 * n - 1, 2 * n - 1);
  P.topLeftCorner(n, n) = MatrixXd(fx.M.asDiagonal());
  return P;
}

}  // namespace testsup
