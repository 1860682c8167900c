#pragma once

#include <string>
#include <vector>

#include "losslim/state_space.hpp"

namespace losslim {

enum class BusKind { Conventional, Hydro, WindSolar, Load };

enum class LineTier { Transmission, Subtransmission };

struct Bus {
  int id = 0;
  BusKind kind = BusKind::Load;
  double power = 0.0;           // signed injection; magnitude is rated power
  double inertia = 0.0;         // M_k, generator buses only (> 0)
  double x = 0.0, y = 0.0;
  int cluster = 0;

  bool is_generator() const { return kind != BusKind::Load; }
};

struct Line {
  int i = 0, j = 0;             // bus ids
  double susceptance = 1.0;     // b_ij > 0
  double load_angle = 0.0;      // delta_ij, radians; |delta| < pi/2
  LineTier tier = LineTier::Subtransmission;
};

struct PowerNetwork {
  std::vector<Bus> buses;
  std::vector<Line> lines;
};

struct LaplacianBlocks {
  MatrixXd K_a;                 // generator x generator
  MatrixXd K_b;                 // generator x internal
  MatrixXd K_c;                 // internal x internal
  std::vector<int> generator_ids;
  std::vector<int> internal_ids;
};

struct SwingModel {
  VectorXd M;                   // diagonal inertia, generator order
  MatrixXd L;                   // n x (n-1) factor, K_red = L L^T
  StateSpace sys;               // Eq-of-motion state space, 2n-1 states
  std::vector<int> generator_ids;
  MatrixXd K_red;               // kept for diagnostics
};

// Weighted Laplacian over all buses (generators first, both groups sorted by
// id), edge weight b_ij * cos(delta_ij). Validates connectivity and the
// 90-degree load-angle bound.
LaplacianBlocks build_laplacian(const PowerNetwork& net);

// K_red = K_a - K_b K_c^{-1} K_b^T.
MatrixXd kron_reduce(const LaplacianBlocks& blocks);

// Eigen-factor K_red = L L^T with L of full column rank n-1, columns ordered
// by descending eigenvalue. The nullspace must be spanned by the ones vector.
MatrixXd factor_reduced(const MatrixXd& K_red, double tol = 1e-9);

// State x = [thetadot; L^T theta]:
//   xdot = [[0, -M^{-1}L], [L^T, 0]] x + [[M^{-1}],[0]] (u + w_u)
//   y    = [I, 0] x + w_y
StateSpace swing_statespace(const VectorXd& M, const MatrixXd& L);

SwingModel build_swing_model(const PowerNetwork& net, double tol = 1e-9);

// gamma*_H2 = sqrt(2 (1/M_1 + ... + 1/M_n)); independent of the topology.
double h2_limit_swing(const VectorXd& M);

// One bus per cluster: inertia and power summed over the cluster, lines from
// the transmission tier only, endpoints remapped to cluster buses.
PowerNetwork lump(const PowerNetwork& net);

}  // namespace losslim
