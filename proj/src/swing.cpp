#include "losslim/swing.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "losslim/lossless.hpp"
#include "losslim/numlin.hpp"

namespace losslim {

namespace {

constexpr double kHalfPi = 1.57079632679489661923;

std::map<int, Eigen::Index> index_by_id(const std::vector<int>& ids) {
  std::map<int, Eigen::Index> map;
  for (std::size_t k = 0; k < ids.size(); ++k) {
    map[ids[k]] = static_cast<Eigen::Index>(k);
  }
  return map;
}

void check_connected(const PowerNetwork& net, ErrorCode code) {
  if (net.buses.empty()) fail(code, "network has no buses");
  std::map<int, std::size_t> pos;
  for (std::size_t k = 0; k < net.buses.size(); ++k) pos[net.buses[k].id] = k;
  std::vector<std::vector<std::size_t>> adj(net.buses.size());
  for (const Line& line : net.lines) {
    auto it_i = pos.find(line.i), it_j = pos.find(line.j);
    if (it_i == pos.end() || it_j == pos.end()) {
      fail(ErrorCode::DimensionMismatch, "line references an unknown bus id");
    }
    adj[it_i->second].push_back(it_j->second);
    adj[it_j->second].push_back(it_i->second);
  }
  std::vector<char> seen(net.buses.size(), 0);
  std::vector<std::size_t> stack = {0};
  seen[0] = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  if (std::count(seen.begin(), seen.end(), 1) !=
      static_cast<long>(net.buses.size())) {
    fail(code, "network graph is not connected");
  }
}

}  // namespace

LaplacianBlocks build_laplacian(const PowerNetwork& net) {
  check_connected(net, ErrorCode::Disconnected);

  LaplacianBlocks out;
  for (const Bus& bus : net.buses) {
    if (bus.is_generator()) {
      if (!(bus.inertia > 0.0)) {
        std::ostringstream os;
        os << "generator bus " << bus.id << " has nonpositive inertia";
        fail(ErrorCode::NonpositiveInertia, os.str());
      }
      out.generator_ids.push_back(bus.id);
    } else {
      out.internal_ids.push_back(bus.id);
    }
  }
  std::sort(out.generator_ids.begin(), out.generator_ids.end());
  std::sort(out.internal_ids.begin(), out.internal_ids.end());

  const Eigen::Index n = static_cast<Eigen::Index>(out.generator_ids.size());
  const Eigen::Index mi = static_cast<Eigen::Index>(out.internal_ids.size());
  // Generators first, internal buses second; both groups sorted by id.
  std::map<int, Eigen::Index> order;
  {
    Eigen::Index k = 0;
    for (int id : out.generator_ids) order[id] = k++;
    for (int id : out.internal_ids) order[id] = k++;
  }

  MatrixXd K = MatrixXd::Zero(n + mi, n + mi);
  for (const Line& line : net.lines) {
    if (!(std::abs(line.load_angle) < kHalfPi)) {
      std::ostringstream os;
      os << "line (" << line.i << ", " << line.j << ") load angle "
         << line.load_angle << " rad is not below 90 degrees";
      fail(ErrorCode::LoadAngleOutOfRange, os.str());
    }
    const double w = line.susceptance * std::cos(line.load_angle);
    if (!(w > 0.0)) {
      std::ostringstream os;
      os << "line (" << line.i << ", " << line.j << ") has nonpositive weight";
      fail(ErrorCode::NonpositiveWeight, os.str());
    }
    const Eigen::Index a = order.at(line.i), b = order.at(line.j);
    K(a, a) += w;
    K(b, b) += w;
    K(a, b) -= w;
    K(b, a) -= w;
  }

  out.K_a = K.topLeftCorner(n, n);
  out.K_b = K.topRightCorner(n, mi);
  out.K_c = K.bottomRightCorner(mi, mi);
  return out;
}

MatrixXd kron_reduce(const LaplacianBlocks& blocks) {
  const Eigen::Index mi = blocks.K_c.rows();
  if (mi == 0) return blocks.K_a;
  Eigen::LDLT<MatrixXd> ldlt(blocks.K_c);
  if (ldlt.info() != Eigen::Success ||
      ldlt.vectorD().minCoeff() <= 1e-12 * blocks.K_c.norm()) {
    fail(ErrorCode::SingularInternalBlock,
         "internal Laplacian block is numerically singular");
  }
  MatrixXd K_red =
      blocks.K_a - blocks.K_b * ldlt.solve(blocks.K_b.transpose());
  return 0.5 * (K_red + K_red.transpose());
}

MatrixXd factor_reduced(const MatrixXd& K_red, double tol) {
  const Eigen::Index n = K_red.rows();
  if (n == 0 || K_red.cols() != n) {
    fail(ErrorCode::DimensionMismatch, "K_red must be square and nonempty");
  }
  if (n == 1) return MatrixXd(1, 0);

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(K_red);
  const VectorXd lambda = es.eigenvalues();  // ascending
  const MatrixXd V = es.eigenvectors();
  const double scale = std::max(lambda.cwiseAbs().maxCoeff(), 1.0);
  if (lambda(1) <= tol * scale) {
    fail(ErrorCode::RankDeficient,
         "reduced Laplacian has rank below n-1 (disconnected reduced graph)");
  }
  // The zero eigenpair must be the ones direction.
  VectorXd ones = VectorXd::Ones(n) / std::sqrt(double(n));
  if (std::abs(lambda(0)) > tol * scale ||
      std::min((V.col(0) - ones).norm(), (V.col(0) + ones).norm()) >
          std::sqrt(tol)) {
    fail(ErrorCode::NullspaceMismatch,
         "nullspace of the reduced Laplacian is not the ones vector");
  }

  MatrixXd L(n, n - 1);
  for (Eigen::Index k = 0; k < n - 1; ++k) {
    // Descending eigenvalue order, sign fixed by the largest-magnitude entry.
    VectorXd v = V.col(n - 1 - k);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) v = -v;
    L.col(k) = v * std::sqrt(lambda(n - 1 - k));
  }
  return L;
}

StateSpace swing_statespace(const VectorXd& M, const MatrixXd& L) {
  const Eigen::Index n = M.size();
  if (!(M.minCoeff() > 0.0)) {
    fail(ErrorCode::NonpositiveInertia, "all inertias must be positive");
  }
  if (L.rows() != n || L.cols() != n - 1) {
    fail(ErrorCode::DimensionMismatch, "L must be n x (n-1)");
  }
  const Eigen::Index ns = 2 * n - 1;
  const VectorXd Minv = M.cwiseInverse();
  MatrixXd A = MatrixXd::Zero(ns, ns);
  A.topRightCorner(n, n - 1) = -(Minv.asDiagonal() * L);
  A.bottomLeftCorner(n - 1, n) = L.transpose();
  MatrixXd B = MatrixXd::Zero(ns, n);
  B.topRows(n) = MatrixXd(Minv.asDiagonal());
  MatrixXd C = MatrixXd::Zero(n, ns);
  C.leftCols(n) = MatrixXd::Identity(n, n);
  return StateSpace(std::move(A), std::move(B), std::move(C),
                    MatrixXd::Zero(n, n));
}

SwingModel build_swing_model(const PowerNetwork& net, double tol) {
  const LaplacianBlocks blocks = build_laplacian(net);
  const Eigen::Index n = static_cast<Eigen::Index>(blocks.generator_ids.size());
  if (n == 0) {
    fail(ErrorCode::NonpositiveInertia, "network has no generator buses");
  }
  SwingModel model;
  model.generator_ids = blocks.generator_ids;
  model.K_red = kron_reduce(blocks);
  model.L = factor_reduced(model.K_red, tol);

  const auto id_pos = index_by_id(model.generator_ids);
  model.M = VectorXd::Zero(n);
  for (const Bus& bus : net.buses) {
    if (bus.is_generator()) model.M(id_pos.at(bus.id)) = bus.inertia;
  }
  model.sys = swing_statespace(model.M, model.L);

  // The analytic certificate diag(M, I) must verify; anything else means the
  // construction itself is broken.
  MatrixXd P = MatrixXd::Identity(2 * n - 1, 2 * n - 1);
  P.topLeftCorner(n, n) = MatrixXd(model.M.asDiagonal());
  const CertificateResiduals res = verify_certificate(model.sys, P, 1e-8);
  if (!res.valid) {
    fail(ErrorCode::IllConditioned,
         "internal error: swing certificate diag(M, I) failed to verify");
  }
  return model;
}

double h2_limit_swing(const VectorXd& M) {
  if (M.size() == 0 || !(M.minCoeff() > 0.0)) {
    fail(ErrorCode::NonpositiveInertia, "all inertias must be positive");
  }
  return std::sqrt(2.0 * M.cwiseInverse().sum());
}

PowerNetwork lump(const PowerNetwork& net) {
  std::map<int, std::vector<const Bus*>> clusters;
  for (const Bus& bus : net.buses) clusters[bus.cluster].push_back(&bus);

  PowerNetwork out;
  for (const auto& [cluster_id, members] : clusters) {
    Bus lumped;
    lumped.id = cluster_id;
    lumped.cluster = cluster_id;
    lumped.power = 0.0;
    lumped.inertia = 0.0;
    double cx = 0.0, cy = 0.0;
    const Bus* lead = nullptr;  // largest-inertia generator, lowest id on ties
    for (const Bus* bus : members) {
      lumped.power += bus->power;
      cx += bus->x;
      cy += bus->y;
      if (bus->is_generator()) {
        lumped.inertia += bus->inertia;
        if (!lead || bus->inertia > lead->inertia ||
            (bus->inertia == lead->inertia && bus->id < lead->id)) {
          lead = bus;
        }
      }
    }
    lumped.kind = lead ? lead->kind : BusKind::Load;
    lumped.x = cx / double(members.size());
    lumped.y = cy / double(members.size());
    out.buses.push_back(lumped);
  }

  std::map<int, int> cluster_of;
  for (const Bus& bus : net.buses) cluster_of[bus.id] = bus.cluster;
  for (const Line& line : net.lines) {
    if (line.tier != LineTier::Transmission) continue;
    Line remapped = line;
    remapped.i = cluster_of.at(line.i);
    remapped.j = cluster_of.at(line.j);
    if (remapped.i == remapped.j) continue;
    remapped.tier = LineTier::Transmission;
    out.lines.push_back(remapped);
  }
  check_connected(out, ErrorCode::Disconnected);
  return out;
}

}  // namespace losslim
