#include "losslim/netgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace losslim {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Rng::next() { return splitmix64(state_); }

double Rng::u01() { return double(next() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller, fully pinned down (library normal distributions are not
  // portable across standard library implementations).
  double u1 = u01();
  while (u1 <= 0.0) u1 = u01();
  const double u2 = u01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double two_pi = 2.0 * 3.14159265358979323846;
  spare_ = r * std::sin(two_pi * u2);
  have_spare_ = true;
  return r * std::cos(two_pi * u2);
}

std::uint64_t Rng::below(std::uint64_t n) { return n ? next() % n : 0; }

Rng Rng::substream(std::uint64_t id) const {
  // Derived from the original seed, never the evolving state.
  std::uint64_t s = seed_ ^ (0x9E3779B97F4A7C15ULL * (id + 1));
  std::uint64_t mixer = s;
  return Rng(splitmix64(mixer));
}

VectorXd eigenvector_centrality(const MatrixXd& adjacency) {
  const Eigen::Index k = adjacency.rows();
  if (k == 0 || adjacency.cols() != k) {
    fail(ErrorCode::DimensionMismatch, "adjacency must be square, nonempty");
  }
  // Connectivity check via matrix-free BFS.
  std::vector<char> seen(k, 0);
  std::vector<Eigen::Index> stack = {0};
  seen[0] = 1;
  while (!stack.empty()) {
    const Eigen::Index v = stack.back();
    stack.pop_back();
    for (Eigen::Index w = 0; w < k; ++w) {
      if (adjacency(v, w) != 0.0 && !seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  if (std::count(seen.begin(), seen.end(), 1) != k) {
    fail(ErrorCode::NotConnected, "centrality requires a connected graph");
  }
  if (k == 1) return VectorXd::Ones(1);

  // Power iteration on A + I: same Perron vector, no bipartite oscillation.
  VectorXd v = VectorXd::Ones(k) / std::sqrt(double(k));
  for (int iter = 0; iter < 100000; ++iter) {
    VectorXd w = adjacency * v + v;
    w /= w.norm();
    if ((w - v).norm() < 1e-10) {
      v = w;
      break;
    }
    v = w;
  }
  if (v.sum() < 0.0) v = -v;
  return v.cwiseMax(0.0) / v.cwiseMax(0.0).norm();
}

Eigen::Index most_central(const VectorXd& scores) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i) {
    if (scores(i) > scores(best) + 1e-12) best = i;
  }
  return best;
}

PowerNetwork assign_inertia(PowerNetwork net, const InertiaConstants& constants) {
  for (Bus& bus : net.buses) {
    if (!bus.is_generator()) continue;
    if (bus.power == 0.0) {
      std::ostringstream os;
      os << "generator bus " << bus.id << " has no rated power";
      fail(ErrorCode::MissingRatedPower, os.str());
    }
    double c = 0.0;
    switch (bus.kind) {
      case BusKind::Conventional: c = constants.conventional; break;
      case BusKind::Hydro: c = constants.hydro; break;
      case BusKind::WindSolar: c = constants.wind_solar; break;
      case BusKind::Load: break;
    }
    bus.inertia = c * std::abs(bus.power);
  }
  return net;
}

namespace {

struct Point {
  double x = 0.0, y = 0.0;
};

double dist(const Point& a, const Point& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Prim's MST over Euclidean distances; ties resolve to the lowest index.
std::vector<std::pair<int, int>> euclidean_mst(const std::vector<Point>& pts) {
  const int k = static_cast<int>(pts.size());
  std::vector<std::pair<int, int>> edges;
  if (k <= 1) return edges;
  std::vector<char> in_tree(k, 0);
  std::vector<double> best(k, std::numeric_limits<double>::infinity());
  std::vector<int> parent(k, -1);
  in_tree[0] = 1;
  for (int v = 1; v < k; ++v) {
    best[v] = dist(pts[0], pts[v]);
    parent[v] = 0;
  }
  for (int added = 1; added < k; ++added) {
    int pick = -1;
    for (int v = 0; v < k; ++v) {
      if (!in_tree[v] && (pick < 0 || best[v] < best[pick])) pick = v;
    }
    in_tree[pick] = 1;
    edges.emplace_back(std::min(parent[pick], pick), std::max(parent[pick], pick));
    for (int v = 0; v < k; ++v) {
      if (!in_tree[v]) {
        const double d = dist(pts[pick], pts[v]);
        if (d < best[v]) {
          best[v] = d;
          parent[v] = pick;
        }
      }
    }
  }
  return edges;
}

struct FlowCase {
  VectorXd angles;  // per-bus, reference bus 0
};

// DC power flow: K theta = p with theta(0) = 0. Weights are the current
// susceptances (flow-study angles, distinct from the equilibrium load
// angles stored on the lines).
FlowCase dc_flow(const std::vector<Line>& lines,
                 const std::map<int, Eigen::Index>& pos, const VectorXd& p,
                 const Line* skip) {
  const Eigen::Index nb = p.size();
  MatrixXd K = MatrixXd::Zero(nb, nb);
  for (const Line& line : lines) {
    if (&line == skip) continue;
    const Eigen::Index a = pos.at(line.i), b = pos.at(line.j);
    K(a, a) += line.susceptance;
    K(b, b) += line.susceptance;
    K(a, b) -= line.susceptance;
    K(b, a) -= line.susceptance;
  }
  FlowCase out;
  out.angles = VectorXd::Zero(nb);
  if (nb <= 1) return out;
  const MatrixXd K_red = K.bottomRightCorner(nb - 1, nb - 1);
  Eigen::LDLT<MatrixXd> ldlt(K_red);
  if (ldlt.info() != Eigen::Success) {
    fail(ErrorCode::InfeasibleSizing, "DC flow matrix not factorizable");
  }
  out.angles.tail(nb - 1) = ldlt.solve(p.tail(nb - 1));
  return out;
}

}  // namespace

PowerNetwork generate_network(const EnsembleConfig& cfg, GenerationStats* stats) {
  if (cfg.n_clusters <= 0 || cfg.total_buses < 2 * cfg.n_clusters) {
    fail(ErrorCode::DimensionMismatch,
         "need at least two buses per cluster");
  }
  if (static_cast<int>(cfg.cluster_roles.size()) != cfg.n_clusters) {
    fail(ErrorCode::DimensionMismatch,
         "cluster_roles length must equal n_clusters");
  }
  if (!(cfg.inertia_constants.conventional > 0.0 &&
        cfg.inertia_constants.hydro > 0.0 &&
        cfg.inertia_constants.wind_solar > 0.0)) {
    fail(ErrorCode::NonpositiveInertia, "inertia constants must be positive");
  }
  GenerationStats local_stats;
  Rng root(cfg.seed);

  // Cluster centers.
  Rng centers_rng = root.substream(0);
  std::vector<Point> centers(cfg.n_clusters);
  for (Point& c : centers) {
    c.x = cfg.map_size * centers_rng.u01();
    c.y = cfg.map_size * centers_rng.u01();
  }

  // Cluster sizes: fixed, or multinomial with uniform probabilities,
  // resampled until every cluster holds at least two buses.
  std::vector<int> sizes;
  if (cfg.fixed_cluster_sizes) {
    sizes = *cfg.fixed_cluster_sizes;
    if (static_cast<int>(sizes.size()) != cfg.n_clusters ||
        std::accumulate(sizes.begin(), sizes.end(), 0) != cfg.total_buses) {
      fail(ErrorCode::DimensionMismatch,
           "fixed cluster sizes must sum to total_buses");
    }
    for (int s : sizes) {
      if (s < 2) fail(ErrorCode::DimensionMismatch, "clusters need >= 2 buses");
    }
  } else {
    Rng sizes_rng = root.substream(1);
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 1000) {
        fail(ErrorCode::InfeasibleSizing,
             "could not draw cluster sizes with >= 2 buses each");
      }
      sizes.assign(cfg.n_clusters, 0);
      for (int b = 0; b < cfg.total_buses; ++b) {
        sizes[static_cast<int>(sizes_rng.below(cfg.n_clusters))] += 1;
      }
      if (std::all_of(sizes.begin(), sizes.end(), [](int s) { return s >= 2; }))
        break;
      local_stats.size_resamples += 1;
    }
  }

  PowerNetwork net;
  std::vector<std::vector<int>> cluster_bus_ids(cfg.n_clusters);
  int next_id = 0;
  for (int c = 0; c < cfg.n_clusters; ++c) {
    Rng pos_rng = root.substream(100 + c);
    Rng pow_rng = root.substream(200 + c);
    std::vector<Point> pts(sizes[c]);
    for (int b = 0; b < sizes[c]; ++b) {
      Bus bus;
      bus.id = next_id++;
      bus.cluster = c;
      bus.kind = cfg.cluster_roles[c];
      pts[b].x = centers[c].x + cfg.cluster_sigma * pos_rng.normal();
      pts[b].y = centers[c].y + cfg.cluster_sigma * pos_rng.normal();
      bus.x = pts[b].x;
      bus.y = pts[b].y;
      // Magnitude decays away from the cluster center; sign by role.
      const double d = dist(pts[b], centers[c]);
      const double mag = (0.1 + std::abs(pow_rng.normal())) *
                         std::exp(-d / cfg.cluster_sigma);
      bus.power = (bus.kind == BusKind::Load) ? -mag : mag;
      cluster_bus_ids[c].push_back(bus.id);
      net.buses.push_back(bus);
    }
    // Sub-transmission: per-cluster minimum spanning tree.
    for (const auto& [a, b] : euclidean_mst(pts)) {
      Line line;
      line.i = cluster_bus_ids[c][a];
      line.j = cluster_bus_ids[c][b];
      line.tier = LineTier::Subtransmission;
      net.lines.push_back(line);
    }
  }

  // Balance so the DC flow problem is consistent: scale loads to match
  // generation (rated powers at the generators stay as drawn).
  double gen_sum = 0.0, load_sum = 0.0;
  for (const Bus& bus : net.buses) {
    if (bus.is_generator()) {
      gen_sum += bus.power;
    } else {
      load_sum += -bus.power;
    }
  }
  if (load_sum > 0.0) {
    const double scale = gen_sum / load_sum;
    for (Bus& bus : net.buses) {
      if (!bus.is_generator()) bus.power *= scale;
    }
  } else {
    const double shift = gen_sum / double(net.buses.size());
    for (Bus& bus : net.buses) bus.power -= shift;
  }

  // Transmission backbone: the most central bus of each cluster (eigenvector
  // centrality of the MST), then a complete graph over the centers so that
  // losing any one line, or any one cluster, keeps the rest connected.
  std::vector<int> central(cfg.n_clusters);
  for (int c = 0; c < cfg.n_clusters; ++c) {
    const int sz = sizes[c];
    MatrixXd adj = MatrixXd::Zero(sz, sz);
    std::map<int, int> local;
    for (int b = 0; b < sz; ++b) local[cluster_bus_ids[c][b]] = b;
    for (const Line& line : net.lines) {
      auto it_i = local.find(line.i), it_j = local.find(line.j);
      if (it_i != local.end() && it_j != local.end()) {
        adj(it_i->second, it_j->second) = 1.0;
        adj(it_j->second, it_i->second) = 1.0;
      }
    }
    central[c] = cluster_bus_ids[c][most_central(eigenvector_centrality(adj))];
  }
  for (int a = 0; a < cfg.n_clusters; ++a) {
    for (int b = a + 1; b < cfg.n_clusters; ++b) {
      Line line;
      line.i = central[a];
      line.j = central[b];
      line.tier = LineTier::Transmission;
      net.lines.push_back(line);
    }
  }

  // Susceptance sizing: scale lines up until every nominal DC load angle sits
  // below the cap and every transmission angle survives any single
  // transmission-line outage.
  std::map<int, Eigen::Index> pos;
  VectorXd p(net.buses.size());
  for (std::size_t k = 0; k < net.buses.size(); ++k) {
    pos[net.buses[k].id] = static_cast<Eigen::Index>(k);
    p(static_cast<Eigen::Index>(k)) = net.buses[k].power;
  }
  auto line_angle = [&](const Line& line, const VectorXd& angles) {
    return angles(pos.at(line.i)) - angles(pos.at(line.j));
  };
  bool sized = false;
  for (int iter = 0; iter < cfg.sizing_max_iterations; ++iter) {
    local_stats.sizing_iterations = iter + 1;
    std::vector<double> required(net.lines.size(), 0.0);
    const FlowCase nominal = dc_flow(net.lines, pos, p, nullptr);
    for (std::size_t l = 0; l < net.lines.size(); ++l) {
      const double margin = net.lines[l].tier == LineTier::Transmission
                                ? cfg.sizing_margin_transmission
                                : cfg.sizing_margin;
      const double ang = std::abs(line_angle(net.lines[l], nominal.angles));
      required[l] = std::max(required[l], net.lines[l].susceptance * ang *
                                              margin / cfg.angle_cap);
    }
    for (const Line& outage : net.lines) {
      // With two clusters the single backbone edge has no redundancy.
      if (outage.tier != LineTier::Transmission || cfg.n_clusters < 3) continue;
      const FlowCase shifted = dc_flow(net.lines, pos, p, &outage);
      for (std::size_t l = 0; l < net.lines.size(); ++l) {
        if (net.lines[l].tier != LineTier::Transmission ||
            &net.lines[l] == &outage)
          continue;
        const double ang = std::abs(line_angle(net.lines[l], shifted.angles));
        required[l] = std::max(required[l],
                               net.lines[l].susceptance * ang *
                                   cfg.sizing_margin_transmission / cfg.angle_cap);
      }
    }
    // Transmission lines share one susceptance: backbone flows only depend on
    // the relative weights (clusters attach as pendant trees), so a uniform
    // scale hits the cap exactly instead of chasing redistributed flows.
    double trans_required = 0.0;
    for (std::size_t l = 0; l < net.lines.size(); ++l) {
      if (net.lines[l].tier == LineTier::Transmission) {
        trans_required = std::max(trans_required, required[l]);
      }
    }
    bool changed = false;
    for (std::size_t l = 0; l < net.lines.size(); ++l) {
      const double target = net.lines[l].tier == LineTier::Transmission
                                ? trans_required
                                : required[l];
      if (target > net.lines[l].susceptance * (1.0 + 1e-9)) {
        net.lines[l].susceptance = target;
        changed = true;
      }
    }
    if (!changed) {
      sized = true;
      break;
    }
  }
  if (!sized) {
    fail(ErrorCode::InfeasibleSizing,
         "susceptance scaling failed to meet the angle cap");
  }

  // Record the nominal operating angles on the lines.
  const FlowCase nominal = dc_flow(net.lines, pos, p, nullptr);
  for (Line& line : net.lines) {
    line.load_angle = line_angle(line, nominal.angles);
  }

  net = assign_inertia(std::move(net), cfg.inertia_constants);
  if (stats) *stats = local_stats;
  return net;
}

}  // namespace losslim
