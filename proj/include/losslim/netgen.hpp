#pragma once

#include <cstdint>
#include <optional>

#include "losslim/swing.hpp"

namespace losslim {

// Deterministic, portable 64-bit generator (SplitMix64). Substreams derive
// from the original seed, not the evolving state, so regenerating one cluster
// never disturbs another.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t next();
  double u01();                       // [0, 1), 53-bit
  double normal();                    // Box-Muller, fully specified
  std::uint64_t below(std::uint64_t n);  // [0, n)

  Rng substream(std::uint64_t id) const;

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

struct InertiaConstants {
  double conventional = 6.0;
  double hydro = 3.0;
  double wind_solar = 0.006;  // one one-thousandth of conventional
};

struct EnsembleConfig {
  int n_clusters = 10;
  int total_buses = 100;
  // Cluster role assignment; default mix: two wind/solar clusters, one
  // conventional, two hydro, five load.
  std::vector<BusKind> cluster_roles = {
      BusKind::WindSolar, BusKind::WindSolar, BusKind::Conventional,
      BusKind::Hydro,     BusKind::Hydro,     BusKind::Load,
      BusKind::Load,      BusKind::Load,      BusKind::Load,
      BusKind::Load};
  InertiaConstants inertia_constants;
  std::uint64_t seed = 0;
  std::optional<std::vector<int>> fixed_cluster_sizes;

  double map_size = 100.0;
  double cluster_sigma = 6.0;
  double angle_cap = 45.0 * 3.14159265358979323846 / 180.0;
  double sizing_margin = 1.5;               // slack under the cap per update
  double sizing_margin_transmission = 2.0;  // covers outage re-dispatch
  int sizing_max_iterations = 20;
};

struct GenerationStats {
  int size_resamples = 0;      // cluster-size draws rejected (< 2 buses)
  int sizing_iterations = 0;   // susceptance scaling sweeps
};

// Random clustered network: per-cluster MST sub-transmission, eigenvector-
// centrality transmission backbone (complete graph over the cluster centers),
// role-dependent inertia, susceptances sized so every DC load angle stays
// below the cap nominally and, on the transmission tier, under any single
// transmission-line outage.
PowerNetwork generate_network(const EnsembleConfig& cfg,
                              GenerationStats* stats = nullptr);

// M_k = constant(kind) * |rated power|; load buses untouched.
PowerNetwork assign_inertia(PowerNetwork net, const InertiaConstants& constants);

// Dominant-eigenvector scores of a connected 0/1 adjacency, unit 2-norm,
// power iteration to 1e-10. Ties resolve to the lowest index.
VectorXd eigenvector_centrality(const MatrixXd& adjacency);

Eigen::Index most_central(const VectorXd& scores);

}  // namespace losslim
