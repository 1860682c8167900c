#pragma once

#include "losslim/netgen.hpp"
#include "losslim/swing.hpp"
#include "losslim/synth.hpp"

namespace losslim {

enum class Metric { H2, Hinf };

// n x n table of closed-loop sub-block norms; row i = monitored bus,
// column k = disturbed bus.
struct GainMatrix {
  MatrixXd values;
  Metric metric = Metric::H2;
  bool log_transformed = false;
  std::vector<int> bus_ids;
  std::vector<int> cluster_boundaries;  // cumulative generator counts
};

struct GainOptions {
  double tol = 1e-6;
  int threads = 0;          // 0 = hardware concurrency
  bool allow_mixed = false; // permit nonstandard metric/controller pairings
                            // (the static gain makes H2 gains infinite)
};

// Per-bus gains: entry (i,k) = norm of the closed-loop map from
// (w_u_k, w_y_k) to ((Cx)_i, u_i). The H2 path solves one Gramian per
// disturbed bus and reads all monitored buses off the trace; the Hinf path
// bisects per entry, seeded by a shared frequency-grid pre-pass.
GainMatrix subblock_gains(const StateSpace& plant, const Controller& K,
                          Metric metric, const GainOptions& opts = {});

// Same computation over index groups (cluster-aggregated view): entry (I,K)
// is the norm of the multi-bus sub-block map.
GainMatrix block_gains(const StateSpace& plant, const Controller& K,
                       Metric metric,
                       const std::vector<std::vector<Eigen::Index>>& groups,
                       const GainOptions& opts = {});

// Swing-model gains of a network with the metric-appropriate optimal
// controller; bus ids and cluster boundaries filled in.
GainMatrix network_gains(const PowerNetwork& net, Metric metric,
                         const GainOptions& opts = {});

struct EnsembleResult {
  GainMatrix mean;          // entrywise arithmetic mean of raw gains
  int runs = 0;
  int resampled_seeds = 0;  // sizing failures skipped, next seed used
};

// Entrywise mean over networks generated from seeds seed+0 .. seed+n_runs-1.
// Requires fixed cluster sizes so the matrices are conformal.
EnsembleResult ensemble_average(const EnsembleConfig& cfg, int n_runs,
                                Metric metric, const GainOptions& opts = {});

struct JensenReport {
  double lhs = 0.0;                  // sum 1/M_k
  double rhs = 0.0;                  // n^2 / M_tot
  double gap = 0.0;                  // lhs - rhs >= 0
  double heterogeneity_index = 0.0;  // gap * M_tot / n^2
};

JensenReport jensen_report(const VectorXd& M);

struct LumpedComparison {
  GainMatrix full_gains;    // cluster-aggregated view of the full model
  GainMatrix lumped_gains;  // per-bus gains of the lumped model
  double limit_full = 0.0;
  double limit_lumped = 0.0;
};

LumpedComparison compare_lumped(const PowerNetwork& full, Metric metric,
                                const GainOptions& opts = {});

// Display transform for heatmaps; raw values stay available.
GainMatrix log_transform(const GainMatrix& gains);

}  // namespace losslim
