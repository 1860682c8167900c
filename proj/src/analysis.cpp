#include "losslim/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <thread>

#include "losslim/numlin.hpp"

namespace losslim {

namespace {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(0..count-1) across a fixed-size pool. Each index writes its own
// output slot, so the result does not depend on scheduling.
void parallel_for(Eigen::Index count, int threads,
                  const std::function<void(Eigen::Index)>& fn) {
  threads = std::min<Eigen::Index>(std::max(threads, 1), std::max<Eigen::Index>(count, 1));
  if (threads <= 1 || count <= 1) {
    for (Eigen::Index i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<Eigen::Index> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const Eigen::Index i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

void check_pairing(const Controller& K, Metric metric, const GainOptions& opts) {
  if (opts.allow_mixed) return;
  const bool ok = (metric == Metric::H2 && K.kind == ControllerKind::StructuredH2) ||
                  (metric == Metric::Hinf && K.kind == ControllerKind::StaticHinf);
  if (!ok) {
    fail(ErrorCode::NonzeroFeedthrough,
         "H2 gains pair with the dynamic controller and Hinf with the static "
         "gain; pass allow_mixed to override");
  }
}

std::vector<int> default_boundaries(Eigen::Index n) { return {int(n)}; }

}  // namespace

GainMatrix block_gains(const StateSpace& plant, const Controller& K,
                       Metric metric,
                       const std::vector<std::vector<Eigen::Index>>& groups,
                       const GainOptions& opts) {
  check_pairing(K, metric, opts);
  const Eigen::Index n = plant.m();
  if (plant.p() != n) {
    fail(ErrorCode::DimensionMismatch,
         "sub-block gains need a square plant (swing models are)");
  }
  const StateSpace cl = close_loop(build_generalized_plant(plant), K);
  if (!is_hurwitz(cl.A())) {
    fail(ErrorCode::NotHurwitz, "closed loop is not internally stable");
  }
  const Eigen::Index g = static_cast<Eigen::Index>(groups.size());
  for (const auto& grp : groups) {
    for (Eigen::Index idx : grp) {
      if (idx < 0 || idx >= n) {
        fail(ErrorCode::DimensionMismatch, "group index out of range");
      }
    }
  }
  // Input columns of group k: {w_u over the group, w_y over the group};
  // output rows of group i: {(Cx) over the group, u over the group}.
  auto input_cols = [&](Eigen::Index k) {
    std::vector<Eigen::Index> cols;
    for (Eigen::Index b : groups[k]) cols.push_back(b);
    for (Eigen::Index b : groups[k]) cols.push_back(n + b);
    return cols;
  };
  auto output_rows = input_cols;  // same layout on the z side

  GainMatrix out;
  out.metric = metric;
  out.values = MatrixXd::Zero(g, g);

  if (metric == Metric::H2) {
    if (cl.has_feedthrough()) {
      fail(ErrorCode::NonzeroFeedthrough,
           "closed loop has direct feedthrough; H2 sub-block gains are "
           "infinite (use the dynamic controller)");
    }
    // One Gramian per disturbed group; every monitored group reads off the
    // same C Wc C^T.
    const LyapunovSolver solver(cl.A());
    std::vector<MatrixXd> cwc(g);
    parallel_for(g, resolve_threads(opts.threads), [&](Eigen::Index k) {
      const auto cols = input_cols(k);
      MatrixXd Bk(cl.n(), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t c = 0; c < cols.size(); ++c) {
        Bk.col(static_cast<Eigen::Index>(c)) = cl.B().col(cols[c]);
      }
      const MatrixXd Wc = solver.solve(Bk * Bk.transpose());
      cwc[k] = cl.C() * Wc * cl.C().transpose();
    });
    for (Eigen::Index k = 0; k < g; ++k) {
      for (Eigen::Index i = 0; i < g; ++i) {
        double sq = 0.0;
        for (Eigen::Index r : output_rows(i)) sq += cwc[k](r, r);
        out.values(i, k) = std::sqrt(std::max(0.0, sq));
      }
    }
  } else {
    // Shared frequency-grid pre-pass: the full response is factored once per
    // frequency, then every sub-block reads its own singular value.
    const VectorXcd eig = eigenvalues_of(cl.A());
    double wmin = std::numeric_limits<double>::infinity(), wmax = 1.0;
    for (Eigen::Index q = 0; q < eig.size(); ++q) {
      const double mag = std::abs(eig(q));
      if (mag > 0.0) wmin = std::min(wmin, mag);
      wmax = std::max(wmax, mag);
    }
    wmin = std::max(wmin * 1e-2, 1e-6);
    wmax *= 1e2;
    const int grid = 64;
    std::vector<double> freqs = {0.0};
    for (int q = 0; q < grid; ++q) {
      freqs.push_back(wmin * std::pow(wmax / wmin, double(q) / (grid - 1)));
    }
    MatrixXd hints = MatrixXd::Zero(g, g);
    std::vector<MatrixXcd> responses(freqs.size());
    parallel_for(static_cast<Eigen::Index>(freqs.size()),
                 resolve_threads(opts.threads), [&](Eigen::Index q) {
                   responses[q] = cl.frequency_response(freqs[q]);
                 });
    for (const MatrixXcd& F : responses) {
      for (Eigen::Index i = 0; i < g; ++i) {
        for (Eigen::Index k = 0; k < g; ++k) {
          const auto rows = output_rows(i);
          const auto cols = input_cols(k);
          MatrixXcd sub(rows.size(), cols.size());
          for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t c = 0; c < cols.size(); ++c) {
              sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                  F(rows[r], cols[c]);
            }
          }
          hints(i, k) = std::max(hints(i, k),
                                 sub.jacobiSvd().singularValues()(0));
        }
      }
    }
    parallel_for(g * g, resolve_threads(opts.threads), [&](Eigen::Index e) {
      const Eigen::Index i = e / g, k = e % g;
      const StateSpace sub = cl.subsystem(output_rows(i), input_cols(k));
      HinfOptions hopts;
      hopts.tol = opts.tol;
      hopts.lower_hint = hints(i, k);
      hopts.grid_points = 8;  // the shared pre-pass already did the sweep
      hopts.spectrum_seeds = false;
      hopts.assume_hurwitz = true;  // verified once for the whole loop
      out.values(i, k) = hinf_norm(sub, hopts);
    });
  }
  out.cluster_boundaries = default_boundaries(g);
  return out;
}

GainMatrix subblock_gains(const StateSpace& plant, const Controller& K,
                          Metric metric, const GainOptions& opts) {
  std::vector<std::vector<Eigen::Index>> singletons(plant.m());
  for (Eigen::Index b = 0; b < plant.m(); ++b) singletons[b] = {b};
  GainMatrix out = block_gains(plant, K, metric, singletons, opts);
  out.bus_ids.resize(plant.m());
  for (Eigen::Index b = 0; b < plant.m(); ++b) out.bus_ids[b] = int(b);
  return out;
}

namespace {

GainMatrix model_gains(const SwingModel& model, Metric metric,
                       const GainOptions& opts) {
  const Controller K = metric == Metric::H2
                           ? structured_h2_controller(model.sys)
                           : static_hinf_controller(model.sys);
  GainMatrix gains = subblock_gains(model.sys, K, metric, opts);
  gains.bus_ids = model.generator_ids;
  return gains;
}

std::vector<int> cluster_boundaries_of(const PowerNetwork& net,
                                       const std::vector<int>& generator_ids) {
  std::map<int, int> cluster_of;
  for (const Bus& bus : net.buses) cluster_of[bus.id] = bus.cluster;
  std::vector<int> boundaries;
  int count = 0;
  for (std::size_t k = 0; k < generator_ids.size(); ++k) {
    ++count;
    const bool last = k + 1 == generator_ids.size();
    if (last || cluster_of.at(generator_ids[k]) !=
                    cluster_of.at(generator_ids[k + 1])) {
      boundaries.push_back(count);
    }
  }
  return boundaries;
}

}  // namespace

GainMatrix network_gains(const PowerNetwork& net, Metric metric,
                         const GainOptions& opts) {
  const SwingModel model = build_swing_model(net);
  GainMatrix gains = model_gains(model, metric, opts);
  gains.cluster_boundaries = cluster_boundaries_of(net, model.generator_ids);
  return gains;
}

EnsembleResult ensemble_average(const EnsembleConfig& cfg, int n_runs,
                                Metric metric, const GainOptions& opts) {
  if (!cfg.fixed_cluster_sizes) {
    fail(ErrorCode::DimensionMismatch,
         "ensemble averaging requires fixed cluster sizes");
  }
  if (n_runs <= 0) {
    fail(ErrorCode::DimensionMismatch, "n_runs must be positive");
  }
  EnsembleResult result;
  // Fix the seed list first (generation is cheap and sequential), then spend
  // the parallel budget on the gain matrices.
  std::vector<PowerNetwork> networks;
  std::uint64_t seed = cfg.seed;
  while (static_cast<int>(networks.size()) < n_runs) {
    EnsembleConfig run_cfg = cfg;
    run_cfg.seed = seed++;
    try {
      networks.push_back(generate_network(run_cfg));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InfeasibleSizing) throw;
      result.resampled_seeds += 1;
    }
  }

  std::vector<GainMatrix> per_run(networks.size());
  const int outer = std::min<int>(resolve_threads(opts.threads),
                                  static_cast<int>(networks.size()));
  GainOptions inner = opts;
  inner.threads = std::max(1, resolve_threads(opts.threads) / std::max(outer, 1));
  parallel_for(static_cast<Eigen::Index>(networks.size()), outer,
               [&](Eigen::Index r) {
                 per_run[r] = network_gains(networks[r], metric, inner);
               });

  result.mean = per_run.front();
  for (std::size_t r = 1; r < per_run.size(); ++r) {
    result.mean.values += per_run[r].values;
  }
  result.mean.values /= double(per_run.size());
  result.runs = static_cast<int>(per_run.size());
  return result;
}

JensenReport jensen_report(const VectorXd& M) {
  if (M.size() == 0 || !(M.minCoeff() > 0.0)) {
    fail(ErrorCode::NonpositiveInertia, "all inertias must be positive");
  }
  JensenReport r;
  const double n = double(M.size());
  const double m_tot = M.sum();
  r.lhs = M.cwiseInverse().sum();
  r.rhs = n * n / m_tot;
  r.gap = r.lhs - r.rhs;
  r.heterogeneity_index = r.gap * m_tot / (n * n);
  return r;
}

LumpedComparison compare_lumped(const PowerNetwork& full, Metric metric,
                                const GainOptions& opts) {
  LumpedComparison out;
  const SwingModel full_model = build_swing_model(full);
  const PowerNetwork lumped_net = lump(full);
  const SwingModel lumped_model = build_swing_model(lumped_net);

  // Cluster-aggregated view of the full model: group generator buses by the
  // cluster they belong to, keeping only clusters that hold generators.
  std::map<int, int> cluster_of;
  for (const Bus& bus : full.buses) cluster_of[bus.id] = bus.cluster;
  std::map<int, std::vector<Eigen::Index>> by_cluster;
  for (std::size_t k = 0; k < full_model.generator_ids.size(); ++k) {
    by_cluster[cluster_of.at(full_model.generator_ids[k])].push_back(
        static_cast<Eigen::Index>(k));
  }
  std::vector<std::vector<Eigen::Index>> groups;
  std::vector<int> group_ids;
  for (const auto& [cluster_id, members] : by_cluster) {
    groups.push_back(members);
    group_ids.push_back(cluster_id);
  }

  const Controller K_full = metric == Metric::H2
                                ? structured_h2_controller(full_model.sys)
                                : static_hinf_controller(full_model.sys);
  out.full_gains = block_gains(full_model.sys, K_full, metric, groups, opts);
  out.full_gains.bus_ids = group_ids;
  out.lumped_gains = model_gains(lumped_model, metric, opts);
  out.limit_full = h2_limit_swing(full_model.M);
  out.limit_lumped = h2_limit_swing(lumped_model.M);
  return out;
}

GainMatrix log_transform(const GainMatrix& gains) {
  GainMatrix out = gains;
  out.values = gains.values.array().log().matrix();
  out.log_transformed = true;
  return out;
}

}  // namespace losslim
