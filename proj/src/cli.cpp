#include "losslim/cli.hpp"

#include <chrono>
#include <cmath>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "losslim/analysis.hpp"
#include "losslim/io.hpp"
#include "losslim/lossless.hpp"
#include "losslim/numlin.hpp"
#include "losslim/svg.hpp"
#include "losslim/swing.hpp"
#include "losslim/synth.hpp"

namespace losslim {

namespace {

using nlohmann::json;

class StageTimer {
 public:
  void start(const std::string& stage) {
    stage_ = stage;
    t0_ = std::chrono::steady_clock::now();
  }
  void stop() {
    const auto dt = std::chrono::steady_clock::now() - t0_;
    timings_[stage_] =
        std::chrono::duration_cast<std::chrono::milliseconds>(dt).count();
  }
  const std::map<std::string, long>& timings() const { return timings_; }

 private:
  std::string stage_;
  std::chrono::steady_clock::time_point t0_;
  std::map<std::string, long> timings_;
};

void write_manifest(const std::string& command, const std::string& inputs,
                    std::uint64_t seed, const StageTimer& timer,
                    const std::vector<std::string>& outputs) {
  if (outputs.empty()) return;
  json j;
  j["command"] = command;
  j["config_digest"] = digest(inputs);
  j["seed"] = seed;
  j["tool_version"] = kToolVersion;
  json t;
  for (const auto& [stage, ms] : timer.timings()) t[stage] = ms;
  j["timings_ms"] = std::move(t);
  j["outputs"] = outputs;
  write_file(outputs.front() + ".manifest.json", j.dump(2) + "\n");
}

struct GlobalFlags {
  double tol = 1e-6;
  int threads = 0;
  bool machine = false;  // --json
};

struct LoadedPlant {
  StateSpace sys;
  bool from_network = false;
};

// Accepts a raw state-space file or a network file (auto-building the swing
// model for the latter; its certificate diag(M, I) is verified during the
// build, so no certificate search is needed).
LoadedPlant load_plant(const std::string& path) {
  const std::string text = read_file(path);
  const ModelFileKind kind = classify_model_json(text);
  if (kind == ModelFileKind::Network) {
    return {build_swing_model(network_from_json(text)).sys, true};
  }
  if (kind == ModelFileKind::StateSpace) {
    return {statespace_from_json(text), false};
  }
  fail(ErrorCode::ParseError, path + ": expected a state-space or network file");
}

int cmd_certify(const std::string& path, const GlobalFlags& flags,
                std::ostream& out) {
  const StateSpace sys = statespace_from_json(read_file(path));
  const LosslessCertificate cert =
      find_certificate(sys, std::min(flags.tol, 1e-9));
  out << certificate_to_json(cert);
  return 0;
}

int cmd_limits(const std::string& path, const GlobalFlags& flags,
               std::ostream& out) {
  const std::string text = read_file(path);
  const ModelFileKind kind = classify_model_json(text);
  json j;
  if (kind == ModelFileKind::Network) {
    const PowerNetwork net = network_from_json(text);
    const SwingModel model = build_swing_model(net);
    const double gamma_h2 = h2_limit_swing(model.M);
    j["gamma_h2"] = gamma_h2;
    j["gamma_hinf"] = std::sqrt(2.0);
    const double n = double(model.M.size());
    j["gamma_h2_sq_over_n"] = gamma_h2 * gamma_h2 / n;
    j["harmonic_mean_inertia"] = n / model.M.cwiseInverse().sum();
    // Per-bus contributions 2/M_k, largest first.
    std::vector<std::pair<double, int>> contrib;
    for (Eigen::Index k = 0; k < model.M.size(); ++k) {
      contrib.emplace_back(2.0 / model.M(k), model.generator_ids[k]);
    }
    std::sort(contrib.begin(), contrib.end(),
              [](const auto& a, const auto& b) {
                return a.first > b.first || (a.first == b.first && a.second < b.second);
              });
    json rows = json::array();
    for (const auto& [value, id] : contrib) {
      rows.push_back({{"bus", id}, {"contribution", value}});
    }
    j["h2_sq_contributions"] = std::move(rows);
  } else if (kind == ModelFileKind::StateSpace) {
    const StateSpace sys = statespace_from_json(text);
    const FundamentalLimits lim = limits(sys, std::min(flags.tol, 1e-9));
    j["gamma_h2"] = lim.gamma_h2;
    if (lim.gamma_hinf) {
      j["gamma_hinf"] = *lim.gamma_hinf;
    } else {
      j["gamma_hinf"] = "requires D=0";
    }
  } else {
    fail(ErrorCode::ParseError, path + ": expected a state-space or network file");
  }
  if (flags.machine) {
    out << j.dump(2) << "\n";
  } else {
    out << "gamma_h2   = " << format_double(j["gamma_h2"].get<double>()) << "\n";
    if (j["gamma_hinf"].is_number()) {
      out << "gamma_hinf = " << format_double(j["gamma_hinf"].get<double>())
          << "\n";
    } else {
      out << "gamma_hinf = (requires D=0)\n";
    }
    if (j.contains("harmonic_mean_inertia")) {
      out << "gamma_h2^2 / n = " << format_double(j["gamma_h2_sq_over_n"].get<double>())
          << " = 2 / HM(M), HM(M) = "
          << format_double(j["harmonic_mean_inertia"].get<double>()) << "\n";
    }
  }
  return 0;
}

int cmd_synthesize(const std::string& path, const std::string& kind,
                   const std::string& output, const GlobalFlags& flags,
                   std::ostream& out) {
  StageTimer timer;
  timer.start("synthesize");
  const LoadedPlant plant = load_plant(path);
  const StateSpace& sys = plant.sys;
  if (!plant.from_network) {
    // All designs assume losslessness; swing models certify on construction.
    (void)find_certificate(sys, std::min(flags.tol, 1e-9));
  }

  Controller K{StateSpace(), ControllerKind::StructuredH2};
  double achieved = 0.0;
  double limit = 0.0;
  const GeneralizedPlant gp = build_generalized_plant(sys);
  if (kind == "h2-structured") {
    K = structured_h2_controller(sys);
    achieved = h2_norm(close_loop(gp, K));
    limit = std::sqrt(2.0 * (sys.C() * sys.B()).trace());
  } else if (kind == "hinf-static") {
    K = static_hinf_controller(sys);
    HinfOptions hopts;
    hopts.tol = flags.tol;
    achieved = hinf_norm(close_loop(gp, K), hopts);
    limit = std::sqrt(2.0);
  } else if (kind == "h2-riccati") {
    const bool shifted = sys.has_feedthrough();
    const GeneralizedPlant design_gp = shifted ? loop_shift(gp) : gp;
    K = riccati_h2_controller(design_gp);
    achieved = h2_norm(close_loop(design_gp, K));
    limit = std::sqrt(2.0 * (sys.C() * sys.B()).trace());
  } else {
    fail(ErrorCode::ParseError, "unknown controller kind: " + kind);
  }
  timer.stop();

  std::vector<std::string> outputs;
  if (!output.empty()) {
    write_file(output, to_json(K.K));
    outputs.push_back(output);
  }
  if (flags.machine) {
    json j;
    j["controller"] = kind;
    j["achieved_norm"] = achieved;
    j["limit"] = limit;
    out << j.dump(2) << "\n";
  } else {
    out << "controller " << kind << ": achieved " << format_double(achieved)
        << " vs limit " << format_double(limit) << "\n";
  }
  write_manifest("synthesize", read_file(path), 0, timer, outputs);
  return 0;
}

int cmd_gen_network(const EnsembleConfig& cfg, const std::string& output,
                    const GlobalFlags& flags, std::ostream& out) {
  StageTimer timer;
  timer.start("generate");
  GenerationStats stats;
  const PowerNetwork net = generate_network(cfg, &stats);
  timer.stop();
  const std::string text = to_json(net);
  std::vector<std::string> outputs;
  if (!output.empty()) {
    write_file(output, text);
    outputs.push_back(output);
    write_manifest("gen-network", to_json(cfg), cfg.seed, timer, outputs);
  } else {
    out << text;
  }
  if (flags.machine && !output.empty()) {
    json j;
    j["buses"] = net.buses.size();
    j["lines"] = net.lines.size();
    j["size_resamples"] = stats.size_resamples;
    j["sizing_iterations"] = stats.sizing_iterations;
    out << j.dump(2) << "\n";
  } else if (!output.empty()) {
    out << "wrote " << output << " (" << net.buses.size() << " buses, "
        << net.lines.size() << " lines)\n";
  }
  return 0;
}

int cmd_gains(const std::string& path, const std::string& metric_name,
              bool lumped, int ensemble, const std::string& output,
              const std::string& svg_path, const std::string& format,
              const GlobalFlags& flags, std::ostream& out) {
  const Metric metric = metric_name == "hinf" ? Metric::Hinf : Metric::H2;
  GainOptions opts;
  opts.tol = flags.tol;
  opts.threads = flags.threads;

  StageTimer timer;
  timer.start("gains");
  const std::string text = read_file(path);
  const ModelFileKind kind = classify_model_json(text);
  GainMatrix gains;
  std::uint64_t seed = 0;
  if (ensemble > 0) {
    if (kind != ModelFileKind::Config) {
      fail(ErrorCode::ParseError,
           "--ensemble expects a generator config file (with fixed_cluster_sizes)");
    }
    const EnsembleConfig cfg = config_from_json(text);
    seed = cfg.seed;
    const EnsembleResult result = ensemble_average(cfg, ensemble, metric, opts);
    gains = result.mean;
  } else if (kind == ModelFileKind::Network) {
    PowerNetwork net = network_from_json(text);
    if (lumped) net = lump(net);
    gains = network_gains(net, metric, opts);
  } else {
    fail(ErrorCode::ParseError,
         path + ": expected a network file (or a config with --ensemble)");
  }
  timer.stop();

  std::vector<std::string> outputs;
  std::string payload;
  if (format == "json") {
    payload = gains_to_json(gains);
  } else if (format == "svg") {
    payload = heatmap_svg(gains);
  } else {
    payload = gains_to_csv(gains);
  }
  if (!output.empty()) {
    write_file(output, payload);
    outputs.push_back(output);
  } else {
    out << payload;
  }
  if (!svg_path.empty()) {
    write_file(svg_path, heatmap_svg(gains));
    outputs.push_back(svg_path);
  }
  write_manifest("gains", text, seed, timer, outputs);
  if (!output.empty()) {
    if (flags.machine) {
      json j;
      j["rows"] = gains.values.rows();
      j["max"] = gains.values.maxCoeff();
      j["min"] = gains.values.minCoeff();
      j["outputs"] = outputs;
      out << j.dump(2) << "\n";
    } else {
      out << "wrote " << output << " (" << gains.values.rows() << "x"
          << gains.values.cols() << " " << metric_name << " gains)\n";
    }
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"performance limits of lossless systems and swing-equation "
               "power grids"};
  app.set_version_flag("--version", kToolVersion);
  GlobalFlags flags;
  app.add_option("--tol", flags.tol, "numerical tolerance")->capture_default_str();
  app.add_option("--threads", flags.threads, "worker threads (0 = auto)")
      ->capture_default_str();
  app.add_flag("--json", flags.machine, "machine-readable stdout");

  std::string model_path, output, svg_path, controller_kind = "h2-structured";
  std::string metric = "h2", config_path, format = "csv";
  bool lumped = false;
  int ensemble = 0;
  std::uint64_t seed = 0;
  int clusters = 0, buses = 0;

  CLI::App* certify = app.add_subcommand("certify", "find the storage certificate P");
  certify->add_option("model", model_path, "state-space JSON file")->required();

  CLI::App* limits_cmd =
      app.add_subcommand("limits", "fundamental H2/Hinf limits");
  limits_cmd->add_option("model", model_path, "state-space or network JSON file")
      ->required();

  CLI::App* synth = app.add_subcommand("synthesize", "optimal controllers");
  synth->add_option("model", model_path, "state-space or network JSON file")
      ->required();
  synth->add_option("--controller", controller_kind,
                    "h2-structured | hinf-static | h2-riccati")
      ->check(CLI::IsMember({"h2-structured", "hinf-static", "h2-riccati"}));
  synth->add_option("--output", output, "controller state-space file");

  CLI::App* gen = app.add_subcommand("gen-network", "random clustered network");
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--config", config_path, "config JSON file");
  gen->add_option("--clusters", clusters, "number of clusters");
  gen->add_option("--buses", buses, "total number of buses");
  gen->add_option("--output", output, "network JSON file");

  CLI::App* gains = app.add_subcommand("gains", "closed-loop sub-block gains");
  gains->add_option("model", model_path, "network JSON file (config with --ensemble)")
      ->required();
  gains->add_option("--metric", metric, "h2 | hinf")
      ->check(CLI::IsMember({"h2", "hinf"}));
  gains->add_flag("--lumped", lumped, "lump clusters before computing");
  gains->add_option("--ensemble", ensemble, "average this many seeds");
  gains->add_option("--output", output, "output path");
  gains->add_option("--format", format, "payload format: csv | json | svg")
      ->check(CLI::IsMember({"csv", "json", "svg"}));
  gains->add_option("--svg", svg_path, "also emit a heatmap");

  app.require_subcommand(1);
  for (CLI::App* sub : {certify, limits_cmd, synth, gen, gains}) {
    sub->fallthrough();  // global flags may follow the subcommand
  }

  std::vector<std::string> argv_like(args.rbegin(), args.rend());
  try {
    app.parse(argv_like);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help / --version
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (certify->parsed()) return cmd_certify(model_path, flags, out);
    if (limits_cmd->parsed()) return cmd_limits(model_path, flags, out);
    if (synth->parsed()) {
      return cmd_synthesize(model_path, controller_kind, output, flags, out);
    }
    if (gen->parsed()) {
      EnsembleConfig cfg;
      if (!config_path.empty()) cfg = config_from_json(read_file(config_path));
      if (gen->count("--seed") > 0) cfg.seed = seed;
      if (clusters > 0) cfg.n_clusters = clusters;
      if (buses > 0) cfg.total_buses = buses;
      if (clusters > 0 &&
          static_cast<int>(cfg.cluster_roles.size()) != cfg.n_clusters) {
        // Re-derive roles for a non-default cluster count.
        cfg = config_from_json(
            std::string("{\"n_clusters\": ") + std::to_string(cfg.n_clusters) +
            ", \"total_buses\": " + std::to_string(cfg.total_buses) +
            ", \"seed\": " + std::to_string(cfg.seed) + "}");
      }
      return cmd_gen_network(cfg, output, flags, out);
    }
    if (gains->parsed()) {
      return cmd_gains(model_path, metric, lumped, ensemble, output, svg_path,
                       format, flags, out);
    }
  } catch (const Error& e) {
    err << "error (" << error_name(e.code()) << "): " << e.what() << "\n";
    return exit_class(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace losslim
