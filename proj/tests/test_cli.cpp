#include "losslim/cli.hpp"

#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "losslim/io.hpp"
#include "losslim/netgen.hpp"
#include "losslim/swing.hpp"

using namespace losslim;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "losslim_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string write_fixture(const std::string& name, const std::string& text) {
  const fs::path path = scratch_dir() / name;
  write_file(path.string(), text);
  return path.string();
}

std::string skew_fixture() {
  MatrixXd A(2, 2), B(2, 1), C(1, 2), D(1, 1);
  A << 0.0, -1.0, 1.0, 0.0;
  B << 1.0, 0.0;
  C << 1.0, 0.0;
  D << 0.0;
  return write_fixture("skew.json", to_json(StateSpace(A, B, C, D)));
}

std::string network_fixture() {
  PowerNetwork net;
  net.buses.push_back({0, BusKind::Conventional, 1.0, 6.0, 0.0, 0.0, 0});
  net.buses.push_back({1, BusKind::Hydro, -1.0, 3.0, 1.0, 0.0, 1});
  net.lines.push_back({0, 1, 1.0, 0.0, LineTier::Transmission});
  return write_fixture("net63.json", to_json(net));
}

}  // namespace

TEST_CASE("cli certify: skew fixture passes with P = I") {
  const CliResult r = cli({"certify", skew_fixture()});
  CHECK(r.code == 0);
  CHECK(r.out.find("\"P\"") != std::string::npos);
  CHECK(r.out.find("1.0") != std::string::npos);
}

TEST_CASE("cli certify: damped fixture exits 2, malformed exits 1") {
  MatrixXd A(1, 1), B(1, 1), C(1, 1), D(1, 1);
  A << -1.0;
  B << 1.0;
  C << 1.0;
  D << 0.0;
  const std::string damped =
      write_fixture("damped.json", to_json(StateSpace(A, B, C, D)));
  const CliResult r1 = cli({"certify", damped});
  CHECK(r1.code == 2);
  CHECK(r1.err.find("NotLossless") != std::string::npos);

  const std::string malformed = write_fixture("broken.json", "{not json");
  CHECK(cli({"certify", malformed}).code == 1);
  CHECK(cli({"certify", (scratch_dir() / "missing.json").string()}).code == 1);
}

TEST_CASE("cli limits: M = (6,3) network prints both limits") {
  const CliResult r = cli({"limits", network_fixture(), "--json"});
  CHECK(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("gamma_h2").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(j.at("gamma_hinf").get<double>() ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(j.at("h2_sq_contributions").size() == 2);
  // Largest contribution first: bus 1 with M = 3.
  CHECK(j.at("h2_sq_contributions")[0].at("bus").get<int>() == 1);
}

TEST_CASE("cli limits: lossless state space with D != 0 reports the marker") {
  MatrixXd A(2, 2), D(2, 2);
  A << 0.0, -1.0, 1.0, 0.0;
  D << 0.0, 1.0, -1.0, 0.0;
  const std::string path = write_fixture(
      "skewD.json",
      to_json(StateSpace(A, MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2), D)));
  const CliResult r = cli({"limits", path});
  CHECK(r.code == 0);
  CHECK(r.out.find("requires D=0") != std::string::npos);
}

TEST_CASE("cli synthesize: scalar plant, all three controllers hit the limit") {
  MatrixXd A(1, 1), B(1, 1), C(1, 1), D(1, 1);
  A << 0.0;
  B << 1.0;
  C << 1.0;
  D << 0.0;
  const std::string plant =
      write_fixture("integrator.json", to_json(StateSpace(A, B, C, D)));
  for (const std::string kind : {"h2-structured", "hinf-static", "h2-riccati"}) {
    const fs::path out_path = scratch_dir() / ("K_" + kind + ".json");
    const CliResult r = cli({"synthesize", plant, "--controller", kind,
                             "--output", out_path.string(), "--json"});
    CAPTURE(kind);
    CHECK(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j.at("achieved_norm").get<double>() ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-5));
    CHECK(j.at("limit").get<double>() ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    // The emitted controller re-parses.
    const StateSpace K = statespace_from_json(read_file(out_path.string()));
    CHECK(K.m() == 1);
    CHECK(K.p() == 1);
  }
}

TEST_CASE("cli synthesize: riccati path accepts skew feedthrough via the shift") {
  MatrixXd A(2, 2), D(2, 2);
  A << 0.0, -1.0, 1.0, 0.0;
  D << 0.0, 0.5, -0.5, 0.0;
  const std::string plant = write_fixture(
      "skewD2.json",
      to_json(StateSpace(A, MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2), D)));
  const CliResult r =
      cli({"synthesize", plant, "--controller", "h2-riccati", "--json"});
  CHECK(r.code == 0);
  // achieved == limit == sqrt(2 tr(CB)) = 2.
  const json j = json::parse(r.out);
  CHECK(j.at("achieved_norm").get<double>() == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(j.at("limit").get<double>() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("cli gen-network: byte-identical across runs, config knobs work") {
  const fs::path a = scratch_dir() / "net_a.json";
  const fs::path b = scratch_dir() / "net_b.json";
  CHECK(cli({"gen-network", "--seed", "1", "--output", a.string()}).code == 0);
  CHECK(cli({"gen-network", "--seed", "1", "--output", b.string()}).code == 0);
  CHECK(read_file(a.string()) == read_file(b.string()));
  // Manifest sidecar exists and lists the output.
  const std::string manifest = read_file(a.string() + ".manifest.json");
  CHECK(manifest.find("net_a.json") != std::string::npos);

  const PowerNetwork net = network_from_json(read_file(a.string()));
  CHECK(net.buses.size() == 100);

  const fs::path c = scratch_dir() / "net_c.json";
  CHECK(cli({"gen-network", "--seed", "2", "--clusters", "3", "--buses", "12",
             "--output", c.string()})
            .code == 0);
  const PowerNetwork small = network_from_json(read_file(c.string()));
  CHECK(small.buses.size() == 12);
  int sub = 0;
  for (const Line& line : small.lines) {
    if (line.tier == LineTier::Subtransmission) ++sub;
  }
  CHECK(sub == 12 - 3);  // three spanning trees
}

TEST_CASE("cli gains: one-generator network gives a 1x1 CSV with sqrt(2)") {
  PowerNetwork net;
  net.buses.push_back({0, BusKind::Conventional, 1.0 / 6.0, 1.0, 0.0, 0.0, 0});
  net.buses.push_back({1, BusKind::Load, -1.0 / 6.0, 0.0, 1.0, 0.0, 0});
  net.lines.push_back({0, 1, 1.0, 0.0, LineTier::Subtransmission});
  const std::string path = write_fixture("net1.json", to_json(net));
  const fs::path csv_path = scratch_dir() / "gains1.csv";
  const CliResult r =
      cli({"gains", path, "--metric", "h2", "--output", csv_path.string()});
  CHECK(r.code == 0);
  const GainMatrix gains = gains_from_csv(read_file(csv_path.string()), Metric::H2);
  CHECK(gains.values.rows() == 1);
  CHECK(gains.values(0, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("cli gains: byte-identical across runs and --threads settings") {
  EnsembleConfig cfg;
  cfg.n_clusters = 3;
  cfg.total_buses = 12;
  cfg.cluster_roles = {BusKind::WindSolar, BusKind::Hydro, BusKind::Load};
  cfg.seed = 4;
  const PowerNetwork net = generate_network(cfg);
  const std::string path = write_fixture("net12.json", to_json(net));

  const fs::path t1 = scratch_dir() / "g_t1.csv";
  const fs::path t4 = scratch_dir() / "g_t4.csv";
  const fs::path svg1 = scratch_dir() / "g_t1.svg";
  const fs::path svg4 = scratch_dir() / "g_t4.svg";
  CHECK(cli({"gains", path, "--metric", "hinf", "--threads", "1", "--output",
             t1.string(), "--svg", svg1.string()})
            .code == 0);
  CHECK(cli({"gains", path, "--metric", "hinf", "--threads", "4", "--output",
             t4.string(), "--svg", svg4.string()})
            .code == 0);
  CHECK(read_file(t1.string()) == read_file(t4.string()));
  CHECK(read_file(svg1.string()) == read_file(svg4.string()));
  CHECK(read_file(svg1.string()).find("<svg") != std::string::npos);
}

TEST_CASE("cli gains: lumped view of a clustered network") {
  EnsembleConfig cfg;
  cfg.n_clusters = 3;
  cfg.total_buses = 12;
  cfg.cluster_roles = {BusKind::Conventional, BusKind::Hydro, BusKind::Load};
  cfg.seed = 6;
  const std::string path =
      write_fixture("net12b.json", to_json(generate_network(cfg)));
  const fs::path csv_path = scratch_dir() / "g_lumped.csv";
  const CliResult r = cli({"gains", path, "--metric", "h2", "--lumped",
                           "--output", csv_path.string()});
  CHECK(r.code == 0);
  const GainMatrix gains = gains_from_csv(read_file(csv_path.string()), Metric::H2);
  CHECK(gains.values.rows() == 2);  // two generation clusters
}

TEST_CASE("cli gains: --format selects the payload") {
  PowerNetwork net;
  net.buses.push_back({0, BusKind::Conventional, 1.0, 6.0, 0.0, 0.0, 0});
  net.buses.push_back({1, BusKind::Hydro, -1.0, 3.0, 1.0, 0.0, 0});
  net.lines.push_back({0, 1, 1.0, 0.0, LineTier::Subtransmission});
  const std::string path = write_fixture("net_fmt.json", to_json(net));

  const CliResult csv = cli({"gains", path, "--metric", "h2"});
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("bus,0,1", 0) == 0);

  const CliResult as_json = cli({"gains", path, "--metric", "h2", "--format", "json"});
  CHECK(as_json.code == 0);
  const json j = json::parse(as_json.out);
  CHECK(j.at("metric") == "h2");
  CHECK(j.at("values").size() == 2);

  const CliResult as_svg = cli({"gains", path, "--metric", "h2", "--format", "svg"});
  CHECK(as_svg.code == 0);
  CHECK(as_svg.out.rfind("<svg", 0) == 0);
}

TEST_CASE("cli: round trips of emitted files") {
  const std::string net_path = network_fixture();
  const PowerNetwork net = network_from_json(read_file(net_path));
  const PowerNetwork again = network_from_json(to_json(net));
  CHECK(to_json(net) == to_json(again));

  GainMatrix gains;
  gains.metric = Metric::H2;
  gains.values = (MatrixXd(2, 2) << 1.0, 0.25, 1e-17, 3.714285714285714)
                     .finished();
  gains.bus_ids = {3, 9};
  const GainMatrix parsed = gains_from_csv(gains_to_csv(gains), Metric::H2);
  CHECK(parsed.bus_ids == gains.bus_ids);
  CHECK((parsed.values - gains.values).norm() == 0.0);  // 17 digits round-trip
}

TEST_CASE("cli: unknown subcommand and missing args fail with exit 1") {
  CHECK(cli({"frobnicate"}).code == 1);
  CHECK(cli({"certify"}).code == 1);
}
