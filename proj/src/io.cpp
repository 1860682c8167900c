#include "losslim/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace losslim {

namespace {

using nlohmann::json;

json matrix_to_json(const MatrixXd& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXd matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols,
                          const char* name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    fail(ErrorCode::ParseError, std::string(name) + ": wrong row count");
  }
  MatrixXd M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      fail(ErrorCode::ParseError, std::string(name) + ": wrong column count");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!row[c].is_number()) {
        fail(ErrorCode::ParseError, std::string(name) + ": non-numeric entry");
      }
      const double v = row[c].get<double>();
      if (!std::isfinite(v)) {
        fail(ErrorCode::ParseError, std::string(name) + ": non-finite entry");
      }
      M(r, c) = v;
    }
  }
  return M;
}

json parse(const std::string& text) {
  json j = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) fail(ErrorCode::ParseError, "invalid JSON");
  return j;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string to_json(const StateSpace& sys) {
  json j;
  j["n"] = sys.n();
  j["m"] = sys.m();
  j["p"] = sys.p();
  j["A"] = matrix_to_json(sys.A());
  j["B"] = matrix_to_json(sys.B());
  j["C"] = matrix_to_json(sys.C());
  j["D"] = matrix_to_json(sys.D());
  return j.dump(2) + "\n";
}

StateSpace statespace_from_json(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object() || !j.contains("A") || !j.contains("n")) {
    fail(ErrorCode::ParseError, "state-space file must carry n, m, p, A..D");
  }
  const auto n = j.at("n").get<Eigen::Index>();
  const auto m = j.at("m").get<Eigen::Index>();
  const auto p = j.at("p").get<Eigen::Index>();
  if (n < 0 || m < 0 || p < 0) {
    fail(ErrorCode::ParseError, "negative dimension");
  }
  return StateSpace(matrix_from_json(j.at("A"), n, n, "A"),
                    matrix_from_json(j.at("B"), n, m, "B"),
                    matrix_from_json(j.at("C"), p, n, "C"),
                    matrix_from_json(j.at("D"), p, m, "D"));
}

const char* bus_kind_name(BusKind kind) {
  switch (kind) {
    case BusKind::Conventional: return "conventional";
    case BusKind::Hydro: return "hydro";
    case BusKind::WindSolar: return "wind_solar";
    case BusKind::Load: return "load";
  }
  return "load";
}

BusKind bus_kind_from_name(const std::string& name) {
  if (name == "conventional") return BusKind::Conventional;
  if (name == "hydro") return BusKind::Hydro;
  if (name == "wind_solar") return BusKind::WindSolar;
  if (name == "load") return BusKind::Load;
  fail(ErrorCode::ParseError, "unknown bus kind: " + name);
}

std::string to_json(const PowerNetwork& net) {
  json j;
  json buses = json::array();
  for (const Bus& bus : net.buses) {
    json b;
    b["id"] = bus.id;
    b["kind"] = bus_kind_name(bus.kind);
    b["power"] = bus.power;
    if (bus.is_generator()) b["inertia"] = bus.inertia;
    b["position"] = {bus.x, bus.y};
    b["cluster"] = bus.cluster;
    buses.push_back(std::move(b));
  }
  j["buses"] = std::move(buses);
  json lines = json::array();
  for (const Line& line : net.lines) {
    json l;
    l["i"] = line.i;
    l["j"] = line.j;
    l["susceptance"] = line.susceptance;
    l["load_angle"] = line.load_angle;
    l["tier"] = line.tier == LineTier::Transmission ? "transmission"
                                                    : "subtransmission";
    lines.push_back(std::move(l));
  }
  j["lines"] = std::move(lines);
  return j.dump(2) + "\n";
}

PowerNetwork network_from_json(const std::string& text) {
  const json j = parse(text);
  if (!j.is_object() || !j.contains("buses") || !j.contains("lines")) {
    fail(ErrorCode::ParseError, "network file must carry buses and lines");
  }
  PowerNetwork net;
  for (const json& b : j.at("buses")) {
    Bus bus;
    bus.id = b.at("id").get<int>();
    bus.kind = bus_kind_from_name(b.at("kind").get<std::string>());
    bus.power = b.value("power", 0.0);
    if (b.contains("inertia")) bus.inertia = b.at("inertia").get<double>();
    if (b.contains("position")) {
      bus.x = b.at("position").at(0).get<double>();
      bus.y = b.at("position").at(1).get<double>();
    }
    bus.cluster = b.value("cluster", 0);
    net.buses.push_back(bus);
  }
  for (const json& l : j.at("lines")) {
    Line line;
    line.i = l.at("i").get<int>();
    line.j = l.at("j").get<int>();
    line.susceptance = l.at("susceptance").get<double>();
    line.load_angle = l.value("load_angle", 0.0);
    const std::string tier = l.value("tier", std::string("subtransmission"));
    if (tier == "transmission") {
      line.tier = LineTier::Transmission;
    } else if (tier == "subtransmission") {
      line.tier = LineTier::Subtransmission;
    } else {
      fail(ErrorCode::ParseError, "unknown line tier: " + tier);
    }
    net.lines.push_back(line);
  }
  return net;
}

std::string to_json(const EnsembleConfig& cfg) {
  json j;
  j["n_clusters"] = cfg.n_clusters;
  j["total_buses"] = cfg.total_buses;
  json roles = json::array();
  for (BusKind kind : cfg.cluster_roles) roles.push_back(bus_kind_name(kind));
  j["cluster_roles"] = std::move(roles);
  j["inertia_constants"] = {
      {"conventional", cfg.inertia_constants.conventional},
      {"hydro", cfg.inertia_constants.hydro},
      {"wind_solar", cfg.inertia_constants.wind_solar}};
  j["seed"] = cfg.seed;
  if (cfg.fixed_cluster_sizes) j["fixed_cluster_sizes"] = *cfg.fixed_cluster_sizes;
  j["map_size"] = cfg.map_size;
  j["cluster_sigma"] = cfg.cluster_sigma;
  j["angle_cap_deg"] = cfg.angle_cap * 180.0 / 3.14159265358979323846;
  return j.dump(2) + "\n";
}

EnsembleConfig config_from_json(const std::string& text) {
  const json j = parse(text);
  EnsembleConfig cfg;
  if (!j.is_object()) fail(ErrorCode::ParseError, "config must be an object");
  cfg.n_clusters = j.value("n_clusters", cfg.n_clusters);
  cfg.total_buses = j.value("total_buses", cfg.total_buses);
  if (j.contains("cluster_roles")) {
    cfg.cluster_roles.clear();
    for (const json& r : j.at("cluster_roles")) {
      cfg.cluster_roles.push_back(bus_kind_from_name(r.get<std::string>()));
    }
  } else if (cfg.n_clusters != 10) {
    // Default roles only fit ten clusters; spread the reference mix.
    cfg.cluster_roles.clear();
    for (int c = 0; c < cfg.n_clusters; ++c) {
      const double frac = cfg.n_clusters == 1 ? 0.0 : double(c) / cfg.n_clusters;
      if (frac < 0.2) {
        cfg.cluster_roles.push_back(BusKind::WindSolar);
      } else if (frac < 0.3) {
        cfg.cluster_roles.push_back(BusKind::Conventional);
      } else if (frac < 0.5) {
        cfg.cluster_roles.push_back(BusKind::Hydro);
      } else {
        cfg.cluster_roles.push_back(BusKind::Load);
      }
    }
  }
  if (j.contains("inertia_constants")) {
    const json& ic = j.at("inertia_constants");
    cfg.inertia_constants.conventional =
        ic.value("conventional", cfg.inertia_constants.conventional);
    cfg.inertia_constants.hydro = ic.value("hydro", cfg.inertia_constants.hydro);
    cfg.inertia_constants.wind_solar =
        ic.value("wind_solar", cfg.inertia_constants.wind_solar);
  }
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("fixed_cluster_sizes")) {
    cfg.fixed_cluster_sizes = j.at("fixed_cluster_sizes").get<std::vector<int>>();
  }
  cfg.map_size = j.value("map_size", cfg.map_size);
  cfg.cluster_sigma = j.value("cluster_sigma", cfg.cluster_sigma);
  if (j.contains("angle_cap_deg")) {
    cfg.angle_cap =
        j.at("angle_cap_deg").get<double>() * 3.14159265358979323846 / 180.0;
  }
  return cfg;
}

std::string certificate_to_json(const LosslessCertificate& cert) {
  json j;
  j["P"] = matrix_to_json(cert.P);
  j["residual_eq_A"] = cert.residual_eq_A;
  j["residual_eq_B"] = cert.residual_eq_B;
  j["min_eigenvalue"] = cert.min_eigenvalue;
  return j.dump(2) + "\n";
}

ModelFileKind classify_model_json(const std::string& text) {
  const json j = parse(text);
  if (j.is_object() && j.contains("buses")) return ModelFileKind::Network;
  if (j.is_object() && j.contains("A")) return ModelFileKind::StateSpace;
  if (j.is_object()) return ModelFileKind::Config;
  fail(ErrorCode::ParseError, "unrecognized model file");
}

std::string gains_to_csv(const GainMatrix& gains) {
  std::ostringstream os;
  os << "bus";
  for (int id : gains.bus_ids) os << "," << id;
  os << "\n";
  for (Eigen::Index r = 0; r < gains.values.rows(); ++r) {
    os << gains.bus_ids[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < gains.values.cols(); ++c) {
      os << "," << format_double(gains.values(r, c));
    }
    os << "\n";
  }
  return os.str();
}

std::string gains_to_json(const GainMatrix& gains) {
  json j;
  j["metric"] = gains.metric == Metric::H2 ? "h2" : "hinf";
  j["log_transformed"] = gains.log_transformed;
  j["bus_ids"] = gains.bus_ids;
  j["cluster_boundaries"] = gains.cluster_boundaries;
  j["values"] = matrix_to_json(gains.values);
  return j.dump(2) + "\n";
}

GainMatrix gains_from_csv(const std::string& text, Metric metric) {
  GainMatrix gains;
  gains.metric = metric;
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) fail(ErrorCode::ParseError, "empty CSV");
  std::vector<int> header_ids;
  {
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');  // "bus"
    while (std::getline(ls, cell, ',')) header_ids.push_back(std::stoi(cell));
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != header_ids.size()) {
      fail(ErrorCode::ParseError, "ragged CSV row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() != header_ids.size()) {
    fail(ErrorCode::ParseError, "gain tables are square");
  }
  gains.bus_ids = header_ids;
  gains.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(header_ids.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      gains.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r][c];
    }
  }
  return gains;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out << contents;
  if (!out) fail(ErrorCode::IoError, "write failed: " + path);
}

std::uint64_t digest(const std::string& bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace losslim
