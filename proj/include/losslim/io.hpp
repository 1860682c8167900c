#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "losslim/analysis.hpp"
#include "losslim/lossless.hpp"
#include "losslim/netgen.hpp"
#include "losslim/state_space.hpp"
#include "losslim/swing.hpp"

namespace losslim {

// State-space files: JSON object {n, m, p, A, B, C, D} with row-major nested
// arrays of finite doubles.
std::string to_json(const StateSpace& sys);
StateSpace statespace_from_json(const std::string& text);

// Network files: {buses: [{id, kind, power, inertia?, position: [x, y],
// cluster}], lines: [{i, j, susceptance, load_angle?, tier}]}.
std::string to_json(const PowerNetwork& net);
PowerNetwork network_from_json(const std::string& text);

std::string to_json(const EnsembleConfig& cfg);
EnsembleConfig config_from_json(const std::string& text);

std::string certificate_to_json(const LosslessCertificate& cert);

// Detects whether a JSON document describes a network ("buses" present),
// a generator config, or a raw state space.
enum class ModelFileKind { StateSpace, Network, Config };
ModelFileKind classify_model_json(const std::string& text);

// Gain tables: header row of bus ids, one row per monitored bus, raw values
// at 17 significant digits.
std::string gains_to_csv(const GainMatrix& gains);
GainMatrix gains_from_csv(const std::string& text, Metric metric);
std::string gains_to_json(const GainMatrix& gains);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

// FNV-1a over the canonical input bytes; stable across runs and platforms.
std::uint64_t digest(const std::string& bytes);

std::string format_double(double value);  // round-trip-exact decimal form

const char* bus_kind_name(BusKind kind);
BusKind bus_kind_from_name(const std::string& name);

}  // namespace losslim
