#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chiralwg/errors.hpp"
#include "chiralwg/topology.hpp"

namespace chiralwg::cli {

struct ParseError : Error {
  using Error::Error;
};
struct SchemaError : Error {
  using Error::Error;
};

struct SolverConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double t_final = 10.0;
  std::size_t samples = 201;
};

struct SweepParameter {
  std::string path;  // --param style path, e.g. "phases[1]"
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 0;
};

struct Config {
  topology::Layout layout;
  std::optional<topology::DriveSpec> drive;
  SolverConfig solver;
  std::string initial = "ground";  // ket label or ground/singlet/triplet/dark/bright
  std::vector<SweepParameter> sweep;  // zero, one, or two axes
  nlohmann::json raw;                 // canonical form, hashed for provenance
};

// Strict schema: unknown keys anywhere raise SchemaError naming the key;
// JSON syntax errors raise ParseError with line and column.
nlohmann::json load_json(const std::string& path);
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);

// "--param key=value" override applied to the raw JSON before interpretation.
// Paths address nested fields: "phases[1]", "points[0].gamma_right",
// "drive.beta_re".  Missing intermediate objects are created; array indexes
// must already exist.
void apply_override(nlohmann::json& config, const std::string& assignment);

Config interpret_config(const nlohmann::json& raw);

// FNV-1a 64-bit over the canonical dump, hex-encoded; keys are emitted in
// sorted order so the hash is stable across runs.
std::uint64_t config_hash(const nlohmann::json& raw);
std::string config_hash_hex(const nlohmann::json& raw);

}  // namespace chiralwg::cli
