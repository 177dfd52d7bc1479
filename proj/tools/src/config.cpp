#include "chiralwg_cli/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace chiralwg::cli {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const auto& a : allowed)
      if (key == a) {
        known = true;
        break;
      }
    if (!known)
      throw SchemaError("config: unknown key '" + key + "' in " + where);
  }
}

double require_number(const json& obj, const std::string& key,
                      const std::string& where) {
  if (!obj.contains(key))
    throw SchemaError("config: missing key '" + key + "' in " + where);
  if (!obj[key].is_number())
    throw SchemaError("config: key '" + key + "' in " + where + " must be a number");
  return obj[key].get<double>();
}

double optional_number(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  return obj[key].get<double>();
}

// One step of a --param path: a bare key or a key with one or more [index].
struct PathStep {
  std::string key;
  std::vector<std::size_t> indexes;
};

std::vector<PathStep> split_path(const std::string& path) {
  std::vector<PathStep> steps;
  std::size_t i = 0;
  while (i < path.size()) {
    PathStep step;
    while (i < path.size() && path[i] != '.' && path[i] != '[')
      step.key.push_back(path[i++]);
    while (i < path.size() && path[i] == '[') {
      ++i;
      std::string digits;
      while (i < path.size() && std::isdigit(static_cast<unsigned char>(path[i])))
        digits.push_back(path[i++]);
      if (i >= path.size() || path[i] != ']' || digits.empty())
        throw SchemaError("param: malformed index in path '" + path + "'");
      ++i;
      step.indexes.push_back(std::stoul(digits));
    }
    if (step.key.empty() && step.indexes.empty())
      throw SchemaError("param: empty segment in path '" + path + "'");
    steps.push_back(std::move(step));
    if (i < path.size()) {
      if (path[i] != '.')
        throw SchemaError("param: expected '.' in path '" + path + "'");
      ++i;
      if (i == path.size())
        throw SchemaError("param: trailing '.' in path '" + path + "'");
    }
  }
  if (steps.empty()) throw SchemaError("param: empty path");
  return steps;
}

json* descend(json& node, const PathStep& step, bool create,
              const std::string& path) {
  json* cur = &node;
  if (!step.key.empty()) {
    if (!cur->is_object())
      throw SchemaError("param: '" + step.key + "' in path '" + path +
                        "' does not address an object");
    if (!cur->contains(step.key)) {
      if (!create)
        throw SchemaError("param: key '" + step.key + "' in path '" + path +
                          "' not found");
      (*cur)[step.key] = json::object();
    }
    cur = &(*cur)[step.key];
  }
  for (std::size_t idx : step.indexes) {
    if (!cur->is_array() || idx >= cur->size())
      throw SchemaError("param: index " + std::to_string(idx) + " in path '" +
                        path + "' is out of range");
    cur = &(*cur)[idx];
  }
  return cur;
}

}  // namespace

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte counts processed bytes, so the bad character sits at e.byte - 1.
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(origin + ":" + std::to_string(line) + ":" +
                     std::to_string(col) + ": " + e.what());
  }
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

void apply_override(json& config, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw SchemaError("param: expected key=value, got '" + assignment + "'");
  const std::string path = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  const std::vector<PathStep> steps = split_path(path);
  json* cur = &config;
  for (std::size_t s = 0; s < steps.size(); ++s) {
    // Intermediate objects may be created (e.g. drive.beta_re on an undriven
    // config); the final value is replaced outright.
    cur = descend(*cur, steps[s], true, path);
  }
  try {
    *cur = json::parse(value);
  } catch (const json::parse_error&) {
    *cur = value;  // bare strings stay strings
  }
}

Config interpret_config(const json& raw) {
  if (!raw.is_object()) throw SchemaError("config: top level must be an object");
  reject_unknown_keys(
      raw, {"atoms", "points", "phases", "drive", "solver", "initial", "sweep"},
      "top level");

  Config out;
  out.raw = raw;

  if (!raw.contains("atoms") || !raw["atoms"].is_array() || raw["atoms"].empty())
    throw SchemaError("config: 'atoms' must be a non-empty array");
  for (const auto& a : raw["atoms"]) {
    reject_unknown_keys(a, {"name", "frequency", "detuning"}, "atoms[]");
    if (!a.contains("name") || !a["name"].is_string())
      throw SchemaError("config: atom entries need a string 'name'");
    topology::Atom atom;
    atom.name = a["name"].get<std::string>();
    atom.frequency = optional_number(a, "frequency", 0.0);
    atom.detuning = optional_number(a, "detuning", 0.0);
    out.layout.atoms.push_back(std::move(atom));
  }

  if (!raw.contains("points") || !raw["points"].is_array() || raw["points"].empty())
    throw SchemaError("config: 'points' must be a non-empty array");
  for (const auto& p : raw["points"]) {
    reject_unknown_keys(p, {"atom", "rank", "gamma_right", "gamma_left"},
                        "points[]");
    if (!p.contains("atom") || !p["atom"].is_string())
      throw SchemaError("config: point entries need a string 'atom'");
    topology::ConnectionPoint cp;
    cp.atom = p["atom"].get<std::string>();
    if (!p.contains("rank") || !p["rank"].is_number_integer())
      throw SchemaError("config: point entries need an integer 'rank'");
    cp.rank = p["rank"].get<long long>();
    cp.gamma_right = require_number(p, "gamma_right", "points[]");
    cp.gamma_left = require_number(p, "gamma_left", "points[]");
    if (cp.gamma_right < 0.0)
      throw SchemaError("config: 'gamma_right' must be non-negative");
    if (cp.gamma_left < 0.0)
      throw SchemaError("config: 'gamma_left' must be non-negative");
    out.layout.points.push_back(std::move(cp));
  }

  if (!raw.contains("phases") || !raw["phases"].is_array())
    throw SchemaError("config: 'phases' must be an array");
  for (const auto& ph : raw["phases"]) {
    if (!ph.is_number()) throw SchemaError("config: 'phases' entries must be numbers");
    out.layout.phases.push_back(ph.get<double>());
  }
  if (out.layout.phases.size() + 1 != out.layout.points.size())
    throw SchemaError("config: 'phases' must have exactly points-1 entries");

  if (raw.contains("drive")) {
    const auto& d = raw["drive"];
    reject_unknown_keys(d, {"beta_re", "beta_im", "from"}, "drive");
    if (d.contains("from") &&
        (!d["from"].is_string() || d["from"].get<std::string>() != "left"))
      throw SchemaError("config: drive 'from' supports only \"left\"");
    topology::DriveSpec spec;
    spec.beta = Complex(optional_number(d, "beta_re", 0.0),
                        optional_number(d, "beta_im", 0.0));
    out.drive = spec;
  }

  if (raw.contains("solver")) {
    const auto& s = raw["solver"];
    reject_unknown_keys(s, {"rel_tol", "abs_tol", "t_final", "samples"}, "solver");
    out.solver.rel_tol = optional_number(s, "rel_tol", out.solver.rel_tol);
    out.solver.abs_tol = optional_number(s, "abs_tol", out.solver.abs_tol);
    out.solver.t_final = optional_number(s, "t_final", out.solver.t_final);
    if (s.contains("samples")) {
      if (!s["samples"].is_number_integer() || s["samples"].get<long long>() < 1)
        throw SchemaError("config: solver 'samples' must be a positive integer");
      out.solver.samples = s["samples"].get<std::size_t>();
    }
  }

  if (raw.contains("initial")) {
    if (!raw["initial"].is_string())
      throw SchemaError("config: 'initial' must be a string");
    out.initial = raw["initial"].get<std::string>();
  }

  if (raw.contains("sweep")) {
    const auto& sw = raw["sweep"];
    reject_unknown_keys(sw, {"parameters"}, "sweep");
    if (!sw.contains("parameters") || !sw["parameters"].is_array() ||
        sw["parameters"].empty() || sw["parameters"].size() > 2)
      throw SchemaError("config: sweep 'parameters' must hold one or two axes");
    for (const auto& axis : sw["parameters"]) {
      reject_unknown_keys(axis, {"path", "start", "stop", "count"},
                          "sweep.parameters[]");
      SweepParameter p;
      if (!axis.contains("path") || !axis["path"].is_string())
        throw SchemaError("config: sweep axis needs a string 'path'");
      p.path = axis["path"].get<std::string>();
      split_path(p.path);  // validate shape early
      p.start = require_number(axis, "start", "sweep.parameters[]");
      p.stop = require_number(axis, "stop", "sweep.parameters[]");
      if (!axis.contains("count") || !axis["count"].is_number_integer() ||
          axis["count"].get<long long>() < 2)
        throw SchemaError("config: sweep axis 'count' must be an integer >= 2");
      p.count = axis["count"].get<std::size_t>();
      out.sweep.push_back(std::move(p));
    }
  }
  return out;
}

std::uint64_t config_hash(const json& raw) {
  const std::string dump = raw.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash_hex(const json& raw) {
  static const char* hex = "0123456789abcdef";
  std::uint64_t h = config_hash(raw);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

}  // namespace chiralwg::cli
