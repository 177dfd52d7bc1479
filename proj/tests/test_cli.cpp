#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chiralwg_cli/commands.hpp"
#include "chiralwg_cli/config.hpp"
#include "chiralwg_cli/csv.hpp"

using chiralwg::cli::run_cli;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("chiralwg-test-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content) const {
    const fs::path p = path / name;
    std::ofstream(p) << content;
    return p.string();
  }
};

const char* small_pair_json = R"({
  "atoms": [
    {"name": "a", "frequency": 0.0},
    {"name": "b", "frequency": 0.0}
  ],
  "points": [
    {"atom": "a", "rank": 0, "gamma_right": 0.5, "gamma_left": 0.5},
    {"atom": "b", "rank": 1, "gamma_right": 0.5, "gamma_left": 0.5}
  ],
  "phases": [0.0]
})";

const char* driven_pair_json = R"({
  "atoms": [
    {"name": "a", "frequency": 0.0, "detuning": 0.5},
    {"name": "b", "frequency": 0.0, "detuning": -0.5}
  ],
  "points": [
    {"atom": "a", "rank": 0, "gamma_right": 0.25, "gamma_left": 0.75},
    {"atom": "b", "rank": 1, "gamma_right": 0.25, "gamma_left": 0.75}
  ],
  "phases": [0.0],
  "drive": {"beta_re": 1.0, "beta_im": 0.0, "from": "left"}
})";

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("Coefficient dump carries provenance comments and the config hash") {
  TempDir tmp;
  const std::string cfg = tmp.file("pair.json", small_pair_json);
  const RunResult r = run({"coeffs", "--config", cfg});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("# chiralwg coeffs", 0) == 0);
  CHECK(r.out.find("# config-hash: ") != std::string::npos);
  CHECK(r.out.find("exchange,a,b,") != std::string::npos);
}

TEST_CASE("Reruns of the same config are byte-identical") {
  TempDir tmp;
  const std::string cfg = tmp.file("pair.json", driven_pair_json);
  const RunResult a = run({"evolve", "--config", cfg, "--param", "solver.samples=31"});
  const RunResult b = run({"evolve", "--config", cfg, "--param", "solver.samples=31"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("p_dark") != std::string::npos);
}

TEST_CASE("Parameter overrides change the hash and the physics") {
  TempDir tmp;
  const std::string cfg = tmp.file("pair.json", small_pair_json);
  const RunResult base = run({"coeffs", "--config", cfg});
  const RunResult shifted =
      run({"coeffs", "--config", cfg, "--param", "phases[0]=3.141592653589793"});
  CHECK(shifted.code == 0);
  CHECK(base.out != shifted.out);
  const auto hash_line = [](const std::string& s) {
    return s.substr(0, s.find('\n', s.find("config-hash")));
  };
  CHECK(hash_line(base.out) != hash_line(shifted.out));
}

TEST_CASE("Unknown configuration keys are rejected by name") {
  TempDir tmp;
  const std::string cfg = tmp.file(
      "bad.json",
      R"({"atoms": [{"name": "a", "frequenzy": 1.0}], "points": [{"atom": "a", "rank": 0, "gamma_right": 1.0, "gamma_left": 0.0}], "phases": []})");
  const RunResult r = run({"coeffs", "--config", cfg});
  CHECK(r.code == 2);
  CHECK(r.err.find("frequenzy") != std::string::npos);
}

TEST_CASE("Malformed JSON reports the line and column") {
  TempDir tmp;
  const std::string cfg = tmp.file("broken.json", "{\n  \"atoms\": [ nope\n");
  const RunResult r = run({"coeffs", "--config", cfg});
  CHECK(r.code == 2);
  CHECK(r.err.find(":2:") != std::string::npos);
}

TEST_CASE("Non-positive integration horizons are input errors") {
  TempDir tmp;
  const std::string cfg = tmp.file("pair.json", small_pair_json);
  CHECK(run({"evolve", "--config", cfg, "--param", "solver.t_final=0"}).code == 2);
  CHECK(run({"evolve", "--config", cfg, "--param", "solver.t_final=-2"}).code == 2);
}

TEST_CASE("Degenerate stationary kernels exit with a physics failure") {
  TempDir tmp;
  const std::string cfg = tmp.file("pair.json", small_pair_json);
  const RunResult r = run({"steady", "--config", cfg});
  CHECK(r.code == 1);
  CHECK(r.out.find("degenerate kernel") != std::string::npos);
  CHECK(r.out.find("kernel0") != std::string::npos);
}

TEST_CASE("Driven steady state reports fidelity against the analytic dark state") {
  TempDir tmp;
  const std::string cfg = tmp.file("pair.json", driven_pair_json);
  const RunResult r = run({"steady", "--config", cfg});
  CHECK(r.code == 0);
  CHECK(r.out.find("fidelity-to-analytic-dark") != std::string::npos);
}

TEST_CASE("Dark scan output lists classes with residuals") {
  TempDir tmp;
  const std::string cfg = tmp.file("pair.json", driven_pair_json);
  const RunResult r = run({"dark", "--config", cfg});
  CHECK(r.code == 0);
  CHECK(r.out.find("driven-singlet") != std::string::npos);
  CHECK(r.out.find("# kernel_dim: 2") != std::string::npos);
}

TEST_CASE("Sweep requires a sweep section and parallelizes a grid") {
  TempDir tmp;
  const std::string cfg = tmp.file("pair.json", small_pair_json);
  CHECK(run({"sweep", "--config", cfg}).code == 2);
  const RunResult r = run(
      {"sweep", "--config", cfg, "--param",
       R"(sweep={"parameters":[{"path":"phases[0]","start":0,"stop":3.0,"count":7}]})"});
  CHECK(r.code == 0);
  std::size_t rows = 0;
  for (char ch : r.out)
    if (ch == '\n') ++rows;
  CHECK(rows >= 8);  // comments + header + 7 grid rows
  CHECK(r.out.find("max_exchange") != std::string::npos);
}

TEST_CASE("Evolve can start from the analytic dark and bright states") {
  TempDir tmp;
  const std::string cfg = tmp.file("pair.json", driven_pair_json);
  const RunResult dark = run({"evolve", "--config", cfg, "--param",
                              "initial=\"dark\"", "--param", "solver.samples=5"});
  CHECK(dark.code == 0);
  // last sample line: the dark-state population column stays at one
  const std::string tail = dark.out.substr(dark.out.rfind('\n', dark.out.size() - 2) + 1);
  const std::size_t last_comma = tail.rfind(',');
  const std::size_t prev_comma = tail.rfind(',', last_comma - 1);
  const double p_dark = std::stod(tail.substr(prev_comma + 1, last_comma - prev_comma - 1));
  CHECK(p_dark == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("Output files are written when requested") {
  TempDir tmp;
  const std::string cfg = tmp.file("pair.json", small_pair_json);
  const std::string out_path = (tmp.path / "result.csv").string();
  const RunResult r = run({"dfi", "--config", cfg, "--out", out_path});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(out_path);
  std::string first;
  std::getline(f, first);
  CHECK(first == "# chiralwg dfi");
}

TEST_CASE("Bundled table verification passes end to end") {
  const RunResult r = run({"verify-tables"});
  CHECK(r.code == 0);
  CHECK(r.out.find(",0\n") == std::string::npos);  // no row ends with pass=0
}

TEST_CASE("Config hashes are stable fingerprints of the canonical form") {
  const nlohmann::json a = nlohmann::json::parse(R"({"x": 1, "y": [2, 3]})");
  const nlohmann::json b = nlohmann::json::parse(R"({"y": [2, 3], "x": 1})");
  CHECK(chiralwg::cli::config_hash_hex(a) == chiralwg::cli::config_hash_hex(b));
  const nlohmann::json c = nlohmann::json::parse(R"({"x": 1, "y": [2, 4]})");
  CHECK(chiralwg::cli::config_hash_hex(a) != chiralwg::cli::config_hash_hex(c));
  CHECK(chiralwg::cli::config_hash_hex(a).size() == 16);
}

TEST_CASE("Seventeen significant digits survive a format round trip") {
  const double x = 0.1 + 0.2;
  const std::string s = chiralwg::cli::format_real(x);
  CHECK(std::stod(s) == x);
  CHECK(chiralwg::cli::format_real(1.0) == "1");
}
