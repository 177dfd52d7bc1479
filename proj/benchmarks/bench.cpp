// Microbenchmarks for the hot paths: generator evaluation, integration,
// cascade composition, and the steady-state solve.

#include <benchmark/benchmark.h>

#include <random>

#include "chiralwg/analysis.hpp"
#include "chiralwg/coefficients.hpp"
#include "chiralwg/dynamics.hpp"
#include "chiralwg/slh.hpp"
#include "chiralwg/topology.hpp"

namespace {

using namespace chiralwg;

topology::Layout braided_pair() {
  topology::Layout lay;
  lay.atoms = {{"a", 0.0, 0.5}, {"b", 0.0, -0.5}};
  lay.points = {{"a", 0, 0.25, 0.75},
                {"b", 1, 0.25, 0.75},
                {"a", 2, 0.25, 0.75},
                {"b", 3, 0.25, 0.75}};
  lay.phases = {0.0, 1.5707963267948966, 0.0};
  return lay;
}

topology::Layout three_atom_chain() {
  topology::Layout lay;
  lay.atoms = {{"a", 0.3, 0.0}, {"b", -0.1, 0.0}, {"c", 0.2, 0.0}};
  const char* owners[] = {"a", "b", "c", "c", "b", "a"};
  for (int r = 0; r < 6; ++r) lay.points.push_back({owners[r], r, 0.4, 0.6});
  lay.phases = {0.2, 0.4, 0.1, 0.3, 0.5};
  return lay;
}

void bench_lindblad_rhs(benchmark::State& state) {
  const auto c = coeffs::compute_coefficients(topology::validate(braided_pair()));
  const auto me = coeffs::assemble_model(c, topology::DriveSpec{{0.5, 0.0}});
  Matrix rho = Matrix::Zero(4, 4);
  rho(3, 3) = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dynamics::lindblad_rhs(me, rho));
  }
}
BENCHMARK(bench_lindblad_rhs);

void bench_evolve_driven_pair(benchmark::State& state) {
  const auto c = coeffs::compute_coefficients(topology::validate(braided_pair()));
  const auto me = coeffs::assemble_model(c, topology::DriveSpec{{0.5, 0.0}});
  Matrix rho = Matrix::Zero(4, 4);
  rho(3, 3) = 1.0;
  const auto samples = dynamics::linspace(5.0, 11);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dynamics::evolve(me, rho, 5.0, samples));
  }
}
BENCHMARK(bench_evolve_driven_pair);

void bench_compose_three_atoms(benchmark::State& state) {
  const auto v = topology::validate(three_atom_chain());
  for (auto _ : state) {
    benchmark::DoNotOptimize(slh::compose_layout(v, {}));
  }
}
BENCHMARK(bench_compose_three_atoms);

void bench_coefficients_three_atoms(benchmark::State& state) {
  const auto v = topology::validate(three_atom_chain());
  for (auto _ : state) {
    benchmark::DoNotOptimize(coeffs::compute_coefficients(v));
  }
}
BENCHMARK(bench_coefficients_three_atoms);

void bench_steady_state(benchmark::State& state) {
  const auto c = coeffs::compute_coefficients(topology::validate(braided_pair()));
  const auto me = coeffs::assemble_model(c, topology::DriveSpec{{0.5, 0.0}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(dynamics::steady_state(me));
  }
}
BENCHMARK(bench_steady_state);

void bench_dark_scan_three_atoms(benchmark::State& state) {
  const auto c = coeffs::compute_coefficients(topology::validate(three_atom_chain()));
  const auto me = coeffs::assemble_model(c);
  for (auto _ : state) {
    benchmark::DoNotOptimize(analysis::find_dark_states(me));
  }
}
BENCHMARK(bench_dark_scan_three_atoms);

}  // namespace

BENCHMARK_MAIN();
