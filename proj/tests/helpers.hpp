#pragma once

// Shared fixtures: canonical two-atom layouts, a random layout generator, and
// small regression utilities used by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "chiralwg/topology.hpp"
#include "chiralwg/types.hpp"

namespace testutil {

using chiralwg::Complex;

constexpr double pi = 3.14159265358979323846;

enum class Topo { Small, Separate, Nested, Braided };

inline const char* topo_name(Topo t) {
  switch (t) {
    case Topo::Small: return "small";
    case Topo::Separate: return "separate";
    case Topo::Nested: return "nested";
    case Topo::Braided: return "braided";
  }
  return "?";
}

// Canonical point orders: small a b, separate a a b b, nested a b b a,
// braided a b a b; one connection rate pair shared by every point.
inline chiralwg::topology::Layout two_atom(Topo topo,
                                           const std::vector<double>& phases,
                                           double gamma_r, double gamma_l,
                                           double omega_a = 0.0,
                                           double omega_b = 0.0,
                                           double delta_a = 0.0,
                                           double delta_b = 0.0) {
  static const std::vector<std::vector<std::string>> owners = {
      {"a", "b"}, {"a", "a", "b", "b"}, {"a", "b", "b", "a"}, {"a", "b", "a", "b"}};
  chiralwg::topology::Layout lay;
  lay.atoms = {{"a", omega_a, delta_a}, {"b", omega_b, delta_b}};
  for (std::size_t r = 0; r < owners[static_cast<std::size_t>(topo)].size(); ++r)
    lay.points.push_back({owners[static_cast<std::size_t>(topo)][r],
                          static_cast<long long>(r), gamma_r, gamma_l});
  lay.phases = phases;
  return lay;
}

// Random multi-point layout: every atom owns at least one point, rates in
// [0.05, 1], phases in [0, 2pi), frequencies and detunings in [-1, 1].
// allow_ties occasionally merges neighboring ranks (phase forced to zero).
inline chiralwg::topology::Layout random_layout(std::mt19937& rng,
                                                std::size_t n_atoms,
                                                std::size_t n_points,
                                                bool allow_ties = true) {
  std::uniform_real_distribution<double> rate(0.05, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
  std::uniform_real_distribution<double> freq(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_atom(0, n_atoms - 1);
  std::uniform_int_distribution<std::size_t> pick_point(0, n_points - 1);

  std::vector<std::size_t> owners(n_points);
  for (;;) {
    for (auto& o : owners) o = pick_atom(rng);
    std::vector<bool> seen(n_atoms, false);
    for (std::size_t a = 0; a < n_atoms; ++a)
      if (std::find(owners.begin(), owners.end(), a) == owners.end())
        owners[pick_point(rng)] = a;
    for (auto o : owners) seen[o] = true;
    if (std::find(seen.begin(), seen.end(), false) == seen.end()) break;
  }

  chiralwg::topology::Layout lay;
  for (std::size_t a = 0; a < n_atoms; ++a)
    lay.atoms.push_back({"atom" + std::to_string(a), freq(rng), freq(rng)});
  long long rank = 0;
  for (std::size_t r = 0; r < n_points; ++r) {
    bool tie = false;
    if (r > 0) {
      tie = allow_ties && std::uniform_real_distribution<double>(0, 1)(rng) < 0.2;
      rank += tie ? 0 : 1;
      lay.phases.push_back(tie ? 0.0 : phase(rng));
    }
    lay.points.push_back({lay.atoms[owners[r]].name, rank, rate(rng), rate(rng)});
  }
  return lay;
}

// Slope of y ~ slope * x through the origin (least squares).
inline double regression_through_origin(const std::vector<double>& x,
                                        const std::vector<double>& y) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += x[i] * y[i];
    den += x[i] * x[i];
  }
  return den > 0.0 ? num / den : std::nan("");
}

// Least-squares slope of log(y) over t; y must stay positive.
inline double log_slope(const std::vector<double>& t,
                        const std::vector<double>& y) {
  double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
  const auto n = static_cast<double>(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double l = std::log(y[i]);
    st += t[i];
    sl += l;
    stt += t[i] * t[i];
    stl += t[i] * l;
  }
  return (n * stl - st * sl) / (n * stt - st * st);
}

// Cumulative trapezoid integral, same length as the input, starting at zero.
inline std::vector<double> cumulative_trapezoid(const std::vector<double>& t,
                                                const std::vector<double>& y) {
  std::vector<double> out(t.size(), 0.0);
  for (std::size_t i = 1; i < t.size(); ++i)
    out[i] = out[i - 1] + 0.5 * (y[i] + y[i - 1]) * (t[i] - t[i - 1]);
  return out;
}

// Angular frequency of an oscillating series from the spacing of its local
// minima, each refined by a parabola through the three bracketing samples.
inline double minima_angular_frequency(const std::vector<double>& t,
                                       const std::vector<double>& y) {
  std::vector<double> minima;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (!(y[i] <= y[i - 1] && y[i] <= y[i + 1])) continue;
    const double denom = y[i - 1] - 2.0 * y[i] + y[i + 1];
    double shift = 0.0;
    if (std::abs(denom) > 1e-300)
      shift = 0.5 * (y[i - 1] - y[i + 1]) / denom;
    minima.push_back(t[i] + shift * (t[i + 1] - t[i]));
  }
  if (minima.size() < 2) return std::nan("");
  const double period =
      (minima.back() - minima.front()) / static_cast<double>(minima.size() - 1);
  return 2.0 * pi / period;
}

}  // namespace testutil
