#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chiralwg/types.hpp"

namespace chiralwg::topology {

struct Atom {
  std::string name;
  double frequency = 0.0;  // bare frequency, used when undriven
  double detuning = 0.0;   // frame detuning, used in place of frequency when driven
};

struct ConnectionPoint {
  std::string atom;
  long long rank = 0;  // ordinal position along the waveguide; ties = coincident
  double gamma_right = 0.0;
  double gamma_left = 0.0;
};

// Raw user input; validate() turns it into a ValidatedLayout.
struct Layout {
  std::vector<Atom> atoms;
  std::vector<ConnectionPoint> points;
  std::vector<double> phases;  // between consecutive points in sorted rank order
};

struct DriveSpec {
  Complex beta{0.0, 0.0};  // coherent amplitude injected at the left end
};

struct SortedPoint {
  std::size_t atom = 0;  // index into atoms()
  long long rank = 0;
  double gamma_right = 0.0;
  double gamma_left = 0.0;
};

class ValidatedLayout {
 public:
  std::size_t n_atoms() const { return atoms_.size(); }
  std::size_t n_points() const { return points_.size(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const SortedPoint& point(std::size_t i) const { return points_.at(i); }
  const std::vector<SortedPoint>& points() const { return points_; }
  const std::vector<double>& phases() const { return phases_; }

  std::size_t atom_index(const std::string& name) const;
  const std::vector<std::size_t>& points_of(std::size_t atom) const {
    return by_atom_.at(atom);
  }

  // Accumulated phase between sorted points i <= j (sum of the gaps between).
  double cumulative_phase(std::size_t i, std::size_t j) const;
  double total_phase() const;

 private:
  friend ValidatedLayout validate(const Layout& layout);
  ValidatedLayout() = default;

  std::vector<Atom> atoms_;
  std::vector<SortedPoint> points_;  // sorted by rank, stable for ties
  std::vector<double> phases_;
  std::vector<std::vector<std::size_t>> by_atom_;
};

// Checks atom references, rate signs, phase count, per-atom coverage, and that
// coincident (equal-rank) neighbors carry zero phase mod 2pi; sorts by rank.
ValidatedLayout validate(const Layout& layout);

enum class PairTopology { SmallPair, Separate, Nested, Braided };

// Classification by rank interleaving of the two atoms' points.
PairTopology classify_pair(const ValidatedLayout& layout, std::size_t atom_j,
                           std::size_t atom_k);

const char* to_string(PairTopology t);

struct SplitSpec {
  std::size_t point_index = 0;                        // sorted index
  std::vector<std::pair<double, double>> sub_rates;   // (gamma_right, gamma_left)
  std::vector<double> sub_phases;                     // between sub-points; must be ~0
};

struct SplitResult {
  Layout layout;
  // (sum_i sqrt(gamma_i))^2 == gamma_original, per direction.  Recorded, not
  // enforced, so rule-violating splits can be studied.
  bool sum_rule_right = false;
  bool sum_rule_left = false;
};

// Replaces one point by consecutive sub-points at the same location.
SplitResult split_point(const ValidatedLayout& layout, const SplitSpec& spec);

}  // namespace chiralwg::topology
