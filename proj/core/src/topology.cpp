#include "chiralwg/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "chiralwg/errors.hpp"
#include "chiralwg/hilbert.hpp"

namespace chiralwg::topology {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

bool zero_mod_two_pi(double phase, double tol = 1e-12) {
  const double r = std::remainder(phase, two_pi);
  return std::abs(r) <= tol;
}

}  // namespace

std::size_t ValidatedLayout::atom_index(const std::string& name) const {
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    if (atoms_[i].name == name) return i;
  throw UnknownAtomError("atom_index: no atom named '" + name + "'");
}

double ValidatedLayout::cumulative_phase(std::size_t i, std::size_t j) const {
  if (i > j || j >= points_.size())
    throw std::out_of_range("cumulative_phase: need i <= j < n_points");
  double sum = 0.0;
  for (std::size_t k = i; k < j; ++k) sum += phases_[k];
  return sum;
}

double ValidatedLayout::total_phase() const {
  return points_.empty() ? 0.0 : cumulative_phase(0, points_.size() - 1);
}

ValidatedLayout validate(const Layout& layout) {
  if (layout.atoms.empty()) throw EmptyAtomError("validate: no atoms declared");
  if (layout.atoms.size() > hilbert::max_atoms)
    throw LayoutError("validate: more than 10 atoms");
  for (std::size_t i = 0; i < layout.atoms.size(); ++i)
    for (std::size_t j = i + 1; j < layout.atoms.size(); ++j)
      if (layout.atoms[i].name == layout.atoms[j].name)
        throw LayoutError("validate: duplicate atom name '" + layout.atoms[i].name + "'");
  if (layout.points.empty())
    throw EmptyAtomError("validate: no connection points declared");
  if (layout.phases.size() + 1 != layout.points.size())
    throw PhaseCountMismatchError("validate: need exactly n_points - 1 phases");

  ValidatedLayout out;
  out.atoms_ = layout.atoms;
  out.phases_ = layout.phases;

  for (const auto& p : layout.points) {
    if (p.gamma_right < 0.0 || p.gamma_left < 0.0)
      throw NegativeRateError("validate: negative coupling rate at atom '" + p.atom + "'");
    SortedPoint sp;
    sp.atom = out.atom_index(p.atom);  // throws UnknownAtomError
    sp.rank = p.rank;
    sp.gamma_right = p.gamma_right;
    sp.gamma_left = p.gamma_left;
    out.points_.push_back(sp);
  }
  std::stable_sort(out.points_.begin(), out.points_.end(),
                   [](const SortedPoint& a, const SortedPoint& b) { return a.rank < b.rank; });

  out.by_atom_.assign(out.atoms_.size(), {});
  for (std::size_t i = 0; i < out.points_.size(); ++i)
    out.by_atom_[out.points_[i].atom].push_back(i);
  for (std::size_t a = 0; a < out.atoms_.size(); ++a)
    if (out.by_atom_[a].empty())
      throw EmptyAtomError("validate: atom '" + out.atoms_[a].name +
                           "' has no connection point");

  for (std::size_t i = 0; i + 1 < out.points_.size(); ++i)
    if (out.points_[i].rank == out.points_[i + 1].rank &&
        !zero_mod_two_pi(out.phases_[i]))
      throw CoincidentPhaseError(
          "validate: coincident points must be separated by phase 0 mod 2pi");

  return out;
}

PairTopology classify_pair(const ValidatedLayout& layout, std::size_t atom_j,
                           std::size_t atom_k) {
  if (atom_j >= layout.n_atoms() || atom_k >= layout.n_atoms() || atom_j == atom_k)
    throw std::out_of_range("classify_pair: need two distinct atom indices");
  const auto& pj = layout.points_of(atom_j);
  const auto& pk = layout.points_of(atom_k);
  if (pj.size() == 1 && pk.size() == 1) return PairTopology::SmallPair;

  auto ranks = [&layout](const std::vector<std::size_t>& idx) {
    std::vector<long long> r;
    r.reserve(idx.size());
    for (std::size_t i : idx) r.push_back(layout.point(i).rank);
    return r;  // ascending: points are rank-sorted
  };
  const auto rj = ranks(pj);
  const auto rk = ranks(pk);

  if (rj.back() < rk.front() || rk.back() < rj.front()) return PairTopology::Separate;

  auto nested_inside = [](const std::vector<long long>& host,
                          const std::vector<long long>& guest) {
    for (std::size_t i = 0; i + 1 < host.size(); ++i) {
      const bool all_inside =
          std::all_of(guest.begin(), guest.end(), [&](long long r) {
            return host[i] < r && r < host[i + 1];
          });
      if (all_inside) return true;
    }
    return false;
  };
  if (nested_inside(rj, rk) || nested_inside(rk, rj)) return PairTopology::Nested;
  return PairTopology::Braided;
}

const char* to_string(PairTopology t) {
  switch (t) {
    case PairTopology::SmallPair: return "small";
    case PairTopology::Separate: return "separate";
    case PairTopology::Nested: return "nested";
    case PairTopology::Braided: return "braided";
  }
  return "?";
}

SplitResult split_point(const ValidatedLayout& layout, const SplitSpec& spec) {
  if (spec.point_index >= layout.n_points())
    throw std::out_of_range("split_point: point index out of range");
  if (spec.sub_rates.empty())
    throw LayoutError("split_point: need at least one sub-point");
  if (spec.sub_phases.size() + 1 != spec.sub_rates.size())
    throw PhaseCountMismatchError("split_point: need n_sub - 1 sub-phases");
  for (double ph : spec.sub_phases)
    if (!zero_mod_two_pi(ph))
      throw LayoutError("split_point: sub-points must be separated by phase 0 mod 2pi");
  for (const auto& [gr, gl] : spec.sub_rates)
    if (gr < 0.0 || gl < 0.0)
      throw NegativeRateError("split_point: negative sub-point rate");

  const SortedPoint& target = layout.point(spec.point_index);

  double sum_r = 0.0, sum_l = 0.0;
  for (const auto& [gr, gl] : spec.sub_rates) {
    sum_r += std::sqrt(gr);
    sum_l += std::sqrt(gl);
  }
  auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({std::abs(a), std::abs(b), 1.0});
  };

  SplitResult result;
  result.sum_rule_right = close(sum_r * sum_r, target.gamma_right);
  result.sum_rule_left = close(sum_l * sum_l, target.gamma_left);
  result.layout.atoms = layout.atoms();

  // Sub-points share the original rank: they sit at the same location, so
  // they stay coincident with each other and with any point already there.
  for (std::size_t i = 0; i < layout.n_points(); ++i) {
    const SortedPoint& p = layout.point(i);
    if (i == spec.point_index) {
      for (const auto& [gr, gl] : spec.sub_rates) {
        ConnectionPoint cp;
        cp.atom = layout.atoms()[p.atom].name;
        cp.rank = p.rank;
        cp.gamma_right = gr;
        cp.gamma_left = gl;
        result.layout.points.push_back(cp);
      }
    } else {
      ConnectionPoint cp;
      cp.atom = layout.atoms()[p.atom].name;
      cp.rank = p.rank;
      cp.gamma_right = p.gamma_right;
      cp.gamma_left = p.gamma_left;
      result.layout.points.push_back(cp);
    }
  }
  for (std::size_t i = 0; i < layout.n_points(); ++i) {
    if (i == spec.point_index)
      for (double ph : spec.sub_phases) result.layout.phases.push_back(ph);
    if (i + 1 < layout.n_points()) result.layout.phases.push_back(layout.phases()[i]);
  }
  return result;
}

}  // namespace chiralwg::topology
