#include <doctest.h>

#include <cmath>

#include "chiralwg/analysis.hpp"
#include "chiralwg/coefficients.hpp"
#include "chiralwg/errors.hpp"
#include "chiralwg/hilbert.hpp"
#include "chiralwg/topology.hpp"
#include "helpers.hpp"

using namespace chiralwg;
using testutil::pi;
using testutil::Topo;

namespace {

coeffs::CoefficientSet coefficients_for(Topo topo,
                                        const std::vector<double>& phases,
                                        double gr, double gl, double oa = 0.0,
                                        double ob = 0.0, double da = 0.0,
                                        double db = 0.0) {
  return coeffs::compute_coefficients(topology::validate(
      testutil::two_atom(topo, phases, gr, gl, oa, ob, da, db)));
}

analysis::DarkStateScan scan_for(Topo topo, const std::vector<double>& phases,
                                 double gr, double gl, double oa = 0.0,
                                 double ob = 0.0) {
  return analysis::find_dark_states(coeffs::assemble_model(
      coefficients_for(topo, phases, gr, gl, oa, ob)));
}

std::size_t count_nontrivial(const analysis::DarkStateScan& scan) {
  std::size_t n = 0;
  for (const auto& rep : scan.states)
    if (rep.cls != analysis::DarkClass::Trivial) ++n;
  return n;
}

}  // namespace

TEST_CASE("Interaction without decoherence needs exchange to survive alone") {
  const analysis::DfiReport good = analysis::check_dfi(
      coefficients_for(Topo::Braided, {pi / 2, pi / 2, pi / 2}, 0.9, 0.1));
  CHECK(good.is_dfi);
  CHECK(good.max_exchange == doctest::Approx(1.0));
  CHECK(good.max_individual_decay < 1e-12);
  CHECK(good.max_collective_decay < 1e-12);

  // bidirectional braid at the same phases: individual decay survives
  const analysis::DfiReport bad = analysis::check_dfi(
      coefficients_for(Topo::Braided, {pi / 2, pi, pi / 2}, 0.5, 0.5));
  CHECK_FALSE(bad.is_dfi);

  // fully decoupled pair: no decay but also no interaction left
  const analysis::DfiReport dead = analysis::check_dfi(
      coefficients_for(Topo::Separate, {pi, 0.7, pi}, 0.5, 0.5));
  CHECK_FALSE(dead.is_dfi);
  CHECK(dead.max_individual_decay < 1e-12);
  CHECK(dead.max_exchange < 1e-12);
}

TEST_CASE("Dark state scan recognizes the symmetric and antisymmetric pair states") {
  const analysis::DarkStateScan s = scan_for(Topo::Small, {0.0}, 0.5, 0.5);
  REQUIRE(count_nontrivial(s) == 1);
  CHECK(s.kernel_dim == 2);
  CHECK_FALSE(s.fully_decoupled);
  bool saw_singlet = false;
  for (const auto& rep : s.states) {
    if (rep.cls != analysis::DarkClass::Singlet) continue;
    saw_singlet = true;
    CHECK(rep.residual_collapse < 1e-12);
    CHECK(rep.residual_h < 1e-12);
    CHECK(std::abs(std::abs(rep.state.dot(analysis::singlet_state())) - 1.0) < 1e-12);
  }
  CHECK(saw_singlet);

  const analysis::DarkStateScan t = scan_for(Topo::Small, {pi}, 0.5, 0.5);
  REQUIRE(count_nontrivial(t) == 1);
  CHECK(t.states.back().cls == analysis::DarkClass::Triplet);
}

TEST_CASE("Unidirectional coupling leaves no nontrivial dark state") {
  const analysis::DarkStateScan s = scan_for(Topo::Small, {0.0}, 1.0, 0.0);
  CHECK(count_nontrivial(s) == 0);
  CHECK(s.kernel_dim == 2);  // the kernel exists but holds no eigenvector
}

TEST_CASE("Nested chiral layout keeps its dark state where braided loses it") {
  const analysis::DarkStateScan nested =
      scan_for(Topo::Nested, {0.0, 2.0 * pi / 3.0, 0.0}, 0.2, 0.8);
  REQUIRE(count_nontrivial(nested) == 1);
  for (const auto& rep : nested.states)
    if (rep.cls == analysis::DarkClass::Singlet) {
      CHECK(rep.residual_collapse < 1e-9);
      CHECK(rep.residual_h < 1e-9);
    }
  CHECK(count_nontrivial(scan_for(Topo::Braided, {0.0, 2.0 * pi / 3.0, 0.0},
                                  0.2, 0.8)) == 0);
  CHECK(count_nontrivial(scan_for(Topo::Separate, {0.0, 0.0, 0.0}, 0.2, 0.8)) == 0);
}

TEST_CASE("Unequal frequencies pull the pair states out of the dark space") {
  const std::vector<double> grid = {0.0, pi / 3, 2 * pi / 3, pi, 4 * pi / 3};
  for (Topo topo : {Topo::Small, Topo::Separate, Topo::Nested, Topo::Braided}) {
    for (double p1 : grid) {
      const std::vector<double> inner =
          topo == Topo::Small ? std::vector<double>{} : grid;
      for (double p2 : inner.empty() ? std::vector<double>{0.0} : inner) {
        const std::vector<double> phases =
            topo == Topo::Small ? std::vector<double>{p1}
                                : std::vector<double>{p1, p2, p1};
        const analysis::DarkStateScan scan =
            scan_for(topo, phases, 0.5, 0.5, 0.3, -0.2);
        if (scan.fully_decoupled) continue;
        // detuned atoms: S and T mix through xi, so neither stays dark
        for (const auto& rep : scan.states) {
          CHECK(rep.cls != analysis::DarkClass::Singlet);
          CHECK(rep.cls != analysis::DarkClass::Triplet);
        }
      }
    }
  }
}

TEST_CASE("Fully decoupled layouts report every state as dark") {
  const analysis::DarkStateScan scan =
      scan_for(Topo::Separate, {pi, 0.7, pi}, 0.5, 0.5);
  CHECK(scan.fully_decoupled);
  CHECK(scan.kernel_dim == 4);
}

TEST_CASE("Driven dark state matches its closed-form populating rate") {
  const coeffs::CoefficientSet c = coefficients_for(
      Topo::Small, {0.0}, 0.25, 0.75, 0.0, 0.0, 0.5, -0.5);
  const topology::DriveSpec drive =
      coeffs::drive_for_rabi(c, 0, Complex(1.0, 0.0));
  const analysis::DarkStateReport rep = analysis::driven_dark_state(c, drive);
  CHECK(rep.cls == analysis::DarkClass::DrivenSinglet);
  REQUIRE(rep.gamma_d.has_value());
  CHECK(*rep.gamma_d == doctest::Approx(10.0 / 13.0).epsilon(1e-12));
  CHECK(rep.residual_collapse < 1e-10);
  CHECK(rep.residual_h < 1e-10);

  // mismatched detunings break the antisymmetric-frame condition
  const coeffs::CoefficientSet off = coefficients_for(
      Topo::Small, {0.0}, 0.25, 0.75, 0.0, 0.0, 0.5, 0.1);
  CHECK_THROWS_AS(analysis::driven_dark_state(off, drive),
                  NoDrivenDarkStateError);
}

TEST_CASE("Scan labels the driven superposition with its weight ratio") {
  const coeffs::CoefficientSet c = coefficients_for(
      Topo::Small, {0.0}, 0.25, 0.75, 0.0, 0.0, 0.5, -0.5);
  const topology::DriveSpec drive =
      coeffs::drive_for_rabi(c, 0, Complex(1.0, 0.0));
  const analysis::DarkStateReport analytic =
      analysis::driven_dark_state(c, drive);
  const analysis::DarkStateScan scan =
      analysis::find_dark_states(coeffs::assemble_model(c, drive));
  bool found = false;
  for (const auto& rep : scan.states) {
    if (rep.cls != analysis::DarkClass::DrivenSinglet) continue;
    found = true;
    REQUIRE(rep.alpha.has_value());
    CHECK(std::abs(*rep.alpha - *analytic.alpha) < 1e-8);
    CHECK(std::abs(std::abs(rep.state.dot(analytic.state)) - 1.0) < 1e-10);
  }
  CHECK(found);
}

TEST_CASE("Pair-state decay rates split into bright and dark channels") {
  const coeffs::CoefficientSet c = coefficients_for(Topo::Small, {0.0}, 0.5, 0.5);
  const analysis::BrightRates r = analysis::bright_decay_rates(c);
  CHECK(r.gamma_triplet == doctest::Approx(2.0));
  CHECK(r.gamma_singlet == doctest::Approx(0.0));
  CHECK(r.gamma_triplet ==
        doctest::Approx(c.gamma(0) + c.gamma(1)));  // superradiant at phi = 0
}

TEST_CASE("Singlet-triplet coupling tracks frequency imbalance and exchange") {
  const coeffs::CoefficientSet c = coefficients_for(
      Topo::Small, {0.0}, 0.25, 0.75, 0.4, -0.4);
  const Complex g = c.exchange(0, 1);
  const Complex expect = (c.omega_prime(1) - c.omega_prime(0) + g - std::conj(g)) / 2.0;
  CHECK(std::abs(analysis::xi_coupling(c) - expect) < 1e-15);

  const topology::Layout three = testutil::random_layout(
      *[] { static std::mt19937 rng(3); return &rng; }(), 3, 4);
  const coeffs::CoefficientSet c3 =
      coeffs::compute_coefficients(topology::validate(three));
  CHECK_THROWS_AS(analysis::xi_coupling(c3), NotTwoAtomsError);
}

TEST_CASE("Multi-atom dark conditions hold for the nested-chain fixture") {
  topology::Layout lay;
  lay.atoms = {{"a", 0.0, 0.0}, {"b", 0.0, 0.0}, {"c", 0.0, 0.0}};
  const std::vector<std::string> owners = {"a", "b", "c", "c", "b", "a"};
  for (std::size_t r = 0; r < owners.size(); ++r)
    lay.points.push_back({owners[r], static_cast<long long>(r), 0.5, 0.5});
  lay.phases = std::vector<double>(5, 0.0);
  const coeffs::CoefficientSet c =
      coeffs::compute_coefficients(topology::validate(lay));
  const analysis::DarkConditions cond = analysis::multi_atom_dark_conditions(c);
  CHECK(cond.amplitude_ratios_ok);
  CHECK(cond.frequencies_aligned);
  CHECK(cond.exchange_real);
  CHECK(cond.eigenstate_ok);
  CHECK(cond.all_met());

  const analysis::DarkConditions broken = analysis::multi_atom_dark_conditions(
      coefficients_for(Topo::Braided, {0.0, 2 * pi / 3, 0.0}, 0.2, 0.8));
  CHECK_FALSE(broken.all_met());
}

TEST_CASE("Splitting a point preserves dark states exactly when amplitudes add up") {
  const topology::ValidatedLayout lay = topology::validate(
      testutil::two_atom(Topo::Braided, {0.0, pi / 2, 0.0}, 0.9, 0.9));
  topology::SplitSpec spec;
  spec.point_index = 0;
  spec.sub_rates = {{0.1, 0.1}, {0.1, 0.1}, {0.1, 0.1}};
  spec.sub_phases = {0.0, 0.0};
  const analysis::SplitInvarianceReport rep =
      analysis::verify_splitting_invariance(lay, spec);
  CHECK(rep.sum_rule_right);
  CHECK(rep.sum_rule_left);
  CHECK(rep.preserved);
  CHECK(rep.dark_dim_before == rep.dark_dim_after);
  CHECK(rep.worst_fidelity > 1.0 - 1e-9);
}

TEST_CASE("Splitting that violates the amplitude sum rule degrades the dark state") {
  const topology::ValidatedLayout lay =
      topology::validate(testutil::two_atom(Topo::Small, {0.0}, 0.5, 0.5));
  topology::SplitSpec spec;
  spec.point_index = 0;
  spec.sub_rates = {{0.16 * 0.5, 0.16 * 0.5}, {0.16 * 0.5, 0.16 * 0.5}};
  spec.sub_phases = {0.0};
  const analysis::SplitInvarianceReport rep =
      analysis::verify_splitting_invariance(lay, spec);
  CHECK_FALSE(rep.sum_rule_right);
  CHECK_FALSE(rep.preserved);
  CHECK(rep.worst_fidelity < 1.0 - 1e-3);
}
