#include <doctest.h>

#include <cmath>

#include "chiralwg/errors.hpp"
#include "chiralwg/topology.hpp"
#include "helpers.hpp"

using namespace chiralwg;
using namespace chiralwg::topology;
using testutil::pi;
using testutil::Topo;

TEST_CASE("Validation sorts points by rank and accumulates phases") {
  Layout lay;
  lay.atoms = {{"a", 1.0, 0.0}, {"b", -1.0, 0.0}};
  lay.points = {{"b", 5, 0.1, 0.2}, {"a", 1, 0.3, 0.4}, {"a", 3, 0.5, 0.6}};
  lay.phases = {0.25, 0.5};
  const ValidatedLayout v = validate(lay);
  CHECK(v.n_points() == 3);
  CHECK(v.point(0).rank == 1);
  CHECK(v.point(2).rank == 5);
  CHECK(v.point(0).atom == v.atom_index("a"));
  CHECK(v.point(2).atom == v.atom_index("b"));
  CHECK(v.cumulative_phase(0, 2) == doctest::Approx(0.75));
  CHECK(v.cumulative_phase(1, 1) == 0.0);
  CHECK(v.total_phase() == doctest::Approx(0.75));
  CHECK(v.points_of(v.atom_index("a")).size() == 2);
}

TEST_CASE("Validation rejects malformed layouts with specific errors") {
  Layout base;
  base.atoms = {{"a", 0.0, 0.0}, {"b", 0.0, 0.0}};
  base.points = {{"a", 0, 0.5, 0.5}, {"b", 1, 0.5, 0.5}};
  base.phases = {0.0};

  Layout lay = base;
  lay.points[0].atom = "c";
  CHECK_THROWS_AS(validate(lay), UnknownAtomError);

  lay = base;
  lay.phases = {0.0, 0.0};
  CHECK_THROWS_AS(validate(lay), PhaseCountMismatchError);

  lay = base;
  lay.points[1].gamma_left = -0.1;
  CHECK_THROWS_AS(validate(lay), NegativeRateError);

  lay = base;
  lay.points.pop_back();
  lay.phases = {};
  CHECK_THROWS_AS(validate(lay), EmptyAtomError);

  lay = base;
  lay.atoms = {};
  lay.points = {};
  lay.phases = {};
  CHECK_THROWS_AS(validate(lay), EmptyAtomError);

  lay = base;
  lay.atoms[1].name = "a";
  CHECK_THROWS_AS(validate(lay), LayoutError);

  lay = base;
  lay.points[1].rank = 0;  // coincident with point 0
  lay.phases = {0.3};
  CHECK_THROWS_AS(validate(lay), CoincidentPhaseError);
  lay.phases = {2.0 * pi};  // zero mod 2 pi is allowed
  CHECK_NOTHROW(validate(lay));
}

TEST_CASE("Pair classification distinguishes the four topologies") {
  auto classify = [](Topo t) {
    const std::size_t n = t == Topo::Small ? 1 : 3;
    const ValidatedLayout v =
        validate(testutil::two_atom(t, std::vector<double>(n, 0.0), 0.5, 0.5));
    return classify_pair(v, 0, 1);
  };
  CHECK(classify(Topo::Small) == PairTopology::SmallPair);
  CHECK(classify(Topo::Separate) == PairTopology::Separate);
  CHECK(classify(Topo::Nested) == PairTopology::Nested);
  CHECK(classify(Topo::Braided) == PairTopology::Braided);
  CHECK(std::string(to_string(PairTopology::Braided)) == "braided");
}

TEST_CASE("Point splitting keeps location and flags the amplitude sum rule") {
  const ValidatedLayout v = validate(
      testutil::two_atom(Topo::Braided, {0.0, pi / 2, 0.0}, 0.9, 0.9));

  SplitSpec spec;
  spec.point_index = 0;
  spec.sub_rates = {{0.1, 0.1}, {0.1, 0.1}, {0.1, 0.1}};
  spec.sub_phases = {0.0, 0.0};
  const SplitResult r = split_point(v, spec);
  CHECK(r.sum_rule_right);  // (3 sqrt(0.1))^2 = 0.9
  CHECK(r.sum_rule_left);
  CHECK(r.layout.points.size() == 6);
  CHECK(r.layout.phases.size() == 5);
  int subs_at_origin = 0;
  for (const auto& p : r.layout.points)
    if (p.atom == "a" && p.rank == v.point(0).rank) ++subs_at_origin;
  CHECK(subs_at_origin == 3);
  CHECK_NOTHROW(validate(r.layout));

  SplitSpec violating = spec;
  violating.sub_rates = {{0.16 * 0.9, 0.16 * 0.9}, {0.16 * 0.9, 0.16 * 0.9}};
  violating.sub_phases = {0.0};
  const SplitResult rv = split_point(v, violating);
  CHECK_FALSE(rv.sum_rule_right);
  CHECK_FALSE(rv.sum_rule_left);

  SplitSpec bad = spec;
  bad.sub_phases = {0.5, 0.0};  // sub-points share a location: no phase allowed
  CHECK_THROWS_AS(split_point(v, bad), LayoutError);
  bad = spec;
  bad.sub_phases = {0.0};
  CHECK_THROWS_AS(split_point(v, bad), LayoutError);
  bad = spec;
  bad.sub_rates = {};
  CHECK_THROWS_AS(split_point(v, bad), LayoutError);
}
