#include <doctest.h>

#include <cmath>

#include "supremal/convexity.hpp"
#include "supremal/envelope.hpp"

using namespace supremal;

namespace {
const GridSpec kLine = GridSpec::line(-2, 2, 401);
const GridSpec kSquare = GridSpec::square(-2, 2, 65);

ScalarField maxnorm() {
  return ScalarField::analytic(2, "max(abs(x1), abs(x2))", Coercivity{0.5, 1.0, 0.0});
}
}  // namespace

TEST_CASE("check_level_convex: the double well fails with a midpoint witness") {
  const auto rep = check_level_convex(builtin("double-well-1d"), GridSpec::line(-2, 2, 41));
  REQUIRE(!rep.level_convex);
  const auto& v = *rep.violation;
  CHECK(v.f_combo > v.f_max + 1e-7);
  // replay the witness through the field
  const ScalarField f = builtin("double-well-1d");
  const Vec2 combo = v.t * v.xi + (1 - v.t) * v.eta;
  CHECK(f.eval(combo) > std::max(f.eval(v.xi), f.eval(v.eta)) + 1e-7);
}

TEST_CASE("check_level_convex: |x| and max-norm pass") {
  CHECK(check_level_convex(builtin("abs"), GridSpec::line(-2, 2, 101)).level_convex);
  CHECK(check_level_convex(maxnorm(), GridSpec::square(-2, 2, 33)).level_convex);
  CHECK(check_level_convex(builtin("dist-halfplane"), GridSpec::square(-2, 2, 33))
            .level_convex);
}

TEST_CASE("check_level_convex: example-4-5 fails between the wells") {
  const auto rep = check_level_convex(builtin("example-4-5"), GridSpec::square(-2, 2, 33));
  REQUIRE(!rep.level_convex);
  const ScalarField f = builtin("example-4-5");
  const auto& v = *rep.violation;
  const Vec2 combo = v.t * v.xi + (1 - v.t) * v.eta;
  CHECK(f.eval(combo) > std::max(f.eval(v.xi), f.eval(v.eta)) + 1e-7);
}

TEST_CASE("strict_at_point classifications") {
  CHECK(strict_at_point(builtin("halfline-kink"), Vec2(0, 0), kLine));
  CHECK(strict_at_point(builtin("abs"), Vec2(0, 0), kLine));
  CHECK(!strict_at_point(builtin("dist-halfplane"), Vec2(0, 0), kSquare));
  CHECK_THROWS_AS(strict_at_point(builtin("double-well-1d"), Vec2(0, 0), kLine),
                  NotLevelConvex);
}

TEST_CASE("strict_in_one_direction classifications") {
  const auto d1 = strict_in_one_direction(builtin("dist-halfplane"), Vec2(0, 0), kSquare);
  REQUIRE(d1.has_value());
  CHECK((*d1 - Vec2(-1, 0)).norm() < 1e-9);

  const EnvelopeResult env = envelope_levelsweep(builtin("example-4-5"), kSquare);
  const auto d2 = strict_in_one_direction(env.as_field(), Vec2(0, 0), kSquare, {}, true);
  REQUIRE(d2.has_value());
  CHECK((*d2 - Vec2(0, 1)).norm() < 1e-9);

  // max-norm at (0.2, 0.1): the sampled level hull stops short of x = 0.2,
  // so no direction is certified at this resolution
  const auto d3 = strict_in_one_direction(maxnorm(), Vec2(0.2, 0.1), kSquare);
  CHECK(!d3.has_value());

  const auto d4 = strict_in_one_direction(builtin("halfline-kink"), Vec2(0, 0), kLine);
  REQUIRE(d4.has_value());
  CHECK(d4->x() == -1.0);
}

TEST_CASE("strict_at_point implies strict_in_one_direction") {
  const std::vector<std::pair<ScalarField, Vec2>> cases = {
      {builtin("halfline-kink"), Vec2(0, 0)},
      {builtin("abs"), Vec2(0, 0)},
      {builtin("abs"), Vec2(1, 0)},
      {builtin("dist-halfplane"), Vec2(0, 0)},
      {maxnorm(), Vec2(0.25, 0.25)}};
  for (const auto& [f, xi0] : cases) {
    const GridSpec g = f.dim() == 1 ? kLine : GridSpec::square(-2, 2, 33);
    if (strict_at_point(f, xi0, g))
      CHECK(strict_in_one_direction(f, xi0, g).has_value());
  }
}

TEST_CASE("endpoint strictness implies midpoint strictness on the registry") {
  struct Case { const char* name; double xi0; };
  const Case cases[] = {{"abs", 0.0}, {"double-well-1d", 0.0}, {"halfline-kink", 0.0}};
  for (const auto& c : cases) {
    const ScalarField f = builtin(c.name);
    const GridSpec g = GridSpec::line(-2, 2, 201);
    bool endpoint = true;
    for (Eigen::Index i = 0; i < g.size() && endpoint; ++i) {
      const double xi = g.node(i).x();
      if (xi == c.xi0) continue;
      for (double t : {0.25, 0.5, 0.75}) {
        const double combo = f.eval1(t * c.xi0 + (1 - t) * xi);
        if (combo >= std::max(f.eval1(c.xi0), f.eval1(xi))) { endpoint = false; break; }
      }
    }
    const auto lc = check_level_convex(f, g);
    if (endpoint && lc.level_convex)
      CHECK(strict_at_point(f, Vec2(c.xi0, 0), g));
  }
}

TEST_CASE("danao consistency") {
  const ScalarField sq = ScalarField::analytic(1, "x1^2", Coercivity{1.0, 2.0, 0.0});
  const GridSpec g = GridSpec::line(-1, 1, 101);
  const auto reps = danao_consistency(sq, g, {0.25, 1.0});
  REQUIRE(reps.size() == 2);
  CHECK(reps[0].pass);
  CHECK(reps[0].r_count == 2);  // nodes at +-0.5
  CHECK(reps[1].pass);

  const auto mreps = danao_consistency(maxnorm(), GridSpec::square(-2, 2, 33), {1.0});
  REQUIRE(mreps.size() == 1);
  CHECK(!mreps[0].pass);
  CHECK(!mreps[0].offenders.empty());

  const ScalarField c = ScalarField::analytic(1, "1.0");
  const auto creps = danao_consistency(c, GridSpec::line(-1, 1, 11), {1.0});
  CHECK(!creps[0].pass);
}

TEST_CASE("strict_via_perturbation") {
  const ScalarField sq = ScalarField::analytic(1, "x1^2", Coercivity{1.0, 2.0, 0.0});
  CHECK(strict_via_perturbation(sq, GridSpec::line(-1, 1, 101)).first);

  const ScalarField ramp = ScalarField::analytic(1, "max(x1, 0)");
  const auto [ok, wit] = strict_via_perturbation(ramp, GridSpec::line(-2, 2, 81));
  CHECK(!ok);
  REQUIRE(wit.has_value());
  CHECK(std::abs(ramp.eval(wit->xi + 0.5 * wit->eta) -
                 std::max(ramp.eval(wit->xi), ramp.eval(wit->xi + wit->eta))) <= 1e-7);

  CHECK(!strict_via_perturbation(builtin("halfline-kink"), GridSpec::line(-2, 2, 81)).first);
}

TEST_CASE("envelope of every builtin is level convex on its grid") {
  for (const auto& name : builtin_names()) {
    const ScalarField f = builtin(name);
    if (f.dim() == 1) {
      const GridSpec g = GridSpec::line(-2, 2, 201);
      const EnvelopeResult env = envelope_1d(f, g);
      CHECK(check_level_convex(env.as_field(), g).level_convex);
    } else if (f.coercivity()) {
      const GridSpec g = GridSpec::square(-2, 2, 33);
      const EnvelopeResult env = envelope_levelsweep(f, g);
      CHECK(check_level_convex(env.as_field(), g).level_convex);
    } else {
      // not coercive: the field is already level convex and is its own envelope
      const GridSpec g = GridSpec::square(-2, 2, 33);
      CHECK(check_level_convex(f, g).level_convex);
    }
  }
}

TEST_CASE("strictness reports are invariant under affine rescaling of f") {
  const ScalarField f = maxnorm();
  const ScalarField g2 = ScalarField::analytic(
      2, "3 * max(abs(x1), abs(x2)) + 1", Coercivity{1.5, 1.0, -1.0});
  const GridSpec g = GridSpec::square(-2, 2, 33);
  const Vec2 pts[] = {Vec2(0.25, 0.125), Vec2(0.5, 0.5), Vec2(1.0, 0.25)};
  for (const Vec2& p : pts) {
    const auto a = strict_in_one_direction(f, p, g);
    const auto b = strict_in_one_direction(g2, p, g);
    CHECK(a.has_value() == b.has_value());
    if (a && b) CHECK((*a - *b).norm() < 1e-9);
    CHECK(strict_at_point(f, p, g) == strict_at_point(g2, p, g));
  }
}

TEST_CASE("classify_strictness bundles the pieces") {
  const auto rep = classify_strictness(builtin("dist-halfplane"), Vec2(0, 0), kSquare);
  CHECK(rep.level_convex_sampled);
  CHECK(!rep.strict_at_point);
  CHECK(rep.strict_in_one_direction.has_value());
  CHECK(rep.boundary_location == PointLocation::Boundary);

  const auto bad = classify_strictness(builtin("double-well-1d"), Vec2(0, 0), kLine);
  CHECK(!bad.level_convex_sampled);
  REQUIRE(bad.violation.has_value());
}
