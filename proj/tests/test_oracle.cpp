#include <doctest.h>

#include <cmath>
#include <random>

#include "supremal/inclusion.hpp"
#include "supremal/oracle.hpp"

using namespace supremal;

namespace {
const GridSpec kLine = GridSpec::line(-2, 2, 401);

ScalarField maxnorm() {
  return ScalarField::analytic(2, "max(abs(x1), abs(x2))", Coercivity{0.5, 1.0, 0.0});
}
}  // namespace

TEST_CASE("relaxed_min_1d: double well") {
  const Domain omega = Domain::interval(0, 1);
  const auto r0 = relaxed_min_1d(builtin("double-well-1d"), 0.0, omega, 401);
  CHECK(r0.value <= 1e-12);
  CHECK(r0.converged);
  REQUIRE(r0.minimizer.cell_count() == 2);
  CHECK(std::abs(r0.minimizer.cell_gradient(0).x() + 1.0) < 1e-9);
  CHECK(std::abs(r0.minimizer.cell_gradient(1).x() - 1.0) < 1e-9);

  const auto r2 = relaxed_min_1d(builtin("double-well-1d"), 2.0, omega, 401);
  CHECK(r2.value == doctest::Approx(9.0).epsilon(1e-9));

  const auto ra = relaxed_min_1d(builtin("abs"), 2.0, omega, 401);
  CHECK(ra.value == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(ra.minimizer.cell_count() == 1);  // affine witness
}

TEST_CASE("relaxed_min_1d equals envelope_1d at the nodes") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> amp(-0.6, 0.6);
  std::uniform_real_distribution<double> freq(0.5, 3.0);
  const Domain omega = Domain::interval(0, 1);
  for (int trial = 0; trial < 25; ++trial) {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "x1^2 + %.6f * sin(%.6f * x1) + %.6f * cos(%.6f * x1)",
                  amp(rng), freq(rng), amp(rng), freq(rng));
    const ScalarField f =
        sample(ScalarField::analytic(1, buf, Coercivity{1.0, 2.0, 3.0}), kLine);
    const EnvelopeResult env = envelope_1d(f, kLine);
    const Eigen::Index i = static_cast<Eigen::Index>(rng() % kLine.size());
    const auto r = relaxed_min_1d(f, kLine.node(i).x(), omega, 401);
    CHECK(std::abs(r.value - env.values[i]) <= 1e-7);
  }
}

TEST_CASE("relaxed_min_2d: descent reaches the relaxed floor of example-4-5") {
  const ScalarField f = builtin("example-4-5");
  const GridSpec g = GridSpec::square(-2, 2, 33);
  Descent2DOptions opts;
  opts.mesh_nodes = 9;
  opts.restarts = 4;
  opts.seed = 7;
  const auto r = relaxed_min_2d(f, Vec2(0, 0), Domain::box(0, 1, 0, 1), g, opts);
  CHECK(r.value <= 0.05);
  CHECK(r.value >= -1e-9);
  r.minimizer.validate();
}

TEST_CASE("relaxed_min_2d: level convex field keeps the affine minimizer") {
  const GridSpec g = GridSpec::square(-2, 2, 33);
  Descent2DOptions opts;
  opts.mesh_nodes = 7;
  opts.restarts = 2;
  opts.seed = 3;
  const auto r = relaxed_min_2d(maxnorm(), Vec2(0.3, 0.2), Domain::box(0, 1, 0, 1),
                                g, opts);
  CHECK(r.value == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("relaxed_min_2d: constant-like field") {
  const ScalarField c = ScalarField::analytic(
      2, "1.5 + 0.000001 * (x1^2 + x2^2)", Coercivity{0.0000005, 2.0, 0.0});
  const GridSpec g = GridSpec::square(-2, 2, 9);
  Descent2DOptions opts;
  opts.mesh_nodes = 5;
  opts.restarts = 1;
  const auto r = relaxed_min_2d(c, Vec2(0.1, 0.1), Domain::box(0, 1, 0, 1), g, opts);
  CHECK(r.value == doctest::Approx(1.5).epsilon(1e-4));
}

TEST_CASE("oracle floor: relaxed_min never beats the envelope") {
  std::mt19937_64 rng(55);
  for (const char* name : {"double-well-1d", "abs"}) {
    const ScalarField f = builtin(name);
    const EnvelopeResult env = envelope_1d(f, kLine);
    for (int t = 0; t < 5; ++t) {
      const Eigen::Index i = static_cast<Eigen::Index>(rng() % kLine.size());
      const auto r = relaxed_min_1d(f, kLine.node(i).x(), Domain::interval(0, 1), 401);
      CHECK(r.value >= env.values[i] - 1e-7);
    }
  }
  const ScalarField f = builtin("example-4-5");
  const GridSpec g = GridSpec::square(-2, 2, 17);
  const EnvelopeResult env = envelope_levelsweep(f, g);
  Descent2DOptions opts;
  opts.mesh_nodes = 5;
  opts.restarts = 2;
  for (int t = 0; t < 5; ++t) {
    const Eigen::Index i = static_cast<Eigen::Index>(rng() % g.size());
    const Vec2 xi0 = g.node(i);
    opts.seed = 100 + t;
    const auto r = relaxed_min_2d(f, xi0, Domain::box(0, 1, 0, 1), g, opts, {}, &env);
    CHECK(r.value >= env.values[i] - 1e-7);
  }
}

TEST_CASE("relaxed_min_2d refines monotonically") {
  const ScalarField f = builtin("example-4-5");
  const GridSpec g = GridSpec::square(-2, 2, 17);
  const EnvelopeResult env = envelope_levelsweep(f, g);
  Descent2DOptions opts;
  opts.restarts = 3;
  opts.seed = 11;
  double prev = 1e300;
  for (int nodes : {5, 9, 17}) {
    opts.mesh_nodes = nodes;
    const auto r =
        relaxed_min_2d(f, Vec2(0.25, 0.125), Domain::box(0, 1, 0, 1), g, opts, {}, &env);
    CHECK(r.value <= prev + 1e-7);
    prev = r.value;
  }
}

TEST_CASE("audit_solution") {
  const Domain omega = Domain::interval(0, 1);
  const auto target = InclusionTarget::make(1, {Vec2(-1, 0), Vec2(1, 0)}, Vec2(0, 0));
  const auto u = zigzag_1d(target, omega, 8, BoundaryDatum{Vec2(0, 0), 0.0});
  const auto rep = audit_solution(builtin("double-well-1d"), u, 0.0);
  CHECK(rep.pass);
  CHECK(rep.max_f <= 1e-12);

  const auto aff = PiecewiseAffineFunction::affine(Domain::box(0, 1, 0, 1),
                                                   BoundaryDatum{Vec2(0, 0), 0.0});
  const auto rep2 = audit_solution(builtin("example-4-5"), aff, 0.0);
  CHECK(!rep2.pass);
  CHECK(rep2.max_f == doctest::Approx(1.0));

  const auto rep3 = audit_solution(builtin("example-4-5"), aff, 100.0);
  CHECK(rep3.pass);
}

TEST_CASE("audit_solution rejects malformed meshes") {
  PiecewiseAffineFunction bad;
  bad.dim = 1;
  bad.omega = Domain::interval(0, 1);
  bad.breakpoints.resize(3);
  bad.breakpoints << 0.0, 0.7, 0.4;  // not increasing
  bad.values1.resize(3);
  bad.values1 << 0, 0, 0;
  CHECK_THROWS_AS(audit_solution(builtin("abs"), bad, 1.0), MalformedMesh);
}

TEST_CASE("jensen_audit") {
  const Domain omega = Domain::interval(0, 1);
  const auto target = InclusionTarget::make(1, {Vec2(-1, 0), Vec2(1, 0)}, Vec2(0, 0));
  const auto u = zigzag_1d(target, omega, 8, BoundaryDatum{Vec2(0, 0), 0.0});

  const EnvelopeResult env = envelope_1d(builtin("double-well-1d"), kLine);
  const auto ok = jensen_audit(env.as_field(), u);
  CHECK(ok.holds);
  CHECK(ok.f_mean == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ok.max_cell == doctest::Approx(0.0).epsilon(1e-12));

  const auto bad = jensen_audit(builtin("double-well-1d"), u);
  CHECK(!bad.holds);
  CHECK(bad.f_mean == doctest::Approx(1.0));
  CHECK(!bad.witness_cells.empty());

  const auto c = jensen_audit(ScalarField::analytic(1, "2.0"), u);
  CHECK(c.holds);
  CHECK(c.f_mean == 2.0);
  CHECK(c.max_cell == 2.0);
}
