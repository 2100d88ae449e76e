#include <doctest.h>

#include <nlohmann/json.hpp>

#include "supremal/io.hpp"

using namespace supremal;
using nlohmann::json;

TEST_CASE("field json round-trips bit-identically") {
  for (const auto& name : builtin_names()) {
    const ScalarField f = builtin(name);
    const std::string s1 = io::field_to_json(f).dump(2);
    const ScalarField f2 = io::field_from_json(json::parse(s1));
    const std::string s2 = io::field_to_json(f2).dump(2);
    CHECK(s1 == s2);
  }
  // sampled field with annotations and a coercivity tag
  const ScalarField s =
      sample(builtin("example-4-5"), GridSpec::square(-2, 2, 9))
          .with_annotations({{3, 0.125}});
  const std::string s1 = io::field_to_json(s).dump();
  const ScalarField s2 = io::field_from_json(json::parse(s1));
  const std::string s3 = io::field_to_json(s2).dump();
  CHECK(s1 == s3);
  CHECK(s2.values().isApprox(s.values()));
}

TEST_CASE("field json rejects unknown keys") {
  json j = io::field_to_json(builtin("abs"));
  j["bogus"] = 1;
  CHECK_THROWS_AS(io::field_from_json(j), ParseError);
}

TEST_CASE("envelope csv + meta round-trips") {
  const ScalarField f = builtin("double-well-1d");
  const GridSpec g = GridSpec::line(-2, 2, 101);
  const EnvelopeResult env = envelope_1d(f, g);
  const std::string csv = io::envelope_to_csv(env, f);
  const json meta = io::envelope_meta_to_json(env);
  const EnvelopeResult env2 = io::envelope_from_files(csv, meta);
  CHECK(env2.values.size() == env.values.size());
  for (Eigen::Index i = 0; i < env.values.size(); ++i)
    CHECK(env2.values[i] == env.values[i]);  // bit-identical via shortest repr
  CHECK(io::envelope_to_csv(env2, f) == csv);
  CHECK(io::envelope_meta_to_json(env2).dump() == meta.dump());
}

TEST_CASE("verdict json round-trips") {
  const auto v = decide_affine(builtin("example-4-5"), Vec2(0, 0),
                               GridSpec::square(-2, 2, 33));
  const std::string s1 = io::verdict_to_json(v).dump(2);
  const auto v2 = io::verdict_from_json(json::parse(s1));
  const std::string s2 = io::verdict_to_json(v2).dump(2);
  CHECK(s1 == s2);
  CHECK(v2.decision == Decision::NotExists);
  CHECK(v2.nu.has_value());
}

TEST_CASE("mesh json round-trips") {
  const auto target = InclusionTarget::make(1, {Vec2(-1, 0), Vec2(1, 0)}, Vec2(0, 0));
  const auto u =
      zigzag_1d(target, Domain::interval(0, 1), 4, BoundaryDatum{Vec2(0, 0), 0.0});
  const std::string s1 = io::mesh_to_json(u).dump(2);
  const auto u2 = io::mesh_from_json(json::parse(s1));
  CHECK(io::mesh_to_json(u2).dump(2) == s1);

  const auto t2 = InclusionTarget::make(
      2, {Vec2(1, 0), Vec2(-1, 0), Vec2(0, 1), Vec2(0, -1)}, Vec2(0, 0));
  const auto cell = pyramid_cell(t2);
  const std::string s2 = io::mesh_to_json(cell.u).dump();
  const auto u3 = io::mesh_from_json(json::parse(s2));
  CHECK(io::mesh_to_json(u3).dump() == s2);
  CHECK(u3.cell_count() == cell.u.cell_count());
}

TEST_CASE("gradient csv lists every cell") {
  const auto target = InclusionTarget::make(1, {Vec2(-1, 0), Vec2(1, 0)}, Vec2(0, 0));
  const auto u =
      zigzag_1d(target, Domain::interval(0, 1), 4, BoundaryDatum{Vec2(0, 0), 0.0});
  const std::string csv = io::gradient_csv(u, builtin("double-well-1d"));
  // header + one row per cell
  CHECK(std::count(csv.begin(), csv.end(), '\n') ==
        static_cast<long>(u.cell_count()) + 1);
}

TEST_CASE("body json carries the degenerate kinds") {
  std::vector<Vec2> seg;
  for (int i = 0; i <= 8; ++i) seg.emplace_back(-1.0 + 0.25 * i, 0.0);
  const ConvexBody b = hull(seg, 2);
  const json j = io::body_to_json(b);
  CHECK(j.at("kind") == "segment");
  const ConvexBody b2 = io::body_from_json(j);
  CHECK(b2.kind == BodyKind::Segment);
  CHECK(io::body_to_json(b2).dump() == j.dump());
}

TEST_CASE("double_str emits shortest round-trip forms") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.123456789, -0.0}) {
    const std::string s = io::double_str(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
}
