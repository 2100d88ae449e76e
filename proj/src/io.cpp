#include "supremal/io.hpp"

#include <charconv>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

namespace supremal::io {

std::string double_str(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

json vec_to_json(const Vec2& p, int dim) {
  json j = json::array();
  j.push_back(p.x());
  if (dim == 2) j.push_back(p.y());
  return j;
}

Vec2 vec_from_json(const json& j) {
  Vec2 p(j.at(0).get<double>(), j.size() > 1 ? j.at(1).get<double>() : 0.0);
  return p;
}

json array_to_json(const Eigen::ArrayXd& a) {
  json j = json::array();
  for (Eigen::Index i = 0; i < a.size(); ++i) j.push_back(a[i]);
  return j;
}

Eigen::ArrayXd array_from_json(const json& j) {
  Eigen::ArrayXd a(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) a[static_cast<Eigen::Index>(i)] = j.at(i).get<double>();
  return a;
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys,
                    const char* what) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : keys)
      if (it.key() == k) { ok = true; break; }
    if (!ok) throw ParseError(std::string(what) + ": unknown key '" + it.key() + "'");
  }
}

}  // namespace

json grid_to_json(const GridSpec& g) {
  json j;
  j["dim"] = g.dim;
  j["lo"] = json::array();
  j["hi"] = json::array();
  j["counts"] = json::array();
  for (int ax = 0; ax < g.dim; ++ax) {
    j["lo"].push_back(g.lo[ax]);
    j["hi"].push_back(g.hi[ax]);
    j["counts"].push_back(g.counts[ax]);
  }
  return j;
}

GridSpec grid_from_json(const json& j) {
  reject_unknown(j, {"dim", "lo", "hi", "counts"}, "grid");
  GridSpec g;
  g.dim = j.at("dim").get<int>();
  for (int ax = 0; ax < g.dim; ++ax) {
    g.lo[ax] = j.at("lo").at(ax).get<double>();
    g.hi[ax] = j.at("hi").at(ax).get<double>();
    g.counts[ax] = j.at("counts").at(ax).get<int>();
  }
  if (g.dim == 1) g.counts[1] = 1;
  g.validate();
  return g;
}

json field_to_json(const ScalarField& f) {
  json j;
  j["dim"] = f.dim();
  j["kind"] = f.kind() == FieldKind::Analytic ? "analytic-expression" : "grid-sampled";
  if (!f.name().empty()) j["name"] = f.name();
  if (f.kind() == FieldKind::Analytic) {
    j["expression"] = f.expression();
  } else {
    j["grid"] = grid_to_json(f.grid());
    j["values"] = array_to_json(f.values());
    if (!f.lsc_annotations().empty()) {
      json ann = json::array();
      for (const auto& [idx, v] : f.lsc_annotations())
        ann.push_back(json::array({idx, v}));
      j["lsc_annotations"] = ann;
    }
  }
  if (f.coercivity()) {
    json c;
    c["form"] = "power";
    c["a"] = f.coercivity()->a;
    c["p"] = f.coercivity()->p;
    c["b"] = f.coercivity()->b;
    j["coercivity"] = c;
  }
  return j;
}

ScalarField field_from_json(const json& j) {
  reject_unknown(j, {"dim", "kind", "name", "expression", "grid", "values",
                     "lsc_annotations", "coercivity"}, "field");
  const int dim = j.at("dim").get<int>();
  const std::string kind = j.at("kind").get<std::string>();
  std::optional<Coercivity> co;
  if (j.contains("coercivity")) {
    const json& c = j.at("coercivity");
    reject_unknown(c, {"form", "a", "p", "b"}, "coercivity");
    if (c.at("form").get<std::string>() != "power")
      throw ParseError("coercivity: unknown form");
    co = Coercivity{c.at("a").get<double>(), c.at("p").get<double>(),
                    c.at("b").get<double>()};
  }
  const std::string name = j.value("name", std::string{});
  if (kind == "analytic-expression")
    return ScalarField::analytic(dim, j.at("expression").get<std::string>(), co, name);
  if (kind != "grid-sampled") throw ParseError("field: unknown kind '" + kind + "'");
  GridSpec g = grid_from_json(j.at("grid"));
  if (g.dim != dim) throw ParseError("field: dim does not match grid");
  ScalarField f = ScalarField::sampled(g, array_from_json(j.at("values")), co, name);
  if (j.contains("lsc_annotations")) {
    std::vector<std::pair<Eigen::Index, double>> ann;
    for (const auto& a : j.at("lsc_annotations"))
      ann.emplace_back(a.at(0).get<Eigen::Index>(), a.at(1).get<double>());
    f = f.with_annotations(std::move(ann));
  }
  return f;
}

json domain_to_json(const Domain& d) {
  json j;
  j["dim"] = d.dim;
  if (d.dim == 1) {
    j["a"] = d.a;
    j["b"] = d.b;
  } else {
    j["vertices"] = json::array();
    for (const Vec2& p : d.polygon) j["vertices"].push_back(vec_to_json(p, 2));
  }
  return j;
}

Domain domain_from_json(const json& j) {
  const int dim = j.at("dim").get<int>();
  if (dim == 1) return Domain::interval(j.at("a").get<double>(), j.at("b").get<double>());
  std::vector<Vec2> verts;
  for (const auto& v : j.at("vertices")) verts.push_back(vec_from_json(v));
  return Domain::convex_polygon(std::move(verts));
}

namespace {
const char* body_kind_str(BodyKind k) {
  switch (k) {
    case BodyKind::Interval: return "interval";
    case BodyKind::Polygon: return "polygon";
    case BodyKind::Segment: return "segment";
    case BodyKind::Point: return "point";
  }
  return "polygon";
}
}  // namespace

json body_to_json(const ConvexBody& b) {
  json j;
  j["dim"] = b.dim;
  j["kind"] = body_kind_str(b.kind);
  j["tol"] = b.tol;
  if (b.dim == 1) {
    j["vertices"] = json::array({b.lo, b.hi});
  } else {
    j["vertices"] = json::array();
    for (const Vec2& p : b.vertices) j["vertices"].push_back(vec_to_json(p, 2));
  }
  return j;
}

ConvexBody body_from_json(const json& j) {
  ConvexBody b;
  b.dim = j.at("dim").get<int>();
  b.tol = j.at("tol").get<double>();
  const std::string k = j.at("kind").get<std::string>();
  if (k == "interval") b.kind = BodyKind::Interval;
  else if (k == "polygon") b.kind = BodyKind::Polygon;
  else if (k == "segment") b.kind = BodyKind::Segment;
  else if (k == "point") b.kind = BodyKind::Point;
  else throw ParseError("body: unknown kind");
  if (b.dim == 1) {
    b.lo = j.at("vertices").at(0).get<double>();
    b.hi = j.at("vertices").at(1).get<double>();
    b.vertices = {Vec2(b.lo, 0.0), Vec2(b.hi, 0.0)};
  } else {
    for (const auto& v : j.at("vertices")) b.vertices.push_back(vec_from_json(v));
  }
  return b;
}

json certificate_to_json(const Certificate& c) {
  json j = json::array();
  for (const auto& w : c.witnesses) {
    json e;
    e["point"] = vec_to_json(w.point, 2);
    e["weight"] = w.weight;
    e["f"] = w.fvalue;
    j.push_back(e);
  }
  return j;
}

Certificate certificate_from_json(const json& j) {
  Certificate c;
  for (const auto& e : j) {
    Witness w;
    w.point = vec_from_json(e.at("point"));
    w.weight = e.at("weight").get<double>();
    w.fvalue = e.at("f").get<double>();
    c.witnesses.push_back(w);
  }
  return c;
}

std::string envelope_to_csv(const EnvelopeResult& env, const ScalarField& field) {
  std::ostringstream os;
  const int dim = env.grid.dim;
  os << (dim == 1 ? "x1,f,envelope\n" : "x1,x2,f,envelope\n");
  for (Eigen::Index i = 0; i < env.grid.size(); ++i) {
    const Vec2 p = env.grid.node(i);
    os << double_str(p.x()) << ',';
    if (dim == 2) os << double_str(p.y()) << ',';
    os << double_str(field.eval(p)) << ',' << double_str(env.values[i]) << '\n';
  }
  return os.str();
}

namespace {
const char* method_str(EnvelopeMethod m) {
  switch (m) {
    case EnvelopeMethod::LevelSweep: return "levelsweep";
    case EnvelopeMethod::Caratheodory: return "caratheodory";
    case EnvelopeMethod::RunningMin1D: return "runningmin-1d";
  }
  return "levelsweep";
}
}  // namespace

json envelope_meta_to_json(const EnvelopeResult& env) {
  json j;
  j["grid"] = grid_to_json(env.grid);
  j["method"] = method_str(env.method);
  if (env.coercivity) {
    j["coercivity"] = {{"form", "power"},
                       {"a", env.coercivity->a},
                       {"p", env.coercivity->p},
                       {"b", env.coercivity->b}};
  }
  json certs = json::array();
  for (const auto& c : env.certificates) certs.push_back(certificate_to_json(c));
  j["certificates"] = certs;
  return j;
}

EnvelopeResult envelope_from_files(const std::string& csv, const json& meta) {
  EnvelopeResult env;
  env.grid = grid_from_json(meta.at("grid"));
  const std::string m = meta.at("method").get<std::string>();
  env.method = m == "levelsweep"      ? EnvelopeMethod::LevelSweep
               : m == "caratheodory"  ? EnvelopeMethod::Caratheodory
                                      : EnvelopeMethod::RunningMin1D;
  if (meta.contains("coercivity")) {
    const json& c = meta.at("coercivity");
    env.coercivity = Coercivity{c.at("a").get<double>(), c.at("p").get<double>(),
                                c.at("b").get<double>()};
  }
  for (const auto& c : meta.at("certificates"))
    env.certificates.push_back(certificate_from_json(c));
  env.values.resize(env.grid.size());
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);  // header
  Eigen::Index row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto last = line.find_last_of(',');
    if (last == std::string::npos || row >= env.values.size())
      throw ParseError("envelope csv: malformed row");
    env.values[row++] = std::strtod(line.c_str() + last + 1, nullptr);
  }
  if (row != env.values.size()) throw ParseError("envelope csv: row count mismatch");
  return env;
}

json strictness_to_json(const StrictnessReport& r) {
  json j;
  j["xi0"] = vec_to_json(r.xi0, 2);
  j["f_xi0"] = r.f_xi0;
  j["level_convex_sampled"] = r.level_convex_sampled;
  j["strict_at_point"] = r.strict_at_point;
  if (r.strict_in_one_direction)
    j["strict_in_one_direction"] = vec_to_json(*r.strict_in_one_direction, 2);
  j["boundary_location"] = r.boundary_location == PointLocation::Interior ? "interior"
                           : r.boundary_location == PointLocation::Boundary
                               ? "boundary"
                               : "exterior";
  if (r.violation) {
    j["violation"] = {{"xi", vec_to_json(r.violation->xi, 2)},
                      {"eta", vec_to_json(r.violation->eta, 2)},
                      {"t", r.violation->t},
                      {"f_combo", r.violation->f_combo},
                      {"f_max", r.violation->f_max}};
  }
  return j;
}

namespace {
const char* decision_str(Decision d) {
  switch (d) {
    case Decision::Exists: return "exists";
    case Decision::NotExists: return "not_exists";
    case Decision::Unknown: return "unknown";
  }
  return "unknown";
}
const char* branch_str(Branch b) {
  switch (b) {
    case Branch::InLevelSetOfF: return "in_level_set_of_f";
    case Branch::InteriorOfEnvelopeLevelSet: return "interior_of_envelope_level_set";
    case Branch::Sufficient: return "sufficient";
    case Branch::None: return "none";
  }
  return "none";
}
}  // namespace

json verdict_to_json(const ExistenceVerdict& v) {
  json j;
  j["decision"] = decision_str(v.decision);
  j["branch"] = branch_str(v.branch);
  j["relaxed_value"] = v.relaxed_value;
  j["xi0"] = vec_to_json(v.xi0, 2);
  j["f_xi0"] = v.f_xi0;
  j["margins"] = {{"level", v.level_margin}, {"boundary", v.boundary_distance}};
  if (v.nu) j["nu"] = vec_to_json(*v.nu, 2);
  if (v.strictness) j["strictness"] = strictness_to_json(*v.strictness);
  j["certificate"] = certificate_to_json(v.certificate);
  if (!v.reason.empty()) j["reason"] = v.reason;
  j["grid"] = grid_to_json(v.grid);
  j["field"] = v.field_name;
  if (v.sufficient_only) j["sufficient_only"] = true;
  if (!v.cell_checks.empty()) {
    json cells = json::array();
    for (const auto& c : v.cell_checks)
      cells.push_back({{"cell", c.cell},
                       {"gradient", vec_to_json(c.gradient, 2)},
                       {"in_level_set_of_f", c.in_level_set_of_f},
                       {"interior_of_envelope_set", c.interior_of_envelope_set}});
    j["cells"] = cells;
  }
  if (!v.flatness.empty()) {
    json fl = json::array();
    for (const auto& c : v.flatness)
      fl.push_back({{"size", c.size},
                    {"envelope_spread", c.envelope_spread},
                    {"flat", c.flat}});
    j["flatness_components"] = fl;
  }
  return j;
}

ExistenceVerdict verdict_from_json(const json& j) {
  ExistenceVerdict v;
  const std::string d = j.at("decision").get<std::string>();
  v.decision = d == "exists"       ? Decision::Exists
               : d == "not_exists" ? Decision::NotExists
                                   : Decision::Unknown;
  const std::string b = j.at("branch").get<std::string>();
  v.branch = b == "in_level_set_of_f" ? Branch::InLevelSetOfF
             : b == "interior_of_envelope_level_set"
                 ? Branch::InteriorOfEnvelopeLevelSet
             : b == "sufficient" ? Branch::Sufficient
                                 : Branch::None;
  v.relaxed_value = j.at("relaxed_value").get<double>();
  v.xi0 = vec_from_json(j.at("xi0"));
  v.f_xi0 = j.at("f_xi0").get<double>();
  v.level_margin = j.at("margins").at("level").get<double>();
  v.boundary_distance = j.at("margins").at("boundary").get<double>();
  if (j.contains("nu")) v.nu = vec_from_json(j.at("nu"));
  v.certificate = certificate_from_json(j.at("certificate"));
  v.reason = j.value("reason", std::string{});
  v.grid = grid_from_json(j.at("grid"));
  v.field_name = j.at("field").get<std::string>();
  v.sufficient_only = j.value("sufficient_only", false);
  if (j.contains("strictness")) {
    StrictnessReport r;
    const json& s = j.at("strictness");
    r.xi0 = vec_from_json(s.at("xi0"));
    r.f_xi0 = s.at("f_xi0").get<double>();
    r.level_convex_sampled = s.at("level_convex_sampled").get<bool>();
    r.strict_at_point = s.at("strict_at_point").get<bool>();
    if (s.contains("strict_in_one_direction"))
      r.strict_in_one_direction = vec_from_json(s.at("strict_in_one_direction"));
    const std::string loc = s.at("boundary_location").get<std::string>();
    r.boundary_location = loc == "interior"   ? PointLocation::Interior
                          : loc == "boundary" ? PointLocation::Boundary
                                              : PointLocation::Exterior;
    v.strictness = r;
  }
  return v;
}

json mesh_to_json(const PiecewiseAffineFunction& u) {
  json j;
  j["dim"] = u.dim;
  j["omega"] = domain_to_json(u.omega);
  j["datum"] = {{"xi0", vec_to_json(u.datum.xi0, 2)}, {"c", u.datum.c}};
  j["residual_fraction"] = u.residual_fraction;
  j["residual_flagged"] = u.residual_flagged;
  if (u.dim == 1) {
    j["breakpoints"] = array_to_json(u.breakpoints);
    j["values"] = array_to_json(u.values1);
  } else {
    j["vertices"] = json::array();
    for (const Vec2& p : u.vertices) j["vertices"].push_back(vec_to_json(p, 2));
    j["triangles"] = json::array();
    for (const auto& t : u.triangles)
      j["triangles"].push_back(json::array({t[0], t[1], t[2]}));
    j["values"] = array_to_json(u.values2);
  }
  return j;
}

PiecewiseAffineFunction mesh_from_json(const json& j) {
  PiecewiseAffineFunction u;
  u.dim = j.at("dim").get<int>();
  u.omega = domain_from_json(j.at("omega"));
  u.datum.xi0 = vec_from_json(j.at("datum").at("xi0"));
  u.datum.c = j.at("datum").at("c").get<double>();
  u.residual_fraction = j.at("residual_fraction").get<double>();
  u.residual_flagged = j.at("residual_flagged").get<bool>();
  if (u.dim == 1) {
    u.breakpoints = array_from_json(j.at("breakpoints"));
    u.values1 = array_from_json(j.at("values"));
  } else {
    for (const auto& v : j.at("vertices")) u.vertices.push_back(vec_from_json(v));
    for (const auto& t : j.at("triangles"))
      u.triangles.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
    u.values2 = array_from_json(j.at("values"));
  }
  u.validate();
  return u;
}

std::string gradient_csv(const PiecewiseAffineFunction& u, const ScalarField& field) {
  std::ostringstream os;
  os << (u.dim == 1 ? "cell,measure,g1,f\n" : "cell,measure,g1,g2,f\n");
  for (Eigen::Index i = 0; i < u.cell_count(); ++i) {
    const Vec2 g = u.cell_gradient(i);
    os << i << ',' << double_str(u.cell_measure(i)) << ',' << double_str(g.x());
    if (u.dim == 2) os << ',' << double_str(g.y());
    os << ',' << double_str(field.eval(u.dim == 1 ? Vec2(g.x(), 0.0) : g)) << '\n';
  }
  return os.str();
}

json audit_to_json(const AuditReport& r) {
  return {{"max_f", r.max_f},
          {"claimed", r.claimed},
          {"pass", r.pass},
          {"residual_fraction", r.residual_fraction},
          {"worst_cell", r.worst_cell}};
}

json jensen_to_json(const JensenReport& r) {
  json j = {{"f_mean", r.f_mean},
            {"max_cell", r.max_cell},
            {"holds", r.holds},
            {"mean_gradient", vec_to_json(r.mean_gradient, 2)}};
  if (!r.witness_cells.empty()) j["witness_cells"] = r.witness_cells;
  return j;
}

json minimax_to_json(const MinimaxResult& r) {
  return {{"value", r.value},
          {"method", r.method == MinimaxMethod::BisectionReachability1D
                         ? "bisection-reachability-1d"
                         : "local-descent-2d"},
          {"iterations", r.iterations},
          {"converged", r.converged}};
}

json flatness_to_json(const FlatnessReport& r) {
  json dirs = json::array();
  for (const auto& d : r.directions)
    dirs.push_back({{"nu", vec_to_json(d.nu, 2)},
                    {"halfball_deviation", d.halfball_deviation},
                    {"ray_deviation", d.ray_deviation}});
  return {{"envelope_at_xi0", r.envelope_at_xi0},
          {"directions", dirs},
          {"best_halfball", {{"nu", vec_to_json(r.best_halfball.nu, 2)},
                             {"deviation", r.best_halfball.halfball_deviation}}},
          {"best_ray", {{"nu", vec_to_json(r.best_ray.nu, 2)},
                        {"deviation", r.best_ray.ray_deviation}}}};
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open for writing: " + path);
  os << content;
}

std::string read_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace supremal::io
