#include "supremal/existence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "supremal/oracle.hpp"

namespace supremal {

namespace {

Certificate single_cert(const Vec2& p, double f) {
  Certificate c;
  c.witnesses = {{p, 1.0, f}, {p, 0.0, f}};
  return c;
}

// Nearest grid node within snapping distance, if any.
std::optional<Eigen::Index> snap_node(const GridSpec& g, const Vec2& p) {
  std::array<int, 2> idx{0, 0};
  for (int ax = 0; ax < g.dim; ++ax) {
    const double h = g.spacing(ax);
    const double r = ((ax == 0 ? p.x() : p.y()) - g.lo[ax]) / h;
    const double rn = std::round(r);
    if (std::abs(r - rn) > 1e-9 || rn < 0 || rn > g.counts[ax] - 1) return std::nullopt;
    idx[ax] = static_cast<int>(rn);
  }
  return g.dim == 1 ? Eigen::Index(idx[0]) : g.flat(idx[0], idx[1]);
}

struct Reach1D {
  double value;
  Eigen::Index left, right;  // nearest witnesses; == -1 when xi0 itself
};

// Sampled reachability value at xi0: running minima toward xi0 from both
// sides, xi0 itself admitted as a candidate.
Reach1D reach_1d(const ScalarField& field, const GridSpec& grid, double xi0) {
  if (xi0 < grid.lo[0] - 1e-12 || xi0 > grid.hi[0] + 1e-12)
    throw OutOfBounds("relaxed_value_affine: xi0 outside the grid window");
  const Eigen::Index n = grid.size();
  double ml = std::numeric_limits<double>::max(), mr = ml;
  Eigen::Index al = -1, ar = -1;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = grid.node(i).x();
    const double f = field.eval(grid.node(i));
    if (x <= xi0 && (f < ml || (f == ml && true))) {
      if (f <= ml) { ml = f; al = i; }  // latest achieving: nearest from left
    }
    if (x >= xi0 && f < mr) { mr = f; ar = i; }  // earliest: nearest from right
  }
  const double f0 = field.eval(Vec2(xi0, 0.0));
  Reach1D r;
  if (al < 0 || ar < 0) { r.value = f0; r.left = r.right = -1; return r; }
  const double v = std::max(std::min(ml, f0), std::min(mr, f0));
  r.value = v;
  r.left = al;
  r.right = ar;
  if (f0 <= v) { r.left = r.right = -1; r.value = f0; }
  return r;
}

}  // namespace

RelaxedValue relaxed_value_affine(const ScalarField& field, const Vec2& xi0,
                                  const GridSpec& grid, const Tolerances& tol,
                                  const EnvelopeResult* precomputed) {
  RelaxedValue out;
  const double f0 = field.eval(grid.dim == 1 ? Vec2(xi0.x(), 0.0) : xi0);
  if (grid.dim == 1) {
    const Reach1D r = reach_1d(field, grid, xi0.x());
    out.value = r.value;
    if (r.left < 0) {
      out.certificate = single_cert(Vec2(xi0.x(), 0.0), f0);
    } else {
      const Vec2 a = grid.node(r.left), b = grid.node(r.right);
      const double xa = a.x(), xb = b.x();
      const double lambda = xb == xa ? 1.0 : std::clamp((xb - xi0.x()) / (xb - xa), 0.0, 1.0);
      out.certificate.witnesses = {{a, lambda, field.eval(a)},
                                   {b, 1.0 - lambda, field.eval(b)}};
    }
    return out;
  }
  EnvelopeResult local;
  const EnvelopeResult* env = precomputed;
  if (!env) {
    local = envelope_levelsweep(field, grid, tol);
    env = &local;
  }
  const ScalarField ef = env->as_field();
  const double vi = ef.eval(xi0);
  out.value = std::min(vi, f0);
  if (out.value == f0) {
    out.certificate = single_cert(xi0, f0);
    return out;
  }
  if (const auto node = snap_node(grid, xi0)) {
    out.value = std::min(env->values[*node], f0);
    out.certificate = env->certificates[static_cast<size_t>(*node)];
    return out;
  }
  // Off-node: certificate from the sampled sublevel set of f when reachable.
  const std::vector<Vec2> pts = sublevel_nodes(field, grid, out.value, tol);
  if (!pts.empty()) {
    const ConvexBody body = hull(pts, 2, tol);
    if (locate(body, xi0) != PointLocation::Exterior) {
      try {
        const auto cv = envelope_caratheodory(field, xi0, pts, tol);
        out.value = std::min(out.value, cv.value);
        out.certificate = cv.certificate;
        return out;
      } catch (const NotInHull&) {
      }
    }
  }
  out.certificate = Certificate{};  // no certificate at this resolution
  return out;
}

ExistenceVerdict decide_affine(const ScalarField& field, const Vec2& xi0,
                               const GridSpec& grid, const Tolerances& tol,
                               const EnvelopeResult* precomputed) {
  ExistenceVerdict v;
  v.xi0 = grid.dim == 1 ? Vec2(xi0.x(), 0.0) : xi0;
  v.grid = grid;
  v.field_name = field.name().empty() ? field.expression() : field.name();
  v.f_xi0 = field.eval(v.xi0);

  if (grid.dim == 1) {
    const Reach1D r = reach_1d(field, grid, xi0.x());
    v.relaxed_value = r.value;
    v.level_margin = v.f_xi0 - r.value;
    if (v.level_margin <= tol.level) {
      v.decision = Decision::Exists;
      v.branch = Branch::InLevelSetOfF;
      v.certificate = single_cert(v.xi0, v.f_xi0);
      v.boundary_distance = 0.0;
      return v;
    }
    // Dimension one: the witnesses bracket xi0 strictly, so xi0 is interior
    // to the envelope sublevel interval.
    const double xa = grid.node(r.left).x(), xb = grid.node(r.right).x();
    v.decision = Decision::Exists;
    v.branch = Branch::InteriorOfEnvelopeLevelSet;
    v.boundary_distance = std::min(xi0.x() - xa, xb - xi0.x());
    const double lambda = xb == xa ? 1.0 : (xb - xi0.x()) / (xb - xa);
    v.certificate.witnesses = {{grid.node(r.left), lambda, field.eval(grid.node(r.left))},
                               {grid.node(r.right), 1.0 - lambda,
                                field.eval(grid.node(r.right))}};
    return v;
  }

  EnvelopeResult local;
  const EnvelopeResult* env = precomputed;
  if (!env) {
    local = envelope_levelsweep(field, grid, tol);
    env = &local;
  }
  const RelaxedValue rv = relaxed_value_affine(field, xi0, grid, tol, env);
  v.relaxed_value = rv.value;
  v.certificate = rv.certificate;
  v.level_margin = v.f_xi0 - rv.value;

  if (v.level_margin <= tol.level) {
    v.decision = Decision::Exists;
    v.branch = Branch::InLevelSetOfF;
    v.boundary_distance = 0.0;
    return v;
  }
  const ConvexBody body = sublevel_body(*env, rv.value, tol);
  v.boundary_distance = signed_boundary_distance(body, xi0);
  switch (locate(body, xi0)) {
    case PointLocation::Interior:
      v.decision = Decision::Exists;
      v.branch = Branch::InteriorOfEnvelopeLevelSet;
      return v;
    case PointLocation::Boundary: {
      v.decision = Decision::NotExists;
      v.branch = Branch::None;
      v.nu = separating_direction(body, xi0);
      // Strictness of the envelope at xi0, phrased on the decide-side body.
      StrictnessReport sr;
      sr.xi0 = xi0;
      sr.f_xi0 = rv.value;
      sr.level_convex_sampled = true;
      sr.boundary_location = PointLocation::Boundary;
      sr.strict_in_one_direction = v.nu;
      const double eps = body.tol * body.scale();
      sr.strict_at_point = false;
      for (const Vec2& e : extreme_points(body))
        if ((e - xi0).norm() <= eps) { sr.strict_at_point = true; break; }
      v.strictness = sr;
      return v;
    }
    case PointLocation::Exterior:
      v.decision = Decision::Unknown;
      v.branch = Branch::None;
      v.reason = "sampled envelope sublevel set does not reach xi0 at this resolution";
      return v;
  }
  return v;
}

namespace {

std::vector<ComponentFlatness> flatness_components(const EnvelopeResult& env,
                                                   const ScalarField& field,
                                                   const Tolerances& tol) {
  const GridSpec& g = env.grid;
  const Eigen::Index n = g.size();
  std::vector<char> in_k(n, 0);
  for (Eigen::Index i = 0; i < n; ++i)
    if (env.values[i] < field.eval(g.node(i)) - tol.level) in_k[i] = 1;
  std::vector<char> seen(n, 0);
  std::vector<ComponentFlatness> out;
  if (g.dim == 1) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!in_k[i] || seen[i]) continue;
      Eigen::Index j = i;
      double lo = env.values[i], hi = lo;
      int size = 0;
      while (j < n && in_k[j]) {
        seen[j] = 1;
        lo = std::min(lo, env.values[j]);
        hi = std::max(hi, env.values[j]);
        ++size;
        ++j;
      }
      out.push_back({size, hi - lo, hi - lo <= tol.level});
    }
    return out;
  }
  for (Eigen::Index start = 0; start < n; ++start) {
    if (!in_k[start] || seen[start]) continue;
    std::queue<Eigen::Index> q;
    q.push(start);
    seen[start] = 1;
    double lo = env.values[start], hi = lo;
    int size = 0;
    while (!q.empty()) {
      const Eigen::Index cur = q.front();
      q.pop();
      ++size;
      lo = std::min(lo, env.values[cur]);
      hi = std::max(hi, env.values[cur]);
      const int i0 = static_cast<int>(cur / g.counts[1]);
      const int i1 = static_cast<int>(cur % g.counts[1]);
      const int di[4] = {1, -1, 0, 0};
      const int dj[4] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int a = i0 + di[k], b = i1 + dj[k];
        if (a < 0 || b < 0 || a >= g.counts[0] || b >= g.counts[1]) continue;
        const Eigen::Index nb = g.flat(a, b);
        if (in_k[nb] && !seen[nb]) { seen[nb] = 1; q.push(nb); }
      }
    }
    out.push_back({size, hi - lo, hi - lo <= tol.level});
  }
  return out;
}

}  // namespace

ExistenceVerdict decide_general(const ScalarField& field,
                                const PiecewiseAffineFunction& u0,
                                const GridSpec& grid, const Tolerances& tol,
                                const GeneralOptions& opts,
                                const EnvelopeResult* precomputed) {
  u0.validate();
  EnvelopeResult local;
  const EnvelopeResult* env = precomputed;
  if (!env) {
    local = compute_envelope(field, grid, tol);
    env = &local;
  }

  std::vector<Vec2> grads(static_cast<size_t>(u0.cell_count()));
  for (Eigen::Index i = 0; i < u0.cell_count(); ++i)
    grads[static_cast<size_t>(i)] = u0.cell_gradient(i);
  bool affine_datum = true;
  for (const Vec2& g : grads)
    if ((g - grads[0]).norm() > 1e-10 * std::max(1.0, grads[0].norm())) {
      affine_datum = false;
      break;
    }

  ExistenceVerdict v;
  v.grid = grid;
  v.field_name = field.name().empty() ? field.expression() : field.name();
  v.xi0 = u0.mean_gradient();
  v.f_xi0 = field.eval(v.xi0);
  v.sufficient_only = true;

  if (affine_datum || grid.dim == 1) {
    // One-dimensional data reduce to the mean slope; affine data are exact.
    const RelaxedValue rv = relaxed_value_affine(field, v.xi0, grid, tol, env);
    v.relaxed_value = rv.value;
    v.certificate = rv.certificate;
  } else {
    Descent2DOptions dopts;
    dopts.mesh_nodes = opts.oracle_mesh;
    dopts.restarts = opts.oracle_restarts;
    dopts.seed = opts.seed;
    dopts.boundary = &u0;
    const MinimaxResult mm = relaxed_min_2d(field, v.xi0, u0.omega, grid, dopts, tol, env);
    v.relaxed_value = mm.value;
    v.reason = "relaxed value from the upper-bound descent oracle";
  }
  v.level_margin = v.f_xi0 - v.relaxed_value;

  const ConvexBody body = grid.dim == 2 ? sublevel_body(*env, v.relaxed_value, tol)
                                        : ConvexBody{};
  bool all_pass = true;
  for (size_t i = 0; i < grads.size(); ++i) {
    CellCheck cc;
    cc.cell = static_cast<Eigen::Index>(i);
    cc.gradient = grads[i];
    cc.in_level_set_of_f =
        field.eval(grid.dim == 1 ? Vec2(grads[i].x(), 0.0) : grads[i]) <=
        v.relaxed_value + tol.level;
    if (grid.dim == 1) {
      const Reach1D r = reach_1d(field, grid, grads[i].x());
      cc.interior_of_envelope_set =
          r.left >= 0 && grid.node(r.left).x() < grads[i].x() &&
          grid.node(r.right).x() > grads[i].x() &&
          r.value <= v.relaxed_value + tol.level;
    } else {
      cc.interior_of_envelope_set =
          locate(body, grads[i]) == PointLocation::Interior;
    }
    if (!cc.in_level_set_of_f && !cc.interior_of_envelope_set) all_pass = false;
    v.cell_checks.push_back(cc);
  }
  v.flatness = flatness_components(*env, field, tol);
  if (all_pass) {
    v.decision = Decision::Exists;
    v.branch = Branch::Sufficient;
  } else {
    v.decision = Decision::Unknown;
    v.branch = Branch::None;
    v.reason = "a cell gradient fails both inclusion branches; the condition is "
               "only sufficient for non-affine data";
  }
  return v;
}

FlatnessReport flatness_necessary_check(const ScalarField& field, const Vec2& xi0,
                                        double eps, const GridSpec& grid,
                                        const Tolerances& tol,
                                        const EnvelopeResult* precomputed) {
  EnvelopeResult local;
  const EnvelopeResult* env = precomputed;
  if (!env) {
    local = compute_envelope(field, grid, tol);
    env = &local;
  }
  const ScalarField ef = env->as_field();
  const Vec2 x0 = grid.dim == 1 ? Vec2(xi0.x(), 0.0) : xi0;
  const double e0 = ef.eval(x0);
  const double f0 = field.eval(x0);
  if (f0 - e0 <= tol.level)
    throw NotApplicable("flatness_necessary_check: f(xi0) equals the envelope");

  FlatnessReport rep;
  rep.envelope_at_xi0 = e0;
  std::vector<Vec2> dirs;
  if (grid.dim == 1) {
    dirs = {Vec2(1, 0), Vec2(-1, 0)};
  } else {
    for (int k = 0; k < 72; ++k) {
      const double a = 2.0 * M_PI * k / 72;
      dirs.emplace_back(std::cos(a), std::sin(a));
    }
  }
  const Eigen::Index n = grid.size();
  for (const Vec2& nu : dirs) {
    FlatnessDirection fd;
    fd.nu = nu;
    double dev_hb = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vec2 p = grid.node(i);
      const Vec2 d = p - x0;
      if (d.norm() > eps || d.dot(nu) < -1e-12) continue;
      dev_hb = std::max(dev_hb, std::abs(env->values[i] - e0));
    }
    double dev_ray = 0.0;
    const int m = 33;
    for (int k = 1; k <= m; ++k) {
      const Vec2 p = x0 + (eps * k / m) * nu;
      if (!grid.contains(p)) break;
      dev_ray = std::max(dev_ray, std::abs(ef.eval(p) - e0));
    }
    fd.halfball_deviation = dev_hb;
    fd.ray_deviation = dev_ray;
    rep.directions.push_back(fd);
  }
  rep.best_halfball = rep.directions.front();
  rep.best_ray = rep.directions.front();
  for (const auto& fd : rep.directions) {
    if (fd.halfball_deviation < rep.best_halfball.halfball_deviation)
      rep.best_halfball = fd;
    if (fd.ray_deviation < rep.best_ray.ray_deviation) rep.best_ray = fd;
  }
  return rep;
}

Uniqueness uniqueness_probe(const ScalarField& field_levelconvex, const Vec2& xi0,
                            const GridSpec& grid, const Tolerances& tol,
                            bool assume_level_convex) {
  const auto dir = strict_in_one_direction(field_levelconvex, xi0, grid, tol,
                                           assume_level_convex);
  return dir ? Uniqueness::UniqueAffine : Uniqueness::PossiblyNonUnique;
}

}  // namespace supremal
