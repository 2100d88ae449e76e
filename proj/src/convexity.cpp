#include "supremal/convexity.hpp"

#include <algorithm>
#include <cmath>

namespace supremal {

namespace {

// Nearest grid node when the point lies on the grid (within a snapping
// tolerance); off-grid midpoints are handled by interpolated t-combinations
// instead, since evaluating off the segment is not a level-convexity test.
std::optional<Vec2> snap_to_node(const GridSpec& g, const Vec2& p) {
  Vec2 out(0, 0);
  for (int ax = 0; ax < g.dim; ++ax) {
    const double h = g.spacing(ax);
    const double r = ((ax == 0 ? p.x() : p.y()) - g.lo[ax]) / h;
    const double rn = std::round(r);
    if (std::abs(r - rn) > 1e-9 || rn < 0 || rn > g.counts[ax] - 1)
      return std::nullopt;
    (ax == 0 ? out.x() : out.y()) = g.lo[ax] + rn * h;
  }
  return out;
}

void require_level_convex(const ScalarField& field, const GridSpec& grid,
                          const Tolerances& tol, bool assume,
                          const char* where) {
  if (assume) return;
  const auto rep = check_level_convex(field, grid, tol);
  if (!rep.level_convex)
    throw NotLevelConvex(std::string(where) + ": field is not level convex on the grid");
}

}  // namespace

LevelConvexityReport check_level_convex(const ScalarField& field,
                                        const GridSpec& grid,
                                        const Tolerances& tol) {
  grid.validate();
  const Eigen::Index n = grid.size();
  std::vector<Vec2> nodes(n);
  Eigen::ArrayXd f(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    nodes[i] = grid.node(i);
    f[i] = field.eval(nodes[i]);
  }
  LevelConvexityReport rep;
  static constexpr double kT[3] = {0.25, 0.5, 0.75};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double fmax = std::max(f[i], f[j]);
      double v = -std::numeric_limits<double>::max();
      double tbad = 0.5;
      if (const auto mid = snap_to_node(grid, 0.5 * (nodes[i] + nodes[j]))) {
        v = field.eval(*mid);
      }
      if (v <= fmax + tol.level) {
        for (double t : kT) {
          const Vec2 p = t * nodes[i] + (1.0 - t) * nodes[j];
          const double fv = field.eval(p);
          if (fv > v) { v = fv; tbad = t; }
        }
      }
      if (v > fmax + tol.level) {
        rep.level_convex = false;
        rep.violation = LevelConvexityWitness{nodes[i], nodes[j], tbad, v, fmax};
        return rep;
      }
    }
  }
  return rep;
}

ConvexBody level_set_body(const ScalarField& field, const GridSpec& grid,
                          const Vec2& xi0, const Tolerances& tol) {
  const double c = field.eval(xi0);
  const std::vector<Vec2> pts = sublevel_nodes(field, grid, c, tol);
  if (pts.empty()) throw Error("level_set_body: empty sampled level set");
  return hull(pts, grid.dim, tol);
}

bool strict_at_point(const ScalarField& field, const Vec2& xi0,
                     const GridSpec& grid, const Tolerances& tol,
                     bool assume_level_convex) {
  require_level_convex(field, grid, tol, assume_level_convex, "strict_at_point");
  const ConvexBody body = level_set_body(field, grid, xi0, tol);
  const double eps = tol.geom * body.scale();
  for (const Vec2& v : extreme_points(body)) {
    const double d = grid.dim == 1 ? std::abs(v.x() - xi0.x()) : (v - xi0).norm();
    if (d <= eps) return true;
  }
  return false;
}

std::optional<Vec2> strict_in_one_direction(const ScalarField& field,
                                            const Vec2& xi0, const GridSpec& grid,
                                            const Tolerances& tol,
                                            bool assume_level_convex) {
  require_level_convex(field, grid, tol, assume_level_convex,
                       "strict_in_one_direction");
  const ConvexBody body = level_set_body(field, grid, xi0, tol);
  const Vec2 p = grid.dim == 1 ? Vec2(xi0.x(), 0.0) : xi0;
  switch (locate(body, p)) {
    case PointLocation::Interior:
      return std::nullopt;
    case PointLocation::Boundary:
      return separating_direction(body, p);
    case PointLocation::Exterior:
      // The samples cannot certify any direction at this resolution.
      return std::nullopt;
  }
  return std::nullopt;
}

std::vector<DanaoLevelReport> danao_consistency(const ScalarField& field,
                                                const GridSpec& grid,
                                                const std::vector<double>& levels,
                                                const Tolerances& tol,
                                                bool assume_level_convex) {
  require_level_convex(field, grid, tol, assume_level_convex, "danao_consistency");
  const Eigen::Index n = grid.size();
  std::vector<DanaoLevelReport> out;
  for (double c : levels) {
    DanaoLevelReport rep;
    rep.level = c;
    std::vector<Vec2> level_pts;
    std::vector<Vec2> rc;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vec2 p = grid.node(i);
      const double v = field.eval(p);
      if (v <= c + tol.level) level_pts.push_back(p);
      if (std::abs(v - c) <= tol.level) rc.push_back(p);
    }
    rep.r_count = static_cast<int>(rc.size());
    if (level_pts.empty()) {
      out.push_back(rep);
      continue;
    }
    const ConvexBody body = hull(level_pts, grid.dim, tol);
    const double eps = body.tol * body.scale();
    const auto ext = extreme_points(body);
    for (const Vec2& p : rc) {
      bool extreme = false;
      for (const Vec2& v : ext) {
        const double d = grid.dim == 1 ? std::abs(v.x() - p.x()) : (v - p).norm();
        if (d <= eps) { extreme = true; break; }
      }
      if (!extreme) {
        rep.pass = false;
        rep.offenders.push_back(p);
      }
    }
    out.push_back(rep);
  }
  return out;
}

std::pair<bool, std::optional<PerturbationWitness>> strict_via_perturbation(
    const ScalarField& field, const GridSpec& grid, const Tolerances& tol,
    bool assume_level_convex) {
  require_level_convex(field, grid, tol, assume_level_convex,
                       "strict_via_perturbation");
  const Eigen::Index n = grid.size();
  std::vector<Vec2> nodes(n);
  Eigen::ArrayXd f(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    nodes[i] = grid.node(i);
    f[i] = field.eval(nodes[i]);
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double mid = field.eval(0.5 * (nodes[i] + nodes[j]));
      if (std::abs(mid - std::max(f[i], f[j])) <= tol.level)
        return {false, PerturbationWitness{nodes[i], nodes[j] - nodes[i]}};
    }
  return {true, std::nullopt};
}

StrictnessReport classify_strictness(const ScalarField& field, const Vec2& xi0,
                                     const GridSpec& grid, const Tolerances& tol,
                                     bool assume_level_convex) {
  StrictnessReport rep;
  rep.xi0 = xi0;
  rep.f_xi0 = field.eval(xi0);
  if (!assume_level_convex) {
    const auto lc = check_level_convex(field, grid, tol);
    rep.level_convex_sampled = lc.level_convex;
    rep.violation = lc.violation;
    if (!lc.level_convex) return rep;
  }
  const ConvexBody body = level_set_body(field, grid, xi0, tol);
  const Vec2 p = grid.dim == 1 ? Vec2(xi0.x(), 0.0) : xi0;
  rep.boundary_location = locate(body, p);
  rep.strict_at_point = strict_at_point(field, xi0, grid, tol, true);
  rep.strict_in_one_direction = strict_in_one_direction(field, xi0, grid, tol, true);
  return rep;
}

}  // namespace supremal
