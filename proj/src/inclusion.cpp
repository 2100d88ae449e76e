#include "supremal/inclusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace supremal {

// ---------------------------------------------------- PiecewiseAffineFunction

Vec2 PiecewiseAffineFunction::cell_gradient(Eigen::Index i) const {
  if (dim == 1) {
    const double dx = breakpoints[i + 1] - breakpoints[i];
    return Vec2((values1[i + 1] - values1[i]) / dx, 0.0);
  }
  const auto& t = triangles[static_cast<size_t>(i)];
  const Vec2& a = vertices[t[0]];
  const Vec2& b = vertices[t[1]];
  const Vec2& c = vertices[t[2]];
  Eigen::Matrix2d m;
  m.row(0) = (b - a).transpose();
  m.row(1) = (c - a).transpose();
  const Eigen::Vector2d rhs(values2[t[1]] - values2[t[0]],
                            values2[t[2]] - values2[t[0]]);
  return m.partialPivLu().solve(rhs);
}

double PiecewiseAffineFunction::cell_measure(Eigen::Index i) const {
  if (dim == 1) return breakpoints[i + 1] - breakpoints[i];
  const auto& t = triangles[static_cast<size_t>(i)];
  return 0.5 * std::abs(cross2(vertices[t[1]] - vertices[t[0]],
                               vertices[t[2]] - vertices[t[0]]));
}

Vec2 PiecewiseAffineFunction::mean_gradient() const {
  Vec2 acc = Vec2::Zero();
  double covered = 0.0;
  for (Eigen::Index i = 0; i < cell_count(); ++i) {
    const double m = cell_measure(i);
    acc += m * cell_gradient(i);
    covered += m;
  }
  const double total = omega.measure();
  acc += (total - covered) * datum.xi0;
  return acc / total;
}

double PiecewiseAffineFunction::eval(const Vec2& x) const {
  if (dim == 1) {
    const double xx = x.x();
    const Eigen::Index n = breakpoints.size();
    if (xx <= breakpoints[0]) return values1[0];
    if (xx >= breakpoints[n - 1]) return values1[n - 1];
    Eigen::Index lo = 0, hi = n - 1;
    while (hi - lo > 1) {
      const Eigen::Index mid = (lo + hi) / 2;
      (breakpoints[mid] <= xx ? lo : hi) = mid;
    }
    const double t = (xx - breakpoints[lo]) / (breakpoints[lo + 1] - breakpoints[lo]);
    return values1[lo] + t * (values1[lo + 1] - values1[lo]);
  }
  for (const auto& t : triangles) {
    const Vec2& a = vertices[t[0]];
    const Vec2& b = vertices[t[1]];
    const Vec2& c = vertices[t[2]];
    const double det = cross2(b - a, c - a);
    if (std::abs(det) < 1e-300) continue;
    const double w1 = cross2(x - a, c - a) / det;
    const double w2 = cross2(b - a, x - a) / det;
    const double w0 = 1.0 - w1 - w2;
    const double eps = -1e-12;
    if (w0 >= eps && w1 >= eps && w2 >= eps)
      return w0 * values2[t[0]] + w1 * values2[t[1]] + w2 * values2[t[2]];
  }
  return datum(x);  // residual set
}

double PiecewiseAffineFunction::sup_deviation_from_datum() const {
  double d = 0.0;
  if (dim == 1) {
    for (Eigen::Index i = 0; i < breakpoints.size(); ++i)
      d = std::max(d, std::abs(values1[i] - datum.at1(breakpoints[i])));
    return d;
  }
  for (size_t i = 0; i < vertices.size(); ++i)
    d = std::max(d, std::abs(values2[static_cast<Eigen::Index>(i)] - datum(vertices[i])));
  return d;
}

void PiecewiseAffineFunction::validate() const {
  if (dim == 1) {
    if (breakpoints.size() < 2 || breakpoints.size() != values1.size())
      throw MalformedMesh("1d mesh: sizes");
    for (Eigen::Index i = 0; i + 1 < breakpoints.size(); ++i)
      if (!(breakpoints[i] < breakpoints[i + 1]))
        throw MalformedMesh("1d mesh: breakpoints not increasing");
    if (!values1.isFinite().all()) throw MalformedMesh("1d mesh: non-finite values");
    return;
  }
  if (values2.size() != static_cast<Eigen::Index>(vertices.size()))
    throw MalformedMesh("2d mesh: value count");
  if (!values2.isFinite().all()) throw MalformedMesh("2d mesh: non-finite values");
  double scale2 = 1e-12;
  for (const Vec2& v : vertices) scale2 = std::max(scale2, v.squaredNorm());
  for (const auto& t : triangles) {
    for (int k = 0; k < 3; ++k)
      if (t[k] < 0 || t[k] >= static_cast<int>(vertices.size()))
        throw MalformedMesh("2d mesh: triangle index out of range");
    const double area = 0.5 * std::abs(cross2(vertices[t[1]] - vertices[t[0]],
                                              vertices[t[2]] - vertices[t[0]]));
    if (area <= 1e-14 * scale2) throw MalformedMesh("2d mesh: degenerate triangle");
  }
}

PiecewiseAffineFunction PiecewiseAffineFunction::affine(const Domain& omega,
                                                        const BoundaryDatum& datum) {
  PiecewiseAffineFunction u;
  u.dim = omega.dim;
  u.omega = omega;
  u.datum = datum;
  if (omega.dim == 1) {
    u.breakpoints.resize(2);
    u.breakpoints << omega.a, omega.b;
    u.values1.resize(2);
    u.values1 << datum.at1(omega.a), datum.at1(omega.b);
    return u;
  }
  u.vertices = omega.polygon;
  u.values2.resize(static_cast<Eigen::Index>(u.vertices.size()));
  for (size_t i = 0; i < u.vertices.size(); ++i)
    u.values2[static_cast<Eigen::Index>(i)] = datum(u.vertices[i]);
  for (size_t j = 1; j + 1 < u.vertices.size(); ++j)
    u.triangles.push_back({0, static_cast<int>(j), static_cast<int>(j + 1)});
  return u;
}

// ----------------------------------------------------------- InclusionTarget

bool InclusionTarget::xi0_in_E(const Tolerances& tol) const {
  double scale = 1.0;
  for (const Vec2& e : E) scale = std::max(scale, e.norm());
  for (const Vec2& e : E) {
    const double d = dim == 1 ? std::abs(e.x() - xi0.x()) : (e - xi0).norm();
    if (d <= tol.geom * scale) return true;
  }
  return false;
}

InclusionTarget InclusionTarget::make(int dim, std::vector<Vec2> E, const Vec2& xi0,
                                      const Tolerances& tol) {
  if (E.empty()) throw EmptyInput("InclusionTarget: empty E");
  InclusionTarget t;
  t.dim = dim;
  t.E = std::move(E);
  t.xi0 = xi0;
  if (t.xi0_in_E(tol)) return t;
  const ConvexBody co = hull(t.E, dim, tol);
  if (locate(co, dim == 1 ? Vec2(xi0.x(), 0.0) : xi0) != PointLocation::Interior)
    throw NotInTarget("InclusionTarget: xi0 not in E nor int co E");
  return t;
}

// ----------------------------------------------------------------- zigzag_1d

PiecewiseAffineFunction zigzag_1d(const InclusionTarget& target, const Domain& omega,
                                  int pieces, const BoundaryDatum& datum,
                                  const Tolerances& tol) {
  if (target.dim != 1) throw Error("zigzag_1d: dim 1 target required");
  if (omega.dim != 1) throw Error("zigzag_1d: interval domain required");
  if (pieces < 2 || pieces % 2 != 0) throw Error("zigzag_1d: pieces must be even and >= 2");
  const double xi0 = target.xi0.x();
  if (target.xi0_in_E(tol)) return PiecewiseAffineFunction::affine(omega, datum);

  double alpha = -std::numeric_limits<double>::infinity();
  double beta = std::numeric_limits<double>::infinity();
  for (const Vec2& e : target.E) {
    const double x = e.x();
    if (x <= xi0 && x > alpha) alpha = x;
    if (x >= xi0 && x < beta) beta = x;
  }
  if (!std::isfinite(alpha) || !std::isfinite(beta))
    throw NotBracketed("zigzag_1d: no E pair brackets xi0");

  const double t = (beta - xi0) / (beta - alpha);  // weight of alpha
  const double w = (omega.b - omega.a) / pieces;

  PiecewiseAffineFunction u;
  u.dim = 1;
  u.omega = omega;
  u.datum = datum;
  const int segs = 2 * pieces;
  u.breakpoints.resize(segs + 1);
  u.values1.resize(segs + 1);
  double x = omega.a;
  double v = datum.at1(omega.a);
  u.breakpoints[0] = x;
  u.values1[0] = v;
  for (int p = 0; p < pieces; ++p) {
    const double x0 = omega.a + p * w;
    // alpha part
    x = x0 + t * w;
    v += alpha * t * w;
    u.breakpoints[2 * p + 1] = x;
    u.values1[2 * p + 1] = v;
    // beta part
    x = x0 + w;
    v += beta * (1.0 - t) * w;
    u.breakpoints[2 * p + 2] = x;
    u.values1[2 * p + 2] = v;
  }
  u.breakpoints[segs] = omega.b;
  u.values1[segs] = datum.at1(omega.b);  // pin the trace exactly
  return u;
}

// -------------------------------------------------------------- pyramid_cell

PyramidCell pyramid_cell(const InclusionTarget& target, const Tolerances& tol) {
  if (target.dim != 2) throw Error("pyramid_cell: dim 2 target required");
  const Vec2 xi0 = target.xi0;

  if (target.xi0_in_E(tol)) {
    PyramidCell cell;
    cell.polygon = {Vec2(-1, -1), Vec2(1, -1), Vec2(1, 1), Vec2(-1, 1)};
    BoundaryDatum d{xi0, 0.0};
    cell.u = PiecewiseAffineFunction::affine(
        Domain::convex_polygon(cell.polygon), d);
    return cell;
  }

  std::vector<Vec2> etas;
  etas.reserve(target.E.size());
  for (const Vec2& e : target.E) etas.push_back(e - xi0);

  const ConvexBody co = hull(etas, 2, tol);
  if (locate(co, Vec2::Zero()) != PointLocation::Interior)
    throw NotInteriorPoint("pyramid_cell: 0 not interior to co{eta_i}");
  const double h = signed_boundary_distance(co, Vec2::Zero());
  const double radius = 2.0 / h;

  std::vector<Vec2> poly = {Vec2(-radius, -radius), Vec2(radius, -radius),
                            Vec2(radius, radius), Vec2(-radius, radius)};
  for (const Vec2& eta : etas) {
    // <eta, x> + 1 > 0  <=>  <-eta, x> <= 1
    poly = clip_halfplane(poly, -eta, 1.0);
    if (poly.size() < 3) throw NotInteriorPoint("pyramid_cell: pyramid degenerated");
  }
  const ConvexBody pb = hull(poly, 2, tol);
  if (pb.kind != BodyKind::Polygon)
    throw NotInteriorPoint("pyramid_cell: pyramid degenerated");

  PyramidCell cell;
  cell.polygon = pb.vertices;
  BoundaryDatum d{xi0, 0.0};
  PiecewiseAffineFunction u;
  u.dim = 2;
  u.omega = Domain::convex_polygon(cell.polygon);
  u.datum = d;
  u.vertices = cell.polygon;
  u.vertices.push_back(Vec2::Zero());  // apex
  const int apex = static_cast<int>(u.vertices.size()) - 1;
  u.values2.resize(static_cast<Eigen::Index>(u.vertices.size()));
  for (size_t i = 0; i < cell.polygon.size(); ++i)
    u.values2[static_cast<Eigen::Index>(i)] = d(cell.polygon[i]);
  u.values2[apex] = d(Vec2::Zero()) + 1.0;  // peak
  const int m = static_cast<int>(cell.polygon.size());
  for (int j = 0; j < m; ++j) u.triangles.push_back({apex, j, (j + 1) % m});
  cell.u = std::move(u);
  return cell;
}

// --------------------------------------------------------------- vitali_fill

namespace {

struct Placement {
  Vec2 center;
  double scale;
  std::vector<Vec2> poly;  // scaled+translated cell
};

}  // namespace

PiecewiseAffineFunction vitali_fill(const InclusionTarget& target, const Domain& omega,
                                    double residual_tol, int max_cells,
                                    const BoundaryDatum& datum, const Tolerances& tol,
                                    double max_cell_scale) {
  if (omega.dim != 2) throw Error("vitali_fill: planar domain required");
  if (max_cells < 1) throw Error("vitali_fill: max_cells >= 1 required");
  if (target.xi0_in_E(tol)) {
    PiecewiseAffineFunction u = PiecewiseAffineFunction::affine(omega, datum);
    u.datum.xi0 = target.xi0;
    return u;
  }
  const PyramidCell base = pyramid_cell(target, tol);
  const auto& P = base.polygon;
  const double base_area = polygon_area(P);
  double r_out = 0.0;
  for (const Vec2& p : P) r_out = std::max(r_out, p.norm());

  // Omega edge constraints <n_e, x> <= b_e with outward normals.
  struct Edge { Vec2 n; double b; };
  std::vector<Edge> edges;
  const size_t ne = omega.polygon.size();
  for (size_t i = 0; i < ne; ++i) {
    const Vec2& a = omega.polygon[i];
    const Vec2& b = omega.polygon[(i + 1) % ne];
    const Vec2 e = b - a;
    const Vec2 n = Vec2(e.y(), -e.x()).normalized();  // outward for CCW
    edges.push_back({n, n.dot(a)});
  }
  auto support_P = [&](const Vec2& n) {
    double s = -std::numeric_limits<double>::max();
    for (const Vec2& p : P) s = std::max(s, n.dot(p));
    return s;
  };
  auto fits = [&](const Vec2& c, double s) {
    for (const auto& e : edges)
      if (e.n.dot(c) > e.b - s * support_P(e.n)) return false;
    return true;
  };

  // Eroded admissible-center region for scale s.
  auto eroded = [&](double s) {
    std::vector<Vec2> er = omega.polygon;
    for (const auto& e : edges) {
      er = clip_halfplane(er, e.n, e.b - s * support_P(e.n));
      if (er.size() < 3) { er.clear(); break; }
    }
    if (!er.empty() && polygon_area(er) <= 0) er.clear();
    return er;
  };

  // Largest inscribed copy: bisection on the scale, backed off so the
  // eroded region keeps positive width.
  double s0 = max_cell_scale;
  if (s0 <= 0.0) {
    double lo = 0.0, hi = 2.0 * omega.measure() / std::max(1e-12, r_out);
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (eroded(mid).empty() ? hi : lo) = mid;
    }
    s0 = lo * (1.0 - 1e-6);
  }
  if (s0 <= 0.0 || eroded(s0).empty())
    throw Error("vitali_fill: base cell does not fit in omega");

  const double total = omega.measure();
  double covered = 0.0;
  std::vector<Placement> placed;
  bool flagged = false;

  double bb_lo_x = std::numeric_limits<double>::max(), bb_lo_y = bb_lo_x;
  double bb_hi_x = -bb_lo_x, bb_hi_y = -bb_lo_x;
  for (const Vec2& p : omega.polygon) {
    bb_lo_x = std::min(bb_lo_x, p.x()); bb_hi_x = std::max(bb_hi_x, p.x());
    bb_lo_y = std::min(bb_lo_y, p.y()); bb_hi_y = std::max(bb_hi_y, p.y());
  }

  double s = s0;
  const double diam = std::max(bb_hi_x - bb_lo_x, bb_hi_y - bb_lo_y);
  auto try_place = [&](const Vec2& c) {
    if (!fits(c, s)) return false;
    std::vector<Vec2> poly(P.size());
    for (size_t i = 0; i < P.size(); ++i) poly[i] = c + s * P[i];
    for (const auto& q : placed) {
      if ((q.center - c).norm() >= (q.scale + s) * r_out) continue;
      if (convex_overlap(poly, q.poly, tol.geom)) return false;
    }
    placed.push_back({c, s, std::move(poly)});
    covered += s * s * base_area;
    return true;
  };
  auto done = [&] {
    return covered >= total * (1.0 - residual_tol) ||
           static_cast<int>(placed.size()) >= max_cells;
  };
  while (!done() && s > 1e-4 * diam) {
    // Deepest admissible center first, then the lattice row-major.
    const auto er = eroded(s);
    if (!er.empty()) try_place(polygon_centroid(er));
    const double pitch = std::max(s * r_out * 0.5, 1e-6 * diam);
    const int nx = static_cast<int>(std::floor((bb_hi_x - bb_lo_x) / pitch)) + 1;
    const int nyy = static_cast<int>(std::floor((bb_hi_y - bb_lo_y) / pitch)) + 1;
    for (int iy = 0; iy <= nyy && !done(); ++iy)
      for (int ix = 0; ix <= nx && !done(); ++ix)
        try_place(Vec2(bb_lo_x + ix * pitch, bb_lo_y + iy * pitch));
    s *= 0.5;
  }
  if (covered < total * (1.0 - residual_tol)) flagged = true;

  // Assemble the mesh: each placement contributes its ring + apex.
  PiecewiseAffineFunction u;
  u.dim = 2;
  u.omega = omega;
  u.datum = datum;
  const int m = static_cast<int>(P.size());
  std::vector<double> vals;
  for (const auto& pl : placed) {
    const int base_idx = static_cast<int>(u.vertices.size());
    for (int j = 0; j < m; ++j) {
      u.vertices.push_back(pl.poly[static_cast<size_t>(j)]);
      vals.push_back(datum(pl.poly[static_cast<size_t>(j)]));
    }
    u.vertices.push_back(pl.center);
    vals.push_back(datum(pl.center) + pl.scale);  // peak height = scale
    const int apex = base_idx + m;
    for (int j = 0; j < m; ++j)
      u.triangles.push_back({apex, base_idx + j, base_idx + (j + 1) % m});
  }
  u.values2 = Eigen::Map<Eigen::ArrayXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  u.residual_fraction = 1.0 - covered / total;
  u.residual_flagged = flagged;
  return u;
}

// ------------------------------------------------------------------- solve_P

std::vector<Vec2> extract_inclusion_set(const ScalarField& field, const GridSpec& grid,
                                        double v, const Tolerances& tol) {
  const std::vector<Vec2> pts = sublevel_nodes(field, grid, v, tol);
  if (pts.empty()) throw Error("extract_inclusion_set: empty sublevel set");
  const ConvexBody body = hull(pts, grid.dim, tol);
  const double eps = body.tol * body.scale();
  std::vector<Vec2> E = extreme_points(body);
  for (const Vec2& p : pts) {
    if (std::abs(signed_boundary_distance(body, grid.dim == 1 ? Vec2(p.x(), 0.0) : p)) > eps)
      continue;
    bool dup = false;
    for (const Vec2& e : E)
      if ((grid.dim == 1 ? std::abs(e.x() - p.x()) : (e - p).norm()) <= eps) { dup = true; break; }
    if (!dup) E.push_back(p);
  }
  return E;
}

SolveReport solve_P(const ScalarField& field, const Vec2& xi0, const GridSpec& grid,
                    const Domain& omega, const SolveOptions& opts,
                    const Tolerances& tol, const EnvelopeResult* precomputed) {
  SolveReport rep;
  rep.verdict = decide_affine(field, xi0, grid, tol, precomputed);
  if (rep.verdict.decision == Decision::NotExists)
    throw VerdictWasNotExists("solve_P: decide_affine returned NotExists");
  if (rep.verdict.decision == Decision::Unknown)
    throw Error("solve_P: decide_affine returned Unknown: " + rep.verdict.reason);

  const double v = rep.verdict.relaxed_value;
  const BoundaryDatum datum{xi0, 0.0};

  if (rep.verdict.branch == Branch::InLevelSetOfF) {
    rep.u = PiecewiseAffineFunction::affine(omega, datum);
    rep.target_E = {xi0};
  } else {
    rep.target_E = extract_inclusion_set(field, grid, v, tol);
    const InclusionTarget target = InclusionTarget::make(grid.dim, rep.target_E, xi0, tol);
    if (grid.dim == 1)
      rep.u = zigzag_1d(target, omega, opts.pieces, datum, tol);
    else
      rep.u = vitali_fill(target, omega, opts.residual_tol, opts.max_cells, datum, tol);
  }
  double fmax = -std::numeric_limits<double>::max();
  for (Eigen::Index i = 0; i < rep.u.cell_count(); ++i)
    fmax = std::max(fmax, field.eval(rep.u.cell_gradient(i)));
  rep.ess_sup_f = fmax;
  rep.residual_fraction = rep.u.residual_fraction;
  rep.sup_deviation = rep.u.sup_deviation_from_datum();
  return rep;
}

}  // namespace supremal
