#include "supremal/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace supremal {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  double t = (p - a).dot(d) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * d)).norm();
}

double ConvexBody::diameter() const {
  if (dim == 1) return hi - lo;
  double d = 0.0;
  for (size_t i = 0; i < vertices.size(); ++i)
    for (size_t j = i + 1; j < vertices.size(); ++j)
      d = std::max(d, (vertices[i] - vertices[j]).norm());
  return d;
}

double ConvexBody::scale() const { return std::max(1.0, diameter()); }

namespace {

// Monotone chain on lexicographically sorted points; output CCW.
std::vector<Vec2> monotone_chain(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) { return a == b; }),
            pts.end());
  const size_t n = pts.size();
  if (n <= 2) return pts;
  std::vector<Vec2> h(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {          // lower hull
    while (k >= 2 && cross2(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  const size_t lower = k + 1;
  for (size_t i = n - 1; i-- > 0;) {        // upper hull
    while (k >= lower && cross2(h[k - 1] - h[k - 2], pts[i] - h[k - 2]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

// Drop vertices whose turn is collinear against tol * scale.
std::vector<Vec2> drop_collinear(const std::vector<Vec2>& v, double eps) {
  const size_t n = v.size();
  if (n < 3) return v;
  std::vector<Vec2> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const Vec2& prev = out.empty() ? v[(i + n - 1) % n] : out.back();
    const Vec2& cur = v[i];
    const Vec2& next = v[(i + 1) % n];
    if (std::abs(cross2(cur - prev, next - prev)) > eps) out.push_back(cur);
  }
  // The wrap-around may leave the first or last vertex collinear; one more pass.
  bool changed = true;
  while (changed && out.size() >= 3) {
    changed = false;
    const size_t m = out.size();
    for (size_t i = 0; i < m; ++i) {
      const Vec2& a = out[(i + m - 1) % m];
      const Vec2& b = out[i];
      const Vec2& c = out[(i + 1) % m];
      if (std::abs(cross2(b - a, c - a)) <= eps) {
        out.erase(out.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }
  return out;
}

}  // namespace

ConvexBody hull1d(const std::vector<double>& points, const Tolerances& tol) {
  if (points.empty()) throw EmptyInput("hull1d: empty point set");
  ConvexBody b;
  b.dim = 1;
  b.kind = BodyKind::Interval;
  b.lo = *std::min_element(points.begin(), points.end());
  b.hi = *std::max_element(points.begin(), points.end());
  b.tol = tol.geom;
  b.vertices = {Vec2(b.lo, 0.0), Vec2(b.hi, 0.0)};
  if (b.hi - b.lo <= tol.geom) b.kind = BodyKind::Point;
  return b;
}

ConvexBody hull(const std::vector<Vec2>& points, int dim, const Tolerances& tol) {
  if (points.empty()) throw EmptyInput("hull: empty point set");
  if (dim == 1) {
    std::vector<double> xs(points.size());
    for (size_t i = 0; i < points.size(); ++i) xs[i] = points[i].x();
    return hull1d(xs, tol);
  }
  ConvexBody b;
  b.dim = 2;
  b.tol = tol.geom;
  std::vector<Vec2> h = monotone_chain(points);

  double diam = 0.0;
  for (size_t i = 0; i < h.size(); ++i)
    for (size_t j = i + 1; j < h.size(); ++j)
      diam = std::max(diam, (h[i] - h[j]).norm());
  const double eps = tol.geom * std::max(1.0, diam);

  if (h.size() == 1 || diam <= eps) {
    b.kind = BodyKind::Point;
    b.vertices = {h.front()};
    return b;
  }
  // Segment test: all hull vertices within eps of the diameter chord.
  {
    size_t ia = 0, ib = 0;
    double best = -1.0;
    for (size_t i = 0; i < h.size(); ++i)
      for (size_t j = i + 1; j < h.size(); ++j) {
        const double d = (h[i] - h[j]).norm();
        if (d > best) { best = d; ia = i; ib = j; }
      }
    bool flat = true;
    for (const Vec2& p : h)
      if (point_segment_distance(p, h[ia], h[ib]) > eps) { flat = false; break; }
    if (flat) {
      b.kind = BodyKind::Segment;
      b.vertices = {h[ia], h[ib]};
      if (b.vertices[0].x() > b.vertices[1].x() ||
          (b.vertices[0].x() == b.vertices[1].x() && b.vertices[0].y() > b.vertices[1].y()))
        std::swap(b.vertices[0], b.vertices[1]);
      return b;
    }
  }
  b.kind = BodyKind::Polygon;
  b.vertices = drop_collinear(h, eps);
  return b;
}

double signed_boundary_distance(const ConvexBody& body, const Vec2& p) {
  if (body.dim == 1) {
    const double x = p.x();
    if (body.kind == BodyKind::Point) return -std::abs(x - body.lo);
    return std::min(x - body.lo, body.hi - x);
  }
  switch (body.kind) {
    case BodyKind::Point:
      return -(p - body.vertices.front()).norm();
    case BodyKind::Segment:
      return -point_segment_distance(p, body.vertices[0], body.vertices[1]);
    default: {
      const auto& v = body.vertices;
      const size_t n = v.size();
      bool inside = true;
      double dist = std::numeric_limits<double>::max();
      for (size_t i = 0; i < n; ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % n];
        if (cross2(b - a, p - a) < 0) inside = false;
        dist = std::min(dist, point_segment_distance(p, a, b));
      }
      return inside ? dist : -dist;
    }
  }
}

PointLocation locate(const ConvexBody& body, const Vec2& p) {
  const double eps = body.tol * body.scale();
  const double d = signed_boundary_distance(body, p);
  if (std::abs(d) <= eps) return PointLocation::Boundary;
  return d > 0 ? PointLocation::Interior : PointLocation::Exterior;
}

PointLocation locate1d(const ConvexBody& body, double x) {
  return locate(body, Vec2(x, 0.0));
}

std::vector<Vec2> extreme_points(const ConvexBody& body) {
  if (body.dim == 1) {
    if (body.kind == BodyKind::Point) return {Vec2(body.lo, 0.0)};
    return {Vec2(body.lo, 0.0), Vec2(body.hi, 0.0)};
  }
  return body.vertices;
}

std::vector<Vec2> exposed_points(const ConvexBody& body,
                                 std::optional<double> contact_tol) {
  const double tau = contact_tol.value_or(body.tol * body.scale());
  if (body.dim == 1 || body.kind != BodyKind::Polygon) {
    // Interval endpoints, segment endpoints and isolated points are exposed.
    return extreme_points(body);
  }
  const auto& v = body.vertices;
  const size_t n = v.size();
  std::vector<Vec2> out;
  for (size_t i = 0; i < n; ++i) {
    const Vec2& prev = v[(i + n - 1) % n];
    const Vec2& cur = v[i];
    const Vec2& next = v[(i + 1) % n];
    // Normal cone at cur spans the outward normals of the two incident edges.
    const Vec2 e0 = (cur - prev).normalized();
    const Vec2 e1 = (next - cur).normalized();
    const Vec2 n0(e0.y(), -e0.x());
    const Vec2 n1(e1.y(), -e1.x());
    double a0 = std::atan2(n0.y(), n0.x());
    double a1 = std::atan2(n1.y(), n1.x());
    while (a1 < a0) a1 += 2 * M_PI;
    // Best margin over a fan of supporting directions in the cone.
    const int fan = 256;
    double best = -std::numeric_limits<double>::max();
    for (int k = 0; k <= fan; ++k) {
      const double a = a0 + (a1 - a0) * k / fan;
      const Vec2 d(std::cos(a), std::sin(a));
      double margin = std::numeric_limits<double>::max();
      for (size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        margin = std::min(margin, d.dot(cur - v[j]));
      }
      best = std::max(best, margin);
    }
    if (best > tau) out.push_back(cur);
  }
  return out;
}

Vec2 separating_direction(const ConvexBody& body, const Vec2& p) {
  const double eps = body.tol * body.scale();
  if (locate(body, p) != PointLocation::Boundary)
    throw NotOnBoundary("separating_direction: point not on boundary");
  if (body.dim == 1) {
    if (body.kind == BodyKind::Point) return Vec2(1.0, 0.0);
    const double mid = 0.5 * (body.lo + body.hi);
    return p.x() >= mid ? Vec2(1.0, 0.0) : Vec2(-1.0, 0.0);
  }
  switch (body.kind) {
    case BodyKind::Point:
      return Vec2(1.0, 0.0);
    case BodyKind::Segment: {
      const Vec2 d = (body.vertices[1] - body.vertices[0]).normalized();
      Vec2 n(-d.y(), d.x());
      Vec2 m = -n;
      // Deterministic: lexicographically larger of the two normals.
      if (m.x() > n.x() || (m.x() == n.x() && m.y() > n.y())) n = m;
      return n;
    }
    default: {
      const auto& v = body.vertices;
      const size_t n = v.size();
      size_t best_edge = 0;
      double best = std::numeric_limits<double>::max();
      size_t best_vertex = 0;
      double bestv = std::numeric_limits<double>::max();
      for (size_t i = 0; i < n; ++i) {
        const double de = point_segment_distance(p, v[i], v[(i + 1) % n]);
        if (de < best) { best = de; best_edge = i; }
        const double dv = (p - v[i]).norm();
        if (dv < bestv) { bestv = dv; best_vertex = i; }
      }
      if (bestv <= eps) {
        // Vertex contact: bisector of the two incident edge normals.
        const size_t i = best_vertex;
        const Vec2 e0 = (v[i] - v[(i + n - 1) % n]).normalized();
        const Vec2 e1 = (v[(i + 1) % n] - v[i]).normalized();
        const Vec2 n0(e0.y(), -e0.x());
        const Vec2 n1(e1.y(), -e1.x());
        return (n0 + n1).normalized();
      }
      const Vec2 e = (v[(best_edge + 1) % n] - v[best_edge]).normalized();
      return Vec2(e.y(), -e.x());
    }
  }
}

bool is_strictly_convex_sampled(const ConvexBody& body,
                                std::optional<double> edge_threshold,
                                const Tolerances& tol) {
  const double thr = edge_threshold.value_or(tol.strict_edge);
  if (body.dim == 1) return false;
  if (body.kind != BodyKind::Polygon) return false;
  const auto& v = body.vertices;
  const size_t n = v.size();
  for (size_t i = 0; i < n; ++i)
    if ((v[(i + 1) % n] - v[i]).norm() > thr) return false;
  return true;
}

std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, const Vec2& n,
                                 double b) {
  std::vector<Vec2> out;
  const size_t m = poly.size();
  for (size_t i = 0; i < m; ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % m];
    const double dp = n.dot(p) - b;
    const double dq = n.dot(q) - b;
    if (dp <= 0) out.push_back(p);
    if ((dp < 0 && dq > 0) || (dp > 0 && dq < 0)) {
      const double t = dp / (dp - dq);
      out.push_back(p + t * (q - p));
    }
  }
  return out;
}

bool convex_overlap(const std::vector<Vec2>& a, const std::vector<Vec2>& b,
                    double tol) {
  // Separating axis over the edge normals of both polygons.
  auto separated_by = [&](const std::vector<Vec2>& edges_of) {
    const size_t n = edges_of.size();
    for (size_t i = 0; i < n; ++i) {
      const Vec2 e = edges_of[(i + 1) % n] - edges_of[i];
      const Vec2 ax(-e.y(), e.x());
      double amin = std::numeric_limits<double>::max(), amax = -amin;
      for (const Vec2& p : a) { const double d = ax.dot(p); amin = std::min(amin, d); amax = std::max(amax, d); }
      double bmin = std::numeric_limits<double>::max(), bmax = -bmin;
      for (const Vec2& p : b) { const double d = ax.dot(p); bmin = std::min(bmin, d); bmax = std::max(bmax, d); }
      const double s = ax.norm();
      if (amax <= bmin + tol * s || bmax <= amin + tol * s) return true;
    }
    return false;
  };
  if (a.empty() || b.empty()) return false;
  return !(separated_by(a) || separated_by(b));
}

double polygon_area(const std::vector<Vec2>& poly) {
  // Relative to the first vertex: avoids cancellation for small polygons
  // far from the origin.
  if (poly.size() < 3) return 0.0;
  const Vec2 ref = poly.front();
  double s = 0.0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i)
    s += cross2(poly[i] - ref, poly[(i + 1) % n] - ref);
  return 0.5 * std::abs(s);
}

Vec2 polygon_centroid(const std::vector<Vec2>& poly) {
  const Vec2 ref = poly.front();
  double s = 0.0;
  Vec2 c(0, 0);
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i] - ref;
    const Vec2 b = poly[(i + 1) % n] - ref;
    const double w = cross2(a, b);
    s += w;
    c += w * (a + b);
  }
  if (std::abs(s) < 1e-300) {
    c.setZero();
    for (const Vec2& p : poly) c += p - ref;
    return ref + c / static_cast<double>(poly.size());
  }
  return ref + c / (3.0 * s);
}

}  // namespace supremal
