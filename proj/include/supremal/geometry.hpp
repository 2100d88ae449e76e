#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "supremal/tolerances.hpp"

namespace supremal {

using Vec2 = Eigen::Vector2d;

enum class PointLocation { Interior, Boundary, Exterior };

enum class BodyKind { Interval, Polygon, Segment, Point };

/// Convex body: an interval on the line (dim 1) or a convex polygon in the
/// plane (dim 2). Degenerate planar bodies (a point or a segment) are
/// first-class and carry empty interior.
struct ConvexBody {
  int dim = 2;
  BodyKind kind = BodyKind::Polygon;
  // dim 1: [lo, hi]; stored in vertices as (lo,0),(hi,0) as well.
  double lo = 0.0;
  double hi = 0.0;
  // dim 2: canonical CCW vertex list, no three consecutive collinear.
  // Segment: the two endpoints. Point: one vertex.
  std::vector<Vec2> vertices;
  double tol = 1e-9;

  bool degenerate() const {
    return kind == BodyKind::Segment || kind == BodyKind::Point ||
           (kind == BodyKind::Interval && hi - lo <= tol);
  }
  double diameter() const;
  /// Scale used for tolerance comparisons: max(1, diameter).
  double scale() const;
};

double cross2(const Vec2& a, const Vec2& b);
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

/// Convex hull of a finite point set. dim 1 inputs use only the x
/// coordinate. Collinear vertices are removed against tol * scale; the
/// result is flagged Point/Segment when the set is degenerate.
ConvexBody hull(const std::vector<Vec2>& points, int dim,
                const Tolerances& tol = {});
ConvexBody hull1d(const std::vector<double>& points, const Tolerances& tol = {});

/// Distance from a point to the boundary of the body, signed positive
/// inside, negative outside. Degenerate bodies have no inside; the value is
/// minus the distance to the set except on the set itself, where it is 0.
double signed_boundary_distance(const ConvexBody& body, const Vec2& p);

PointLocation locate(const ConvexBody& body, const Vec2& p);
PointLocation locate1d(const ConvexBody& body, double x);

std::vector<Vec2> extreme_points(const ConvexBody& body);

/// Vertices admitting a supporting line whose contact set is that vertex
/// alone, with all other vertices separated by more than `contact_tol`
/// (coordinate units; defaults to tol.geom * scale). For canonical polygons
/// at the default tolerance this coincides with extreme_points; a coarser
/// contact_tol exposes the Exp != Ext gap of sampled stadium-like hulls.
std::vector<Vec2> exposed_points(const ConvexBody& body,
                                 std::optional<double> contact_tol = std::nullopt);

/// Outward unit direction nu with <nu,p> >= <nu,x> - tol for all x in the
/// body; p must locate on the boundary. Degenerate segments return the
/// lexicographically larger of the two unit normals. dim 1 packs the
/// direction into the x component.
Vec2 separating_direction(const ConvexBody& body, const Vec2& p);

/// Sampling-resolution proxy for strict convexity of the continuum set: a
/// canonical non-degenerate polygon with no edge longer than the threshold.
/// Never feeds an existence verdict.
bool is_strictly_convex_sampled(const ConvexBody& body,
                                std::optional<double> edge_threshold = std::nullopt,
                                const Tolerances& tol = {});

/// Intersection of the convex polygon `poly` with the half-plane
/// {x: <n,x> <= b}.
std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, const Vec2& n,
                                 double b);

/// True when two convex polygons share positive area (touching within tol
/// does not count).
bool convex_overlap(const std::vector<Vec2>& a, const std::vector<Vec2>& b,
                    double tol);

double polygon_area(const std::vector<Vec2>& poly);
Vec2 polygon_centroid(const std::vector<Vec2>& poly);

}  // namespace supremal
