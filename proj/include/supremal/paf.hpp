#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "supremal/fields.hpp"
#include "supremal/geometry.hpp"

namespace supremal {

/// Continuous piecewise-affine function over a domain. In dimension 1 the
/// cells are the intervals between sorted breakpoints and cover Omega
/// exactly. In dimension 2 the triangles cover Omega up to a residual set
/// on which the function equals the affine boundary datum; every triangle
/// boundary vertex that meets the residual carries the datum value, so the
/// function is globally continuous with exact affine trace.
struct PiecewiseAffineFunction {
  int dim = 1;
  Domain omega = Domain::interval(0.0, 1.0);
  BoundaryDatum datum;

  // dim 1
  Eigen::ArrayXd breakpoints;  // sorted, breakpoints[0] = a, back() = b
  Eigen::ArrayXd values1;

  // dim 2
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  Eigen::ArrayXd values2;

  double residual_fraction = 0.0;
  bool residual_flagged = false;  // max_cells reached before residual_tol

  Eigen::Index cell_count() const {
    return dim == 1 ? breakpoints.size() - 1
                    : static_cast<Eigen::Index>(triangles.size());
  }
  /// Gradient of the affine piece on cell i (x component only in dim 1).
  Vec2 cell_gradient(Eigen::Index i) const;
  /// Length / area of cell i.
  double cell_measure(Eigen::Index i) const;
  /// Area-weighted mean of the cell gradients, counting the residual set at
  /// the datum gradient.
  Vec2 mean_gradient() const;
  double eval(const Vec2& x) const;
  /// Max deviation from the affine datum over cell nodes.
  double sup_deviation_from_datum() const;

  /// Structural checks: sorted breakpoints, valid triangle indices,
  /// nondegenerate cells, finite values. Throws MalformedMesh.
  void validate() const;

  static PiecewiseAffineFunction affine(const Domain& omega, const BoundaryDatum& datum);
};

}  // namespace supremal
