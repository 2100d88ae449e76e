#pragma once

#include <optional>
#include <vector>

#include "supremal/envelope.hpp"
#include "supremal/paf.hpp"

namespace supremal {

enum class MinimaxMethod { BisectionReachability1D, LocalDescent2D };

struct MinimaxResult {
  double value = 0.0;
  PiecewiseAffineFunction minimizer;
  MinimaxMethod method = MinimaxMethod::BisectionReachability1D;
  int iterations = 0;
  bool converged = false;
};

/// inf(P) for 1D affine data by bisection on the level c: a piecewise
/// affine competitor with slopes in L_c(f) exists iff xi0 lies between the
/// sampled running minima. Exact up to bisection depth (60 iterations).
MinimaxResult relaxed_min_1d(const ScalarField& field, double xi0, const Domain& omega,
                             int nodes, const Tolerances& tol = {});

struct Descent2DOptions {
  int mesh_nodes = 9;      // nodes per axis on Omega
  int restarts = 4;
  unsigned seed = 0;
  int epochs_per_temp = 50;
  double temp_hi = 1.0;
  double temp_lo = 1e-4;
  int line_samples = 33;
  // Non-affine boundary data: mesh boundary nodes take these values instead
  // of the affine datum <xi0, x>.
  const PiecewiseAffineFunction* boundary = nullptr;
};

/// Upper-bound oracle for the relaxed problem inf(P^lc) in 2D: minimizes the
/// max over mesh triangles of the interpolated envelope of the cell
/// gradient, by smoothed-max coordinate descent with random restarts.
MinimaxResult relaxed_min_2d(const ScalarField& field, const Vec2& xi0,
                             const Domain& omega, const GridSpec& grid,
                             const Descent2DOptions& opts = {},
                             const Tolerances& tol = {},
                             const EnvelopeResult* precomputed = nullptr);

struct AuditReport {
  double max_f = 0.0;           // over covered cells
  double claimed = 0.0;
  bool pass = false;
  double residual_fraction = 0.0;
  Eigen::Index worst_cell = 0;
};

/// ess-sup of f over the covered cells of u against a claimed value.
AuditReport audit_solution(const ScalarField& field, const PiecewiseAffineFunction& u,
                           double claimed, const Tolerances& tol = {});

struct JensenReport {
  double f_mean = 0.0;          // f at the mean gradient
  double max_cell = 0.0;        // max f over cells
  bool holds = false;
  Vec2 mean_gradient = Vec2::Zero();
  std::vector<Eigen::Index> witness_cells;  // argmax cells on violation
};

/// Supremal Jensen audit: f(mean gradient) <= max cell f(gradient) + tol.
/// A violation refutes sampled level convexity of the field.
JensenReport jensen_audit(const ScalarField& field, const PiecewiseAffineFunction& u,
                          const Tolerances& tol = {});

}  // namespace supremal
