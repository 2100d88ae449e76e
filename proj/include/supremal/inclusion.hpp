#pragma once

#include <vector>

#include "supremal/existence.hpp"
#include "supremal/paf.hpp"

namespace supremal {

/// Differential inclusion target: a finite gradient set E and the datum
/// gradient xi0, validated against the necessary condition
/// xi0 in E or int co E before any construction runs.
struct InclusionTarget {
  int dim = 1;
  std::vector<Vec2> E;  // x component only in dim 1
  Vec2 xi0 = Vec2::Zero();

  static InclusionTarget make(int dim, std::vector<Vec2> E, const Vec2& xi0,
                              const Tolerances& tol = {});
  bool xi0_in_E(const Tolerances& tol = {}) const;
};

/// 1D sawtooth with slopes from the two nearest E points bracketing xi0,
/// arranged in `pieces` teeth with exact affine trace. The sup deviation
/// from the datum is |Omega| * max(|alpha-xi0|,|beta-xi0|) / pieces.
PiecewiseAffineFunction zigzag_1d(const InclusionTarget& target, const Domain& omega,
                                  int pieces, const BoundaryDatum& datum,
                                  const Tolerances& tol = {});

struct PyramidCell {
  std::vector<Vec2> polygon;  // P, CCW, containing the origin
  PiecewiseAffineFunction u;  // the pyramid over P (unit scale, datum trace)
};

/// Pyramid over P = {x: min_i <eta_i,x> + 1 > 0}, eta_i = xi_i - xi0:
/// u = <xi0,x> + max(0, min_i(<eta_i,x>+1)), peak 1 at the origin, affine on
/// each cone sector with gradient xi_i in E. Requires 0 in int co{eta_i}.
PyramidCell pyramid_cell(const InclusionTarget& target, const Tolerances& tol = {});

/// Greedy Vitali fill of Omega with homothetic copies of the pyramid cell:
/// per generation the scale and the center lattice pitch halve; placements
/// must fit inside Omega and stay disjoint. Stops at residual_tol or
/// max_cells (then flagged).
PiecewiseAffineFunction vitali_fill(const InclusionTarget& target, const Domain& omega,
                                    double residual_tol, int max_cells,
                                    const BoundaryDatum& datum,
                                    const Tolerances& tol = {},
                                    double max_cell_scale = 0.0);

struct SolveReport {
  PiecewiseAffineFunction u;
  ExistenceVerdict verdict;
  double ess_sup_f = 0.0;          // over covered cells
  double residual_fraction = 0.0;
  double sup_deviation = 0.0;      // from the affine datum
  std::vector<Vec2> target_E;
};

struct SolveOptions {
  int pieces = 8;
  double residual_tol = 1e-2;
  int max_cells = 4096;
  double omega_a = 0.0, omega_b = 1.0;  // default unit interval / square
};

/// End-to-end: decide, extract E from the sampled sublevel set of f at the
/// relaxed value, construct the zigzag / Vitali solution, and report the
/// covered-region ess-sup. Throws VerdictWasNotExists on NotExists.
SolveReport solve_P(const ScalarField& field, const Vec2& xi0, const GridSpec& grid,
                    const Domain& omega, const SolveOptions& opts = {},
                    const Tolerances& tol = {},
                    const EnvelopeResult* precomputed = nullptr);

/// E per the extraction rule: canonical hull vertices of the sampled
/// sublevel set L_v(f) plus sampled points on the hull boundary.
std::vector<Vec2> extract_inclusion_set(const ScalarField& field, const GridSpec& grid,
                                        double v, const Tolerances& tol = {});

}  // namespace supremal
