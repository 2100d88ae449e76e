#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "supremal/fields.hpp"
#include "supremal/geometry.hpp"

namespace supremal {

enum class EnvelopeMethod { LevelSweep, Caratheodory, RunningMin1D };

struct Witness {
  Vec2 point = Vec2::Zero();
  double weight = 0.0;
  double fvalue = 0.0;
};

/// Convex-combination certificate: at most n+1 witnesses with nonnegative
/// weights summing to one, reproducing the node, whose max f-value equals
/// the envelope value. Degenerate cases are padded with zero-weight repeats.
struct Certificate {
  std::vector<Witness> witnesses;
};

struct EnvelopeResult {
  GridSpec grid;
  Eigen::ArrayXd values;
  std::vector<Certificate> certificates;  // one per node
  EnvelopeMethod method = EnvelopeMethod::RunningMin1D;
  std::optional<Coercivity> coercivity;

  ScalarField as_field() const;
  double eval(const Vec2& xi) const { return as_field().eval(xi); }
};

/// Exact 1D grid envelope in O(N): the running minimum from the left and
/// from the right, maxed. Certificates hold the nearest witnesses achieving
/// the two minima.
EnvelopeResult envelope_1d(const ScalarField& field, const GridSpec& grid,
                           const Tolerances& tol = {});

/// 2D envelope by an ascending sweep over the distinct nodal values,
/// assigning each node the smallest level whose sublevel hull contains it.
/// Requires a coercivity tag; throws GridTooCoarse below 4 distinct levels.
EnvelopeResult envelope_levelsweep(const ScalarField& field, const GridSpec& grid,
                                   const Tolerances& tol = {});

/// Dispatch on dimension.
EnvelopeResult compute_envelope(const ScalarField& field, const GridSpec& grid,
                                const Tolerances& tol = {});

struct CaratheodoryValue {
  double value = 0.0;
  Certificate certificate;
};

/// Exact minimum over all (n+1)-tuples of candidates whose hull contains xi
/// of the max f-value. O(|candidates|^(n+1)); intended for spot checks.
CaratheodoryValue envelope_caratheodory(const ScalarField& field, const Vec2& xi,
                                        const std::vector<Vec2>& candidates,
                                        const Tolerances& tol = {});

/// Lower-semicontinuous envelope of a sampled field: each annotated node is
/// lowered to the min of its value and its annotated limits. Identity when
/// no annotations are present.
ScalarField lsc_envelope_grid(const ScalarField& field);

/// Sublevel body {envelope <= v} as a convex hull of the sub-v nodes
/// together with the level-v crossing points on grid edges, so that points
/// where the interpolated envelope equals v locate on the body rather than
/// outside it.
ConvexBody sublevel_body(const EnvelopeResult& env, double v,
                         const Tolerances& tol = {});

/// Points of the sampled sublevel set {f <= v + tol.level} of a raw field.
std::vector<Vec2> sublevel_nodes(const ScalarField& field, const GridSpec& grid,
                                 double v, const Tolerances& tol = {});

}  // namespace supremal
