#pragma once

#include <optional>
#include <vector>

#include "supremal/envelope.hpp"
#include "supremal/fields.hpp"
#include "supremal/geometry.hpp"

namespace supremal {

struct LevelConvexityWitness {
  Vec2 xi = Vec2::Zero();
  Vec2 eta = Vec2::Zero();
  double t = 0.5;
  double f_combo = 0.0;
  double f_max = 0.0;
};

struct LevelConvexityReport {
  bool level_convex = true;
  std::optional<LevelConvexityWitness> violation;
};

/// Sampled level-convexity test over all grid-node pairs: midpoints snapped
/// to the nearest node, plus t in {1/4, 1/2, 3/4} combinations evaluated
/// through the field (interpolated when sampled). Returns the first
/// violation.
LevelConvexityReport check_level_convex(const ScalarField& field,
                                        const GridSpec& grid,
                                        const Tolerances& tol = {});

/// Sampled sublevel set L_{f(xi0)}(f) as a convex body: nodes with
/// f <= f(xi0) + tol.level.
ConvexBody level_set_body(const ScalarField& field, const GridSpec& grid,
                          const Vec2& xi0, const Tolerances& tol = {});

/// xi0 is an extreme point of the hull of its own sampled sublevel set.
/// Throws NotLevelConvex when the sampled field fails check_level_convex
/// (skipped with assume_level_convex).
bool strict_at_point(const ScalarField& field, const Vec2& xi0,
                     const GridSpec& grid, const Tolerances& tol = {},
                     bool assume_level_convex = false);

/// Some(direction) iff xi0 locates on the boundary of its sampled sublevel
/// hull; None when interior, and None when the samples place xi0 outside
/// the hull (the grid cannot certify a direction there).
std::optional<Vec2> strict_in_one_direction(const ScalarField& field,
                                            const Vec2& xi0, const GridSpec& grid,
                                            const Tolerances& tol = {},
                                            bool assume_level_convex = false);

struct DanaoLevelReport {
  double level = 0.0;
  bool pass = true;
  std::vector<Vec2> offenders;  // R_c nodes that are not extreme
  int r_count = 0;
};

/// For each level c: the sampled R_c = {|f - c| <= tol.level} must sit
/// inside the extreme points of the sampled L_c hull. A diagnostic for
/// claimed strict level convexity.
std::vector<DanaoLevelReport> danao_consistency(const ScalarField& field,
                                                const GridSpec& grid,
                                                const std::vector<double>& levels,
                                                const Tolerances& tol = {},
                                                bool assume_level_convex = false);

struct PerturbationWitness {
  Vec2 xi = Vec2::Zero();
  Vec2 eta = Vec2::Zero();
};

/// Scans node pairs (xi, xi+eta) for f(xi + eta/2) = max(f(xi), f(xi+eta))
/// within tol.level; a hit with eta != 0 refutes strict level convexity.
std::pair<bool, std::optional<PerturbationWitness>> strict_via_perturbation(
    const ScalarField& field, const GridSpec& grid, const Tolerances& tol = {},
    bool assume_level_convex = false);

struct StrictnessReport {
  bool level_convex_sampled = true;
  std::optional<LevelConvexityWitness> violation;
  bool strict_at_point = false;
  std::optional<Vec2> strict_in_one_direction;
  PointLocation boundary_location = PointLocation::Exterior;
  Vec2 xi0 = Vec2::Zero();
  double f_xi0 = 0.0;
};

StrictnessReport classify_strictness(const ScalarField& field, const Vec2& xi0,
                                     const GridSpec& grid,
                                     const Tolerances& tol = {},
                                     bool assume_level_convex = false);

}  // namespace supremal
