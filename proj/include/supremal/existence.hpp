#pragma once

#include <optional>
#include <string>
#include <vector>

#include "supremal/convexity.hpp"
#include "supremal/envelope.hpp"
#include "supremal/paf.hpp"

namespace supremal {

enum class Decision { Exists, NotExists, Unknown };
enum class Branch { InLevelSetOfF, InteriorOfEnvelopeLevelSet, Sufficient, None };

struct RelaxedValue {
  double value = 0.0;
  Certificate certificate;
};

struct CellCheck {
  Eigen::Index cell = 0;
  Vec2 gradient = Vec2::Zero();
  bool in_level_set_of_f = false;
  bool interior_of_envelope_set = false;
};

struct ComponentFlatness {
  int size = 0;
  double envelope_spread = 0.0;
  bool flat = false;
};

struct ExistenceVerdict {
  Decision decision = Decision::Unknown;
  Branch branch = Branch::None;
  double relaxed_value = 0.0;
  Vec2 xi0 = Vec2::Zero();
  double f_xi0 = 0.0;
  double level_margin = 0.0;        // f(xi0) - relaxed value
  double boundary_distance = 0.0;   // signed distance to the envelope sublevel body
  std::optional<Vec2> nu;           // non-existence certificate direction
  std::optional<StrictnessReport> strictness;
  Certificate certificate;          // relaxed-value witnesses
  std::string reason;
  GridSpec grid;
  std::string field_name;
  // decide_general extras
  std::vector<CellCheck> cell_checks;
  std::vector<ComponentFlatness> flatness;
  bool sufficient_only = false;
};

/// inf(P) for the affine datum u_xi0: the envelope at xi0, tightened by
/// f(xi0), with a convex-combination certificate.
RelaxedValue relaxed_value_affine(const ScalarField& field, const Vec2& xi0,
                                  const GridSpec& grid, const Tolerances& tol = {},
                                  const EnvelopeResult* precomputed = nullptr);

/// The necessary-and-sufficient branch test for affine data:
/// f(xi0) <= inf(P^lc) gives existence in L(f); xi0 interior to the
/// envelope sublevel body gives existence through the differential
/// inclusion; boundary location with a level gap certifies non-existence
/// (strict level convexity of the envelope at xi0 in one direction).
ExistenceVerdict decide_affine(const ScalarField& field, const Vec2& xi0,
                               const GridSpec& grid, const Tolerances& tol = {},
                               const EnvelopeResult* precomputed = nullptr);

struct GeneralOptions {
  int oracle_mesh = 9;       // nodes per axis for the 2D relaxed oracle
  int oracle_restarts = 4;
  unsigned seed = 0;
};

/// Sufficient condition for a piecewise-affine datum: every cell gradient in
/// L_v(f) or int L_v(f^lslc). All cells passing yields Exists (flagged
/// sufficient-only); any failing cell yields Unknown with the cell report.
ExistenceVerdict decide_general(const ScalarField& field,
                                const PiecewiseAffineFunction& u0,
                                const GridSpec& grid, const Tolerances& tol = {},
                                const GeneralOptions& opts = {},
                                const EnvelopeResult* precomputed = nullptr);

struct FlatnessDirection {
  Vec2 nu = Vec2::Zero();
  double halfball_deviation = 0.0;
  double ray_deviation = 0.0;
};

struct FlatnessReport {
  std::vector<FlatnessDirection> directions;
  FlatnessDirection best_halfball;
  FlatnessDirection best_ray;
  double envelope_at_xi0 = 0.0;
};

/// Audit of the necessary flatness condition: scans a fan of directions for
/// a half-ball of radius eps on which the envelope is constant. Throws
/// NotApplicable when f(xi0) equals the envelope there.
FlatnessReport flatness_necessary_check(const ScalarField& field, const Vec2& xi0,
                                        double eps, const GridSpec& grid,
                                        const Tolerances& tol = {},
                                        const EnvelopeResult* precomputed = nullptr);

enum class Uniqueness { UniqueAffine, PossiblyNonUnique };

/// For a level convex density: the affine map is the unique minimizer iff
/// the density is strictly level convex at xi0 in at least one direction.
Uniqueness uniqueness_probe(const ScalarField& field_levelconvex, const Vec2& xi0,
                            const GridSpec& grid, const Tolerances& tol = {},
                            bool assume_level_convex = false);

}  // namespace supremal
