#pragma once

#include <stdexcept>
#include <string>

namespace supremal {

/// One knob set for every tolerance in the toolkit. Geometric comparisons
/// (hull collinearity, point location) use `geom` scaled by the body
/// diameter; value comparisons (level-set membership, envelope equality)
/// use `level`. `strict_edge` is the sampling-resolution threshold of the
/// strict-convexity proxy.
struct Tolerances {
  double geom = 1e-9;
  double level = 1e-7;
  double strict_edge = 0.1;
};

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct OutOfBounds : Error { using Error::Error; };
struct UnknownField : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct NotOnBoundary : Error { using Error::Error; };
struct NotCoercive : Error { using Error::Error; };
struct GridTooCoarse : Error { using Error::Error; };
struct NotInHull : Error { using Error::Error; };
struct NotLevelConvex : Error { using Error::Error; };
struct NotBracketed : Error { using Error::Error; };
struct NotInteriorPoint : Error { using Error::Error; };
struct NotInTarget : Error { using Error::Error; };
struct NotApplicable : Error { using Error::Error; };
struct MalformedMesh : Error { using Error::Error; };
struct VerdictWasNotExists : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

}  // namespace supremal
