#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "supremal/geometry.hpp"
#include "supremal/tolerances.hpp"

namespace supremal {

/// Uniform tensor grid. dim 1 uses axis 0 only. Flat indices are row-major
/// with axis 0 major: flat = i0 * counts[1] + i1.
struct GridSpec {
  int dim = 1;
  std::array<double, 2> lo{-2.0, -2.0};
  std::array<double, 2> hi{2.0, 2.0};
  std::array<int, 2> counts{2, 1};

  static GridSpec line(double a, double b, int n);
  static GridSpec box(double ax, double bx, int nx, double ay, double by, int ny);
  static GridSpec square(double a, double b, int n);

  void validate() const;
  double spacing(int axis) const { return (hi[axis] - lo[axis]) / (counts[axis] - 1); }
  Eigen::Index size() const {
    return dim == 1 ? counts[0] : Eigen::Index(counts[0]) * counts[1];
  }
  Vec2 node(Eigen::Index flat) const;
  Vec2 node2(int i0, int i1) const;
  Eigen::Index flat(int i0, int i1) const { return Eigen::Index(i0) * counts[1] + i1; }
  bool contains(const Vec2& p) const;
};

/// Named coercivity minorant gamma(t) = a * t^p - b, checked against the
/// field at every sample.
struct Coercivity {
  double a = 1.0;
  double p = 2.0;
  double b = 0.0;
  double operator()(double t) const;
};

namespace expr {
struct Node;
/// Parses an arithmetic expression in x1 (alias x) and x2 (alias y) with
/// + - * / ^, parentheses, and the functions abs, sqrt, exp, sin, cos,
/// min, max, pow. Throws ParseError on malformed input.
std::shared_ptr<const Node> parse(const std::string& text, int dim);
double eval(const Node& n, const Vec2& xi);
}  // namespace expr

enum class FieldKind { Analytic, Sampled };

/// A density f: R^n -> R, n in {1,2}. Analytic fields evaluate an expression
/// tree deterministically; sampled fields interpolate nodal values
/// multilinearly. Immutable after construction.
class ScalarField {
 public:
  static ScalarField analytic(int dim, const std::string& expression,
                              std::optional<Coercivity> coercivity = std::nullopt,
                              std::string name = {});
  static ScalarField sampled(GridSpec grid, Eigen::ArrayXd values,
                             std::optional<Coercivity> coercivity = std::nullopt,
                             std::string name = {});

  int dim() const { return dim_; }
  FieldKind kind() const { return kind_; }
  const std::string& expression() const { return expression_; }
  const std::string& name() const { return name_; }
  const std::optional<Coercivity>& coercivity() const { return coercivity_; }
  const GridSpec& grid() const { return grid_; }
  const Eigen::ArrayXd& values() const { return values_; }

  double operator()(const Vec2& xi) const { return eval(xi); }
  double eval(const Vec2& xi) const;
  double eval1(double x) const { return eval(Vec2(x, 0.0)); }

  /// Annotated limiting values at nodes, for lsc envelopes of sampled data.
  const std::vector<std::pair<Eigen::Index, double>>& lsc_annotations() const {
    return lsc_annotations_;
  }
  ScalarField with_annotations(std::vector<std::pair<Eigen::Index, double>> a) const;

 private:
  int dim_ = 1;
  FieldKind kind_ = FieldKind::Analytic;
  std::string expression_;
  std::string name_;
  std::shared_ptr<const expr::Node> ast_;
  GridSpec grid_;
  Eigen::ArrayXd values_;
  std::optional<Coercivity> coercivity_;
  std::vector<std::pair<Eigen::Index, double>> lsc_annotations_;
};

/// Evaluate an analytic field at every node of a grid. The coercivity tag is
/// copied and re-checked against the samples.
ScalarField sample(const ScalarField& field, const GridSpec& grid);

/// Registry of the example densities: double-well-1d, example-4-5,
/// halfline-kink, dist-halfplane, abs.
ScalarField builtin(const std::string& name);
std::vector<std::string> builtin_names();

/// Domain Omega: an interval (dim 1) or a convex polygon, CCW (dim 2).
struct Domain {
  int dim = 1;
  double a = 0.0, b = 1.0;            // dim 1
  std::vector<Vec2> polygon;          // dim 2, CCW
  static Domain interval(double a, double b);
  static Domain box(double ax, double bx, double ay, double by);
  static Domain convex_polygon(std::vector<Vec2> verts);
  double measure() const;
  bool contains(const Vec2& p, double tol = 1e-12) const;
};

struct BoundaryDatum {
  Vec2 xi0 = Vec2::Zero();
  double c = 0.0;
  double operator()(const Vec2& x) const { return xi0.dot(x) + c; }
  double at1(double x) const { return xi0.x() * x + c; }
};

}  // namespace supremal
