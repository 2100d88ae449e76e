#include "supremal/fields.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>

namespace supremal {

// ---------------------------------------------------------------- GridSpec

GridSpec GridSpec::line(double a, double b, int n) {
  GridSpec g;
  g.dim = 1;
  g.lo = {a, 0.0};
  g.hi = {b, 0.0};
  g.counts = {n, 1};
  g.validate();
  return g;
}

GridSpec GridSpec::box(double ax, double bx, int nx, double ay, double by, int ny) {
  GridSpec g;
  g.dim = 2;
  g.lo = {ax, ay};
  g.hi = {bx, by};
  g.counts = {nx, ny};
  g.validate();
  return g;
}

GridSpec GridSpec::square(double a, double b, int n) { return box(a, b, n, a, b, n); }

void GridSpec::validate() const {
  for (int ax = 0; ax < dim; ++ax) {
    if (counts[ax] < 2) throw Error("GridSpec: counts must be >= 2 per axis");
    if (!(lo[ax] < hi[ax])) throw Error("GridSpec: lo < hi required");
  }
}

Vec2 GridSpec::node(Eigen::Index flat) const {
  if (dim == 1) return Vec2(lo[0] + flat * spacing(0), 0.0);
  const int i0 = static_cast<int>(flat / counts[1]);
  const int i1 = static_cast<int>(flat % counts[1]);
  return node2(i0, i1);
}

Vec2 GridSpec::node2(int i0, int i1) const {
  return Vec2(lo[0] + i0 * spacing(0), dim == 2 ? lo[1] + i1 * spacing(1) : 0.0);
}

bool GridSpec::contains(const Vec2& p) const {
  for (int ax = 0; ax < dim; ++ax) {
    const double pad = 1e-12 * (hi[ax] - lo[ax]);
    const double c = ax == 0 ? p.x() : p.y();
    if (c < lo[ax] - pad || c > hi[ax] + pad) return false;
  }
  return true;
}

double Coercivity::operator()(double t) const { return a * std::pow(t, p) - b; }

// ------------------------------------------------------- expression parser

namespace expr {

enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Abs, Sqrt, Exp, Sin, Cos, Min, Max };

struct Node {
  Op op;
  double value = 0.0;  // Const
  int var = 0;         // Var: 0 -> x1, 1 -> x2
  std::shared_ptr<const Node> a, b;
};

double eval(const Node& n, const Vec2& xi) {
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return n.var == 0 ? xi.x() : xi.y();
    case Op::Neg: return -eval(*n.a, xi);
    case Op::Add: return eval(*n.a, xi) + eval(*n.b, xi);
    case Op::Sub: return eval(*n.a, xi) - eval(*n.b, xi);
    case Op::Mul: return eval(*n.a, xi) * eval(*n.b, xi);
    case Op::Div: return eval(*n.a, xi) / eval(*n.b, xi);
    case Op::Pow: return std::pow(eval(*n.a, xi), eval(*n.b, xi));
    case Op::Abs: return std::abs(eval(*n.a, xi));
    case Op::Sqrt: return std::sqrt(eval(*n.a, xi));
    case Op::Exp: return std::exp(eval(*n.a, xi));
    case Op::Sin: return std::sin(eval(*n.a, xi));
    case Op::Cos: return std::cos(eval(*n.a, xi));
    case Op::Min: return std::min(eval(*n.a, xi), eval(*n.b, xi));
    case Op::Max: return std::max(eval(*n.a, xi), eval(*n.b, xi));
  }
  return 0.0;
}

namespace {

using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

struct Parser {
  const std::string& s;
  size_t pos = 0;
  int dim;

  explicit Parser(const std::string& text, int d) : s(text), dim(d) {}

  void skip() { while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos; }

  bool consume(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) { ++pos; return true; }
    return false;
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError("expression: " + msg + " at position " + std::to_string(pos));
  }

  NodePtr parse_expr() {
    NodePtr lhs = parse_term();
    for (;;) {
      if (consume('+')) lhs = make(Op::Add, lhs, parse_term());
      else if (consume('-')) lhs = make(Op::Sub, lhs, parse_term());
      else return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (consume('*')) lhs = make(Op::Mul, lhs, parse_unary());
      else if (consume('/')) lhs = make(Op::Div, lhs, parse_unary());
      else return lhs;
    }
  }

  NodePtr parse_unary() {
    if (consume('-')) return make(Op::Neg, parse_unary());
    if (consume('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (consume('^')) return make(Op::Pow, base, parse_unary());
    return base;
  }

  NodePtr parse_atom() {
    skip();
    if (pos >= s.size()) fail("unexpected end");
    const char c = s[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      char* end = nullptr;
      const double v = std::strtod(s.c_str() + pos, &end);
      if (end == s.c_str() + pos) fail("bad number");
      pos = static_cast<size_t>(end - s.c_str());
      auto n = std::make_shared<Node>();
      n->op = Op::Const;
      n->value = v;
      return n;
    }
    if (c == '(') {
      ++pos;
      NodePtr e = parse_expr();
      if (!consume(')')) fail("missing ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t start = pos;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
      const std::string id = s.substr(start, pos - start);
      if (id == "x" || id == "x1" || id == "xi1") return variable(0);
      if (id == "y" || id == "x2" || id == "xi2") return variable(1);
      static const std::map<std::string, Op> unary{
          {"abs", Op::Abs}, {"sqrt", Op::Sqrt}, {"exp", Op::Exp},
          {"sin", Op::Sin}, {"cos", Op::Cos}};
      static const std::map<std::string, Op> binary{
          {"min", Op::Min}, {"max", Op::Max}, {"pow", Op::Pow}};
      if (auto it = unary.find(id); it != unary.end()) {
        if (!consume('(')) fail("expected '(' after " + id);
        NodePtr a = parse_expr();
        if (!consume(')')) fail("missing ')'");
        return make(it->second, a);
      }
      if (auto it = binary.find(id); it != binary.end()) {
        if (!consume('(')) fail("expected '(' after " + id);
        NodePtr a = parse_expr();
        if (!consume(',')) fail("expected ',' in " + id);
        NodePtr b = parse_expr();
        if (!consume(')')) fail("missing ')'");
        return make(it->second, a, b);
      }
      fail("unknown identifier '" + id + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr variable(int v) {
    if (v >= dim) fail("variable x" + std::to_string(v + 1) + " in a dim-" +
                       std::to_string(dim) + " field");
    auto n = std::make_shared<Node>();
    n->op = Op::Var;
    n->var = v;
    return n;
  }
};

}  // namespace

std::shared_ptr<const Node> parse(const std::string& text, int dim) {
  Parser p(text, dim);
  NodePtr root = p.parse_expr();
  p.skip();
  if (p.pos != text.size()) p.fail("trailing input");
  return root;
}

}  // namespace expr

// -------------------------------------------------------------- ScalarField

ScalarField ScalarField::analytic(int dim, const std::string& expression,
                                  std::optional<Coercivity> coercivity,
                                  std::string name) {
  if (dim != 1 && dim != 2) throw Error("ScalarField: dim must be 1 or 2");
  ScalarField f;
  f.dim_ = dim;
  f.kind_ = FieldKind::Analytic;
  f.expression_ = expression;
  f.name_ = std::move(name);
  f.ast_ = expr::parse(expression, dim);
  f.coercivity_ = coercivity;
  return f;
}

ScalarField ScalarField::sampled(GridSpec grid, Eigen::ArrayXd values,
                                 std::optional<Coercivity> coercivity,
                                 std::string name) {
  grid.validate();
  if (values.size() != grid.size())
    throw Error("ScalarField: values size does not match grid");
  if (!values.isFinite().all())
    throw Error("ScalarField: sampled values must be finite");
  ScalarField f;
  f.dim_ = grid.dim;
  f.kind_ = FieldKind::Sampled;
  f.name_ = std::move(name);
  f.grid_ = grid;
  f.values_ = std::move(values);
  f.coercivity_ = coercivity;
  if (coercivity) {
    for (Eigen::Index i = 0; i < f.values_.size(); ++i) {
      const Vec2 x = grid.node(i);
      const double t = f.dim_ == 1 ? std::abs(x.x()) : x.norm();
      const double g = (*coercivity)(t);
      // roundoff slack keeps tight minorants (gamma touching f) admissible
      if (f.values_[i] < g - 1e-9 * std::max(1.0, std::abs(g)))
        throw NotCoercive("ScalarField: sample below the coercivity minorant at node " +
                          std::to_string(i));
    }
  }
  return f;
}

ScalarField ScalarField::with_annotations(
    std::vector<std::pair<Eigen::Index, double>> a) const {
  if (kind_ != FieldKind::Sampled)
    throw Error("lsc annotations require a sampled field");
  ScalarField f = *this;
  f.lsc_annotations_ = std::move(a);
  return f;
}

namespace {

// Per-axis position with node snapping: returns (cell index, fraction).
std::pair<int, double> axis_position(double x, double lo, double h, int count) {
  const double r = (x - lo) / h;
  const double rn = std::round(r);
  if (std::abs(r - rn) <= 1e-12 * std::max(1.0, std::abs(r)) && rn >= 0 &&
      rn <= count - 1)
    return {static_cast<int>(rn) == count - 1 ? count - 2 : static_cast<int>(rn),
            static_cast<int>(rn) == count - 1 ? 1.0 : 0.0};
  int i = static_cast<int>(std::floor(r));
  i = std::clamp(i, 0, count - 2);
  return {i, r - i};
}

}  // namespace

double ScalarField::eval(const Vec2& xi) const {
  if (kind_ == FieldKind::Analytic) return expr::eval(*ast_, xi);
  if (!grid_.contains(xi))
    throw OutOfBounds("eval: point outside the sampled grid");
  const auto [i0, t0] = axis_position(xi.x(), grid_.lo[0], grid_.spacing(0), grid_.counts[0]);
  if (dim_ == 1) {
    if (t0 == 0.0) return values_[i0];
    if (t0 == 1.0) return values_[i0 + 1];
    return values_[i0] + t0 * (values_[i0 + 1] - values_[i0]);
  }
  const auto [i1, t1] = axis_position(xi.y(), grid_.lo[1], grid_.spacing(1), grid_.counts[1]);
  const double v00 = values_[grid_.flat(i0, i1)];
  const double v10 = values_[grid_.flat(i0 + 1, i1)];
  const double v01 = values_[grid_.flat(i0, i1 + 1)];
  const double v11 = values_[grid_.flat(i0 + 1, i1 + 1)];
  if (t0 == 0.0 && t1 == 0.0) return v00;
  if (t0 == 1.0 && t1 == 0.0) return v10;
  if (t0 == 0.0 && t1 == 1.0) return v01;
  if (t0 == 1.0 && t1 == 1.0) return v11;
  const double a = v00 + t0 * (v10 - v00);
  const double b = v01 + t0 * (v11 - v01);
  return a + t1 * (b - a);
}

ScalarField sample(const ScalarField& field, const GridSpec& grid) {
  grid.validate();
  if (grid.dim != field.dim()) throw Error("sample: grid dim mismatch");
  Eigen::ArrayXd v(grid.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = field.eval(grid.node(i));
  return ScalarField::sampled(grid, std::move(v), field.coercivity(), field.name());
}

ScalarField builtin(const std::string& name) {
  if (name == "double-well-1d")
    return ScalarField::analytic(1, "(x1^2 - 1)^2", Coercivity{1.0, 2.0, 2.0}, name);
  if (name == "example-4-5")
    return ScalarField::analytic(2, "(x1^2 - 1)^2 + x2^2", Coercivity{1.0, 2.0, 2.0}, name);
  if (name == "halfline-kink")
    return ScalarField::analytic(1, "max(0, -x1)", std::nullopt, name);
  if (name == "dist-halfplane")
    return ScalarField::analytic(2, "max(0, -x1)", std::nullopt, name);
  if (name == "abs")
    return ScalarField::analytic(1, "abs(x1)", Coercivity{1.0, 1.0, 0.0}, name);
  throw UnknownField("builtin: unknown field '" + name + "'");
}

std::vector<std::string> builtin_names() {
  return {"double-well-1d", "example-4-5", "halfline-kink", "dist-halfplane", "abs"};
}

// ------------------------------------------------------------------ Domain

Domain Domain::interval(double a, double b) {
  if (!(a < b)) throw Error("Domain: empty interval");
  Domain d;
  d.dim = 1;
  d.a = a;
  d.b = b;
  return d;
}

Domain Domain::box(double ax, double bx, double ay, double by) {
  if (!(ax < bx && ay < by)) throw Error("Domain: empty box");
  Domain d;
  d.dim = 2;
  d.polygon = {Vec2(ax, ay), Vec2(bx, ay), Vec2(bx, by), Vec2(ax, by)};
  return d;
}

Domain Domain::convex_polygon(std::vector<Vec2> verts) {
  if (verts.size() < 3) throw Error("Domain: polygon needs >= 3 vertices");
  // Require simple convex CCW input.
  const size_t n = verts.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& a = verts[i];
    const Vec2& b = verts[(i + 1) % n];
    const Vec2& c = verts[(i + 2) % n];
    if (cross2(b - a, c - b) <= 0)
      throw Error("Domain: polygon must be convex with CCW vertices");
  }
  Domain d;
  d.dim = 2;
  d.polygon = std::move(verts);
  return d;
}

double Domain::measure() const {
  if (dim == 1) return b - a;
  return polygon_area(polygon);
}

bool Domain::contains(const Vec2& p, double tol) const {
  if (dim == 1) return p.x() >= a - tol && p.x() <= b + tol;
  const size_t n = polygon.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec2& u = polygon[i];
    const Vec2& v = polygon[(i + 1) % n];
    if (cross2(v - u, p - u) < -tol) return false;
  }
  return true;
}

}  // namespace supremal
