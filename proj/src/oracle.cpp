#include "supremal/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>

namespace supremal {

MinimaxResult relaxed_min_1d(const ScalarField& field, double xi0, const Domain& omega,
                             int nodes, const Tolerances& tol) {
  if (omega.dim != 1) throw Error("relaxed_min_1d: interval domain required");
  if (nodes < 3) throw Error("relaxed_min_1d: nodes >= 3 required");
  // Candidate slope window: the field grid when sampled, else a window
  // comfortably containing xi0 and the built-in wells.
  double wlo, whi;
  if (field.kind() == FieldKind::Sampled) {
    wlo = field.grid().lo[0];
    whi = field.grid().hi[0];
  } else {
    wlo = -2.0;
    whi = 2.0;
    if (xi0 < wlo || xi0 > whi) {  // widen only for out-of-window data
      wlo = std::min(wlo, xi0 - 1.0);
      whi = std::max(whi, xi0 + 1.0);
    }
  }
  if (xi0 < wlo || xi0 > whi) throw OutOfBounds("relaxed_min_1d: xi0 outside window");
  const GridSpec g = GridSpec::line(wlo, whi, nodes);

  std::vector<double> xs(static_cast<size_t>(nodes) + 1);
  std::vector<double> fs(xs.size());
  for (int i = 0; i < nodes; ++i) {
    xs[static_cast<size_t>(i)] = g.node(i).x();
    fs[static_cast<size_t>(i)] = field.eval(g.node(i));
  }
  xs.back() = xi0;
  fs.back() = field.eval(Vec2(xi0, 0.0));

  auto reachable = [&](double c) {
    bool left = false, right = false;
    for (size_t i = 0; i < xs.size(); ++i) {
      if (fs[i] > c) continue;
      if (xs[i] <= xi0) left = true;
      if (xs[i] >= xi0) right = true;
      if (left && right) return true;
    }
    return false;
  };

  double lo = *std::min_element(fs.begin(), fs.end());
  double hi = fs.back();  // xi0 itself always reaches its own level
  MinimaxResult res;
  res.method = MinimaxMethod::BisectionReachability1D;
  if (reachable(lo)) {
    res.value = lo;
    res.iterations = 0;
  } else {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (reachable(mid) ? hi : lo) = mid;
    }
    res.value = hi;
    res.iterations = 60;
  }
  res.converged = true;

  // Witness from the two bracketing slopes at the found level.
  double a = xi0, b = xi0, fa = fs.back(), fb = fs.back();
  bool have_a = false, have_b = false;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (fs[i] > res.value + tol.level) continue;
    if (xs[i] <= xi0 && (!have_a || xs[i] > a)) { a = xs[i]; fa = fs[i]; have_a = true; }
    if (xs[i] >= xi0 && (!have_b || xs[i] < b)) { b = xs[i]; fb = fs[i]; have_b = true; }
  }
  BoundaryDatum datum{Vec2(xi0, 0.0), 0.0};
  if (!have_a || !have_b || b - a <= tol.geom) {
    res.minimizer = PiecewiseAffineFunction::affine(omega, datum);
    return res;
  }
  const double t = (b - xi0) / (b - a);
  PiecewiseAffineFunction u;
  u.dim = 1;
  u.omega = omega;
  u.datum = datum;
  u.breakpoints.resize(3);
  u.values1.resize(3);
  const double L = omega.b - omega.a;
  u.breakpoints << omega.a, omega.a + t * L, omega.b;
  u.values1 << datum.at1(omega.a), datum.at1(omega.a) + a * t * L, datum.at1(omega.b);
  res.minimizer = std::move(u);
  (void)fa;
  (void)fb;
  return res;
}

namespace {

struct Mesh2D {
  int n = 0;                  // nodes per axis
  std::vector<Vec2> verts;
  std::vector<std::array<int, 3>> tris;
  std::vector<char> interior;
  std::vector<std::vector<int>> node_tris;  // incident triangles per node
};

Mesh2D make_mesh(const Domain& omega, int n) {
  if (omega.dim != 2) throw Error("relaxed_min_2d: planar domain required");
  // Axis-aligned box domains only.
  double lox = std::numeric_limits<double>::max(), loy = lox;
  double hix = -lox, hiy = -lox;
  for (const Vec2& p : omega.polygon) {
    lox = std::min(lox, p.x()); hix = std::max(hix, p.x());
    loy = std::min(loy, p.y()); hiy = std::max(hiy, p.y());
  }
  if (omega.polygon.size() != 4 ||
      std::abs(polygon_area(omega.polygon) - (hix - lox) * (hiy - loy)) >
          1e-9 * (hix - lox) * (hiy - loy))
    throw Error("relaxed_min_2d: axis-aligned box domain required");
  Mesh2D m;
  m.n = n;
  m.verts.resize(static_cast<size_t>(n) * n);
  m.interior.assign(m.verts.size(), 0);
  auto id = [n](int i, int j) { return i * n + j; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      m.verts[static_cast<size_t>(id(i, j))] =
          Vec2(lox + (hix - lox) * i / (n - 1), loy + (hiy - loy) * j / (n - 1));
      m.interior[static_cast<size_t>(id(i, j))] =
          (i > 0 && i < n - 1 && j > 0 && j < n - 1);
    }
  for (int i = 0; i + 1 < n; ++i)
    for (int j = 0; j + 1 < n; ++j) {
      m.tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  m.node_tris.resize(m.verts.size());
  for (size_t t = 0; t < m.tris.size(); ++t)
    for (int k = 0; k < 3; ++k)
      m.node_tris[static_cast<size_t>(m.tris[t][k])].push_back(static_cast<int>(t));
  return m;
}

struct DescentState {
  const Mesh2D* mesh;
  const ScalarField* env;
  Eigen::ArrayXd z;
  std::vector<Vec2> grads;          // per triangle
  std::vector<double> fvals;        // env at gradient, penalized OOB

  double tri_value(int t) const { return fvals[static_cast<size_t>(t)]; }

  void refresh_tri(int t) {
    const auto& tr = mesh->tris[static_cast<size_t>(t)];
    const Vec2& a = mesh->verts[static_cast<size_t>(tr[0])];
    const Vec2& b = mesh->verts[static_cast<size_t>(tr[1])];
    const Vec2& c = mesh->verts[static_cast<size_t>(tr[2])];
    Eigen::Matrix2d m;
    m.row(0) = (b - a).transpose();
    m.row(1) = (c - a).transpose();
    const Eigen::Vector2d rhs(z[tr[1]] - z[tr[0]], z[tr[2]] - z[tr[0]]);
    const Vec2 g = m.partialPivLu().solve(rhs);
    grads[static_cast<size_t>(t)] = g;
    fvals[static_cast<size_t>(t)] =
        env->grid().contains(g) ? env->eval(g) : 1e9 + g.squaredNorm();
  }

  void refresh_all() {
    for (size_t t = 0; t < mesh->tris.size(); ++t) refresh_tri(static_cast<int>(t));
  }

  double true_max() const {
    double m = -std::numeric_limits<double>::max();
    for (double f : fvals) m = std::max(m, f);
    return m;
  }

  // Smoothed maximum restricted to the triangles around one node, plus the
  // global max over the others (constant during that node's line search).
  double smooth_max(double tau) const {
    double m = true_max();
    double s = 0.0;
    for (double f : fvals) s += std::exp((f - m) / tau);
    return m + tau * std::log(s);
  }
};

MinimaxResult descent_run(const Mesh2D& mesh, const ScalarField& envf,
                          const Eigen::ArrayXd& z0, const Descent2DOptions& opts,
                          const Tolerances& tol, unsigned seed, int restart_index) {
  DescentState st;
  st.mesh = &mesh;
  st.env = &envf;
  st.z = z0;
  st.grads.resize(mesh.tris.size());
  st.fvals.resize(mesh.tris.size());

  std::mt19937_64 rng(seed);
  if (restart_index > 0) {
    const double amp = 0.2 * restart_index / std::max(1, opts.restarts - 1);
    std::uniform_real_distribution<double> u(-amp, amp);
    for (size_t i = 0; i < mesh.verts.size(); ++i)
      if (mesh.interior[i]) st.z[static_cast<Eigen::Index>(i)] += u(rng);
  }
  st.refresh_all();

  Eigen::ArrayXd best_z = st.z;
  double best = st.true_max();
  const double hmesh = (mesh.verts[static_cast<size_t>(mesh.n)].x() -
                        mesh.verts[0].x());
  double span0 = std::max(1e-3, 2.0 * hmesh);

  int iterations = 0;
  bool converged = false;
  for (double tau = opts.temp_hi; tau >= opts.temp_lo * 0.999; tau *= 0.5) {
    for (int epoch = 0; epoch < opts.epochs_per_temp; ++epoch) {
      ++iterations;
      double improved = 0.0;
      for (size_t node = 0; node < mesh.verts.size(); ++node) {
        if (!mesh.interior[node]) continue;
        const double cur = st.z[static_cast<Eigen::Index>(node)];
        const double f_before = st.smooth_max(tau);
        double local_best = cur;
        double local_val = f_before;
        double span = span0;
        double center = cur;
        for (int ref = 0; ref < 3; ++ref) {
          for (int k = 0; k < opts.line_samples; ++k) {
            const double cand =
                center + span * (2.0 * k / (opts.line_samples - 1) - 1.0);
            st.z[static_cast<Eigen::Index>(node)] = cand;
            for (int t : mesh.node_tris[node]) st.refresh_tri(t);
            const double val = st.smooth_max(tau);
            if (val < local_val) { local_val = val; local_best = cand; }
          }
          center = local_best;
          span /= 6.0;
        }
        st.z[static_cast<Eigen::Index>(node)] = local_best;
        for (int t : mesh.node_tris[node]) st.refresh_tri(t);
        improved += f_before - local_val;
        const double tm = st.true_max();
        if (tm < best) { best = tm; best_z = st.z; }
      }
      if (improved < tol.level) {
        converged = true;
        break;
      }
    }
  }

  MinimaxResult res;
  res.method = MinimaxMethod::LocalDescent2D;
  res.value = best;
  res.iterations = iterations;
  res.converged = converged;

  PiecewiseAffineFunction u;
  u.dim = 2;
  u.vertices = mesh.verts;
  u.triangles = mesh.tris;
  u.values2 = best_z;
  res.minimizer = std::move(u);
  return res;
}

}  // namespace

MinimaxResult relaxed_min_2d(const ScalarField& field, const Vec2& xi0,
                             const Domain& omega, const GridSpec& grid,
                             const Descent2DOptions& opts, const Tolerances& tol,
                             const EnvelopeResult* precomputed) {
  if (grid.dim != 2) throw Error("relaxed_min_2d: dim 2 grid required");
  if (opts.mesh_nodes < 3 || opts.mesh_nodes > 20)
    throw Error("relaxed_min_2d: mesh_nodes in [3, 20] required");
  EnvelopeResult local;
  const EnvelopeResult* env = precomputed;
  if (!env) {
    local = envelope_levelsweep(field, grid, tol);
    env = &local;
  }
  const ScalarField envf = env->as_field();
  const Mesh2D mesh = make_mesh(omega, opts.mesh_nodes);

  Eigen::ArrayXd z0(static_cast<Eigen::Index>(mesh.verts.size()));
  for (size_t i = 0; i < mesh.verts.size(); ++i)
    z0[static_cast<Eigen::Index>(i)] = opts.boundary
                                           ? opts.boundary->eval(mesh.verts[i])
                                           : xi0.dot(mesh.verts[i]);

  const int R = std::max(1, opts.restarts);
  std::vector<std::future<MinimaxResult>> futs;
  futs.reserve(static_cast<size_t>(R));
  for (int r = 0; r < R; ++r)
    futs.push_back(std::async(std::launch::async, [&, r] {
      return descent_run(mesh, envf, z0, opts, tol, opts.seed + 1000003u * r, r);
    }));
  MinimaxResult best;
  best.value = std::numeric_limits<double>::max();
  int total_iter = 0;
  bool conv = false;
  for (auto& f : futs) {
    MinimaxResult r = f.get();
    total_iter += r.iterations;
    conv = conv || r.converged;
    if (r.value < best.value) {
      const int it = total_iter;
      best = std::move(r);
      best.iterations = it;
    }
  }
  best.iterations = total_iter;
  best.converged = conv;
  best.minimizer.omega = omega;
  best.minimizer.datum = BoundaryDatum{xi0, 0.0};
  return best;
}

AuditReport audit_solution(const ScalarField& field, const PiecewiseAffineFunction& u,
                           double claimed, const Tolerances& tol) {
  u.validate();
  AuditReport rep;
  rep.claimed = claimed;
  rep.residual_fraction = u.residual_fraction;
  rep.max_f = -std::numeric_limits<double>::max();
  for (Eigen::Index i = 0; i < u.cell_count(); ++i) {
    const Vec2 g = u.cell_gradient(i);
    const double f = field.eval(u.dim == 1 ? Vec2(g.x(), 0.0) : g);
    if (f > rep.max_f) { rep.max_f = f; rep.worst_cell = i; }
  }
  rep.pass = rep.max_f <= claimed + tol.level;
  return rep;
}

JensenReport jensen_audit(const ScalarField& field, const PiecewiseAffineFunction& u,
                          const Tolerances& tol) {
  u.validate();
  JensenReport rep;
  rep.mean_gradient = u.mean_gradient();
  rep.f_mean = field.eval(u.dim == 1 ? Vec2(rep.mean_gradient.x(), 0.0)
                                     : rep.mean_gradient);
  rep.max_cell = -std::numeric_limits<double>::max();
  for (Eigen::Index i = 0; i < u.cell_count(); ++i) {
    const Vec2 g = u.cell_gradient(i);
    const double f = field.eval(u.dim == 1 ? Vec2(g.x(), 0.0) : g);
    rep.max_cell = std::max(rep.max_cell, f);
  }
  rep.holds = rep.f_mean <= rep.max_cell + tol.level;
  if (!rep.holds) {
    for (Eigen::Index i = 0; i < u.cell_count(); ++i) {
      const Vec2 g = u.cell_gradient(i);
      const double f = field.eval(u.dim == 1 ? Vec2(g.x(), 0.0) : g);
      if (f >= rep.max_cell - tol.level) rep.witness_cells.push_back(i);
    }
  }
  return rep;
}

}  // namespace supremal
