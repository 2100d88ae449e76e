#include "supremal/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace supremal {

ScalarField EnvelopeResult::as_field() const {
  return ScalarField::sampled(grid, values, coercivity, "envelope");
}

namespace {

Certificate single_witness(const Vec2& p, double f) {
  Certificate c;
  c.witnesses = {{p, 1.0, f}, {p, 0.0, f}};
  return c;
}

Certificate pair_witness(const Vec2& a, double fa, const Vec2& b, double fb,
                         double lambda) {
  Certificate c;
  c.witnesses = {{a, lambda, fa}, {b, 1.0 - lambda, fb}};
  return c;
}

}  // namespace

EnvelopeResult envelope_1d(const ScalarField& field, const GridSpec& grid,
                           const Tolerances& /*tol*/) {
  grid.validate();
  if (grid.dim != 1) throw Error("envelope_1d: dim 1 grid required");
  const Eigen::Index n = grid.size();

  Eigen::ArrayXd f(n);
  for (Eigen::Index i = 0; i < n; ++i) f[i] = field.eval(grid.node(i));

  // Running minima with the nearest achieving index.
  Eigen::ArrayXd ml(n), mr(n);
  std::vector<Eigen::Index> al(n), ar(n);
  ml[0] = f[0];
  al[0] = 0;
  for (Eigen::Index i = 1; i < n; ++i) {
    if (f[i] <= ml[i - 1]) { ml[i] = f[i]; al[i] = i; }
    else { ml[i] = ml[i - 1]; al[i] = al[i - 1]; }
  }
  mr[n - 1] = f[n - 1];
  ar[n - 1] = n - 1;
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    if (f[i] <= mr[i + 1]) { mr[i] = f[i]; ar[i] = i; }
    else { mr[i] = mr[i + 1]; ar[i] = ar[i + 1]; }
  }

  EnvelopeResult res;
  res.grid = grid;
  res.method = EnvelopeMethod::RunningMin1D;
  res.coercivity = field.coercivity();
  res.values.resize(n);
  res.certificates.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v = std::max(ml[i], mr[i]);
    res.values[i] = v;
    const Vec2 xi = grid.node(i);
    if (v == f[i]) {
      res.certificates[i] = single_witness(xi, f[i]);
      continue;
    }
    const Eigen::Index a = al[i], b = ar[i];
    const double xa = grid.node(a).x(), xb = grid.node(b).x();
    const double lambda = xb == xa ? 1.0 : (xb - xi.x()) / (xb - xa);
    res.certificates[i] = pair_witness(grid.node(a), f[a], grid.node(b), f[b], lambda);
  }
  return res;
}

namespace {

// Barycentric weights of p in triangle (a,b,c); nullopt when degenerate.
std::optional<std::array<double, 3>> barycentric(const Vec2& p, const Vec2& a,
                                                 const Vec2& b, const Vec2& c) {
  const Vec2 u = b - a, v = c - a, w = p - a;
  const double det = cross2(u, v);
  const double scale2 = std::max({u.squaredNorm(), v.squaredNorm(), 1e-300});
  if (std::abs(det) <= 1e-14 * scale2) return std::nullopt;
  const double w1 = cross2(w, v) / det;
  const double w2 = cross2(u, w) / det;
  return std::array<double, 3>{1.0 - w1 - w2, w1, w2};
}

// Certificate for a point lying in the hull (within tol): best fan triangle,
// falling back to the nearest edge when every triangle is degenerate.
Certificate hull_certificate(const ConvexBody& body, const Vec2& p,
                             const std::vector<double>& fvals) {
  const auto& v = body.vertices;
  if (body.kind == BodyKind::Point) return single_witness(v[0], fvals[0]);
  if (body.kind == BodyKind::Segment) {
    const Vec2 d = v[1] - v[0];
    const double t = std::clamp(d.squaredNorm() == 0.0 ? 0.0
                                : (p - v[0]).dot(d) / d.squaredNorm(), 0.0, 1.0);
    return pair_witness(v[0], fvals[0], v[1], fvals[1], 1.0 - t);
  }
  const size_t n = v.size();
  double best = -std::numeric_limits<double>::max();
  Certificate cert;
  for (size_t j = 1; j + 1 < n; ++j) {
    const auto w = barycentric(p, v[0], v[j], v[j + 1]);
    if (!w) continue;
    const double m = std::min({(*w)[0], (*w)[1], (*w)[2]});
    if (m > best) {
      best = m;
      cert.witnesses = {{v[0], (*w)[0], fvals[0]},
                        {v[j], (*w)[1], fvals[j]},
                        {v[j + 1], (*w)[2], fvals[j + 1]}};
    }
    if (m >= 0) break;
  }
  if (cert.witnesses.empty() || best < -1e-6) {
    size_t bi = 0;
    double bd = std::numeric_limits<double>::max();
    for (size_t i = 0; i < n; ++i) {
      const double d = point_segment_distance(p, v[i], v[(i + 1) % n]);
      if (d < bd) { bd = d; bi = i; }
    }
    const Vec2& a = v[bi];
    const Vec2& b = v[(bi + 1) % n];
    const Vec2 d = b - a;
    const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
    return pair_witness(a, fvals[bi], b, fvals[(bi + 1) % n], 1.0 - t);
  }
  double sum = 0.0;
  for (auto& w : cert.witnesses) { w.weight = std::max(w.weight, 0.0); sum += w.weight; }
  for (auto& w : cert.witnesses) w.weight /= sum;
  return cert;
}

}  // namespace

EnvelopeResult envelope_levelsweep(const ScalarField& field, const GridSpec& grid,
                                   const Tolerances& tol) {
  grid.validate();
  if (grid.dim != 2) throw Error("envelope_levelsweep: dim 2 grid required");
  if (!field.coercivity())
    throw NotCoercive("envelope_levelsweep: coercivity tag required");
  const Eigen::Index n = grid.size();

  Eigen::ArrayXd f(n);
  for (Eigen::Index i = 0; i < n; ++i) f[i] = field.eval(grid.node(i));

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return f[a] < f[b]; });
  {
    std::vector<double> distinct(f.data(), f.data() + n);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 4)
      throw GridTooCoarse("envelope_levelsweep: fewer than 4 distinct levels");
  }

  EnvelopeResult res;
  res.grid = grid;
  res.method = EnvelopeMethod::LevelSweep;
  res.coercivity = field.coercivity();
  res.values = f;  // nodes never captured by a hull keep f
  res.certificates.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    res.certificates[i] = single_witness(grid.node(i), f[i]);

  std::vector<char> assigned(n, 0);
  std::vector<Eigen::Index> pending(order);  // every node, cheapest-first
  std::vector<Vec2> pts;
  pts.reserve(n);
  std::vector<Vec2> prev_hull_verts;

  size_t k = 0;
  while (k < order.size()) {
    const double c = f[order[k]];
    std::vector<Eigen::Index> new_nodes;
    while (k < order.size() && f[order[k]] == c) {
      new_nodes.push_back(order[k]);
      pts.push_back(grid.node(order[k]));
      ++k;
    }
    ConvexBody h = hull(pts, 2, tol);
    const bool hull_changed = h.vertices != prev_hull_verts;
    prev_hull_verts = h.vertices;

    std::vector<double> hull_f;
    hull_f.reserve(h.vertices.size());
    for (const Vec2& v : h.vertices) hull_f.push_back(field.eval(v));

    auto assign = [&](Eigen::Index node) {
      const Vec2 p = grid.node(node);
      Certificate cert = hull_certificate(h, p, hull_f);
      double vmax = -std::numeric_limits<double>::max();
      for (const auto& w : cert.witnesses) vmax = std::max(vmax, w.fvalue);
      res.values[node] = std::min(c, vmax);
      res.certificates[node] = std::move(cert);
      assigned[node] = 1;
    };

    if (hull_changed) {
      std::vector<Eigen::Index> still;
      still.reserve(pending.size());
      for (Eigen::Index node : pending) {
        if (assigned[node]) continue;
        if (locate(h, grid.node(node)) != PointLocation::Exterior) assign(node);
        else still.push_back(node);
      }
      pending.swap(still);
    } else {
      // Hull unchanged: only the nodes entering at this level can be newly
      // captured, and they are all inside the hull.
      for (Eigen::Index node : new_nodes)
        if (!assigned[node]) assign(node);
    }
  }
  return res;
}

EnvelopeResult compute_envelope(const ScalarField& field, const GridSpec& grid,
                                const Tolerances& tol) {
  return grid.dim == 1 ? envelope_1d(field, grid, tol)
                       : envelope_levelsweep(field, grid, tol);
}

CaratheodoryValue envelope_caratheodory(const ScalarField& field, const Vec2& xi,
                                        const std::vector<Vec2>& candidates,
                                        const Tolerances& tol) {
  if (candidates.empty()) throw EmptyInput("envelope_caratheodory: no candidates");
  const int dim = field.dim();
  const size_t m = candidates.size();
  std::vector<double> f(m);
  for (size_t i = 0; i < m; ++i) f[i] = field.eval(candidates[i]);
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return f[a] < f[b]; });

  double scale = 1.0;
  for (const Vec2& c : candidates) scale = std::max(scale, (c - xi).norm());
  const double eps = tol.geom * scale;

  CaratheodoryValue out;
  if (dim == 1) {
    const double x = xi.x();
    double minx = std::numeric_limits<double>::max();
    double maxx = -minx;
    for (size_t r = 0; r < m; ++r) {
      const size_t k = order[r];
      const double xk = candidates[k].x();
      if (std::abs(xk - x) <= eps) {
        out.value = f[k];
        out.certificate = single_witness(candidates[k], f[k]);
        return out;
      }
      minx = std::min(minx, xk);
      maxx = std::max(maxx, xk);
      if (minx <= x + eps && maxx >= x - eps) {
        // First level admitting a bracketing pair; pick the lowest-f
        // partner on each side among the candidates seen so far.
        size_t a = k, b = k;
        double bl = std::numeric_limits<double>::max(), bh = bl;
        for (size_t q = 0; q <= r; ++q) {
          const size_t j = order[q];
          const double xj = candidates[j].x();
          if (xj <= x + eps && f[j] < bl) { bl = f[j]; a = j; }
          if (xj >= x - eps && f[j] < bh) { bh = f[j]; b = j; }
        }
        const double xa = candidates[a].x(), xb = candidates[b].x();
        const double lambda = xb == xa ? 1.0 : (xb - x) / (xb - xa);
        out.value = std::max(f[a], f[b]);
        out.certificate = pair_witness(candidates[a], f[a], candidates[b], f[b],
                                       std::clamp(lambda, 0.0, 1.0));
        return out;
      }
    }
    throw NotInHull("envelope_caratheodory: xi outside the candidate hull");
  }

  // dim 2: ascending scan over the max element of the triple.
  for (size_t r = 0; r < m; ++r) {
    const size_t k = order[r];
    const Vec2& pk = candidates[k];
    if ((pk - xi).norm() <= eps) {
      out.value = f[k];
      out.certificate = single_witness(pk, f[k]);
      return out;
    }
    for (size_t qa = 0; qa <= r; ++qa) {
      const size_t i = order[qa];
      const Vec2& pi = candidates[i];
      if (i == k) continue;
      if (point_segment_distance(xi, pi, pk) <= eps) {
        const Vec2 d = pk - pi;
        const double t = std::clamp(d.squaredNorm() == 0.0 ? 0.0
                                    : (xi - pi).dot(d) / d.squaredNorm(), 0.0, 1.0);
        out.value = std::max(f[i], f[k]);
        out.certificate = pair_witness(pi, f[i], pk, f[k], 1.0 - t);
        return out;
      }
      for (size_t qb = qa + 1; qb <= r; ++qb) {
        const size_t j = order[qb];
        if (j == k) continue;
        const auto w = barycentric(xi, pi, candidates[j], pk);
        if (!w) continue;
        const double wm = std::min({(*w)[0], (*w)[1], (*w)[2]});
        if (wm >= -1e3 * tol.geom) {
          out.value = std::max({f[i], f[j], f[k]});
          Certificate cert;
          cert.witnesses = {{pi, std::max((*w)[0], 0.0), f[i]},
                            {candidates[j], std::max((*w)[1], 0.0), f[j]},
                            {pk, std::max((*w)[2], 0.0), f[k]}};
          double sum = 0.0;
          for (auto& ww : cert.witnesses) sum += ww.weight;
          for (auto& ww : cert.witnesses) ww.weight /= sum;
          out.certificate = std::move(cert);
          return out;
        }
      }
    }
  }
  throw NotInHull("envelope_caratheodory: xi outside the candidate hull");
}

ScalarField lsc_envelope_grid(const ScalarField& field) {
  if (field.kind() != FieldKind::Sampled)
    throw Error("lsc_envelope_grid: sampled field required");
  Eigen::ArrayXd v = field.values();
  for (const auto& [idx, limit] : field.lsc_annotations()) {
    if (idx < 0 || idx >= v.size())
      throw Error("lsc_envelope_grid: bad annotation index");
    v[idx] = std::min(v[idx], limit);
  }
  return ScalarField::sampled(field.grid(), std::move(v), field.coercivity(),
                              field.name());
}

ConvexBody sublevel_body(const EnvelopeResult& env, double v, const Tolerances& tol) {
  const GridSpec& g = env.grid;
  const Eigen::ArrayXd& e = env.values;
  const double cut = v + tol.level;
  std::vector<Vec2> pts;
  auto crossing = [&](Eigen::Index a, Eigen::Index b) {
    const double ea = e[a], eb = e[b];
    const bool ia = ea <= cut, ib = eb <= cut;
    if (ia == ib) return;
    const double t = std::clamp((v - ea) / (eb - ea), 0.0, 1.0);
    pts.push_back(g.node(a) + t * (g.node(b) - g.node(a)));
  };
  if (g.dim == 1) {
    for (Eigen::Index i = 0; i < g.size(); ++i)
      if (e[i] <= cut) pts.push_back(g.node(i));
    for (Eigen::Index i = 0; i + 1 < g.size(); ++i) crossing(i, i + 1);
    if (pts.empty()) throw Error("sublevel_body: empty sublevel set");
    return hull(pts, 1, tol);
  }
  for (int i0 = 0; i0 < g.counts[0]; ++i0)
    for (int i1 = 0; i1 < g.counts[1]; ++i1) {
      const Eigen::Index a = g.flat(i0, i1);
      if (e[a] <= cut) pts.push_back(g.node(a));
      if (i0 + 1 < g.counts[0]) crossing(a, g.flat(i0 + 1, i1));
      if (i1 + 1 < g.counts[1]) crossing(a, g.flat(i0, i1 + 1));
    }
  if (pts.empty()) throw Error("sublevel_body: empty sublevel set");
  return hull(pts, 2, tol);
}

std::vector<Vec2> sublevel_nodes(const ScalarField& field, const GridSpec& grid,
                                 double v, const Tolerances& tol) {
  std::vector<Vec2> pts;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const Vec2 p = grid.node(i);
    if (field.eval(p) <= v + tol.level) pts.push_back(p);
  }
  return pts;
}

}  // namespace supremal
