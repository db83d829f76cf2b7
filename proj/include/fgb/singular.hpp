#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "complex.hpp"

namespace fgb {

enum class PointKind { first, second_admissible };
inline const char* to_string(PointKind k) { return k == PointKind::first ? "first" : "second_admissible"; }

struct TraceSample {
  ParamPoint p;
  Vec2 tangent;   // unit, parameter plane
  Vec2 eta;       // unit null direction, continuous along the trace
  double delta = 0;  // det(tangent, eta) in the working orientation
  PointKind kind = PointKind::first;
  double kappa_s = std::numeric_limits<double>::quiet_NaN();
  double speed = 0;  // |X(tangent)|
  int sgn_dl_eta = 1;
  double s = 0;      // parameter arc length from the trace start
};

struct Marker {
  ParamPoint p;
  double s = 0;
  int order = 0;  // k with delta^(k+1) != 0
  double delta_derivs[3] = {0, 0, 0};
};

struct SingularCurveTrace {
  Side which = Side::phi;
  std::vector<TraceSample> samples;
  bool closed = false;
  int start_boundary = -1, end_boundary = -1;  // subdivision vertex ids at the boundary
  std::vector<Marker> markers;
  double length = 0;
};

// ---------------------------------------------------------------- local curve geometry on {lambda = 0}

struct CurvePoint {
  Vec2 p, T, Tt;  // unit tangent and its arc-length derivative
  double lam = 0;
  Vec2 grad;
};

inline Mat2 side_matrix(const LocalGeometry& g, Side s) { return g.G(s); }

// Null direction: kernel of the frame matrix, pivoting on the larger row.
inline Vec2 null_direction(const Mat2& G, double tol = 1e-10) {
  double scale = std::max({std::fabs(G.a), std::fabs(G.b), std::fabs(G.c), std::fabs(G.d)});
  if (scale < tol) throw GeometryError("totally degenerate point");
  return kernel_direction(G);
}

// Curve data at a point of the level set, tangent oriented along `dir`.
inline CurvePoint curve_point(const LocalGeometry& g, Side side, int orient, Vec2 dir) {
  int k = int(side);
  CurvePoint c;
  c.p = g.p;
  c.lam = orient * g.lam[k];
  c.grad = orient * g.grad[k];
  double gn = norm(c.grad);
  Vec2 N = (1.0 / gn) * c.grad;
  Vec2 T{-N.v, N.u};
  if (dot(T, dir) < 0) T = -T;
  c.T = T;
  double H[3] = {orient * g.hess[k][0], orient * g.hess[k][1], orient * g.hess[k][2]};
  double hTT = H[0] * T.u * T.u + 2 * H[1] * T.u * T.v + H[2] * T.v * T.v;
  c.Tt = (-hTT / gn) * N;
  return c;
}

// Singular curvature measure per unit parameter arc length: sigma det[X(T), D_t X(T), nu] / |X(T)|^2.
inline double singular_density(const LocalGeometry& g, Side side, const CurvePoint& c, int orient) {
  int sigma = dot(c.grad, orient * perp(c.T)) >= 0 ? 1 : -1;
  return sigma * turning_density(g, side, c.T, c.Tt);
}

// Project onto {lambda = 0} along the fixed direction `e` (Newton on the 1D restriction).
inline std::optional<Vec2> project_along(const SideField& F, Vec2 p, Vec2 e, double max_step) {
  double w = 0;
  for (int it = 0; it < 40; ++it) {
    auto [l, gr] = F.lam_grad(p + w * e);
    double dl = dot(gr, e);
    if (dl == 0.0) return std::nullopt;
    double step = l / dl;
    w -= step;
    if (std::fabs(w) > max_step) return std::nullopt;
    if (std::fabs(step) < 1e-15 * std::max(1.0, std::fabs(w)) || std::fabs(l) < 1e-14) return p + w * e;
  }
  auto [l, gr] = F.lam_grad(p + w * e);
  if (std::fabs(l) < 1e-12) return p + w * e;
  return std::nullopt;
}

// Point of the curve segment between two level-set points a, b, graph over the chord at abscissa x in [0, |b-a|].
struct SegmentChart {
  const SideField* F;
  Vec2 a, e, n;
  double len;
  SegmentChart(const SideField& f, Vec2 a_, Vec2 b_) : F(&f), a(a_) {
    Vec2 d = b_ - a_;
    len = norm(d);
    e = (1.0 / len) * d;
    n = perp(e);
  }
  // point on the curve and d(point)/dx
  std::pair<Vec2, Vec2> at(double x) const {
    auto q = project_along(*F, a + x * e, n, len);
    if (!q) throw GeometryError("singular curve segment not a graph over its chord; increase grid");
    auto [l, gr] = F->lam_grad(*q);
    double wn = dot(gr, n);
    Vec2 dq = e + (-dot(gr, e) / wn) * n;
    return {*q, dq};
  }
};

// ---------------------------------------------------------------- trace extraction

struct TraceOptions {
  double step_bound = 0;   // maximal distance between consecutive samples
  double kind_tol = 1e-4;
};

inline double trace_step_bound(const Domain& d, int grid) {
  Vec2 lo = d.box_lo(), hi = d.box_hi();
  return std::max(hi.u - lo.u, hi.v - lo.v) / grid;
}

namespace detail {

inline void fill_sample(const SurfaceDef& s, const SideField& F, TraceSample& t, Vec2 dir) {
  auto g = local_geometry(s, t.p);
  auto c = curve_point(g, F.side, F.orient, dir);
  t.tangent = c.T;
  Mat2 G = g.G(F.side);
  t.speed = norm(g.map(F.side, c.T));
  Vec2 eta = null_direction(G);
  if (F.orient * det(c.T, eta) < 0) eta = -eta;
  t.eta = eta;
  t.delta = F.orient * det(c.T, eta);
  t.sgn_dl_eta = dot(c.grad, eta) >= 0 ? 1 : -1;
  t.kappa_s = t.speed > 1e-8 ? singular_density(g, F.side, c, F.orient) / t.speed : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

// Chains the singular chords of a subdivision into polylines, refines them, and fills per-sample data.
inline std::vector<SingularCurveTrace> extract_traces(const SurfaceDef& s, const SideField& F, const Subdivision& S,
                                                      TraceOptions opt) {
  std::vector<SingularCurveTrace> out;
  if (opt.step_bound <= 0) opt.step_bound = trace_step_bound(*S.grid.d, S.grid.n);
  if (S.chords.empty()) return out;
  std::map<int, std::vector<int>> adj;  // vertex -> chord indices
  for (size_t c = 0; c < S.chords.size(); ++c) {
    adj[S.chords[c].a].push_back(int(c));
    adj[S.chords[c].b].push_back(int(c));
  }
  for (auto& [v, list] : adj) {
    bool on_b = S.verts[v].on_boundary;
    if (list.size() > 2 || (on_b && list.size() != 1) || (!on_b && list.size() != 2))
      throw GeometryError("singular set branches or ends inside the domain (degenerate singular point?)");
  }
  std::vector<char> used(S.chords.size(), 0);
  auto walk = [&](int start) {
    std::vector<int> ids{start};
    int cur = start, prev_chord = -1;
    while (true) {
      int next_chord = -1;
      for (int c : adj[cur])
        if (c != prev_chord && !used[c]) next_chord = c;
      if (next_chord < 0) break;
      used[next_chord] = 1;
      int nxt = S.chords[next_chord].a == cur ? S.chords[next_chord].b : S.chords[next_chord].a;
      ids.push_back(nxt);
      prev_chord = next_chord;
      cur = nxt;
      if (cur == start) break;
    }
    return ids;
  };
  std::vector<std::vector<int>> chains;
  // open chains from boundary vertices, in a fixed order
  for (auto& [v, list] : adj)
    if (S.verts[v].on_boundary && !used[list[0]]) chains.push_back(walk(v));
  for (size_t c = 0; c < S.chords.size(); ++c)
    if (!used[c]) chains.push_back(walk(S.chords[c].a));

  double P = S.grid.periodic ? S.grid.d->period() : 0;
  for (auto& ids : chains) {
    SingularCurveTrace tr;
    tr.which = F.side;
    tr.closed = ids.size() > 2 && ids.front() == ids.back();
    if (!tr.closed) {
      tr.start_boundary = ids.front();
      tr.end_boundary = ids.back();
    }
    std::vector<Vec2> pts;
    for (int id : ids) {
      Vec2 p = S.verts[id].p;
      if (P > 0 && !pts.empty()) {
        double du = p.u - pts.back().u;
        p.u -= P * std::round(du / P);
      }
      pts.push_back(p);
    }
    // refine long segments with projected midpoints
    std::vector<Vec2> fine{pts[0]};
    for (size_t k = 0; k + 1 < pts.size(); ++k) {
      Vec2 a = pts[k], b = pts[k + 1];
      double L = norm(b - a);
      if (L == 0.0) continue;
      int m = int(std::ceil(L / (0.9 * opt.step_bound)));
      if (m > 1) {
        SegmentChart ch(F, a, b);
        for (int q = 1; q < m; ++q) fine.push_back(ch.at(L * q / m).first);
      }
      fine.push_back(b);
    }
    Vec2 dir0 = fine.size() > 1 ? fine[1] - fine[0] : Vec2{1, 0};
    double sacc = 0;
    for (size_t k = 0; k < fine.size(); ++k) {
      TraceSample t;
      t.p = fine[k];
      Vec2 dir = k + 1 < fine.size() ? fine[k + 1] - fine[k] : fine[k] - fine[k - 1];
      if (norm(dir) == 0) dir = dir0;
      if (k > 0) sacc += norm(fine[k] - fine[k - 1]);
      t.s = sacc;
      detail::fill_sample(s, F, t, dir);
      if (!tr.samples.empty()) {
        // keep eta continuous; delta may then change sign
        const auto& prev = tr.samples.back();
        if (dot(t.eta, prev.eta) < 0) {
          t.eta = -t.eta;
          t.delta = -t.delta;
        }
      }
      tr.samples.push_back(t);
    }
    tr.length = sacc;
    // orient eta by the first first-kind sample so that delta > 0 there
    for (auto& smp : tr.samples)
      if (std::fabs(smp.delta) > opt.kind_tol) {
        if (smp.delta < 0)
          for (auto& q : tr.samples) {
            q.eta = -q.eta;
            q.delta = -q.delta;
          }
        break;
      }
    out.push_back(std::move(tr));
  }
  return out;
}

// ---------------------------------------------------------------- kinds and markers

struct KindReport {
  std::vector<Marker> markers;
  std::string error;  // non-empty: hypothesis failure
};

// delta along a trace segment [k, k+1] at chart abscissa x
inline double segment_delta(const SurfaceDef& s, const SideField& F, const SingularCurveTrace& tr, size_t k, double x,
                            Vec2* where = nullptr) {
  SegmentChart ch(F, tr.samples[k].p, tr.samples[k + 1].p);
  auto [q, dq] = ch.at(x);
  auto g = local_geometry(s, q);
  auto c = curve_point(g, F.side, F.orient, dq);
  Vec2 eta = null_direction(g.G(F.side));
  if (dot(eta, tr.samples[k].eta) < 0) eta = -eta;
  if (where) *where = q;
  return F.orient * det(c.T, eta);
}

inline KindReport classify_kinds(const SurfaceDef& s, const SideField& F, SingularCurveTrace& tr,
                                 const TraceOptions& opt) {
  KindReport rep;
  auto& sm = tr.samples;
  if (sm.size() < 2) return rep;
  double max_delta = 0;
  for (auto& smp : sm) max_delta = std::max(max_delta, std::fabs(smp.delta));
  if (max_delta < opt.kind_tol) {
    rep.error = "non-admissible: null direction tangent to the whole singular curve";
    return rep;
  }
  // delta as a function of arc length on segment k (chart abscissa is close to arc length)
  auto add_marker = [&](size_t k, double x) {
    Marker m;
    Vec2 q;
    segment_delta(s, F, tr, k, x, &q);
    m.p = q;
    m.s = sm[k].s + x;
    // derivatives of delta along the curve by central differences on the chart
    double L = norm(sm[k + 1].p - sm[k].p);
    double h = std::min(2e-3, 0.2 * std::max(L, 1e-3));
    auto D = [&](double y) {
      // walk into neighbouring segments when needed
      size_t kk = k;
      double yy = y;
      while (yy < 0 && kk > 0) {
        --kk;
        yy += norm(sm[kk + 1].p - sm[kk].p);
      }
      while (kk + 1 < sm.size() - 1 && yy > norm(sm[kk + 1].p - sm[kk].p)) {
        yy -= norm(sm[kk + 1].p - sm[kk].p);
        ++kk;
      }
      double d = segment_delta(s, F, tr, kk, yy);
      if (dot(sm[kk].eta, sm[k].eta) < 0) d = -d;
      return d;
    };
    double f0 = D(x), fp = D(x + h), fm = D(x - h), fp2 = D(x + 2 * h), fm2 = D(x - 2 * h);
    m.delta_derivs[0] = (fp - fm) / (2 * h);
    m.delta_derivs[1] = (fp - 2 * f0 + fm) / (h * h);
    m.delta_derivs[2] = (fp2 - 2 * fp + 2 * fm - fm2) / (2 * h * h * h);
    const double thr[3] = {1e-3, 1e-2, 1e-1};
    m.order = -1;
    for (int q2 = 0; q2 < 3; ++q2)
      if (std::fabs(m.delta_derivs[q2]) > thr[q2]) {
        m.order = q2;
        break;
      }
    if (m.order < 0) rep.error = "non-admissible peak: delta vanishes to order > 3";
    rep.markers.push_back(m);
  };
  for (size_t k = 0; k + 1 < sm.size(); ++k) {
    double d0 = sm[k].delta, d1 = sm[k + 1].delta;
    double L = norm(sm[k + 1].p - sm[k].p);
    if (L == 0.0) continue;
    if ((d0 < 0) != (d1 < 0)) {
      auto h = [&](double x) { return segment_delta(s, F, tr, k, x); };
      double x = bracket_root(h, 0.0, L, d0, d1, 1e-14);
      add_marker(k, x);
    }
  }
  // touching zeros: a local minimum of |delta| below the kind tolerance without a sign change
  for (size_t k = 1; k + 1 < sm.size(); ++k) {
    double a = std::fabs(sm[k - 1].delta), b = std::fabs(sm[k].delta), c = std::fabs(sm[k + 1].delta);
    if (!(b <= a && b <= c && b < opt.kind_tol)) continue;
    if ((sm[k - 1].delta < 0) != (sm[k + 1].delta < 0)) continue;
    bool near = false;
    for (auto& m : rep.markers)
      if (std::fabs(m.s - sm[k].s) < 2 * opt.step_bound) near = true;
    if (near) continue;
    // golden-section on the two adjacent segments
    double lo = sm[k - 1].s, hi = sm[k + 1].s;
    auto at = [&](double sabs) {
      size_t kk = sabs < sm[k].s ? k - 1 : k;
      return std::fabs(segment_delta(s, F, tr, kk, sabs - sm[kk].s));
    };
    const double gr = 0.6180339887498949;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo), f1 = at(x1), f2 = at(x2);
    for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = at(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = at(x2);
      }
    }
    double xm = 0.5 * (lo + hi);
    if (at(xm) < 1e-8) {
      size_t kk = xm < sm[k].s ? k - 1 : k;
      add_marker(kk, xm - sm[kk].s);
    }
  }
  std::sort(rep.markers.begin(), rep.markers.end(), [](auto& x, auto& y) { return x.s < y.s; });
  for (size_t q = 1; q < rep.markers.size(); ++q)
    if (rep.markers[q].s - rep.markers[q - 1].s < opt.step_bound)
      rep.error = "unresolved peaks: increase grid";
  tr.markers = rep.markers;
  // kind flags: samples within one step of a marker are second kind only at the marker itself
  for (auto& smp : sm) smp.kind = PointKind::first;
  return rep;
}

// ---------------------------------------------------------------- singular curvature

inline double singular_curvature(const SurfaceDef& s, const SideField& F, const TraceSample& t) {
  if (t.speed < 1e-8) throw GeometryError("singular curvature undefined at a second-kind point; use the measure form");
  auto g = local_geometry(s, t.p);
  auto c = curve_point(g, F.side, F.orient, t.tangent);
  return singular_density(g, F.side, c, F.orient) / t.speed;
}

struct MeasureNode {
  ParamPoint p;
  double weight = 0;   // quadrature weight in arc length
  double density = 0;  // kappa_s ds per unit arc length
};

struct MeasureOptions {
  bool reversed = false;      // integrate along the reversed trace
  bool reparametrize = false; // monotone remap of every segment parameter
};

// kappa_s ds along a trace, 5-point Gauss per segment (split at markers), never on the nodes themselves.
inline std::vector<MeasureNode> singular_measure(const SurfaceDef& s, const SideField& F, const SingularCurveTrace& tr,
                                                 MeasureOptions mo = {}) {
  std::vector<MeasureNode> out;
  std::vector<Vec2> pts;
  for (auto& smp : tr.samples) pts.push_back(smp.p);
  std::vector<double> cuts;  // marker arc positions
  for (auto& m : tr.markers) cuts.push_back(m.s);
  std::vector<double> sabs;
  for (auto& smp : tr.samples) sabs.push_back(smp.s);
  if (mo.reversed) {
    std::reverse(pts.begin(), pts.end());
    double L = tr.length;
    for (auto& x : sabs) x = L - x;
    std::reverse(sabs.begin(), sabs.end());
    for (auto& c : cuts) c = L - c;
  }
  const auto& gq = gauss5();
  for (size_t k = 0; k + 1 < pts.size(); ++k) {
    double L = norm(pts[k + 1] - pts[k]);
    if (L == 0.0) continue;
    SegmentChart ch(F, pts[k], pts[k + 1]);
    std::vector<double> br{0.0};
    for (double c : cuts)
      if (c > sabs[k] && c < sabs[k + 1]) br.push_back(std::clamp(c - sabs[k], 0.0, L));
    br.push_back(L);
    std::sort(br.begin(), br.end());
    Vec2 dir = pts[k + 1] - pts[k];
    for (size_t q = 0; q + 1 < br.size(); ++q) {
      double a = br[q], b = br[q + 1];
      if (b <= a) continue;
      for (int r = 0; r < 5; ++r) {
        double xi = 0.5 * (1 + gq.x[r]);  // in (0, 1)
        double w = 0.5 * gq.w[r];
        double x, jac;
        if (mo.reparametrize) {
          // x = a + (b - a) g(xi), g(xi) = xi + 0.3 xi (1 - xi)
          x = a + (b - a) * (xi + 0.3 * xi * (1 - xi));
          jac = (b - a) * (1 + 0.3 * (1 - 2 * xi));
        } else {
          x = a + (b - a) * xi;
          jac = b - a;
        }
        auto [p, dp] = ch.at(x);
        auto g = local_geometry(s, p);
        auto c = curve_point(g, F.side, F.orient, dir);
        double speed = norm(dp);
        out.push_back({p, w * jac * speed, singular_density(g, F.side, c, F.orient)});
      }
    }
  }
  for (auto& m : out)
    if (!std::isfinite(m.density) || std::fabs(m.density) > 1e6)
      throw GeometryError("measure blow-up: likely non-admissible peak");
  return out;
}

inline double integrate(const std::vector<MeasureNode>& nodes) {
  std::vector<double> x;
  x.reserve(nodes.size());
  for (auto& n : nodes) x.push_back(n.weight * n.density);
  return pairwise_sum(x);
}

// ---------------------------------------------------------------- boundary singular points

struct BoundarySingularPoint {
  int vertex = -1;
  int comp = -1;
  double tau = 0;
  ParamPoint p;
  Vec2 trace_tangent, boundary_tangent, eta;
  double angle = 0;       // between trace and boundary, radians in [0, pi/2]
  double null_angle = 0;  // between null direction and boundary
  bool transversal = true, null_parallel = false;
  PointKind kind = PointKind::first;
};

struct TransversalityReport {
  std::vector<BoundarySingularPoint> points;
  bool pass = true;
  double margin = 1e-3;
};

inline TransversalityReport transversality_check(const SurfaceDef& s, const SideField& F, const Subdivision& S,
                                                 double margin = 1e-3) {
  TransversalityReport r;
  r.margin = margin;
  auto bc = S.grid.d->boundary();
  for (size_t c = 0; c < S.boundary_sigma.size(); ++c)
    for (int id : S.boundary_sigma[c]) {
      BoundarySingularPoint b;
      b.vertex = id;
      b.comp = int(c);
      b.tau = S.verts[id].tau;
      b.p = S.verts[id].p;
      auto g = local_geometry(s, b.p);
      Vec2 gr = F.orient * g.grad[int(F.side)];
      b.trace_tangent = normalized(perp(gr));
      b.boundary_tangent = normalized(F.orient * bc[c].d1(b.tau));
      b.eta = null_direction(g.G(F.side));
      b.angle = std::asin(std::min(1.0, std::fabs(det(b.trace_tangent, b.boundary_tangent))));
      b.null_angle = std::asin(std::min(1.0, std::fabs(det(b.eta, b.boundary_tangent))));
      b.transversal = b.angle > margin;
      b.null_parallel = b.null_angle < margin;
      double delta = std::fabs(det(b.trace_tangent, b.eta));
      b.kind = delta > 1e-4 ? PointKind::first : PointKind::second_admissible;
      if (!b.transversal) r.pass = false;
      r.points.push_back(b);
    }
  return r;
}

}  // namespace fgb
