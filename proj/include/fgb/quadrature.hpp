#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "topology.hpp"

namespace fgb {

// ---------------------------------------------------------------- area

struct AreaIntegrals {
  double total = 0;        // integral of d(mu) over M
  double minus[2] = {0, 0};  // over M- of phi, of psi
  double plus[2] = {0, 0};
  int cells = 0;
  // integral of K dA for a side: over M+ minus over M-
  double K_dA(Side s) const { return plus[int(s)] - minus[int(s)]; }
};

namespace detail {

// n cells on [a, b] with interior lines nudged off rational positions
inline std::vector<double> nudged_lines(double a, double b, int n) {
  std::vector<double> x(n + 1);
  for (int k = 0; k <= n; ++k) {
    double s = (k + 0.1234567 * std::sin(std::numbers::pi * k / n)) / n;
    x[k] = a + (b - a) * s;
  }
  x[0] = a;
  x[n] = b;
  return x;
}

// sign changes of h on [a, b] located by sampling and bracketing
template <class H>
void roots_on(const H& h, double a, double b, int samples, std::vector<double>& out) {
  double x0 = a, h0 = h(a);
  for (int k = 1; k <= samples; ++k) {
    double x1 = a + (b - a) * k / samples, h1 = h(x1);
    if (sign_class(h0) != sign_class(h1)) out.push_back(bracket_root(h, x0, x1, h0, h1, 1e-15));
    x0 = x1;
    h0 = h1;
  }
}

}  // namespace detail

struct AreaOptions {
  int grid = 256;
  int orient = 1;
};

// Integrals of the connection 2-form over M and over the negative regions of both sides.
inline AreaIntegrals area_integrals(const SurfaceDef& s, const AreaOptions& opt) {
  const Domain& d = s.domain;
  const double two_pi = 2 * std::numbers::pi;
  int nx, ny;
  std::vector<double> X, Y;
  bool polar = d.kind == DomainKind::disk || d.kind == DomainKind::annulus;
  int base = std::max(4, opt.grid / 16);
  if (polar) {
    nx = base;
    ny = 4 * base;
    X = detail::nudged_lines(d.kind == DomainKind::annulus ? d.r_inner : 0.0, d.r_outer, nx);
    double t0 = 0.1234567 * two_pi / ny;
    Y.resize(ny + 1);
    for (int k = 0; k <= ny; ++k) Y[k] = t0 + two_pi * k / ny;
  } else {
    nx = d.periodic() ? 4 * base : base;
    ny = base;
    X = d.periodic() ? std::vector<double>() : detail::nudged_lines(d.lo.u, d.hi.u, nx);
    if (d.periodic()) {
      X.resize(nx + 1);
      double t0 = 0.1234567 * d.period() / nx;
      for (int k = 0; k <= nx; ++k) X[k] = d.lo.u + t0 + d.period() * k / nx;
    }
    Y = detail::nudged_lines(d.lo.v, d.hi.v, ny);
  }
  auto chart = [&](double x, double y) -> Vec2 {
    if (polar) return d.center + x * Vec2{std::cos(y), std::sin(y)};
    return {x, y};
  };
  auto jac = [&](double x) { return polar ? x : 1.0; };
  int ncell = nx * ny;
  std::vector<std::array<double, 5>> res(ncell);
  const auto& gq = gauss5();
  const int o = opt.orient;
  parallel_for(size_t(ncell), [&](size_t c) {
    int i = int(c) % nx, j = int(c) / nx;
    double x0 = X[i], x1 = X[i + 1], y0 = Y[j], y1 = Y[j + 1];
    // the inner direction is the one across which lambda changes most
    auto lp = [&](double x, double y) { return lambda_pair(s, chart(x, y)); };
    auto c00 = lp(x0, y0), c10 = lp(x1, y0), c01 = lp(x0, y1), c11 = lp(x1, y1);
    auto change = [](double a, double b, double cc, double dd) { return std::fabs(a - b) + std::fabs(cc - dd); };
    double cx = change(c00.first, c10.first, c01.first, c11.first) + change(c00.second, c10.second, c01.second, c11.second);
    double cy = change(c00.first, c01.first, c10.first, c11.first) + change(c00.second, c01.second, c10.second, c11.second);
    bool inner_x = cx > cy;
    double a0 = inner_x ? y0 : x0, a1 = inner_x ? y1 : x1;  // outer
    double b0 = inner_x ? x0 : y0, b1 = inner_x ? x1 : y1;  // inner
    auto pt = [&](double oc, double ic) { return inner_x ? chart(ic, oc) : chart(oc, ic); };
    auto xr = [&](double oc, double ic) { return inner_x ? ic : oc; };
    std::vector<double> ob{a0, a1};
    for (double side : {b0, b1})
      for (int which = 0; which < 2; ++which) {
        auto h = [&](double t) {
          auto l = lambda_pair(s, pt(t, side));
          return which == 0 ? l.first : l.second;
        };
        detail::roots_on(h, a0, a1, 8, ob);
      }
    std::sort(ob.begin(), ob.end());
    std::array<double, 5> acc{0, 0, 0, 0, 0};  // total, minus phi, minus psi, plus phi, plus psi
    for (size_t q = 0; q + 1 < ob.size(); ++q) {
      double oa = ob[q], obb = ob[q + 1];
      if (obb - oa <= 0) continue;
      for (int k = 0; k < 5; ++k) {
        double oc = 0.5 * (oa + obb) + 0.5 * (obb - oa) * gq.x[k];
        double ow = 0.5 * (obb - oa) * gq.w[k];
        std::vector<double> ib{b0, b1};
        for (int which = 0; which < 2; ++which) {
          auto h = [&](double t) {
            auto l = lambda_pair(s, pt(oc, t));
            return which == 0 ? l.first : l.second;
          };
          detail::roots_on(h, b0, b1, 8, ib);
        }
        std::sort(ib.begin(), ib.end());
        for (size_t r = 0; r + 1 < ib.size(); ++r) {
          double ia = ib[r], ibb = ib[r + 1];
          if (ibb - ia <= 0) continue;
          auto mid = lambda_pair(s, pt(oc, 0.5 * (ia + ibb)));
          int cp = sign_class(o * mid.first), cs = sign_class(o * mid.second);
          double sum = 0;
          for (int m = 0; m < 5; ++m) {
            double ic = 0.5 * (ia + ibb) + 0.5 * (ibb - ia) * gq.x[m];
            double iw = 0.5 * (ibb - ia) * gq.w[m];
            sum += iw * area_sample(s, pt(oc, ic)).dmu * jac(xr(oc, ic));
          }
          double v = o * ow * sum;
          acc[0] += v;
          acc[cp > 0 ? 3 : 1] += v;
          acc[cs > 0 ? 4 : 2] += v;
        }
      }
    }
    res[c] = acc;
  });
  AreaIntegrals A;
  A.cells = ncell;
  std::vector<double> col(ncell);
  double* dst[5] = {&A.total, &A.minus[0], &A.minus[1], &A.plus[0], &A.plus[1]};
  for (int k = 0; k < 5; ++k) {
    for (int c = 0; c < ncell; ++c) col[c] = res[c][k];
    *dst[k] = pairwise_sum(col);
  }
  return A;
}

// ---------------------------------------------------------------- boundary geodesic curvature

struct BoundaryArc {
  int comp = 0;
  double t0 = 0, t1 = 0;  // boundary parameter, t1 > t0 (may pass the period)
  int cls = 1;
  double integral = 0;
};

struct BoundaryMeasure {
  double total = 0, plus = 0, minus = 0;
  std::vector<BoundaryArc> arcs;
  double max_crosscheck = 0;  // direct density vs frame form, node-wise
  double corner_turning = 0;
  int nodes = 0;
};

struct BoundaryOptions {
  int grid = 256;
  int orient = 1;
  int grading_levels = 24;
};

// kappa_g ds per unit boundary parameter at tau (direct definition), and the frame-form value
inline std::pair<double, double> geodesic_density(const SurfaceDef& s, Side side, int orient, const BoundaryCurve& c,
                                                  double tau) {
  Vec2 p = c.point(tau);
  Vec2 w = orient * c.d1(tau), a = c.d2(tau);
  auto g = local_geometry(s, p);
  double sg = orient * g.lam[int(side)] >= 0 ? 1.0 : -1.0;
  return {sg * turning_density(g, side, w, a), -sg * frame_form_density(g, side, w, a)};
}

inline BoundaryMeasure boundary_measure(const SurfaceDef& s, const RegionTopology& R, const BoundaryOptions& opt) {
  BoundaryMeasure B;
  auto curves = s.domain.boundary();
  const auto& gq = gauss5();
  SideField F{&s, R.which, opt.orient};
  int Nseg = std::max(16, opt.grid / 2);
  for (size_t c = 0; c < curves.size(); ++c) {
    const auto& bc = curves[c];
    std::vector<double> cuts;
    for (auto& r : R.records)
      if (r.boundary && r.comp == int(c)) cuts.push_back(r.tau);
    std::sort(cuts.begin(), cuts.end());
    bool singular_ends = !cuts.empty();
    if (cuts.empty()) cuts.push_back(0.0);
    for (size_t k = 0; k < cuts.size(); ++k) {
      BoundaryArc arc;
      arc.comp = int(c);
      arc.t0 = cuts[k];
      arc.t1 = k + 1 < cuts.size() ? cuts[k + 1] : cuts[0] + bc.period;
      double L = arc.t1 - arc.t0;
      if (L <= 0) continue;
      arc.cls = sign_class(F.lam(bc.point(arc.t0 + 0.5 * L)));
      // segments, graded geometrically toward singular endpoints
      int m = std::max(4, int(std::ceil(Nseg * L / bc.period)));
      std::vector<double> br;
      double h = L / m;
      if (singular_ends) {
        br.push_back(arc.t0);
        for (int q = opt.grading_levels; q >= 1; --q) br.push_back(arc.t0 + h * std::ldexp(1.0, -q));
        for (int q = 1; q < m; ++q) br.push_back(arc.t0 + h * q);
        for (int q = 1; q <= opt.grading_levels; ++q) br.push_back(arc.t1 - h * std::ldexp(1.0, -q));
        br.push_back(arc.t1);
      } else {
        for (int q = 0; q <= m; ++q) br.push_back(arc.t0 + h * q);
      }
      // polygon corners split segments too
      for (double t : bc.breaks())
        for (double shift : {0.0, bc.period})
          if (t + shift > arc.t0 && t + shift < arc.t1) br.push_back(t + shift);
      std::sort(br.begin(), br.end());
      std::vector<double> vals;
      vals.reserve(5 * br.size());
      for (size_t q = 0; q + 1 < br.size(); ++q) {
        double a = br[q], b = br[q + 1];
        if (b <= a) continue;
        for (int r = 0; r < 5; ++r) {
          double t = 0.5 * (a + b) + 0.5 * (b - a) * gq.x[r];
          auto [direct, frame] = geodesic_density(s, R.which, opt.orient, bc, t);
          B.max_crosscheck = std::max(B.max_crosscheck, std::fabs(direct - frame) / std::max(1.0, std::fabs(direct)));
          vals.push_back(0.5 * (b - a) * gq.w[r] * direct);
          ++B.nodes;
        }
      }
      arc.integral = pairwise_sum(vals);
      B.arcs.push_back(arc);
    }
    // exterior turning at polygon corners, measured through the bundle map
    for (double t : bc.breaks()) {
      Vec2 p = bc.point(t);
      double eps = 1e-9 * bc.period;
      Vec2 din = bc.d1(t - eps), dout = bc.d1(t + eps);
      auto g = local_geometry(s, p);
      V3 xi = g.map(R.which, opt.orient * din), xo = g.map(R.which, opt.orient * dout);
      double ai = std::atan2(dot(xi, g.e2), dot(xi, g.e1)), ao = std::atan2(dot(xo, g.e2), dot(xo, g.e1));
      double turn = std::remainder(ao - ai, 2 * std::numbers::pi);
      if (opt.orient < 0) turn = -turn;
      double sg = F.lam(p) >= 0 ? 1.0 : -1.0;
      B.corner_turning += sg * turn;
      BoundaryArc corner;
      corner.comp = int(c);
      corner.t0 = corner.t1 = t;
      corner.cls = sign_class(F.lam(p));
      corner.integral = sg * turn;
      B.arcs.push_back(corner);
    }
  }
  for (auto& a : B.arcs) {
    B.total += a.integral;
    (a.cls > 0 ? B.plus : B.minus) += a.integral;
  }
  return B;
}

}  // namespace fgb
