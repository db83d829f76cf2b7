#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "singular.hpp"

namespace fgb {

enum class SignClass { positive, null, negative };
inline const char* to_string(SignClass c) {
  return c == SignClass::positive ? "positive" : (c == SignClass::null ? "null" : "negative");
}

struct AngleEstimate {
  double plus = 0, minus = 0;       // extrapolated
  double raw_plus[3] = {0, 0, 0};   // at eps, eps/2, eps/4
  double raw_minus[3] = {0, 0, 0};
  double spread = 0;
  std::string error;
};

struct SingularPointRecord {
  ParamPoint p;
  Side which = Side::phi;
  bool boundary = false;
  PointKind kind = PointKind::first;
  int order = -1;
  SignClass sign = SignClass::null;
  double alpha_plus = 0, alpha_minus = 0;
  AngleEstimate estimate;
  // boundary points
  int comp = -1;
  double tau = 0, transversal_angle = 0;
  bool null_parallel = false;
};

namespace detail {

template <class Arg>
double turn(const Arg& arg, double a, double b, double fa, double fb, int depth = 0) {
  double d = std::remainder(fb - fa, 2 * std::numbers::pi);
  if (std::fabs(d) < 0.25 || depth > 40) return d;
  double m = 0.5 * (a + b), fm = arg(m);
  return turn(arg, a, m, fa, fm, depth + 1) + turn(arg, m, b, fm, fb, depth + 1);
}

// angle sums on the + and - sides of the circle of radius eps at p (restricted to the domain)
inline std::pair<double, double> circle_angles(const SurfaceDef& s, const SideField& F, Vec2 p, double eps) {
  const double two_pi = 2 * std::numbers::pi;
  auto J0 = eval_jet<0>(s, p);
  V3 X0 = value(F.side == Side::phi ? J0.f : J0.nu);
  auto g = local_geometry(s, p);
  auto q = [&](double t) { return p + eps * Vec2{std::cos(t), std::sin(t)}; };
  auto arg = [&](double t) {
    auto J = eval_jet<0>(s, q(t));
    V3 c = value(F.side == Side::phi ? J.f : J.nu) - X0;
    return std::atan2(dot(c, g.e2), dot(c, g.e1));
  };
  const Domain& dom = s.domain;
  auto lam = [&](double t) { return F.lam(q(t)); };
  auto dist = [&](double t) { return dom.signed_distance(q(t)); };
  std::vector<double> cuts;
  const int N = 720;
  // start off any symmetry axis of the chart; the closing sample reuses the first values
  const double t_start = 0.1234567;
  double l_first = lam(t_start), d_first = dist(t_start);
  double l0 = l_first, d0 = d_first;
  for (int k = 1; k <= N; ++k) {
    double t0 = t_start + two_pi * (k - 1) / N, t1 = t_start + two_pi * k / N;
    double l1 = k == N ? l_first : lam(t1), d1 = k == N ? d_first : dist(t1);
    if (sign_class(l0) != sign_class(l1)) cuts.push_back(bracket_root(lam, t0, t1, l0, l1, 1e-14));
    if ((d0 > 0) != (d1 > 0)) cuts.push_back(bracket_root(dist, t0, t1, d0, d1, 1e-14));
    l0 = l1;
    d0 = d1;
  }
  std::sort(cuts.begin(), cuts.end());
  if (cuts.empty()) cuts.push_back(t_start);
  double plus = 0, minus = 0;
  for (size_t k = 0; k < cuts.size(); ++k) {
    double a = cuts[k], b = k + 1 < cuts.size() ? cuts[k + 1] : cuts[0] + two_pi;
    if (b - a < 1e-14) continue;
    double mid = 0.5 * (a + b);
    if (dom.signed_distance(q(mid)) <= 0) continue;
    int cls = sign_class(lam(mid));
    int pieces = std::max(8, int(256 * (b - a) / two_pi));
    double net = 0, fa = arg(a);
    for (int r = 1; r <= pieces; ++r) {
      double x0 = a + (b - a) * (r - 1) / pieces, x1 = a + (b - a) * r / pieces;
      double fb = arg(x1);
      net += turn(arg, x0, x1, fa, fb);
      fa = fb;
    }
    (cls > 0 ? plus : minus) += std::fabs(net);
  }
  return {plus, minus};
}

}  // namespace detail

// Interior angle sums at p measured through the bundle map, extrapolated eps -> 0 from {eps, eps/2, eps/4}.
inline AngleEstimate sector_angle(const SurfaceDef& s, const SideField& F, Vec2 p, double eps0) {
  AngleEstimate e;
  for (int k = 0; k < 3; ++k) {
    auto [a, b] = detail::circle_angles(s, F, p, eps0 / (1 << k));
    e.raw_plus[k] = a;
    e.raw_minus[k] = b;
  }
  auto rich = [](const double* x) { return (8 * x[2] - 6 * x[1] + x[0]) / 3; };
  e.plus = rich(e.raw_plus);
  e.minus = rich(e.raw_minus);
  for (const double* x : {e.raw_plus, e.raw_minus}) {
    double lo = std::min({x[0], x[1], x[2]}), hi = std::max({x[0], x[1], x[2]});
    e.spread = std::max(e.spread, hi - lo);
    bool monotone = (x[1] - x[0]) * (x[2] - x[1]) >= 0;
    if (!monotone && hi - lo > 1e-4) e.error = "angle did not converge; refine angle_eps";
  }
  if (e.spread > 0.1) e.error = "angle did not converge; refine angle_eps";
  return e;
}

// ---------------------------------------------------------------- one bundle side

struct RegionTopology {
  Side which = Side::phi;
  int orient = 1;
  bool degenerate = false;
  Subdivision complex;
  std::vector<SingularCurveTrace> traces;
  TransversalityReport transversality;
  std::vector<SingularPointRecord> records;
  long chi_M = 0, chi_plus = 0, chi_minus = 0, chi_sigma = 0;  // closed regions
  int S_plus = 0, S_minus = 0, S_null = 0;                     // interior second kind
  int B_plus = 0, B_minus = 0, B_null = 0;                     // on the boundary
  double null_sum = 0;                                         // sum over null boundary points of 2 alpha - pi
  std::vector<std::string> hypothesis_failures;
  double angle_eps = 0.05;

  bool empty() const { return traces.empty() && records.empty(); }
  int boundary_count() const { return B_plus + B_minus + B_null; }
  long chi_c_plus() const { return chi_plus - chi_sigma; }
  long chi_c_minus() const { return chi_minus - chi_sigma; }
  // closed-region inclusion-exclusion and the printed half-count form
  bool inclusion_exclusion() const { return chi_M == chi_plus + chi_minus - chi_sigma; }
  double printed_form_rhs() const { return chi_plus + chi_minus + 0.5 * boundary_count(); }
};

struct TopologyOptions {
  int grid = 256;
  double angle_eps = 0.05;
  double snap_tol = 0.2;
};

inline RegionTopology analyze_side(const SurfaceDef& s, Side side, int orient, const TopologyOptions& opt) {
  const double pi = std::numbers::pi;
  RegionTopology R;
  R.which = side;
  R.orient = orient;
  R.angle_eps = opt.angle_eps;
  SideField F{&s, side, orient};
  R.complex = build_subdivision(s.domain, F, opt.grid);
  const auto& S = R.complex;
  R.chi_M = S.all.chi();
  R.chi_plus = S.plus.chi();
  R.chi_minus = S.minus.chi();
  R.chi_sigma = S.sigma.chi();
  if (S.degenerate) {
    R.degenerate = true;
    R.hypothesis_failures.push_back(side == Side::phi ? "λ ≡ 0 (φ degenerate everywhere)"
                                                      : "λ⋆ ≡ 0 (ψ degenerate everywhere)");
    return R;
  }
  if (s.domain.kind == DomainKind::rectangle && !S.chords.empty())
    R.hypothesis_failures.push_back("singular set meets a rectangle domain (corners carry no angle terms)");

  TraceOptions topt;
  topt.step_bound = trace_step_bound(s.domain, opt.grid);
  try {
    R.traces = extract_traces(s, F, S, topt);
  } catch (const GeometryError& e) {
    R.hypothesis_failures.push_back(e.what());
    return R;
  }
  for (auto& tr : R.traces) {
    auto k = classify_kinds(s, F, tr, topt);
    if (!k.error.empty()) {
      R.hypothesis_failures.push_back(k.error);
      continue;
    }
    for (auto& m : tr.markers) {
      SingularPointRecord r;
      r.p = m.p;
      r.which = side;
      r.kind = PointKind::second_admissible;
      r.order = m.order;
      r.estimate = sector_angle(s, F, m.p, opt.angle_eps);
      r.alpha_plus = r.estimate.plus;
      r.alpha_minus = r.estimate.minus;
      if (!r.estimate.error.empty()) R.hypothesis_failures.push_back(r.estimate.error);
      double d = r.alpha_plus - r.alpha_minus;
      if (std::fabs(d - 2 * pi) < opt.snap_tol) {
        r.sign = SignClass::positive;
        ++R.S_plus;
      } else if (std::fabs(d + 2 * pi) < opt.snap_tol) {
        r.sign = SignClass::negative;
        ++R.S_minus;
      } else if (std::fabs(d) < opt.snap_tol) {
        r.sign = SignClass::null;
        ++R.S_null;
      } else {
        R.hypothesis_failures.push_back("angle classification ambiguous");
      }
      R.records.push_back(r);
    }
  }

  R.transversality = transversality_check(s, F, S);
  if (!R.transversality.pass) R.hypothesis_failures.push_back("singular set not transversal to the boundary");
  auto bc = s.domain.boundary();
  for (auto& b : R.transversality.points) {
    SingularPointRecord r;
    r.p = b.p;
    r.which = side;
    r.boundary = true;
    r.kind = b.kind;
    r.comp = b.comp;
    r.tau = b.tau;
    r.transversal_angle = b.angle;
    r.null_parallel = b.null_parallel;
    r.estimate = sector_angle(s, F, b.p, opt.angle_eps);
    if (b.null_parallel) {
      if (!r.estimate.error.empty()) R.hypothesis_failures.push_back(r.estimate.error);
      r.sign = SignClass::null;
      r.alpha_plus = r.alpha_minus = 0.5 * (r.estimate.plus + r.estimate.minus);
      R.null_sum += 2 * r.alpha_plus - pi;
      ++R.B_null;
    } else {
      // the sector holding the inward null ray collapses to a straight angle, the other to zero
      Vec2 inward = perp(bc[b.comp].d1(b.tau));
      Vec2 eta = dot(b.eta, inward) > 0 ? b.eta : -b.eta;
      auto [l, gr] = F.lam_grad(b.p);
      bool into_plus = dot(gr, eta) > 0;
      r.alpha_plus = into_plus ? pi : 0;
      r.alpha_minus = into_plus ? 0 : pi;
      r.sign = into_plus ? SignClass::positive : SignClass::negative;
      double d = r.estimate.plus - r.estimate.minus;
      if (std::fabs(d - (into_plus ? pi : -pi)) > opt.snap_tol)
        R.hypothesis_failures.push_back("angle classification ambiguous");
      ++(into_plus ? R.B_plus : R.B_minus);
    }
    R.records.push_back(r);
  }
  return R;
}

}  // namespace fgb
