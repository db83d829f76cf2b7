#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadrature.hpp"

namespace fgb {

enum class Verdict { verified, not_applicable, failed };
inline const char* to_string(Verdict v) {
  return v == Verdict::verified ? "verified" : (v == Verdict::not_applicable ? "not_applicable" : "failed");
}

using Terms = std::vector<std::pair<std::string, double>>;

struct FormulaReport {
  std::string id;
  Verdict verdict = Verdict::not_applicable;
  std::vector<std::string> reasons;
  Terms lhs_terms, rhs_terms;
  double lhs = 0, rhs = 0, residual = 0, tol = 0;
  int grid = 0;
  double angle_eps = 0;

  double term(const std::string& name) const {
    for (auto* t : {&lhs_terms, &rhs_terms})
      for (auto& [k, v] : *t)
        if (k == name) return v;
    throw std::out_of_range("no term " + name + " in " + id);
  }
};

struct VerifyOptions {
  int grid = 256;
  double angle_eps = 0.05;
  double snap_tol = 0.2;
  int orient = 1;
  double tol_smooth = 1e-6;
  double tol_singular = 1e-2;
};

// ---------------------------------------------------------------- per-side data

struct SideAnalysis {
  Side which = Side::phi;
  RegionTopology topo;
  BoundaryMeasure boundary;
  double kappa_s = 0;  // integral of the singular curvature measure
  std::vector<std::string> reasons;

  bool applicable() const { return reasons.empty(); }
  bool singular() const { return !topo.traces.empty() || !topo.complex.chords.empty() || !topo.records.empty(); }
};

struct Analysis {
  std::string surface;
  VerifyOptions opt;
  AreaIntegrals area;
  SideAnalysis side[2];

  const SideAnalysis& phi() const { return side[0]; }
  const SideAnalysis& psi() const { return side[1]; }
};

inline SideAnalysis analyze_bundle_side(const SurfaceDef& s, Side which, const VerifyOptions& opt) {
  SideAnalysis a;
  a.which = which;
  a.topo = analyze_side(s, which, opt.orient, {opt.grid, opt.angle_eps, opt.snap_tol});
  a.reasons = a.topo.hypothesis_failures;
  if (a.topo.degenerate) return a;
  SideField F{&s, which, opt.orient};
  try {
    std::vector<double> parts;
    for (auto& tr : a.topo.traces) parts.push_back(integrate(singular_measure(s, F, tr)));
    a.kappa_s = pairwise_sum(parts);
  } catch (const GeometryError& e) {
    a.reasons.push_back(e.what());
  }
  a.boundary = boundary_measure(s, a.topo, {opt.grid, opt.orient});
  if (a.boundary.max_crosscheck > 1e-6)
    a.reasons.push_back("geodesic curvature cross-check mismatch (frame-continuation fault)");
  return a;
}

inline Analysis analyze(const SurfaceDef& s, const VerifyOptions& opt = {}) {
  Analysis A;
  A.surface = s.name;
  A.opt = opt;
  A.area = area_integrals(s, {opt.grid, opt.orient});
  A.side[0] = analyze_bundle_side(s, Side::phi, opt);
  A.side[1] = analyze_bundle_side(s, Side::psi, opt);
  return A;
}

// ---------------------------------------------------------------- assembly

namespace detail {

inline double sum_terms(const Terms& t) {
  double x = 0;
  for (auto& [k, v] : t) x += v;
  return x;
}

struct Builder {
  const Analysis& A;

  FormulaReport make(const std::string& id, Terms lhs, Terms rhs, bool singular,
                     std::vector<std::string> reasons = {}) const {
    FormulaReport r;
    r.id = id;
    r.grid = A.opt.grid;
    r.angle_eps = A.opt.angle_eps;
    r.tol = singular ? A.opt.tol_singular : A.opt.tol_smooth;
    r.reasons = std::move(reasons);
    r.lhs_terms = std::move(lhs);
    r.rhs_terms = std::move(rhs);
    r.lhs = sum_terms(r.lhs_terms);
    r.rhs = sum_terms(r.rhs_terms);
    r.residual = r.lhs - r.rhs;
    if (!r.reasons.empty())
      r.verdict = Verdict::not_applicable;
    else
      r.verdict = std::fabs(r.residual) <= r.tol ? Verdict::verified : Verdict::failed;
    return r;
  }
  FormulaReport not_applicable(const std::string& id, std::vector<std::string> reasons) const {
    return make(id, {}, {}, true, std::move(reasons));
  }
};

// symbol pieces for one side: unstarred for phi, starred for psi
struct Sym {
  std::string st;  // star suffix
  explicit Sym(Side s) : st(s == Side::phi ? "" : "⋆") {}
  std::string Sigma() const { return "Σ" + st; }
  std::string S() const { return "2∫_" + Sigma() + " κ" + st + "_s ds" + st; }
  std::string G() const { return "∫_∂M κ" + st + "_g ds" + st; }
  std::string Gp() const { return "∫_∂M∩M" + st + "⁺ κ" + st + "_g ds" + st; }
  std::string Gm() const { return "∫_∂M∩M" + st + "⁻ κ" + st + "_g ds" + st; }
  std::string KdA() const { return "∫_M K" + st + " dA" + st; }
  std::string KdAhat() const { return "∫_M K" + st + " dÂ" + st; }
  std::string KdAminus() const { return "2∫_M" + st + "⁻ K" + st + " dÂ" + st; }
  std::string null_sum() const { return "Σ_(" + Sigma() + "∩∂M)^null (2α" + st + "⁺−π)"; }
  std::string chi_diff() const { return "2π(χ(M" + st + "⁺)−χ(M" + st + "⁻))"; }
  std::string S_diff() const { return "2π(#S" + st + "⁺−#S" + st + "⁻)"; }
  std::string B_diff() const { return "π(#(" + Sigma() + "∩∂M)⁺−#(" + Sigma() + "∩∂M)⁻)"; }
};

inline std::vector<std::string> side_reasons(const SideAnalysis& a) {
  std::vector<std::string> r;
  for (auto& x : a.reasons) r.push_back(std::string(to_string(a.which)) + ": " + x);
  return r;
}

}  // namespace detail

// Gauss-Bonnet pair for one bundle side; ids carry the caller's numbering.
inline std::vector<FormulaReport> side_formulas(const Analysis& A, Side which, const std::string& id1,
                                                const std::string& id2) {
  using detail::Sym;
  detail::Builder b{A};
  const auto& d = A.side[int(which)];
  if (!d.applicable()) return {b.not_applicable(id1, detail::side_reasons(d)), b.not_applicable(id2, detail::side_reasons(d))};
  const double pi = std::numbers::pi;
  const auto& T = d.topo;
  const auto& B = d.boundary;
  Sym y(which);
  double A_hat = A.area.total, A_minus = A.area.minus[int(which)];
  bool sing = d.singular();
  auto f1 = b.make(id1, {{y.S(), 2 * d.kappa_s}, {y.G(), B.total}, {y.KdA(), A_hat - 2 * A_minus}},
                   {{"2πχ(M)", 2 * pi * T.chi_M}, {y.null_sum(), T.null_sum}}, sing);
  auto f2 = b.make(id2, {{y.Gp(), B.plus}, {"−" + y.Gm(), -B.minus}, {y.KdAhat(), A_hat}},
                   {{y.chi_diff(), 2 * pi * (T.chi_plus - T.chi_minus)},
                    {y.S_diff(), 2 * pi * (T.S_plus - T.S_minus)},
                    {y.B_diff(), pi * (T.B_plus - T.B_minus)}},
                   sing);
  return {f1, f2};
}

inline std::vector<FormulaReport> eval_prop_2_16(const Analysis& A, Side which = Side::phi) {
  std::string tag = which == Side::phi ? "" : "[psi]";
  return side_formulas(A, which, "Prop2.16(1)" + tag, "Prop2.16(2)" + tag);
}

inline std::vector<FormulaReport> eval_thm_3_5(const Analysis& A) {
  auto r = side_formulas(A, Side::phi, "Thm3.5(1)", "Thm3.5(2)");
  auto s = side_formulas(A, Side::psi, "Thm3.5(3)", "Thm3.5(4)");
  r.insert(r.end(), s.begin(), s.end());
  return r;
}

namespace detail {

inline std::vector<std::string> both_reasons(const Analysis& A) {
  auto r = side_reasons(A.phi());
  auto s = side_reasons(A.psi());
  r.insert(r.end(), s.begin(), s.end());
  return r;
}

// integral of K dA-hat from one side's boundary terms and counts
inline Terms khat_from_boundary(const SideAnalysis& d) {
  const double pi = std::numbers::pi;
  Sym y(d.which);
  const auto& T = d.topo;
  return {{"−" + y.Gp(), -d.boundary.plus},
          {y.Gm(), d.boundary.minus},
          {y.chi_diff(), 2 * pi * (T.chi_plus - T.chi_minus)},
          {y.S_diff(), 2 * pi * (T.S_plus - T.S_minus)},
          {y.B_diff(), pi * (T.B_plus - T.B_minus)}};
}

// the same integral from the total curvature balance
inline Terms khat_from_total(const Analysis& A, const SideAnalysis& d) {
  const double pi = std::numbers::pi;
  Sym y(d.which);
  return {{"−" + y.S(), -2 * d.kappa_s},
          {"−" + y.G(), -d.boundary.total},
          {y.KdAminus(), 2 * A.area.minus[int(d.which)]},
          {"2πχ(M)", 2 * pi * d.topo.chi_M},
          {y.null_sum(), d.topo.null_sum}};
}

// right-hand side of the combined formula giving 4 pi chi(M-) of the other side
inline Terms chi_minus_rhs(const Analysis& A, const SideAnalysis& d, const SideAnalysis& o) {
  const double pi = std::numbers::pi;
  Sym y(d.which), z(o.which);
  return {{y.S(), 2 * d.kappa_s},
          {y.G(), d.boundary.total},
          {"−" + y.KdAminus(), -2 * A.area.minus[int(d.which)]},
          {"−" + y.null_sum(), -d.topo.null_sum},
          {"−" + z.Gp(), -o.boundary.plus},
          {z.Gm(), o.boundary.minus},
          {z.S_diff(), 2 * pi * (o.topo.S_plus - o.topo.S_minus)},
          {"−π(#(" + z.Sigma() + "∩∂M)^null+2#(" + z.Sigma() + "∩∂M)⁻)",
           -pi * (o.topo.B_null + 2 * o.topo.B_minus)}};
}

inline Terms side_balance(const SideAnalysis& d) {
  const double pi = std::numbers::pi;
  Sym y(d.which);
  const auto& T = d.topo;
  return {{y.Gp(), d.boundary.plus},
          {"−" + y.Gm(), -d.boundary.minus},
          {"−" + y.chi_diff(), -2 * pi * (T.chi_plus - T.chi_minus)},
          {"−" + y.S_diff(), -2 * pi * (T.S_plus - T.S_minus)},
          {"−" + y.B_diff(), -pi * (T.B_plus - T.B_minus)}};
}

inline Terms side_total(const Analysis& A, const SideAnalysis& d) {
  Sym y(d.which);
  return {{y.S(), 2 * d.kappa_s},
          {y.G(), d.boundary.total},
          {"−" + y.KdAminus(), -2 * A.area.minus[int(d.which)]},
          {"−" + y.null_sum(), -d.topo.null_sum}};
}

}  // namespace detail

// Euler characteristic of the open negative region: closed region minus the singular set it contains
inline std::vector<FormulaReport> eval_thm_4_1(const Analysis& A) {
  detail::Builder b{A};
  const double pi = std::numbers::pi;
  const auto &P = A.phi(), &Q = A.psi();
  std::vector<std::string> ids = {"Thm4.1(1)", "Thm4.1(2)", "Thm4.1(3)", "Thm4.1(4)",
                                  "Eq4.4=Eq4.5", "Eq4.6=Eq4.7"};
  auto reasons = detail::both_reasons(A);
  if (!reasons.empty()) {
    std::vector<FormulaReport> r;
    for (auto& id : ids) r.push_back(b.not_applicable(id, reasons));
    return r;
  }
  bool sing = P.singular() || Q.singular();
  std::vector<FormulaReport> r;
  r.push_back(b.make(ids[0], {{"4πχ(M⋆⁻)", 4 * pi * Q.topo.chi_c_minus()}}, detail::chi_minus_rhs(A, P, Q), sing));
  r.push_back(b.make(ids[1], {{"4πχ(M⁻)", 4 * pi * P.topo.chi_c_minus()}}, detail::chi_minus_rhs(A, Q, P), sing));
  r.push_back(b.make(ids[2], detail::side_balance(P), detail::side_balance(Q), sing));
  r.push_back(b.make(ids[3], detail::side_total(A, P), detail::side_total(A, Q), sing));
  // cross-checks: each side's value of the integral of K dA-hat
  auto cross = [&](const std::string& id, Terms l, Terms rr) {
    auto f = b.make(id, std::move(l), std::move(rr), sing);
    f.tol = 2 * (f.tol + f.tol);
    f.verdict = std::fabs(f.residual) <= f.tol ? Verdict::verified : Verdict::failed;
    return f;
  };
  r.push_back(cross(ids[4], detail::khat_from_boundary(P), detail::khat_from_boundary(Q)));
  r.push_back(cross(ids[5], detail::khat_from_total(A, P), detail::khat_from_total(A, Q)));
  return r;
}

// both readings of the Euler bookkeeping for one side
inline std::vector<FormulaReport> eval_euler_identity(const Analysis& A, Side which) {
  detail::Builder b{A};
  const auto& d = A.side[int(which)];
  std::string tag = std::string("[") + to_string(which) + "]";
  std::string closed = "Eq4.1" + tag + "(closed)", printed = "Eq4.1" + tag + "(printed)";
  if (d.topo.degenerate) return {b.not_applicable(closed, detail::side_reasons(d)), b.not_applicable(printed, detail::side_reasons(d))};
  const auto& T = d.topo;
  std::string st = which == Side::phi ? "" : "⋆";
  auto e = [&](const std::string& id, Terms l, Terms r) {
    auto f = b.make(id, std::move(l), std::move(r), false);
    f.tol = 0;
    f.verdict = f.residual == 0 ? Verdict::verified : Verdict::failed;
    return f;
  };
  return {e(closed, {{"χ(M)", double(T.chi_M)}},
            {{"χ(M̄" + st + "⁺)", double(T.chi_plus)}, {"χ(M̄" + st + "⁻)", double(T.chi_minus)}, {"−χ(Σ̄" + st + ")", -double(T.chi_sigma)}}),
          e(printed, {{"χ(M)", double(T.chi_M)}},
            {{"χ(M" + st + "⁺)", double(T.chi_c_plus())},
             {"χ(M" + st + "⁻)", double(T.chi_c_minus())},
             {"#(Σ" + st + "∩∂M)/2", 0.5 * T.boundary_count()}})};
}

inline std::vector<FormulaReport> eval_cor_4_2(const Analysis& A) {
  detail::Builder b{A};
  const double two_pi = 2 * std::numbers::pi;
  std::vector<FormulaReport> r;
  auto reasons = detail::both_reasons(A);
  for (int k = 0; k < 2; ++k) {
    // k = 0: phi regular, k = 1: psi regular
    const auto& R = A.side[k];
    const auto& O = A.side[1 - k];
    std::string id1 = k == 0 ? "Cor4.2(1)" : "Cor4.2(3)", id2 = k == 0 ? "Cor4.2(2)" : "Cor4.2(4)";
    auto why = reasons;
    if (why.empty() && R.singular()) why.push_back(std::string(to_string(R.which)) + " has singular points");
    if (!why.empty()) {
      r.push_back(b.not_applicable(id1, why));
      r.push_back(b.not_applicable(id2, why));
      continue;
    }
    detail::Sym y(R.which), z(O.which);
    const auto& T = O.topo;
    bool sing = O.singular();
    // the regular side keeps its negative-region term; it vanishes when that side is positive throughout
    double Am = A.area.minus[k];
    r.push_back(b.make(id1, {{"2χ(M" + z.st + "⁻)", 2.0 * T.chi_c_minus()}},
                       {{y.G() + "/2π", R.boundary.total / two_pi},
                        {"−" + y.KdAminus() + "/2π", -2 * Am / two_pi},
                        {"−(" + z.Gp() + "−" + z.Gm() + ")/2π", -(O.boundary.plus - O.boundary.minus) / two_pi},
                        {"#S" + z.st + "⁺−#S" + z.st + "⁻", double(T.S_plus - T.S_minus)},
                        {"−(#(" + z.Sigma() + "∩∂M)^null/2+#(" + z.Sigma() + "∩∂M)⁻)", -(0.5 * T.B_null + T.B_minus)}},
                       sing));
    r.push_back(b.make(id2, {{y.G(), R.boundary.total}, {"−" + y.KdAminus(), -2 * Am}}, detail::side_total(A, O), sing));
  }
  return r;
}

// ---------------------------------------------------------------- extrinsic curvature hypotheses

struct BoundaryConstantFit {
  double c = 0, deviation = 0;
  int samples = 0;
};

struct HypothesisReport {
  // boundedness of log|K^ext| off the singular set
  int samples = 0;
  double log_kext_min = 0, log_kext_max = 0;
  double refine_growth = 0;  // largest growth of |log|K^ext|| over the last two decades toward the singular set
  bool bounded = false;
  int kext_sign = 0;  // 0 when the sign changes or K^ext vanishes
  // shared first kind
  bool first_kind_shared = true;
  int first_kind_checked = 0;
  // boundary constant
  BoundaryConstantFit c_global;
  std::vector<BoundaryConstantFit> c_components;
  bool c_pass = false;
  bool pass = false;
  std::vector<std::string> reasons;
};

namespace detail {

inline std::vector<Vec2> interior_samples(const Domain& d, int n) {
  std::vector<Vec2> pts;
  const double two_pi = 2 * std::numbers::pi;
  if (d.kind == DomainKind::disk || d.kind == DomainKind::annulus) {
    double r0 = d.kind == DomainKind::annulus ? d.r_inner : 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < 4 * n; ++j) {
        double r = r0 + (d.r_outer - r0) * (i + 0.5) / n, t = two_pi * (j + 0.3) / (4 * n);
        pts.push_back(d.center + r * Vec2{std::cos(t), std::sin(t)});
      }
  } else {
    Vec2 lo = d.box_lo(), hi = d.box_hi();
    int nu = d.periodic() ? 4 * n : n;
    for (int i = 0; i < nu; ++i)
      for (int j = 0; j < n; ++j)
        pts.push_back({lo.u + (hi.u - lo.u) * (i + 0.5) / nu, lo.v + (hi.v - lo.v) * (j + 0.5) / n});
  }
  return pts;
}

inline double kext(const SurfaceDef& s, Vec2 p) {
  auto [l, ls] = lambda_pair(s, p);
  return ls / l;
}

// I, II, III evaluated on one direction
inline std::array<double, 3> fundamental_forms(const SurfaceDef& s, Vec2 p, Vec2 w) {
  auto J = eval_jet<1>(s, p);
  V3 fw = w.u * partial(J.f, 1, 0) + w.v * partial(J.f, 0, 1);
  V3 nw = w.u * partial(J.nu, 1, 0) + w.v * partial(J.nu, 0, 1);
  return {dot(fw, fw), -dot(fw, nw), dot(nw, nw)};
}

}  // namespace detail

inline HypothesisReport check_thm_5_2_hypotheses(const SurfaceDef& s, const Analysis& A) {
  HypothesisReport H;
  const auto &P = A.phi(), &Q = A.psi();
  // sampled K^ext, with a geometric ladder toward the singular set
  std::vector<double> logs;
  int pos = 0, neg = 0, zero = 0;
  auto record = [&](double k) {
    if (!std::isfinite(k) || k == 0.0) {
      ++zero;
      return;
    }
    (k > 0 ? pos : neg)++;
    logs.push_back(std::log(std::fabs(k)));
  };
  for (auto p : detail::interior_samples(s.domain, std::max(8, A.opt.grid / 8))) {
    auto [l, ls] = lambda_pair(s, p);
    if (l == 0.0) continue;
    record(ls / l);
  }
  SideField F{&s, Side::phi, 1};
  const double d_far = 1e-2, d_near = 1e-4;
  for (auto& tr : P.topo.traces) {
    size_t stride = std::max<size_t>(1, tr.samples.size() / 64);
    for (size_t k = 0; k < tr.samples.size(); k += stride) {
      Vec2 p = tr.samples[k].p;
      auto [l, g] = F.lam_grad(p);
      if (norm(g) == 0.0) continue;
      Vec2 n = normalized(g);
      for (double side : {1.0, -1.0}) {
        double far = 0, near = 0;
        bool ok = true;
        for (int q = 0; q <= 12; ++q) {
          double dist = 1e-1 * std::pow(10.0, -q / 4.0);
          Vec2 x = p + (side * dist) * n;
          if (s.domain.signed_distance(x) <= 0) {
            ok = false;
            break;
          }
          double k = detail::kext(s, x);
          record(k);
          double lk = std::fabs(std::log(std::fabs(k)));
          if (std::fabs(dist - d_far) < 1e-12) far = lk;
          if (std::fabs(dist - d_near) < 1e-12) near = lk;
        }
        if (ok) H.refine_growth = std::max(H.refine_growth, near - far);
      }
    }
  }
  H.samples = int(logs.size()) + zero;
  if (!logs.empty()) {
    H.log_kext_min = *std::min_element(logs.begin(), logs.end());
    H.log_kext_max = *std::max_element(logs.begin(), logs.end());
  }
  double worst = std::max(std::fabs(H.log_kext_min), std::fabs(H.log_kext_max));
  H.bounded = zero == 0 && worst < 20 && H.refine_growth < std::log(10.0);
  if (zero > 0)
    H.reasons.push_back("K^ext vanishes or is undefined on sampled regular points (log|K^ext| unbounded)");
  else if (worst >= 20)
    H.reasons.push_back("log|K^ext| exceeds 20 in magnitude (unbounded)");
  else if (H.refine_growth >= std::log(10.0))
    H.reasons.push_back("log|K^ext| diverges under refinement toward the singular set (unbounded)");
  H.kext_sign = zero == 0 && (pos == 0 || neg == 0) ? (pos > 0 ? 1 : -1) : 0;
  if (H.kext_sign == 0 && zero == 0) H.reasons.push_back("K^ext changes sign");

  // first kind of f must be first kind of nu
  if (Q.topo.degenerate) {
    if (P.singular()) {
      H.first_kind_shared = false;
      H.reasons.push_back("nu degenerate everywhere: first-kind points of f are not first kind for nu");
    }
  } else {
    double scale = std::max(Q.topo.complex.lam_scale, 1e-300);
    for (auto& tr : P.topo.traces)
      for (auto& smp : tr.samples) {
        if (smp.kind != PointKind::first) continue;
        ++H.first_kind_checked;
        auto g = local_geometry(s, smp.p);
        bool singular_star = std::fabs(g.lam[1]) <= 1e-6 * scale;
        bool first_star = false;
        if (singular_star) {
          try {
            Vec2 eta = null_direction(g.G(Side::psi));
            Vec2 t = normalized(smp.tangent);
            first_star = std::fabs(eta.u * t.v - eta.v * t.u) > 1e-4;
          } catch (const GeometryError&) {
          }
        }
        if (!first_star) H.first_kind_shared = false;
      }
    if (!H.first_kind_shared) H.reasons.push_back("a first-kind point of f is not a first-kind point of nu");
  }

  // II = c sqrt(I III) along the boundary away from the singular set
  const auto& gq = gauss5();
  std::vector<double> all;
  auto curves = s.domain.boundary();
  for (size_t c = 0; c < curves.size(); ++c) {
    const auto& bc = curves[c];
    std::vector<double> taus;
    for (auto* side : {&P, &Q})
      for (auto& r : side->topo.records)
        if (r.boundary && r.comp == int(c)) taus.push_back(r.tau);
    int m = std::max(64, A.opt.grid / 2);
    std::vector<double> vals;
    for (int q = 0; q < m; ++q)
      for (int k = 0; k < 5; ++k) {
        double t = bc.period * (q + 0.5 + 0.5 * gq.x[k]) / m;
        bool near = false;
        for (double tau : taus) near = near || std::fabs(std::remainder(t - tau, bc.period)) < 1e-3 * bc.period;
        if (near) continue;
        auto f = detail::fundamental_forms(s, bc.point(t), bc.d1(t));
        double den = std::sqrt(f[0] * f[2]);
        if (den < 1e-12) continue;
        vals.push_back(f[1] / den);
      }
    BoundaryConstantFit fit;
    fit.samples = int(vals.size());
    if (!vals.empty()) {
      fit.c = pairwise_sum(vals) / vals.size();
      for (double v : vals) fit.deviation = std::max(fit.deviation, std::fabs(v - fit.c));
    }
    H.c_components.push_back(fit);
    all.insert(all.end(), vals.begin(), vals.end());
  }
  H.c_global.samples = int(all.size());
  if (!all.empty()) {
    H.c_global.c = pairwise_sum(all) / all.size();
    for (double v : all) H.c_global.deviation = std::max(H.c_global.deviation, std::fabs(v - H.c_global.c));
  }
  H.c_pass = H.c_global.deviation < 1e-6;
  if (!H.c_pass) H.reasons.push_back("II is not a constant multiple of sqrt(I III) along the boundary");
  H.pass = H.bounded && H.kext_sign != 0 && H.first_kind_shared && H.c_pass;
  return H;
}

// ---------------------------------------------------------------- sign-split counting identities

struct CountingInputs {
  int kext_sign = 1;
  long chi_M = 0, chi_plus = 0, chi_minus = 0;
  int S_plus = 0, S_minus = 0, B_plus = 0, B_minus = 0;
  int S_plus_star = 0, S_minus_star = 0, B_plus_star = 0, B_minus_star = 0;
  double null_sum = 0, null_sum_star = 0;
};

inline CountingInputs counting_inputs(const Analysis& A, int kext_sign) {
  CountingInputs c;
  const auto &P = A.phi().topo, &Q = A.psi().topo;
  c.kext_sign = kext_sign;
  c.chi_M = P.chi_M;
  c.chi_plus = P.chi_plus;
  c.chi_minus = P.chi_minus;
  c.S_plus = P.S_plus;
  c.S_minus = P.S_minus;
  c.B_plus = P.B_plus;
  c.B_minus = P.B_minus;
  c.null_sum = P.null_sum;
  c.S_plus_star = Q.S_plus;
  c.S_minus_star = Q.S_minus;
  c.B_plus_star = Q.B_plus;
  c.B_minus_star = Q.B_minus;
  c.null_sum_star = Q.null_sum;
  return c;
}

inline std::vector<FormulaReport> counting_formulas(const Analysis& A, const CountingInputs& c,
                                                    std::vector<std::string> reasons = {}) {
  detail::Builder b{A};
  const double pi = std::numbers::pi;
  Terms l_pair = {{"#S⁺−#S⁻", double(c.S_plus - c.S_minus)}, {"(#(Σ∩∂M)⁺−#(Σ∩∂M)⁻)/2", 0.5 * (c.B_plus - c.B_minus)}};
  Terms r_pair = {{"#S⋆⁺−#S⋆⁻", double(c.S_plus_star - c.S_minus_star)},
                  {"(#(Σ⋆∩∂M)⁺−#(Σ⋆∩∂M)⁻)/2", 0.5 * (c.B_plus_star - c.B_minus_star)}};
  std::vector<FormulaReport> r;
  auto emit = [&](const std::string& id, int needs, Terms l, Terms rr) {
    auto why = reasons;
    if (why.empty() && c.kext_sign != needs) why.push_back(needs > 0 ? "requires K^ext > 0" : "requires K^ext < 0");
    r.push_back(why.empty() ? b.make(id, std::move(l), std::move(rr), false) : b.not_applicable(id, why));
  };
  emit("Thm5.2(1)", 1, l_pair, r_pair);
  emit("Thm5.2(2)", 1, {{"Σ_(Σ∩∂M)^null (2α⁺−π)", c.null_sum}}, {{"Σ_(Σ⋆∩∂M)^null (2α⋆⁺−π)", c.null_sum_star}});
  Terms l3 = {{"2(χ(M⁺)−χ(M⁻))", 2.0 * (c.chi_plus - c.chi_minus)}};
  l3.insert(l3.end(), l_pair.begin(), l_pair.end());
  emit("Thm5.2(3)", -1, l3, r_pair);
  emit("Thm5.2(4)", -1,
       {{"4πχ(M)", 4 * pi * c.chi_M}, {"Σ_(Σ∩∂M)^null (2α⁺−π)", c.null_sum}, {"Σ_(Σ⋆∩∂M)^null (2α⋆⁺−π)", c.null_sum_star}},
       {{"0", 0.0}});
  return r;
}

// Closed-surface reduction: with every boundary term zero the counting identities drop to
// #S+ - #S- = #S*+ - #S*- (K^ext > 0), or the chi difference identity and chi(M) = 0 (K^ext < 0).
inline std::vector<FormulaReport> reduce_closed(const Analysis& A, const CountingInputs& c) {
  if (c.B_plus || c.B_minus || c.B_plus_star || c.B_minus_star || c.null_sum != 0.0 || c.null_sum_star != 0.0)
    throw std::invalid_argument("closed reduction needs every boundary term to vanish");
  detail::Builder b{A};
  std::vector<FormulaReport> r;
  Terms S = {{"#S⁺−#S⁻", double(c.S_plus - c.S_minus)}}, Ss = {{"#S⋆⁺−#S⋆⁻", double(c.S_plus_star - c.S_minus_star)}};
  if (c.kext_sign > 0) {
    r.push_back(b.make("Cor5.3(+)", S, Ss, false));
  } else {
    Terms l = {{"2(χ(M⁺)−χ(M⁻))", 2.0 * (c.chi_plus - c.chi_minus)}};
    l.insert(l.end(), S.begin(), S.end());
    r.push_back(b.make("Cor5.3(−,1)", l, Ss, false));
    r.push_back(b.make("Cor5.3(−,2)", {{"χ(M)", double(c.chi_M)}}, {{"0", 0.0}}, false));
  }
  return r;
}

namespace detail {

inline double hausdorff(const std::vector<SingularCurveTrace>& a, const std::vector<SingularCurveTrace>& b) {
  auto one_way = [](const std::vector<SingularCurveTrace>& x, const std::vector<SingularCurveTrace>& y) {
    double worst = 0;
    for (auto& tx : x)
      for (auto& p : tx.samples) {
        double best = std::numeric_limits<double>::infinity();
        for (auto& ty : y)
          for (size_t k = 0; k + 1 < ty.samples.size(); ++k) {
            Vec2 a0 = ty.samples[k].p, a1 = ty.samples[k + 1].p, d = a1 - a0;
            double L2 = dot(d, d);
            double t = L2 > 0 ? std::clamp(dot(p.p - a0, d) / L2, 0.0, 1.0) : 0.0;
            best = std::min(best, norm(p.p - (a0 + t * d)));
          }
        worst = std::max(worst, best);
      }
    return worst;
  };
  if (a.empty() && b.empty()) return 0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  return std::max(one_way(a, b), one_way(b, a));
}

}  // namespace detail

// direct checks of the local conclusions behind the counting identities
inline std::vector<FormulaReport> eval_measure_identities(const SurfaceDef& s, const Analysis& A, const HypothesisReport& H) {
  detail::Builder b{A};
  std::vector<std::string> ids = {"Lem5.1(1)", "Lem5.1(2)", "Lem5.1(2)[regions]", "Lem5.1(3)"};
  std::vector<FormulaReport> r;
  auto why = detail::both_reasons(A);
  if (why.empty() && !H.pass) why = H.reasons;
  if (!why.empty()) {
    for (auto& id : ids) r.push_back(b.not_applicable(id, why));
    return r;
  }
  const auto &P = A.phi(), &Q = A.psi();
  const int sg = H.kext_sign, o = A.opt.orient;
  auto bound = [&](const std::string& id, double value, double tol) {
    auto f = b.make(id, {{"deviation", value}}, {{"0", 0.0}}, false);
    f.tol = tol;
    f.verdict = std::fabs(value) <= tol ? Verdict::verified : Verdict::failed;
    return f;
  };
  r.push_back(bound(ids[0], detail::hausdorff(P.topo.traces, Q.topo.traces), 2.0 / A.opt.grid));
  // singular curvature measure node by node along the phi trace, read through psi
  double ks = 0;
  SideField Fp{&s, Side::phi, o}, Fq{&s, Side::psi, o};
  for (auto& tr : P.topo.traces) {
    auto a = singular_measure(s, Fp, tr), c = singular_measure(s, Fq, tr);
    for (size_t k = 0; k < std::min(a.size(), c.size()); ++k)
      ks = std::max(ks, std::fabs(a[k].weight * a[k].density - sg * c[k].weight * c[k].density));
  }
  r.push_back(bound(ids[1], ks, 1e-6));
  int mismatched = 0;
  for (auto p : detail::interior_samples(s.domain, std::max(8, A.opt.grid / 8))) {
    auto [l, ls] = lambda_pair(s, p);
    if (l == 0.0 || ls == 0.0) continue;
    if ((l > 0) != (sg * ls > 0)) ++mismatched;
  }
  r.push_back(bound(ids[2], mismatched, 0));
  double kg = 0;
  const auto& gq = gauss5();
  for (auto& bc : s.domain.boundary()) {
    int m = std::max(64, A.opt.grid / 2);
    for (int q = 0; q < m; ++q)
      for (int k = 0; k < 5; ++k) {
        double t = bc.period * (q + 0.5 + 0.5 * gq.x[k]) / m;
        double a = geodesic_density(s, Side::phi, o, bc, t).first;
        double c = geodesic_density(s, Side::psi, o, bc, t).first;
        kg = std::max(kg, std::fabs(a - sg * c));
      }
  }
  r.push_back(bound(ids[3], kg, 1e-6));
  return r;
}

inline std::vector<FormulaReport> eval_thm_5_2(const Analysis& A, const HypothesisReport& H) {
  auto why = detail::both_reasons(A);
  if (why.empty() && !H.pass) why = H.reasons;
  return counting_formulas(A, counting_inputs(A, H.kext_sign), why);
}

// ---------------------------------------------------------------- everything

struct Verification {
  Analysis analysis;
  HypothesisReport hypotheses;
  std::vector<FormulaReport> formulas;

  const FormulaReport& get(const std::string& id) const {
    for (auto& f : formulas)
      if (f.id == id) return f;
    throw std::out_of_range("no formula " + id);
  }
  // 0 every applicable formula verified, 2 nothing applicable, 1 any failure
  int exit_code() const {
    bool any_verified = false;
    for (auto& f : formulas) {
      if (f.verdict == Verdict::failed) return 1;
      any_verified = any_verified || f.verdict == Verdict::verified;
    }
    return any_verified ? 0 : 2;
  }
};

// selection by id prefix; empty selects everything
inline bool selected(const std::vector<std::string>& sel, const std::string& id) {
  if (sel.empty()) return true;
  for (auto& x : sel)
    if (id.rfind(x, 0) == 0) return true;
  return false;
}

inline Verification verify(const SurfaceDef& s, const VerifyOptions& opt = {}, const std::vector<std::string>& sel = {}) {
  Verification V;
  V.analysis = analyze(s, opt);
  const auto& A = V.analysis;
  V.hypotheses = check_thm_5_2_hypotheses(s, A);
  std::vector<FormulaReport> all;
  auto add = [&](std::vector<FormulaReport> r) { all.insert(all.end(), r.begin(), r.end()); };
  add(eval_prop_2_16(A));
  add(eval_thm_3_5(A));
  add(eval_euler_identity(A, Side::phi));
  add(eval_euler_identity(A, Side::psi));
  add(eval_thm_4_1(A));
  add(eval_cor_4_2(A));
  add(eval_thm_5_2(A, V.hypotheses));
  add(eval_measure_identities(s, A, V.hypotheses));
  for (auto& f : all)
    if (selected(sel, f.id)) V.formulas.push_back(std::move(f));
  return V;
}

// ---------------------------------------------------------------- refinement

struct ConvergenceRow {
  int grid = 0;
  double residual = 0;
  double order = std::numeric_limits<double>::quiet_NaN();  // against the previous row
  Verdict verdict = Verdict::not_applicable;
};

struct ConvergenceStudy {
  std::string id;
  std::vector<ConvergenceRow> rows;
  bool flagged = false;  // residual failed to decrease above the floor
  double floor = 1e-9;
  // at least the given order between successive rows, or already at the floor
  bool order_at_least(double p) const {
    for (size_t k = 1; k < rows.size(); ++k) {
      double a = std::fabs(rows[k - 1].residual), b = std::fabs(rows[k].residual);
      if (b < floor && a < floor) continue;
      if (b < floor) continue;
      if (!(std::log2(a / b) >= p)) return false;
    }
    return true;
  }
};

inline ConvergenceStudy convergence_study(const SurfaceDef& s, const std::string& id, std::vector<int> grids = {64, 128, 256, 512},
                                          VerifyOptions opt = {}) {
  ConvergenceStudy C;
  C.id = id;
  for (int g : grids) {
    opt.grid = g;
    auto V = verify(s, opt, {id});
    ConvergenceRow row;
    row.grid = g;
    const auto& f = V.get(id);
    row.residual = f.residual;
    row.verdict = f.verdict;
    if (!C.rows.empty()) {
      double a = std::fabs(C.rows.back().residual), b = std::fabs(row.residual);
      row.order = std::log2(a / b);
      if (b >= a && b > C.floor) C.flagged = true;
    }
    C.rows.push_back(row);
  }
  return C;
}

}  // namespace fgb
