#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "surface.hpp"

namespace fgb {

enum class Side { phi, psi };

inline const char* to_string(Side s) { return s == Side::phi ? "phi" : "psi"; }

// Row i, column j: G(i, j) = <X_j, e_i>, columns ordered (u, v).
struct Mat2 {
  double a = 0, b = 0, c = 0, d = 0;  // [[a, b], [c, d]]
  double det() const { return a * d - b * c; }
  Mat2 transpose() const { return {a, c, b, d}; }
  Vec2 col(int j) const { return j == 0 ? Vec2{a, c} : Vec2{b, d}; }
  Vec2 apply(Vec2 x) const { return {a * x.u + b * x.v, c * x.u + d * x.v}; }
  double quad(Vec2 x) const { return dot(x, apply(x)); }
};
inline Mat2 operator*(const Mat2& x, const Mat2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}
inline Mat2 operator-(const Mat2& x) { return {-x.a, -x.b, -x.c, -x.d}; }

template <int N>
inline Vec3<Jet<N>> diff_u(const Vec3<Jet<N>>& a) { return {a.x.diff_u(), a.y.diff_u(), a.z.diff_u()}; }
template <int N>
inline Vec3<Jet<N>> diff_v(const Vec3<Jet<N>>& a) { return {a.x.diff_v(), a.y.diff_v(), a.z.diff_v()}; }

// ---------------------------------------------------------------- frames

struct FrameField {
  int axis = 0;
};

// |a - <a, nu> nu| for the unit axis a
inline double axis_margin(const V3& nu, int axis) { return std::sqrt(std::max(0.0, 1.0 - nu[axis] * nu[axis])); }

inline int best_axis(const V3& nu) {
  int k = 0;
  for (int i = 1; i < 3; ++i)
    if (std::fabs(nu[i]) < std::fabs(nu[k])) k = i;
  return k;
}

inline FrameField build_frame(const SurfaceDef& s, const std::vector<ParamPoint>& region) {
  double best = -1;
  int axis = 0;
  for (int a = 0; a < 3; ++a) {
    double m = 1.0;
    for (auto p : region) m = std::min(m, axis_margin(value(eval_jet<0>(s, p).nu), a));
    if (m > best) best = m, axis = a;
  }
  if (best < 0.1) throw GeometryError("no admissible reference axis on this cell");
  return {axis};
}

inline FrameField build_frame(const SurfaceDef& s, const std::vector<ParamPoint>& region, int axis) {
  for (auto p : region)
    if (axis_margin(value(eval_jet<0>(s, p).nu), axis) < 0.1) throw GeometryError("no admissible reference axis on this cell");
  return {axis};
}

template <int N>
struct FrameJets {
  Vec3<Jet<N>> e1, e2;
};

template <int N>
inline FrameJets<N> frame_jets(const Vec3<Jet<N>>& nu, int axis) {
  Vec3<Jet<N>> a;
  a[axis] = Jet<N>::constant(1.0);
  Vec3<Jet<N>> w = a - nu[axis] * nu;
  Jet<N> inv_len = 1.0 / sqrt(dot(w, w));
  FrameJets<N> F;
  F.e1 = inv_len * w;
  F.e2 = cross(nu, F.e1);
  return F;
}

// dmu density in du^dv, with lambda and lambda_star, at one point; frame axis chosen per point
struct AreaSample {
  double dmu, lam, lam_star;
};

inline AreaSample area_sample(const SurfaceDef& s, ParamPoint p) {
  auto J = eval_jet<2>(s, p);
  int axis = best_axis(value(J.nu));
  auto F = frame_jets(J.nu, axis);
  Jet2 mu_u = dot(diff_u(F.e2), F.e1), mu_v = dot(diff_v(F.e2), F.e1);
  auto fu = diff_u(J.f), fv = diff_v(J.f), nu_u = diff_u(J.nu), nu_v = diff_v(J.nu);
  V3 n = value(J.nu);
  double lam = det3(value(fu), value(fv), n);
  double lam_star = det3(value(nu_u), value(nu_v), n);
  return {mu_v.du() - mu_u.dv(), lam, lam_star};
}

// lambda and lambda_star values only
inline std::pair<double, double> lambda_pair(const SurfaceDef& s, ParamPoint p) {
  auto J = eval_jet<1>(s, p);
  V3 n = value(J.nu);
  return {det3(partial(J.f, 1, 0), partial(J.f, 0, 1), n), det3(partial(J.nu, 1, 0), partial(J.nu, 0, 1), n)};
}

// ---------------------------------------------------------------- pointwise bundle data

struct BundleSample {
  ParamPoint p;
  int axis = 0;
  V3 nu, e1, e2;
  Mat2 G, G_star;
  double lam = 0, lam_star = 0;          // det G, det G_star
  double lam_amb = 0, lam_star_amb = 0;  // ambient determinants
  double mu_u = 0, mu_v = 0, dmu = 0;
  Mat2 I, II, III;
  std::optional<double> K, K_star, Kext, Kext_star;
  double K_brioschi = std::numeric_limits<double>::quiet_NaN();       // of I
  double K_star_brioschi = std::numeric_limits<double>::quiet_NaN();  // of III
};

// Gaussian curvature of a metric given by jets of E, F, G (Brioschi)
inline double brioschi(const Jet3& E, const Jet3& F, const Jet3& G) {
  double e = E.value(), f = F.value(), g = G.value();
  double Eu = E.du(), Ev = E.dv(), Fu = F.du(), Fv = F.dv(), Gu = G.du(), Gv = G.dv();
  double Evv = E.d(0, 2), Fuv = F.d(1, 1), Guu = G.d(2, 0);
  auto det3x3 = [](double m00, double m01, double m02, double m10, double m11, double m12, double m20, double m21,
                   double m22) {
    return m00 * (m11 * m22 - m12 * m21) - m01 * (m10 * m22 - m12 * m20) + m02 * (m10 * m21 - m11 * m20);
  };
  double A = det3x3(-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev, Fv - 0.5 * Gu, e, f, 0.5 * Gv, f, g);
  double B = det3x3(0, 0.5 * Ev, 0.5 * Gu, 0.5 * Ev, e, f, 0.5 * Gu, f, g);
  double w = e * g - f * f;
  return (A - B) / (w * w);
}

inline constexpr double kRegularTol = 1e-10;

inline BundleSample sample_bundle(const SurfaceDef& s, FrameField frame, ParamPoint p) {
  auto J = eval_jet<3>(s, p);
  BundleSample b;
  b.p = p;
  b.axis = frame.axis;
  auto F = frame_jets(J.nu, frame.axis);
  b.nu = value(J.nu);
  b.e1 = value(F.e1);
  b.e2 = value(F.e2);
  auto fu = diff_u(J.f), fv = diff_v(J.f), nu_u = diff_u(J.nu), nu_v = diff_v(J.nu);
  V3 fu0 = value(fu), fv0 = value(fv), nu0 = value(nu_u), nv0 = value(nu_v);
  b.G = {dot(fu0, b.e1), dot(fv0, b.e1), dot(fu0, b.e2), dot(fv0, b.e2)};
  b.G_star = {dot(nu0, b.e1), dot(nv0, b.e1), dot(nu0, b.e2), dot(nv0, b.e2)};
  b.lam = b.G.det();
  b.lam_star = b.G_star.det();
  b.lam_amb = det3(fu0, fv0, b.nu);
  b.lam_star_amb = det3(nu0, nv0, b.nu);
  Jet3 mu_u = dot(diff_u(F.e2), F.e1), mu_v = dot(diff_v(F.e2), F.e1);
  b.mu_u = mu_u.value();
  b.mu_v = mu_v.value();
  b.dmu = mu_v.du() - mu_u.dv();
  b.I = b.G.transpose() * b.G;
  b.III = b.G_star.transpose() * b.G_star;
  b.II = -(b.G.transpose() * b.G_star);
  double detI = b.I.det(), detIII = b.III.det(), detII = b.II.det();
  if (std::fabs(b.lam) > kRegularTol) {
    b.K = b.dmu / b.lam;
    b.Kext = detII / detI;
    b.K_brioschi = brioschi(dot(fu, fu), dot(fu, fv), dot(fv, fv));
  }
  if (std::fabs(b.lam_star) > kRegularTol) {
    b.K_star = b.dmu / b.lam_star;
    b.Kext_star = detII / detIII;
    b.K_star_brioschi = brioschi(dot(nu_u, nu_u), dot(nu_u, nu_v), dot(nu_v, nu_v));
  }
  return b;
}

// ---------------------------------------------------------------- curve-level geometry

// Derivative data of f and nu at one point, enough for curve curvatures and lambda Hessians.
struct LocalGeometry {
  ParamPoint p;
  V3 nu;
  V3 X1[2][2];  // [side][u|v]
  V3 X2[2][3];  // [side][uu|uv|vv]
  double lam[2];
  Vec2 grad[2];
  double hess[2][3];  // uu, uv, vv
  V3 e1, e2, e1_d[2], e2_d[2];  // frame (best axis) and its u, v derivatives

  V3 map(Side s, Vec2 w) const {
    int k = int(s);
    return w.u * X1[k][0] + w.v * X1[k][1];
  }
  // ambient second derivative of X along a curve with velocity w and acceleration a
  V3 accel(Side s, Vec2 w, Vec2 a) const {
    int k = int(s);
    return (w.u * w.u) * X2[k][0] + (2 * w.u * w.v) * X2[k][1] + (w.v * w.v) * X2[k][2] + a.u * X1[k][0] +
           a.v * X1[k][1];
  }
  Mat2 G(Side s) const {
    int k = int(s);
    return {dot(X1[k][0], e1), dot(X1[k][1], e1), dot(X1[k][0], e2), dot(X1[k][1], e2)};
  }
  double mu(Vec2 w) const { return dot(w.u * e2_d[0] + w.v * e2_d[1], e1); }
};

inline LocalGeometry local_geometry(const SurfaceDef& s, ParamPoint p) {
  auto J = eval_jet<3>(s, p);
  LocalGeometry g;
  g.p = p;
  g.nu = value(J.nu);
  const Vec3<Jet3>* maps[2] = {&J.f, &J.nu};
  for (int k = 0; k < 2; ++k) {
    const auto& X = *maps[k];
    g.X1[k][0] = partial(X, 1, 0);
    g.X1[k][1] = partial(X, 0, 1);
    g.X2[k][0] = partial(X, 2, 0);
    g.X2[k][1] = partial(X, 1, 1);
    g.X2[k][2] = partial(X, 0, 2);
    Jet3 l = det3(diff_u(X), diff_v(X), J.nu);
    g.lam[k] = l.value();
    g.grad[k] = {l.du(), l.dv()};
    g.hess[k][0] = l.d(2, 0);
    g.hess[k][1] = l.d(1, 1);
    g.hess[k][2] = l.d(0, 2);
  }
  int axis = best_axis(g.nu);
  auto F = frame_jets(J.nu, axis);
  g.e1 = value(F.e1);
  g.e2 = value(F.e2);
  g.e1_d[0] = partial(F.e1, 1, 0);
  g.e1_d[1] = partial(F.e1, 0, 1);
  g.e2_d[0] = partial(F.e2, 1, 0);
  g.e2_d[1] = partial(F.e2, 0, 1);
  return g;
}

// Curvature measure density det[X(w), D_t X(w), nu] / |X(w)|^2 per unit parameter, without the sign factor.
inline double turning_density(const LocalGeometry& g, Side s, Vec2 w, Vec2 a) {
  V3 x = g.map(s, w);
  double den = dot(x, x);
  if (den == 0.0) return 0.0;
  return det3(x, g.accel(s, w, a), g.nu) / den;
}

// Frame form mu(w) - theta' of the same measure (theta the frame angle of X(w)); the two agree up to sign.
inline double frame_form_density(const LocalGeometry& g, Side s, Vec2 w, Vec2 a) {
  V3 x = g.map(s, w), xt = g.accel(s, w, a);
  V3 de1 = w.u * g.e1_d[0] + w.v * g.e1_d[1], de2 = w.u * g.e2_d[0] + w.v * g.e2_d[1];
  double c1 = dot(x, g.e1), c2 = dot(x, g.e2);
  double c1t = dot(xt, g.e1) + dot(x, de1), c2t = dot(xt, g.e2) + dot(x, de2);
  double theta_t = (c1 * c2t - c2 * c1t) / (c1 * c1 + c2 * c2);
  return g.mu(w) - theta_t;
}

// ---------------------------------------------------------------- checks

struct AxiomReport {
  double compatibility = 0;  // |G^T G_star - (G^T G_star)^T|, also |nu| - 1 and tangency
  double structure_phi = 0, structure_psi = 0;
  ParamPoint worst;
  bool ok(double tol = 1e-8) const { return compatibility < tol && structure_phi < tol && structure_psi < tol; }
};

inline AxiomReport check_axioms(const SurfaceDef& s, const std::vector<ParamPoint>& points) {
  AxiomReport r;
  double worst = -1;
  for (auto p : points) {
    auto J = eval_jet<2>(s, p);
    V3 n = value(J.nu);
    auto F = frame_jets(J.nu, best_axis(n));
    Jet2 mu[2] = {dot(diff_u(F.e2), F.e1), dot(diff_v(F.e2), F.e1)};
    double comp = std::fabs(norm(n) - 1.0);
    comp = std::max({comp, std::fabs(dot(partial(J.f, 1, 0), n)), std::fabs(dot(partial(J.f, 0, 1), n))});
    Mat2 G[2];
    double structure[2];
    const Vec3<Jet2>* maps[2] = {&J.f, &J.nu};
    for (int k = 0; k < 2; ++k) {
      auto Xu = diff_u(*maps[k]), Xv = diff_v(*maps[k]);
      // frame components of X_u, X_v as jets; e_i taken from the orthonormalized frame
      Jet2 g1u = dot(Xu, F.e1), g2u = dot(Xu, F.e2), g1v = dot(Xv, F.e1), g2v = dot(Xv, F.e2);
      G[k] = {g1u.value(), g1v.value(), g2u.value(), g2v.value()};
      // d_u G[:,v] + mu_u J G[:,v] - (d_v G[:,u] + mu_v J G[:,u]), J(x, y) = (y, -x)
      double r1 = g1v.du() + mu[0].value() * g2v.value() - (g1u.dv() + mu[1].value() * g2u.value());
      double r2 = g2v.du() - mu[0].value() * g1v.value() - (g2u.dv() - mu[1].value() * g1u.value());
      structure[k] = std::hypot(r1, r2);
    }
    Mat2 S = G[0].transpose() * G[1];
    comp = std::max(comp, std::fabs(S.b - S.c));
    double w = std::max({comp, structure[0], structure[1]});
    if (w > worst) worst = w, r.worst = p;
    r.compatibility = std::max(r.compatibility, comp);
    r.structure_phi = std::max(r.structure_phi, structure[0]);
    r.structure_psi = std::max(r.structure_psi, structure[1]);
  }
  return r;
}

enum class FrontKind { front, frontal_only };

// kernel line of a 2x2 matrix of rank one, via the larger row
inline Vec2 kernel_direction(const Mat2& G) {
  Vec2 r0{G.a, G.b}, r1{G.c, G.d};
  Vec2 r = norm(r0) >= norm(r1) ? r0 : r1;
  return normalized(Vec2{-r.v, r.u});
}

inline int rank2x2(const Mat2& G, double tol) {
  double scale = std::max({std::fabs(G.a), std::fabs(G.b), std::fabs(G.c), std::fabs(G.d)});
  if (scale < tol) return 0;
  if (std::fabs(G.det()) < tol * std::max(1.0, scale)) return 1;
  return 2;
}

inline FrontKind check_front_condition(const SurfaceDef& s, ParamPoint p, double tol = 1e-8) {
  auto b = sample_bundle(s, {best_axis(value(eval_jet<0>(s, p).nu))}, p);
  int r = rank2x2(b.G, tol), r_star = rank2x2(b.G_star, tol);
  if (r == 0 && r_star == 0) throw GeometryError("both homomorphisms rank 0");
  // a psi that vanishes identically beside a regular phi has no singular curve to speak of
  if (r == 2 && r_star != 1) throw GeometryError("not a singular point of either homomorphism");
  // (G; G_star) has rank 2 exactly when the kernels meet only in 0
  Mat2 S = b.G.transpose() * b.G;
  Mat2 T = b.G_star.transpose() * b.G_star;
  Mat2 sum{S.a + T.a, S.b + T.b, S.c + T.c, S.d + T.d};
  double scale = std::max(1.0, sum.a + sum.d);
  return sum.det() > tol * scale * scale ? FrontKind::front : FrontKind::frontal_only;
}

struct IdentityResiduals {
  double gauss = 0;     // K lam - K_star lam_star (Brioschi on I and III)
  double ext = 0;       // Kext lam - lam_star, Kext_star lam_star - lam
  double abs_ext = 0;   // |Kext||lam| - |lam_star|
  double product = 0;   // Kext Kext_star - 1
  int used[4] = {0, 0, 0, 0};
};

inline IdentityResiduals pointwise_identities(const SurfaceDef& s, const std::vector<ParamPoint>& points) {
  IdentityResiduals r;
  auto rel = [](double a, double b) { return std::fabs(a - b) / std::max(1.0, std::max(std::fabs(a), std::fabs(b))); };
  for (auto p : points) {
    auto b = sample_bundle(s, {best_axis(value(eval_jet<0>(s, p).nu))}, p);
    bool reg = std::fabs(b.lam) > kRegularTol, reg_star = std::fabs(b.lam_star) > kRegularTol;
    if (reg && reg_star) {
      r.gauss = std::max(r.gauss, rel(b.K_brioschi * b.lam, b.K_star_brioschi * b.lam_star));
      ++r.used[0];
    }
    if (reg) {
      r.ext = std::max(r.ext, rel(*b.Kext * b.lam, b.lam_star));
      r.abs_ext = std::max(r.abs_ext, rel(std::fabs(*b.Kext) * std::fabs(b.lam), std::fabs(b.lam_star)));
      ++r.used[1];
      ++r.used[2];
    }
    if (reg_star) r.ext = std::max(r.ext, rel(*b.Kext_star * b.lam_star, b.lam));
    if (reg && reg_star && *b.Kext != 0.0) {
      r.product = std::max(r.product, rel(*b.Kext * *b.Kext_star, 1.0));
      ++r.used[3];
    }
  }
  return r;
}

}  // namespace fgb
