#include <gtest/gtest.h>

#include <numbers>

#include "fgb/gallery.hpp"
#include "fgb/verifier.hpp"

using namespace fgb;

namespace {

const double pi = std::numbers::pi;

BoundaryMeasure boundary_of(const SurfaceDef& s, Side side, int grid = 128, int orient = 1) {
  auto R = analyze_side(s, side, orient, {grid, 0.05, 0.2});
  return boundary_measure(s, R, {grid, orient});
}

// plain polar Gauss rule on a disk, independent of the split quadrature
template <class F>
double disk_integral(const Domain& d, F&& f, int n = 64) {
  const auto& g = gauss5();
  double total = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 4 * n; ++j)
      for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b) {
          double r = d.r_outer * (i + 0.5 + 0.5 * g.x[a]) / n;
          double t = 2 * pi * (j + 0.5 + 0.5 * g.x[b]) / (4 * n);
          double w = g.w[a] * g.w[b] * 0.25 * (d.r_outer / n) * (2 * pi / (4 * n)) * r;
          total += w * f(d.center + r * Vec2{std::cos(t), std::sin(t)});
        }
  return total;
}

}  // namespace

TEST(Quadrature, FlatDiskBoundaryTurning) {
  auto B = boundary_of(gallery("flat_disk"), Side::phi);
  EXPECT_NEAR(B.total, 2 * pi, 1e-8);
  EXPECT_NEAR(B.minus, 0, 1e-15);
}

TEST(Quadrature, CuspidalEdgeFlatBoundary) {
  auto B = boundary_of(gallery("cuspidal_edge_flat"), Side::phi, 256);
  EXPECT_NEAR(B.total, 2 * pi, 1e-4);
  EXPECT_NEAR(B.plus, 0, 1e-3);
  EXPECT_NEAR(B.minus, 2 * pi, 1e-3);
  auto A = area_integrals(gallery("cuspidal_edge_flat"), {256, 1});
  EXPECT_NEAR(A.total, 0, 1e-6);
}

TEST(Quadrature, SphereCap) {
  auto s = gallery("sphere_cap");
  auto A = area_integrals(s, {256, 1});
  EXPECT_NEAR(A.K_dA(Side::phi), 2 * pi * (1 - 0.5), 1e-6);
  EXPECT_NEAR(A.minus[0] + A.minus[1], 0, 1e-15);
  auto B = boundary_of(s, Side::phi, 256);
  EXPECT_NEAR(B.total, pi, 1e-6);
  EXPECT_NEAR(A.K_dA(Side::phi) + B.total, 2 * pi, 1e-6);
}

TEST(Quadrature, HyperbolicParaboloidBothCurvatures) {
  auto s = gallery("hyperbolic_paraboloid");
  auto A = area_integrals(s, {256, 1});
  auto via = [&](bool star) {
    return disk_integral(s.domain, [&](Vec2 p) {
      auto b = sample_bundle(s, {best_axis(value(eval_jet<0>(s, p).nu))}, p);
      return star ? b.K_star_brioschi * b.lam_star : b.K_brioschi * b.lam;
    });
  };
  EXPECT_NEAR(A.total, via(false), 1e-6);
  EXPECT_NEAR(A.total, via(true), 1e-6);
}

TEST(Quadrature, FrameFormCrossCheck) {
  for (auto& name : gallery_names()) {
    auto s = gallery(name);
    for (Side side : {Side::phi, Side::psi}) {
      auto R = analyze_side(s, side, 1, {128, 0.05, 0.2});
      if (R.degenerate) continue;
      EXPECT_LT(boundary_measure(s, R, {128, 1}).max_crosscheck, 1e-6) << name << " " << to_string(side);
    }
  }
}

TEST(Quadrature, OrientationReversesArea) {
  for (auto name : {"hyperbolic_paraboloid", "cuspidal_edge_tilted", "parabolic_graph"}) {
    auto s = gallery(name);
    auto a = area_integrals(s, {128, 1}), b = area_integrals(s, {128, -1});
    EXPECT_NEAR(a.total, -b.total, 1e-12) << name;
    EXPECT_NEAR(a.minus[1], -b.plus[1], 1e-12) << name;
    EXPECT_NEAR(a.K_dA(Side::phi), b.K_dA(Side::phi), 1e-12) << name;
  }
}

TEST(Formulas, FlatDiskClassical) {
  auto V = verify(gallery("flat_disk"), {256});
  auto& f = V.get("Prop2.16(1)");
  EXPECT_EQ(f.verdict, Verdict::verified);
  EXPECT_LT(std::fabs(f.residual), 1e-8);
  EXPECT_NEAR(f.term("∫_∂M κ_g ds"), 2 * pi, 1e-8);
  EXPECT_DOUBLE_EQ(f.tol, 1e-6);
  EXPECT_EQ(V.exit_code(), 0);
}

TEST(Formulas, TermsRecomputeResidual) {
  for (auto name : {"swallowtail_std", "cuspidal_edge_tilted", "helicoid_annulus"}) {
    auto V = verify(gallery(name), {64});
    for (auto& f : V.formulas) {
      double l = 0, r = 0;
      for (auto& [k, v] : f.lhs_terms) l += v;
      for (auto& [k, v] : f.rhs_terms) r += v;
      EXPECT_EQ(f.lhs, l) << f.id;
      EXPECT_EQ(f.rhs, r) << f.id;
      EXPECT_EQ(f.residual, l - r) << f.id;
    }
  }
}

TEST(Formulas, BundleSideAliasesSingleSide) {
  auto V = verify(gallery("cuspidal_edge_tilted"), {64});
  for (auto [a, b] : {std::pair{"Thm3.5(1)", "Prop2.16(1)"}, std::pair{"Thm3.5(2)", "Prop2.16(2)"}}) {
    auto &x = V.get(a), &y = V.get(b);
    ASSERT_EQ(x.lhs_terms.size(), y.lhs_terms.size());
    for (size_t k = 0; k < x.lhs_terms.size(); ++k) EXPECT_EQ(x.lhs_terms[k], y.lhs_terms[k]);
    for (size_t k = 0; k < x.rhs_terms.size(); ++k) EXPECT_EQ(x.rhs_terms[k], y.rhs_terms[k]);
  }
}

TEST(Formulas, DegenerateNormalSideNotApplicable) {
  auto V = verify(gallery("cuspidal_edge_flat"), {128});
  EXPECT_EQ(V.get("Thm3.5(1)").verdict, Verdict::verified);
  EXPECT_EQ(V.get("Thm3.5(2)").verdict, Verdict::verified);
  for (auto id : {"Thm3.5(3)", "Thm3.5(4)"}) {
    auto& f = V.get(id);
    EXPECT_EQ(f.verdict, Verdict::not_applicable);
    ASSERT_FALSE(f.reasons.empty());
    EXPECT_NE(f.reasons[0].find("λ⋆ ≡ 0 (ψ degenerate everywhere)"), std::string::npos);
  }
  EXPECT_EQ(V.exit_code(), 0);
}

TEST(Formulas, RevolutionNormalSideNonAdmissible) {
  auto V = verify(gallery("cuspidal_edge_revolution"), {256});
  auto& f = V.get("Prop2.16(1)");
  EXPECT_LT(std::fabs(f.residual), 1e-3);
  EXPECT_NEAR(f.term("2∫_Σ κ_s ds"), -4 * pi, 2e-5);
  EXPECT_EQ(V.get("Thm3.5(3)").verdict, Verdict::not_applicable);
}

TEST(Formulas, TiltedCombined) {
  auto V = verify(gallery("cuspidal_edge_tilted"), {256});
  for (auto id : {"Thm3.5(1)", "Thm3.5(2)", "Thm3.5(3)", "Thm3.5(4)", "Thm4.1(1)", "Thm4.1(2)", "Thm4.1(3)",
                  "Thm4.1(4)", "Eq4.4=Eq4.5", "Eq4.6=Eq4.7"}) {
    auto& f = V.get(id);
    EXPECT_EQ(f.verdict, Verdict::verified) << id;
    EXPECT_LT(std::fabs(f.residual), 1e-2) << id;
  }
  EXPECT_EQ(V.get("Cor4.2(1)").verdict, Verdict::not_applicable);
  EXPECT_EQ(V.get("Cor4.2(3)").verdict, Verdict::not_applicable);
  // cross-check tolerance doubles the summed component tolerances
  EXPECT_DOUBLE_EQ(V.get("Eq4.4=Eq4.5").tol, 4e-2);
}

TEST(Formulas, EulerBookkeepingBothReadings) {
  for (auto& name : gallery_names()) {
    auto V = verify(gallery(name), {64});
    for (auto side : {"phi", "psi"})
      for (auto reading : {"(closed)", "(printed)"}) {
        auto& f = V.get(std::string("Eq4.1[") + side + "]" + reading);
        EXPECT_NE(f.verdict, Verdict::failed) << name << " " << f.id;
      }
  }
}

TEST(Formulas, ParabolicRegularFirstSide) {
  auto V = verify(gallery("parabolic_graph"), {256});
  for (auto id : {"Cor4.2(1)", "Cor4.2(2)", "Thm4.1(2)"}) {
    EXPECT_EQ(V.get(id).verdict, Verdict::verified) << id;
    EXPECT_LT(std::fabs(V.get(id).residual), 1e-2) << id;
  }
  EXPECT_EQ(V.get("Cor4.2(3)").verdict, Verdict::not_applicable);
  EXPECT_FALSE(V.analysis.phi().singular());
  EXPECT_TRUE(V.analysis.psi().singular());
}

TEST(Formulas, HelicoidBoundaryOnly) {
  auto V = verify(gallery("helicoid_annulus"), {128});
  for (auto id : {"Cor4.2(1)", "Cor4.2(2)", "Cor4.2(3)", "Cor4.2(4)"}) {
    EXPECT_EQ(V.get(id).verdict, Verdict::verified) << id;
    EXPECT_LT(std::fabs(V.get(id).residual), 1e-4) << id;
  }
  for (auto id : {"Thm5.2(3)", "Thm5.2(4)"}) {
    EXPECT_EQ(V.get(id).verdict, Verdict::verified) << id;
    EXPECT_LT(std::fabs(V.get(id).residual), 1e-6) << id;
  }
  EXPECT_EQ(V.get("Thm5.2(1)").verdict, Verdict::not_applicable);
  EXPECT_EQ(V.analysis.phi().topo.chi_M, 0);
  EXPECT_EQ(V.exit_code(), 0);
}

TEST(Hypotheses, SphereCap) {
  auto s = gallery("sphere_cap");
  auto V = verify(s, {128});
  auto& H = V.hypotheses;
  EXPECT_TRUE(H.pass);
  EXPECT_EQ(H.kext_sign, 1);
  EXPECT_NEAR(H.c_global.c, -1, 1e-12);
  EXPECT_NEAR(H.log_kext_max, 0, 1e-9);
  EXPECT_EQ(V.get("Thm5.2(1)").verdict, Verdict::verified);
  EXPECT_EQ(V.get("Thm5.2(2)").verdict, Verdict::verified);
  EXPECT_EQ(V.get("Lem5.1(3)").verdict, Verdict::verified);
}

TEST(Hypotheses, HelicoidAsymptoticBoundary) {
  auto V = verify(gallery("helicoid_annulus"), {128});
  auto& H = V.hypotheses;
  EXPECT_TRUE(H.pass);
  EXPECT_EQ(H.kext_sign, -1);
  EXPECT_NEAR(H.c_global.c, 0, 1e-6);
  EXPECT_LT(H.c_global.deviation, 1e-6);
  ASSERT_EQ(H.c_components.size(), 2u);
  // kappa_g ds = -kappa*_g ds* node by node
  EXPECT_EQ(V.get("Lem5.1(3)").verdict, Verdict::verified);
}

TEST(Hypotheses, TiltedEdgeRejected) {
  auto V = verify(gallery("cuspidal_edge_tilted"), {128});
  auto& H = V.hypotheses;
  EXPECT_FALSE(H.pass);
  EXPECT_FALSE(H.c_pass);
  EXPECT_EQ(V.get("Thm5.2(3)").verdict, Verdict::not_applicable);
}

TEST(Hypotheses, VanishingExtrinsicCurvature) {
  auto V = verify(gallery("cuspidal_edge_flat"), {64});
  EXPECT_FALSE(V.hypotheses.bounded);
  EXPECT_FALSE(V.hypotheses.pass);
}

TEST(ClosedReduction, SignSplitCounts) {
  auto V = verify(gallery("flat_disk"), {32});
  CountingInputs c;
  c.kext_sign = 1;
  c.S_plus = 2;
  c.S_minus = 1;
  c.S_plus_star = 3;
  c.S_minus_star = 2;
  auto r = reduce_closed(V.analysis, c);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].verdict, Verdict::verified);
  c.kext_sign = -1;
  c.chi_M = 0;
  c.chi_plus = 1;
  c.chi_minus = 1;
  r = reduce_closed(V.analysis, c);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].verdict, Verdict::verified);
  EXPECT_EQ(r[1].verdict, Verdict::verified);
  c.chi_M = 1;
  r = reduce_closed(V.analysis, c);
  EXPECT_EQ(r[1].verdict, Verdict::failed);
  EXPECT_EQ(r[1].residual, 1);
  c.B_plus = 1;
  EXPECT_THROW(reduce_closed(V.analysis, c), std::invalid_argument);
}

TEST(ClosedReduction, MatchesBoundaryFormWhenBoundaryTermsVanish) {
  auto V = verify(gallery("helicoid_annulus"), {64});
  auto c = counting_inputs(V.analysis, -1);
  auto full = counting_formulas(V.analysis, c);
  auto red = reduce_closed(V.analysis, c);
  EXPECT_DOUBLE_EQ(full[3].residual, 4 * pi * red[1].residual);
}

TEST(Invariance, OrientationAndNormalFlip) {
  for (auto& name : gallery_names()) {
    auto s = gallery(name);
    VerifyOptions o;
    o.grid = 128;
    auto a = verify(s, o);
    o.orient = -1;
    auto b = verify(s, o);
    o.orient = 1;
    auto c = verify(flip_normal(s), o);
    ASSERT_EQ(a.formulas.size(), b.formulas.size());
    for (size_t k = 0; k < a.formulas.size(); ++k) {
      auto &x = a.formulas[k], &y = b.formulas[k], &z = c.formulas[k];
      EXPECT_EQ(x.verdict, y.verdict) << name << " " << x.id;
      EXPECT_EQ(x.verdict, z.verdict) << name << " " << x.id;
      EXPECT_NEAR(std::fabs(x.residual), std::fabs(y.residual), 1e-8) << name << " " << x.id;
      EXPECT_NEAR(std::fabs(x.residual), std::fabs(z.residual), 1e-8) << name << " " << x.id;
    }
  }
}

TEST(Convergence, SwallowtailOrder) {
  auto s = gallery("swallowtail_std");
  for (auto id : {"Thm3.5(1)", "Thm3.5(2)"}) {
    auto C = convergence_study(s, id, {64, 128, 256});
    EXPECT_FALSE(C.flagged) << id;
    EXPECT_TRUE(C.order_at_least(1)) << id;
  }
}

TEST(Convergence, FlatDiskAtFloor) {
  auto C = convergence_study(gallery("flat_disk"), "Prop2.16(1)", {64, 128});
  for (auto& r : C.rows) EXPECT_LT(std::fabs(r.residual), 1e-12);
  EXPECT_FALSE(C.flagged);
}
