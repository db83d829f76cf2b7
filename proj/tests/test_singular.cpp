#include <gtest/gtest.h>

#include <numbers>

#include "fgb/gallery.hpp"
#include "fgb/singular.hpp"

using namespace fgb;

namespace {

struct Traced {
  SurfaceDef s;
  SideField F;
  Subdivision S;
  std::vector<SingularCurveTrace> traces;
};

Traced trace(const std::string& name, int n, Side side = Side::phi, int orient = 1) {
  Traced t{gallery(name), {}, {}, {}};
  t.F = SideField{&t.s, side, orient};
  t.S = build_subdivision(t.s.domain, t.F, n);
  TraceOptions opt;
  opt.step_bound = trace_step_bound(t.s.domain, n);
  t.traces = extract_traces(t.s, t.F, t.S, opt);
  for (auto& tr : t.traces) {
    auto k = classify_kinds(t.s, t.F, tr, opt);
    EXPECT_TRUE(k.error.empty()) << k.error;
  }
  return t;
}

double total(const Traced& t, MeasureOptions mo = {}) {
  double sum = 0;
  for (auto& tr : t.traces) sum += integrate(singular_measure(t.s, t.F, tr, mo));
  return sum;
}

}  // namespace

TEST(NullDirection, KernelAndDegenerate) {
  Vec2 eta = null_direction(Mat2{1, 2, 2, 4});
  Vec2 r = Mat2{1, 2, 2, 4}.apply(eta);
  EXPECT_NEAR(norm(r), 0, 1e-15);
  EXPECT_NEAR(norm(eta), 1, 1e-15);
  EXPECT_THROW(null_direction(Mat2{}), GeometryError);
}

TEST(Traces, RevolutionEdgeCircle) {
  auto t = trace("cuspidal_edge_revolution", 64);
  ASSERT_EQ(t.traces.size(), 1u);
  const auto& tr = t.traces[0];
  EXPECT_TRUE(tr.closed);
  EXPECT_NEAR(tr.length, 2 * std::numbers::pi, 1e-9);
  for (auto& smp : tr.samples) {
    EXPECT_NEAR(smp.p.v, 0, 1e-12);
    EXPECT_NEAR(smp.kappa_s, -0.5, 1e-6);
  }
  EXPECT_TRUE(tr.markers.empty());
  EXPECT_NEAR(total(t), -2 * std::numbers::pi, 1e-5);
}

TEST(Traces, FlatEdgeHasZeroSingularCurvature) {
  auto t = trace("cuspidal_edge_flat", 64);
  ASSERT_EQ(t.traces.size(), 1u);
  EXPECT_FALSE(t.traces[0].closed);
  for (auto& smp : t.traces[0].samples) EXPECT_NEAR(smp.kappa_s, 0, 1e-10);
  EXPECT_NEAR(total(t), 0, 1e-8);
}

TEST(Traces, SwallowtailPeak) {
  auto t = trace("swallowtail_std", 64);
  ASSERT_EQ(t.traces.size(), 1u);
  const auto& m = t.traces[0].markers;
  ASSERT_EQ(m.size(), 1u);
  EXPECT_NEAR(m[0].p.u, 0, 1e-8);
  EXPECT_NEAR(m[0].p.v, 0, 1e-8);
  EXPECT_EQ(m[0].order, 0);
  EXPECT_GT(std::fabs(m[0].delta_derivs[0]), 1.0);
  EXPECT_TRUE(std::isfinite(total(t)));
}

TEST(Traces, MeasureInvariance) {
  for (auto name : {"cuspidal_edge_tilted", "swallowtail_std", "cuspidal_edge_revolution"}) {
    auto t = trace(name, 64);
    double base = total(t);
    EXPECT_NEAR(total(t, {true, false}), base, 1e-9) << name;
    EXPECT_NEAR(total(t, {false, true}), base, 1e-9) << name;
    auto flipped = trace(name, 64, Side::phi, -1);
    EXPECT_NEAR(total(flipped), base, 1e-9) << name;
  }
}

TEST(Traces, GridRefinementConverges) {
  auto a = trace("cuspidal_edge_tilted", 64), b = trace("cuspidal_edge_tilted", 128);
  EXPECT_NEAR(total(a), total(b), 1e-9);
}

TEST(Transversality, TiltedBoundaryPoints) {
  auto t = trace("cuspidal_edge_tilted", 64);
  auto r = transversality_check(t.s, t.F, t.S);
  EXPECT_TRUE(r.pass);
  ASSERT_EQ(r.points.size(), 2u);
  for (auto& b : r.points) {
    EXPECT_GT(b.angle, 1.0);
    EXPECT_EQ(b.kind, PointKind::first);
  }
}
