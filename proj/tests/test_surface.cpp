#include <gtest/gtest.h>

#include <random>

#include "fgb/gallery.hpp"

using namespace fgb;

namespace {

const char* kEdge = R"S([surface]
f = ["u", "v^2", "v^3"]
nu = ["0", "-3*v/sqrt(4 + 9*v^2)", "2/sqrt(4 + 9*v^2)"]   # declared
[domain]
kind = "disk"
radius = 1
)S";

std::vector<ParamPoint> random_points(const Domain& d, int n, unsigned seed) {
  std::mt19937 rng(seed);
  Vec2 lo = d.box_lo(), hi = d.box_hi();
  std::uniform_real_distribution<double> du(lo.u, hi.u), dv(lo.v, hi.v);
  std::vector<ParamPoint> pts;
  while (int(pts.size()) < n) {
    Vec2 p{du(rng), dv(rng)};
    if (d.signed_distance(p) > 1e-3) pts.push_back(p);
  }
  return pts;
}

}  // namespace

TEST(ParseSurface, BasicAndEvaluation) {
  auto s = parse_surface(kEdge);
  EXPECT_EQ(s.name, "input");
  EXPECT_EQ(s.domain.kind, DomainKind::disk);
  auto J = eval_jet<3>(s, {2, 3});
  V3 f = value(J.f);
  EXPECT_DOUBLE_EQ(f.x, 2);
  EXPECT_DOUBLE_EQ(f.y, 9);
  EXPECT_DOUBLE_EQ(f.z, 27);
  auto K = eval_jet<3>(s, {0, 1});
  V3 fv = partial(K.f, 0, 1), fvv = partial(K.f, 0, 2);
  EXPECT_DOUBLE_EQ(fv.y, 2);
  EXPECT_DOUBLE_EQ(fv.z, 3);
  EXPECT_DOUBLE_EQ(fvv.y, 2);
  EXPECT_DOUBLE_EQ(fvv.z, 6);
}

TEST(ParseSurface, Errors) {
  try {
    parse_surface("[surface]\nf = [\"u\",\"v^2\"]\n[domain]\nkind = \"disk\"\nradius = 1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("f requires exactly 3 components"), std::string::npos);
    EXPECT_EQ(e.line, 2);
  }
  try {
    parse_surface("[surface]\nf = [\"sin u\",\"v\",\"0\"]\n[domain]\nkind = \"disk\"\nradius = 1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("parentheses"), std::string::npos);
    EXPECT_EQ(e.line, 2);
  }
  EXPECT_THROW(parse_surface("[surface]\nf = [\"u\",\"v\",\"0\"]\n[domain]\nkind = \"torus\"\n"), ParseError);
  EXPECT_THROW(parse_surface("[surface]\nf = [\"u\",\"v\",\"0\"]\n[domain]\nkind = \"disk\"\nradius = 1\n"
                             "[options]\ngrid = 8\n"),
               ParseError);
}

TEST(ParseSurface, DomainKinds) {
  auto s = parse_surface(
      "[surface]\nf = [\"u\",\"v\",\"0\"]\nnu = [\"0\",\"0\",\"1\"]\n[domain]\nkind = \"annulus\"\n"
      "center = [1, 2]\nr_inner = 0.5\nr_outer = 2\n[options]\ngrid = 64\nangle_eps = 0.02\n");
  EXPECT_EQ(s.domain.kind, DomainKind::annulus);
  EXPECT_EQ(s.options.grid, 64);
  EXPECT_DOUBLE_EQ(s.options.angle_eps, 0.02);
  EXPECT_EQ(s.domain.boundary().size(), 2u);
  EXPECT_EQ(s.domain.expected_euler(), 0);
  auto r = parse_surface(
      "[surface]\nf = [\"u\",\"v\",\"0\"]\nnu = [\"0\",\"0\",\"1\"]\n[domain]\nkind = \"rectangle\"\n"
      "corners = [[1, 1], [-1, 0]]\n");
  EXPECT_DOUBLE_EQ(r.domain.lo.u, -1);
  EXPECT_DOUBLE_EQ(r.domain.hi.v, 1);
}

TEST(ResolveNormal, AutoForImmersion) {
  auto s = resolve_normal(parse_surface(
      "[surface]\nf = [\"u\",\"v\",\"u^2 + v^3\"]\nnu = \"auto\"\n[domain]\nkind = \"disk\"\nradius = 1\n"));
  Vec2 p{0.3, -0.6};
  V3 n = value(eval_jet<0>(s, p).nu);
  double r = std::sqrt(1 + 4 * p.u * p.u + 9 * std::pow(p.v, 4));
  EXPECT_NEAR(n.x, -2 * p.u / r, 1e-15);
  EXPECT_NEAR(n.y, -3 * p.v * p.v / r, 1e-15);
  EXPECT_NEAR(n.z, 1 / r, 1e-15);
}

TEST(ResolveNormal, AutoRejectedOnSingularSet) {
  auto s = parse_surface("[surface]\nf = [\"u\",\"v^2\",\"v^3\"]\nnu = \"auto\"\n[domain]\nkind = \"disk\"\nradius = 1\n");
  try {
    resolve_normal(s);
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_NE(std::string(e.what()).find("normal degenerates on singular set"), std::string::npos);
  }
  EXPECT_NO_THROW(resolve_normal(parse_surface(kEdge)));
}

TEST(ResolveNormal, SphereAndCorruptedNormal) {
  EXPECT_NO_THROW(resolve_normal(parse_surface(
      "[surface]\nf = [\"cos(u)*cos(v)\",\"sin(u)*cos(v)\",\"sin(v)\"]\n"
      "nu = [\"cos(u)*cos(v)\",\"sin(u)*cos(v)\",\"sin(v)\"]\n[domain]\nkind = \"rectangle\"\ncorners = [[0, -1], [6, 1]]\n")));
  EXPECT_THROW(resolve_normal(parse_surface(
                   "[surface]\nf = [\"u\",\"v\",\"0\"]\nnu = [\"0\",\"0\",\"1.01\"]\n[domain]\nkind = \"disk\"\nradius = 1\n")),
               GeometryError);
}

TEST(Gallery, NamesAndUnknown) {
  EXPECT_EQ(gallery_names().size(), 9u);
  try {
    gallery("torus");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("swallowtail_std"), std::string::npos);
  }
}

TEST(Gallery, FrontalValidationAtGridNodes) {
  for (auto& name : gallery_names()) {
    auto s = gallery(name);
    auto c = check_frontal(s, validation_points(s.domain, 128));
    EXPECT_LT(c.max_tangency, 1e-9) << name;
    EXPECT_LT(c.max_unit, 1e-9) << name;
  }
}

TEST(Gallery, JetsAgainstCentralDifferences) {
  const double h = 1e-5;
  for (auto& name : gallery_names()) {
    auto s = gallery(name);
    for (auto p : random_points(s.domain, 100, 11)) {
      auto J = eval_jet<2>(s, p);
      for (int which = 0; which < 2; ++which) {
        auto get = [&](Vec2 q, int i, int j) {
          auto K = eval_jet<2>(s, q);
          return partial(which ? K.nu : K.f, i, j);
        };
        const auto& X = which ? J.nu : J.f;
        V3 fd_u = (1 / (2 * h)) * (get({p.u + h, p.v}, 0, 0) - get({p.u - h, p.v}, 0, 0));
        V3 fd_v = (1 / (2 * h)) * (get({p.u, p.v + h}, 0, 0) - get({p.u, p.v - h}, 0, 0));
        V3 fd_uu = (1 / (2 * h)) * (get({p.u + h, p.v}, 1, 0) - get({p.u - h, p.v}, 1, 0));
        V3 fd_uv = (1 / (2 * h)) * (get({p.u, p.v + h}, 1, 0) - get({p.u, p.v - h}, 1, 0));
        V3 fd_vv = (1 / (2 * h)) * (get({p.u, p.v + h}, 0, 1) - get({p.u, p.v - h}, 0, 1));
        std::pair<V3, V3> cmp[] = {{fd_u, partial(X, 1, 0)},
                                   {fd_v, partial(X, 0, 1)},
                                   {fd_uu, partial(X, 2, 0)},
                                   {fd_uv, partial(X, 1, 1)},
                                   {fd_vv, partial(X, 0, 2)}};
        for (auto& [a, b] : cmp)
          for (int k = 0; k < 3; ++k)
            EXPECT_NEAR(a[k], b[k], 1e-6 * std::max(1.0, std::fabs(b[k]))) << name << " at " << p.u << "," << p.v;
      }
    }
  }
}

TEST(Gallery, CylinderSeamMatches) {
  for (auto name : {"cuspidal_edge_revolution", "helicoid_annulus"}) {
    auto s = gallery(name);
    double P = s.domain.period();
    for (double v : {s.domain.lo.v, 0.5 * (s.domain.lo.v + s.domain.hi.v), s.domain.hi.v}) {
      auto a = eval_jet<3>(s, {0, v}), b = eval_jet<3>(s, {P, v});
      for (int i = 0; i <= 3; ++i)
        for (int j = 0; i + j <= 3; ++j)
          if (i + j > 0) {
            V3 x = partial(a.nu, i, j), y = partial(b.nu, i, j);
            for (int k = 0; k < 3; ++k) EXPECT_NEAR(x[k], y[k], 1e-12) << name;
          }
    }
  }
}

TEST(Gallery, SwallowtailLambda) {
  auto s = gallery("swallowtail_std");
  auto J = eval_jet<1>(s, {0, 1});
  EXPECT_NEAR(det3(partial(J.f, 1, 0), partial(J.f, 0, 1), value(J.nu)), 2.0, 1e-14);
}
