// Acceptance run: one pass/fail line per criterion, sub-criteria as a/b/c.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "fgb/gallery.hpp"
#include "fgb/report.hpp"

using namespace fgb;

namespace {

const double pi = std::numbers::pi;

struct Line {
  std::string tag, what, detail;
  bool pass = false, known = false;
};

std::vector<Line> lines;

void record(const std::string& tag, const std::string& what, bool pass, const std::string& detail, bool known = false) {
  lines.push_back({tag, what, detail, pass, known});
  std::printf("[%s] %-4s %-64s %s%s\n", pass ? "PASS" : "FAIL", tag.c_str(), what.c_str(), detail.c_str(),
              !pass && known ? "  (recorded deviation)" : "");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

VerifyOptions at(int grid, int orient = 1) {
  VerifyOptions o;
  o.grid = grid;
  o.orient = orient;
  return o;
}

double res(const Verification& V, const std::string& id) { return std::fabs(V.get(id).residual); }
bool ok(const Verification& V, const std::string& id) { return V.get(id).verdict == Verdict::verified; }

double max_pointwise_kappa_s(const SurfaceDef& s, const SideAnalysis& a, double target) {
  SideField F{&s, a.which, 1};
  double worst = 0;
  for (auto& tr : a.topo.traces)
    for (auto& smp : tr.samples)
      if (smp.speed > 1e-6) worst = std::max(worst, std::fabs(singular_curvature(s, F, smp) - target));
  return worst;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream b;
  b << in.rdbuf();
  return b.str();
}

// ---------------------------------------------------------------- criteria

void c1() {
  auto s = gallery("flat_disk");
  auto t0 = std::chrono::steady_clock::now();
  auto V = verify(s, at(256));
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto& f = V.get("Prop2.16(1)");
  record("1a", "flat_disk Prop2.16(1) residual < 1e-8", ok(V, "Prop2.16(1)") && std::fabs(f.residual) < 1e-8,
         fmt("residual %.3e", f.residual));
  double kg = V.analysis.phi().boundary.total;
  record("1b", "flat_disk boundary term = 2pi", std::fabs(kg - 2 * pi) < 1e-8, fmt("value %.15f", kg));
  record("1c", "flat_disk runtime at grid 256 < 5 s", secs < 5, fmt("%.3f s", secs));
}

void c2() {
  auto s = gallery("sphere_cap");
  auto V = verify(s, at(256));
  const auto& A = V.analysis;
  double lhs = A.area.total + A.phi().boundary.total;
  record("2a", "sphere_cap int K dA + int kappa_g ds = 2pi within 1e-6", std::fabs(lhs - 2 * pi) < 1e-6,
         fmt("lhs - 2pi = %.3e, int K dA - pi = %.3e", lhs - 2 * pi, A.area.total - pi));
  std::mt19937 rng(20261015);
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<ParamPoint> pts;
  while (pts.size() < 1000) {
    Vec2 p{U(rng), U(rng)};
    if (s.domain.signed_distance(p) > 0) pts.push_back(p);
  }
  auto R = pointwise_identities(s, pts);
  double worst = std::max({R.gauss, R.ext, R.abs_ext, R.product});
  record("2b", "sphere_cap pointwise curvature identities < 1e-9 at 1000 pts",
         worst < 1e-9 && R.used[0] == 1000 && R.used[3] == 1000,
         fmt("max %.3e (gauss %.1e, ext %.1e)", worst, R.gauss, R.ext));
}

void c3() {
  auto s = gallery("cuspidal_edge_flat");
  auto A = analyze(s, at(256));
  const auto& P = A.phi();
  double ks = max_pointwise_kappa_s(s, P, 0);
  record("3a", "cuspidal_edge_flat kappa_s = 0 along the singular set within 1e-8",
         ks < 1e-8 && !P.topo.traces.empty() && std::fabs(P.kappa_s) < 1e-8,
         fmt("max |kappa_s| %.3e, integral %.3e", ks, P.kappa_s));
  record("3b", "cuspidal_edge_flat boundary kappa_g integral = 2pi within 1e-4",
         std::fabs(P.boundary.total - 2 * pi) < 1e-4, fmt("error %.3e", P.boundary.total - 2 * pi));
  record("3c", "cuspidal_edge_flat split boundary integrals (0, 2pi) within 1e-3",
         std::fabs(P.boundary.plus) < 1e-3 && std::fabs(P.boundary.minus - 2 * pi) < 1e-3,
         fmt("plus %.3e, minus - 2pi %.3e", P.boundary.plus, P.boundary.minus - 2 * pi));
  const auto& T = P.topo;
  record("3d", "cuspidal_edge_flat boundary crossings negative, count 2",
         T.B_minus == 2 && T.B_plus == 0 && T.B_null == 0,
         fmt("negative %g, positive %g, null %g", T.B_minus, T.B_plus, T.B_null));
}

void c4() {
  auto s = gallery("cuspidal_edge_revolution");
  auto V = verify(s, at(256));
  const auto& P = V.analysis.phi();
  double ks = max_pointwise_kappa_s(s, P, -0.5);
  record("4a", "cuspidal_edge_revolution kappa_s = -1/2 pointwise within 1e-6", ks < 1e-6 && !P.topo.traces.empty(),
         fmt("max deviation %.3e", ks));
  record("4b", "cuspidal_edge_revolution int kappa_s ds = -2pi within 1e-5", std::fabs(P.kappa_s + 2 * pi) < 1e-5,
         fmt("error %.3e", P.kappa_s + 2 * pi));
  double r256 = res(V, "Prop2.16(1)");
  auto W = verify(s, at(512), {"Prop2.16(1)"});
  double r512 = res(W, "Prop2.16(1)");
  const double floor = 1e-9;
  bool halves = r512 <= 0.5 * r256 || (r256 < floor && r512 < floor);
  record("4c", "cuspidal_edge_revolution Prop2.16(1) < 1e-3 at 256, halving at 512",
         ok(V, "Prop2.16(1)") && r256 < 1e-3 && halves,
         fmt("256: %.3e, 512: %.3e (floor %.0e)", r256, r512, floor));
}

void c5() {
  auto s = gallery("swallowtail_std");
  auto V = verify(s, at(256));
  const auto& T = V.analysis.phi().topo;
  int second = 0;
  const SingularPointRecord* r = nullptr;
  for (auto& x : T.records)
    if (!x.boundary && x.kind == PointKind::second_admissible) {
      ++second;
      r = &x;
    }
  bool at_origin = r && norm(r->p) < 1e-6 && r->order == 0;
  record("5a", "swallowtail_std one admissible second-kind point at origin, k = 0", second == 1 && at_origin,
         r ? fmt("count %g at (%.1e, %.1e)", second, r->p.u, r->p.v) : "none");
  double sum = r ? r->alpha_plus + r->alpha_minus : 0;
  record("5b", "swallowtail_std alpha+ + alpha- = 2pi within 2e-2", r && std::fabs(sum - 2 * pi) < 2e-2,
         fmt("error %.3e", sum - 2 * pi));
  double a = res(V, "Thm3.5(1)"), b = res(V, "Thm3.5(2)");
  record("5c", "swallowtail_std Thm3.5(1),(2) residuals < 1e-2 at grid 256",
         ok(V, "Thm3.5(1)") && ok(V, "Thm3.5(2)") && a < 1e-2 && b < 1e-2, fmt("%.3e, %.3e", a, b));
  std::string detail;
  bool order = true;
  for (auto id : {"Thm3.5(1)", "Thm3.5(2)"}) {
    auto C = convergence_study(s, id);
    order = order && C.order_at_least(1) && !C.flagged;
    detail += std::string(id) + ":";
    for (auto& row : C.rows) detail += fmt(" %.1e", row.residual);
    detail += " ";
  }
  record("5d", "swallowtail_std empirical convergence order >= 1 (64..512)", order, detail);
}

void c6() {
  auto s = gallery("parabolic_graph");
  auto V = verify(s, at(256));
  double a = res(V, "Cor4.2(1)"), b = res(V, "Cor4.2(2)");
  record("6a", "parabolic_graph Cor4.2(1),(2) residuals < 1e-2",
         ok(V, "Cor4.2(1)") && ok(V, "Cor4.2(2)") && a < 1e-2 && b < 1e-2, fmt("%.3e, %.3e", a, b));
  const auto& P = V.analysis.phi().topo;
  record("6b", "parabolic_graph singular set of f empty", !P.degenerate && P.traces.empty() && P.records.empty(),
         fmt("traces %g, points %g", P.traces.size(), P.records.size()));
  const auto& Q = V.analysis.psi().topo;
  double vmax = 0;
  bool first = !Q.traces.empty();
  for (auto& tr : Q.traces) {
    for (auto& smp : tr.samples) vmax = std::max(vmax, std::fabs(smp.p.v));
    first = first && tr.markers.empty();
  }
  for (auto& x : Q.records) first = first && (x.boundary || x.kind == PointKind::first);
  record("6c", "parabolic_graph singular set of nu first kind along v = 0", first && vmax < 1e-6,
         fmt("traces %g, max |v| %.3e", Q.traces.size(), vmax));
}

void c7() {
  auto s = gallery("cuspidal_edge_tilted");
  auto V = verify(s, at(256));
  double worst = 0;
  bool all = true;
  for (auto id : {"Thm4.1(1)", "Thm4.1(2)", "Thm4.1(3)", "Thm4.1(4)"}) {
    worst = std::max(worst, res(V, id));
    all = all && ok(V, id);
  }
  record("7a", "cuspidal_edge_tilted Thm4.1(1)-(4) residuals < 1e-2 at grid 256", all && worst < 1e-2,
         fmt("max %.3e", worst));
  const auto &x = V.get("Eq4.4=Eq4.5"), &y = V.get("Eq4.6=Eq4.7");
  record("7b", "cuspidal_edge_tilted internal cross-checks agree",
         x.verdict == Verdict::verified && y.verdict == Verdict::verified,
         fmt("%.3e (tol %.0e), ", x.residual, x.tol) + fmt("%.3e (tol %.0e)", y.residual, y.tol));
  const auto& H = V.hypotheses;
  std::string why;
  for (auto& r : H.reasons) why += (why.empty() ? "" : "; ") + r;
  record("7c", "cuspidal_edge_tilted extrinsic hypothesis checker fails", !H.pass, why);
  record("7d", "cuspidal_edge_tilted failure diagnosed as unboundedness", !H.bounded,
         fmt("log|K^ext| in [%.2f, %.2f], growth toward the edge %.2e", H.log_kext_min, H.log_kext_max,
             H.refine_growth),
         true);
}

void c8() {
  auto s = gallery("helicoid_annulus");
  auto V = verify(s, at(256));
  const auto& H = V.hypotheses;
  record("8a", "helicoid_annulus hypothesis checker passes, c = 0, K^ext < 0",
         H.pass && std::fabs(H.c_global.c) < 1e-6 && H.kext_sign == -1,
         fmt("c %.3e, sign %g", H.c_global.c, H.kext_sign));
  double a = res(V, "Thm5.2(3)"), b = res(V, "Thm5.2(4)");
  record("8b", "helicoid_annulus Thm5.2(3),(4) residuals < 1e-6",
         ok(V, "Thm5.2(3)") && ok(V, "Thm5.2(4)") && a < 1e-6 && b < 1e-6, fmt("%.3e, %.3e", a, b));
  long chi = V.analysis.phi().topo.chi_M;
  record("8c", "helicoid_annulus chi(M) = 0 from the cell complex", chi == 0, fmt("chi %g", double(chi)));
}

void c9() {
  const int grid = 256;
  double ks_drift = 0, res_drift = 0;
  std::string worst_at;
  bool verdicts = true;
  for (auto& name : gallery_names()) {
    auto s = gallery(name);
    auto a = verify(s, at(grid));
    auto b = verify(s, at(grid, -1));
    auto c = verify(flip_normal(s), at(grid));
    for (size_t k = 0; k < a.formulas.size(); ++k)
      for (auto* o : {&b, &c}) {
        auto &x = a.formulas[k], &y = o->formulas[k];
        verdicts = verdicts && x.id == y.id && x.verdict == y.verdict;
        double d = std::fabs(std::fabs(x.residual) - std::fabs(y.residual));
        if (d > res_drift) {
          res_drift = d;
          worst_at = name + " " + x.id;
        }
      }
    for (int side = 0; side < 2; ++side) {
      const auto& sa = a.analysis.side[side];
      if (sa.topo.degenerate) continue;
      double ref = sa.kappa_s;
      for (auto* o : {&b, &c}) ks_drift = std::max(ks_drift, std::fabs(o->analysis.side[side].kappa_s - ref));
      SideField F{&s, sa.which, 1};
      try {
        for (auto& tr : sa.topo.traces) {
          double base = integrate(singular_measure(s, F, tr));
          double rev = integrate(singular_measure(s, F, tr, {true, false}));
          double rep = integrate(singular_measure(s, F, tr, {false, true}));
          ks_drift = std::max({ks_drift, std::fabs(rev - base), std::fabs(rep - base)});
        }
      } catch (const GeometryError&) {
        // non-admissible side; its formulas are already not_applicable in every variant
      }
    }
  }
  record("9a", "kappa_s invariant under reversal, reparametrization, flips", ks_drift < 1e-8,
         fmt("max drift %.3e", ks_drift));
  record("9b", "formula residuals invariant under orientation and nu flips", verdicts && res_drift < 1e-8,
         fmt("max drift %.3e at grid %g", res_drift, grid) + " (" + worst_at + ")");
}

void c10() {
  int runs = 0, exact = 0;
  std::string bad;
  for (auto& name : gallery_names()) {
    auto s = gallery(name);
    auto V = verify(s, at(256), {"Eq4.1"});
    for (int side = 0; side < 2; ++side) {
      const auto& sa = V.analysis.side[side];
      if (sa.topo.degenerate || !sa.singular()) continue;
      ++runs;
      std::string id = std::string("Eq4.1[") + to_string(sa.which) + "](closed)";
      const auto& f = V.get(id);
      bool identity = sa.topo.inclusion_exclusion();
      bool report = f.verdict == Verdict::not_applicable || f.residual == 0.0;
      if (identity && report)
        ++exact;
      else
        bad += " " + name + "/" + to_string(sa.which);
    }
  }
  record("10", "inclusion-exclusion Euler identity exact on every singular run", runs > 0 && exact == runs,
         fmt("%g of %g runs exact", exact, runs) + bad);
}

void c11() {
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() / ("fgb_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  std::string a = (dir / "a.json").string(), b = (dir / "b.json").string();
  std::string base = std::string(FGB_CLI) + " verify gallery:cuspidal_edge_tilted --grid 256 --out ";
  int ra = std::system((base + a + " 2>/dev/null").c_str());
  int rb = std::system((base + b + " 2>/dev/null").c_str());
  std::string ja = slurp(a), jb = slurp(b);
  bool same = ra == 0 && rb == 0 && !ja.empty() && ja == jb;
  fs::remove_all(dir);
  record("11", "two verify runs give byte-identical JSON", same, fmt("%g bytes", double(ja.size())));
}

}  // namespace

int main() {
  c1();
  c2();
  c3();
  c4();
  c5();
  c6();
  c7();
  c8();
  c9();
  c10();
  c11();
  int failed = 0, known = 0;
  for (auto& l : lines)
    if (!l.pass) ++(l.known ? known : failed);
  std::printf("%zu checks, %d failed, %d recorded deviation(s)\n", lines.size(), failed + known, known);
  return failed ? 1 : 0;
}
