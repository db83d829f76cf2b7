#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "verifier.hpp"

namespace fgb {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

using json = nlohmann::json;

// ---------------------------------------------------------------- serialization

namespace detail {

inline void put_number(std::string& out, double x) {
  if (!std::isfinite(x)) {
    out += "null";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

inline void put_string(std::string& out, const std::string& s) { out += json(s).dump(); }

inline void write(std::string& out, const json& j, int indent, int depth) {
  auto nl = [&](int d) {
    out += '\n';
    out.append(size_t(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map order: sorted keys
        if (!first) out += ',';
        first = false;
        nl(depth + 1);
        put_string(out, it.key());
        out += ": ";
        write(out, it.value(), indent, depth + 1);
      }
      nl(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      for (size_t k = 0; k < j.size(); ++k) {
        if (k) out += ',';
        nl(depth + 1);
        write(out, j[k], indent, depth + 1);
      }
      nl(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float: put_number(out, j.get<double>()); return;
    case json::value_t::string: put_string(out, j.get<std::string>()); return;
    default: out += j.dump(); return;
  }
}

}  // namespace detail

// 17 significant digits, sorted keys, non-finite numbers as null
inline std::string dump_report(const json& j) {
  std::string out;
  detail::write(out, j, 2, 0);
  out += '\n';
  return out;
}

// ---------------------------------------------------------------- pieces

inline json surface_json(const SurfaceDef& s) {
  const Domain& d = s.domain;
  json dom = {{"kind", to_string(d.kind)}};
  switch (d.kind) {
    case DomainKind::disk: dom["center"] = {d.center.u, d.center.v}; dom["radius"] = d.r_outer; break;
    case DomainKind::annulus:
      dom["center"] = {d.center.u, d.center.v};
      dom["r_inner"] = d.r_inner;
      dom["r_outer"] = d.r_outer;
      break;
    case DomainKind::cylinder: dom["period"] = d.period(); dom["v_range"] = {d.lo.v, d.hi.v}; break;
    case DomainKind::rectangle: dom["lo"] = {d.lo.u, d.lo.v}; dom["hi"] = {d.hi.u, d.hi.v}; break;
  }
  json f = json::array(), nu = json::array();
  for (auto& e : s.f) f.push_back(to_string(e));
  for (auto& e : s.nu) nu.push_back(to_string(e));
  return {{"name", s.name}, {"f", f}, {"nu", nu}, {"domain", dom}};
}

inline json record_json(const SingularPointRecord& r) {
  json j = {{"u", r.p.u},
            {"v", r.p.v},
            {"boundary", r.boundary},
            {"kind", to_string(r.kind)},
            {"sign", to_string(r.sign)},
            {"alpha_plus", r.alpha_plus},
            {"alpha_minus", r.alpha_minus},
            {"angle_estimate",
             {{"plus", r.estimate.plus},
              {"minus", r.estimate.minus},
              {"raw_plus", {r.estimate.raw_plus[0], r.estimate.raw_plus[1], r.estimate.raw_plus[2]}},
              {"raw_minus", {r.estimate.raw_minus[0], r.estimate.raw_minus[1], r.estimate.raw_minus[2]}},
              {"spread", r.estimate.spread},
              {"error", r.estimate.error}}}};
  if (r.boundary) {
    j["component"] = r.comp;
    j["tau"] = r.tau;
    j["transversal_angle"] = r.transversal_angle;
    j["null_parallel"] = r.null_parallel;
  } else {
    j["order"] = r.order;
  }
  return j;
}

inline json trace_json(const SingularCurveTrace& t, size_t max_points = 256) {
  json pts = json::array();
  size_t n = t.samples.size(), stride = std::max<size_t>(1, (n + max_points - 1) / max_points);
  for (size_t k = 0; k < n; k += stride) pts.push_back({t.samples[k].p.u, t.samples[k].p.v});
  if (n && (n - 1) % stride) pts.push_back({t.samples.back().p.u, t.samples.back().p.v});
  json markers = json::array();
  for (auto& m : t.markers) markers.push_back({{"u", m.p.u}, {"v", m.p.v}, {"s", m.s}, {"order", m.order}});
  return {{"closed", t.closed},
          {"length", t.length},
          {"samples", n},
          {"start_boundary", t.start_boundary},
          {"end_boundary", t.end_boundary},
          {"points", pts},
          {"markers", markers}};
}

inline json side_json(const SideAnalysis& a) {
  const auto& T = a.topo;
  json recs = json::array(), traces = json::array();
  for (auto& r : T.records) recs.push_back(record_json(r));
  for (auto& t : T.traces) traces.push_back(trace_json(t));
  json j = {{"degenerate", T.degenerate},
            {"applicable", a.applicable()},
            {"reasons", a.reasons},
            {"chi",
             {{"M", T.chi_M},
              {"plus_closed", T.chi_plus},
              {"minus_closed", T.chi_minus},
              {"singular_set", T.chi_sigma},
              {"plus_open", T.chi_c_plus()},
              {"minus_open", T.chi_c_minus()}}},
            {"counts",
             {{"second_kind_positive", T.S_plus},
              {"second_kind_negative", T.S_minus},
              {"second_kind_null", T.S_null},
              {"boundary_positive", T.B_plus},
              {"boundary_negative", T.B_minus},
              {"boundary_null", T.B_null}}},
            {"null_angle_sum", T.null_sum},
            {"singular_points", recs},
            {"traces", traces},
            {"transversality", {{"pass", T.transversality.pass}, {"margin", T.transversality.margin}}}};
  if (!T.degenerate) {
    j["kappa_s_integral"] = a.kappa_s;
    j["boundary_kappa_g"] = {{"total", a.boundary.total},
                             {"plus", a.boundary.plus},
                             {"minus", a.boundary.minus},
                             {"frame_form_mismatch", a.boundary.max_crosscheck}};
  }
  return j;
}

inline json analysis_json(const Analysis& A) {
  return {{"area",
           {{"connection_form", A.area.total},
            {"minus_phi", A.area.minus[0]},
            {"minus_psi", A.area.minus[1]},
            {"plus_phi", A.area.plus[0]},
            {"plus_psi", A.area.plus[1]}}},
          {"phi", side_json(A.phi())},
          {"psi", side_json(A.psi())}};
}

inline json hypotheses_json(const HypothesisReport& H) {
  json comps = json::array();
  for (auto& c : H.c_components) comps.push_back({{"c", c.c}, {"deviation", c.deviation}, {"samples", c.samples}});
  return {{"pass", H.pass},
          {"reasons", H.reasons},
          {"kext_sign", H.kext_sign},
          {"boundedness",
           {{"bounded", H.bounded},
            {"samples", H.samples},
            {"log_kext_min", H.log_kext_min},
            {"log_kext_max", H.log_kext_max},
            {"refinement_growth", H.refine_growth}}},
          {"first_kind_shared", {{"pass", H.first_kind_shared}, {"checked", H.first_kind_checked}}},
          {"boundary_constant",
           {{"pass", H.c_pass}, {"c", H.c_global.c}, {"deviation", H.c_global.deviation}, {"components", comps}}}};
}

inline json terms_json(const Terms& t) {
  json j = json::object();
  for (auto& [k, v] : t) j[k] = v;
  return j;
}

inline json formula_json(const FormulaReport& f, double transversality_margin = 1e-3) {
  return {{"id", f.id},
          {"verdict", to_string(f.verdict)},
          {"reasons", f.reasons},
          {"terms", {{"lhs", terms_json(f.lhs_terms)}, {"rhs", terms_json(f.rhs_terms)}}},
          {"lhs", f.lhs},
          {"rhs", f.rhs},
          {"residual", f.residual},
          {"metadata",
           {{"grid", f.grid},
            {"angle_eps", f.angle_eps},
            {"tolerance", f.tol},
            {"transversality_margin", transversality_margin}}}};
}

inline json convergence_json(const ConvergenceStudy& C) {
  json rows = json::array();
  for (auto& r : C.rows)
    rows.push_back({{"grid", r.grid}, {"residual", r.residual}, {"order", r.order}, {"verdict", to_string(r.verdict)}});
  return {{"id", C.id}, {"rows", rows}, {"flagged", C.flagged}, {"floor", C.floor}};
}

inline json report_header(const std::string& command, const SurfaceDef& s, const VerifyOptions& opt) {
  return {{"schema_version", kSchemaVersion},
          {"tool", {{"name", "fgb"}, {"version", kToolVersion}}},
          {"command", command},
          {"surface", surface_json(s)},
          {"config", {{"grid", opt.grid}, {"angle_eps", opt.angle_eps}, {"orient", opt.orient}}}};
}

inline json analyze_report(const SurfaceDef& s, const Analysis& A, const HypothesisReport& H) {
  json j = report_header("analyze", s, A.opt);
  j["topology"] = analysis_json(A);
  j["hypotheses"] = hypotheses_json(H);
  return j;
}

inline json verify_report(const SurfaceDef& s, const Verification& V, const std::vector<std::string>& sel) {
  json j = report_header("verify", s, V.analysis.opt);
  j["config"]["formulas"] = sel;
  j["topology"] = analysis_json(V.analysis);
  j["hypotheses"] = hypotheses_json(V.hypotheses);
  json fs = json::array();
  int counts[3] = {0, 0, 0};
  for (auto& f : V.formulas) {
    fs.push_back(formula_json(f, V.analysis.phi().topo.transversality.margin));
    ++counts[int(f.verdict)];
  }
  j["formulas"] = fs;
  j["summary"] = {{"verified", counts[0]}, {"not_applicable", counts[1]}, {"failed", counts[2]}, {"exit_code", V.exit_code()}};
  return j;
}

// ---------------------------------------------------------------- svg

namespace detail {

struct Canvas {
  Vec2 lo, hi;
  double size = 480, margin = 20;
  double scale() const { return (size - 2 * margin) / std::max(hi.u - lo.u, hi.v - lo.v); }
  double width() const { return 2 * margin + (hi.u - lo.u) * scale(); }
  double height() const { return 2 * margin + (hi.v - lo.v) * scale(); }
  double x(double u) const { return margin + (u - lo.u) * scale(); }
  double y(double v) const { return height() - margin - (v - lo.v) * scale(); }
};

inline std::string xml_escape(const std::string& t) {
  std::string r;
  for (char ch : t) {
    switch (ch) {
      case '&': r += "&amp;"; break;
      case '<': r += "&lt;"; break;
      case '>': r += "&gt;"; break;
      case '"': r += "&quot;"; break;
      default: r += ch;
    }
  }
  return r;
}

inline std::string fmt(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3f", x == 0.0 ? 0.0 : x);
  return b;
}

inline std::string polyline(const Canvas& c, const std::vector<Vec2>& pts, const std::string& cls) {
  std::string s = "<polyline class=\"" + cls + "\" points=\"";
  for (size_t k = 0; k < pts.size(); ++k) {
    if (k) s += ' ';
    s += fmt(c.x(pts[k].u)) + "," + fmt(c.y(pts[k].v));
  }
  return s + "\"/>\n";
}

inline std::string glyph_at(double x, double y, PointKind kind, SignClass sign) {
  std::string fill = sign == SignClass::positive ? "#ffffff" : (sign == SignClass::null ? "#888888" : "#000000");
  std::string cls = std::string("pt ") + to_string(kind) + " " + to_string(sign);
  if (kind == PointKind::first)
    return "<circle class=\"" + cls + "\" cx=\"" + fmt(x) + "\" cy=\"" + fmt(y) + "\" r=\"4\" fill=\"" + fill + "\"/>\n";
  return "<rect class=\"" + cls + "\" x=\"" + fmt(x - 4) + "\" y=\"" + fmt(y - 4) +
         "\" width=\"8\" height=\"8\" fill=\"" + fill + "\"/>\n";
}

}  // namespace detail

// Parameter-domain plot: sign shading of lambda, the two singular sets, classified points.
inline std::string plot_svg(const SurfaceDef& s, const Analysis& A, int shade = 96) {
  using detail::fmt;
  const Domain& d = s.domain;
  detail::Canvas c{d.box_lo(), d.box_hi()};
  const double W = c.width() + 180, H = std::max(c.height(), 240.0);
  std::string o;
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W) + "\" height=\"" + fmt(H) +
       "\" viewBox=\"0 0 " + fmt(W) + " " + fmt(H) + "\">\n";
  o += "<style>.plus{fill:#e8eef7}.minus{fill:#4a5a70}.sigma{fill:none;stroke:#c0392b;stroke-width:2}"
       ".sigma-star{fill:none;stroke:#2e8b57;stroke-width:2;stroke-dasharray:6 3}"
       ".outline{fill:none;stroke:#000;stroke-width:1.5}.pt{stroke:#000;stroke-width:1}"
       "text{font-family:sans-serif;font-size:12px}</style>\n";
  o += "<title>" + detail::xml_escape(s.name) + "</title>\n";
  // shading, one rect per run of equal sign along each row
  const auto& P = A.phi();
  double du = (c.hi.u - c.lo.u) / shade, dv = (c.hi.v - c.lo.v) / shade;
  std::string clip;
  bool round = d.kind == DomainKind::disk || d.kind == DomainKind::annulus;
  if (round) {
    for (auto& bc : d.boundary()) {
      for (int k = 0; k < 256; ++k) {
        Vec2 q = bc.point(bc.period * k / 256);
        clip += (k ? " L" : " M") + fmt(c.x(q.u)) + "," + fmt(c.y(q.v));
      }
      clip += " Z";
    }
    o += "<clipPath id=\"domain\"><path clip-rule=\"evenodd\" d=\"" + clip.substr(1) + "\"/></clipPath>\n";
  }
  o += std::string("<g class=\"shade\"") + (round ? " clip-path=\"url(#domain)\"" : "") + " shape-rendering=\"crispEdges\">\n";
  for (int j = 0; j < shade; ++j) {
    int run_start = -1, run_cls = 0;
    auto flush = [&](int end) {
      if (run_start < 0) return;
      double x0 = c.x(c.lo.u + run_start * du), x1 = c.x(c.lo.u + end * du);
      double y0 = c.y(c.lo.v + (j + 1) * dv), y1 = c.y(c.lo.v + j * dv);
      o += "<rect class=\"" + std::string(run_cls > 0 ? "plus" : "minus") + "\" x=\"" + fmt(x0) + "\" y=\"" + fmt(y0) +
           "\" width=\"" + fmt(x1 - x0) + "\" height=\"" + fmt(y1 - y0) + "\"/>\n";
      run_start = -1;
    };
    for (int i = 0; i < shade; ++i) {
      Vec2 p{c.lo.u + (i + 0.5) * du, c.lo.v + (j + 0.5) * dv};
      int cls = 0;
      if (d.signed_distance(p) > 0) cls = P.topo.degenerate ? 1 : sign_class(A.opt.orient * lambda_pair(s, p).first);
      if (cls != run_cls) {
        flush(i);
        if (cls != 0) run_start = i;
        run_cls = cls;
      }
    }
    flush(shade);
  }
  o += "</g>\n";
  for (auto& bc : d.boundary()) {
    std::vector<Vec2> pts;
    for (int k = 0; k <= 256; ++k) pts.push_back(bc.point(bc.period * k / 256));
    o += detail::polyline(c, pts, "outline");
  }
  for (int k = 0; k < 2; ++k)
    for (auto& t : A.side[k].topo.traces) {
      std::vector<Vec2> pts;
      for (auto& smp : t.samples) pts.push_back(smp.p);
      if (t.closed && !pts.empty()) pts.push_back(pts.front());
      o += detail::polyline(c, pts, k == 0 ? "sigma" : "sigma-star");
    }
  for (int k = 0; k < 2; ++k)
    for (auto& r : A.side[k].topo.records) o += detail::glyph_at(c.x(r.p.u), c.y(r.p.v), r.kind, r.sign);
  // legend
  double lx = c.width() + 10, ly = 30;
  auto text = [&](double y, const std::string& t) { o += "<text x=\"" + fmt(lx + 22) + "\" y=\"" + fmt(y + 4) + "\">" + t + "</text>\n"; };
  o += "<rect class=\"plus\" x=\"" + fmt(lx) + "\" y=\"" + fmt(ly - 6) + "\" width=\"14\" height=\"12\"/>\n";
  text(ly, "M+");
  ly += 20;
  o += "<rect class=\"minus\" x=\"" + fmt(lx) + "\" y=\"" + fmt(ly - 6) + "\" width=\"14\" height=\"12\"/>\n";
  text(ly, "M-");
  ly += 20;
  o += "<line class=\"sigma\" x1=\"" + fmt(lx) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(lx + 14) + "\" y2=\"" + fmt(ly) + "\"/>\n";
  text(ly, "singular set of f");
  ly += 20;
  o += "<line class=\"sigma-star\" x1=\"" + fmt(lx) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(lx + 14) + "\" y2=\"" + fmt(ly) + "\"/>\n";
  text(ly, "singular set of nu");
  for (auto kind : {PointKind::first, PointKind::second_admissible})
    for (auto sign : {SignClass::positive, SignClass::null, SignClass::negative}) {
      ly += 20;
      o += detail::glyph_at(lx + 7, ly, kind, sign);
      text(ly, std::string(kind == PointKind::first ? "first" : "second") + ", " + to_string(sign));
    }
  o += "</svg>\n";
  return o;
}

}  // namespace fgb
