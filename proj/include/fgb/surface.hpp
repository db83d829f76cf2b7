#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "expr.hpp"
#include "vec.hpp"

namespace fgb {

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using ParamPoint = Vec2;

enum class DomainKind { rectangle, disk, annulus, cylinder };

inline const char* to_string(DomainKind k) {
  switch (k) {
    case DomainKind::rectangle: return "rectangle";
    case DomainKind::disk: return "disk";
    case DomainKind::annulus: return "annulus";
    case DomainKind::cylinder: return "cylinder";
  }
  return "?";
}

// One closed boundary component, parametrized by tau in [0, period) with M on the left.
struct BoundaryCurve {
  enum class Shape { circle, line, polygon };
  Shape shape = Shape::circle;
  Vec2 center;
  double radius = 0;
  bool clockwise = false;
  Vec2 origin, direction;    // line: origin + tau * direction
  std::vector<Vec2> corners; // polygon, counter-clockwise
  double period = 0;

  Vec2 point(double t) const {
    switch (shape) {
      case Shape::circle: return center + radius * Vec2{std::cos(t), clockwise ? -std::sin(t) : std::sin(t)};
      case Shape::line: return origin + t * direction;
      case Shape::polygon: {
        auto [k, s] = locate(t);
        return corners[k] + s * (corners[(k + 1) % corners.size()] - corners[k]);
      }
    }
    return {};
  }
  Vec2 d1(double t) const {
    switch (shape) {
      case Shape::circle: return radius * Vec2{-std::sin(t), clockwise ? -std::cos(t) : std::cos(t)};
      case Shape::line: return direction;
      case Shape::polygon: {
        auto [k, s] = locate(t);
        return normalized(corners[(k + 1) % corners.size()] - corners[k]);
      }
    }
    return {};
  }
  Vec2 d2(double t) const {
    if (shape == Shape::circle) return -radius * Vec2{std::cos(t), clockwise ? -std::sin(t) : std::sin(t)};
    return {};
  }
  // tau values of polygon corners
  std::vector<double> breaks() const {
    std::vector<double> b;
    if (shape != Shape::polygon) return b;
    double t = 0;
    for (size_t k = 0; k < corners.size(); ++k) {
      b.push_back(t);
      t += norm(corners[(k + 1) % corners.size()] - corners[k]);
    }
    return b;
  }

 private:
  std::pair<size_t, double> locate(double t) const {
    t = std::fmod(t, period);
    if (t < 0) t += period;
    for (size_t k = 0; k < corners.size(); ++k) {
      double len = norm(corners[(k + 1) % corners.size()] - corners[k]);
      if (t <= len || k + 1 == corners.size()) return {k, std::min(t / len, 1.0)};
      t -= len;
    }
    return {0, 0};
  }
};

struct Domain {
  DomainKind kind = DomainKind::disk;
  Vec2 lo{-1, -1}, hi{1, 1};  // rectangle corners; cylinder (0, v_min), (period, v_max)
  Vec2 center{0, 0};
  double r_inner = 0, r_outer = 1;

  bool periodic() const { return kind == DomainKind::cylinder; }
  double period() const { return hi.u - lo.u; }

  // positive inside, zero on the boundary; exact distance for circles and lines
  double signed_distance(Vec2 p) const {
    switch (kind) {
      case DomainKind::disk: return r_outer - norm(p - center);
      case DomainKind::annulus: {
        double r = norm(p - center);
        return std::min(r_outer - r, r - r_inner);
      }
      case DomainKind::cylinder: return std::min(p.v - lo.v, hi.v - p.v);
      case DomainKind::rectangle: return std::min(std::min(p.u - lo.u, hi.u - p.u), std::min(p.v - lo.v, hi.v - p.v));
    }
    return 0;
  }
  bool contains(Vec2 p, double slack = 0) const { return signed_distance(p) >= -slack; }

  Vec2 box_lo() const {
    if (kind == DomainKind::disk || kind == DomainKind::annulus) return center - Vec2{r_outer, r_outer};
    return lo;
  }
  Vec2 box_hi() const {
    if (kind == DomainKind::disk || kind == DomainKind::annulus) return center + Vec2{r_outer, r_outer};
    return hi;
  }

  std::vector<BoundaryCurve> boundary() const {
    std::vector<BoundaryCurve> b;
    using S = BoundaryCurve::Shape;
    auto circle = [&](double r, bool cw) {
      BoundaryCurve c;
      c.shape = S::circle;
      c.center = center;
      c.radius = r;
      c.clockwise = cw;
      c.period = 2 * std::numbers::pi;
      return c;
    };
    auto line = [&](Vec2 o, Vec2 dir) {
      BoundaryCurve c;
      c.shape = S::line;
      c.origin = o;
      c.direction = dir;
      c.period = period();
      return c;
    };
    switch (kind) {
      case DomainKind::disk:
        b.push_back(circle(r_outer, false));
        break;
      case DomainKind::annulus:
        b.push_back(circle(r_outer, false));
        b.push_back(circle(r_inner, true));
        break;
      case DomainKind::cylinder:
        b.push_back(line(lo, {1, 0}));
        b.push_back(line(hi, {-1, 0}));
        break;
      case DomainKind::rectangle: {
        BoundaryCurve c;
      c.shape = S::polygon;
        c.corners = {lo, {hi.u, lo.v}, hi, {lo.u, hi.v}};
        c.period = 2 * (hi.u - lo.u) + 2 * (hi.v - lo.v);
        b.push_back(c);
        break;
      }
    }
    return b;
  }

  int expected_euler() const {
    return kind == DomainKind::disk || kind == DomainKind::rectangle ? 1 : 0;
  }
};

struct Options {
  int grid = 256;
  double angle_eps = 0.05;
  double tol = 1e-9;
};

struct SurfaceDef {
  std::string name = "input";
  std::array<ExprPtr, 3> f;
  std::array<ExprPtr, 3> nu;
  bool nu_auto = false;
  Domain domain;
  Options options;

  // f then nu; built by compile()
  std::shared_ptr<const Program> program;

  void compile() {
    std::vector<ExprPtr> outs(f.begin(), f.end());
    if (!nu_auto)
      for (auto& e : nu) outs.push_back(e);
    program = std::make_shared<Program>(outs);
  }

  bool resolved() const { return program && !nu_auto && program->outputs() == 6; }
};

template <int N>
struct PointJets {
  Vec3<Jet<N>> f, nu;
};

template <int N>
inline PointJets<N> eval_jet(const SurfaceDef& s, ParamPoint p) {
  if (!s.resolved()) throw std::logic_error("eval_jet: normal not resolved");
  Jet<N> r[6];
  s.program->eval<N>(p.u, p.v, r);
  PointJets<N> out{{r[0], r[1], r[2]}, {r[3], r[4], r[5]}};
  for (auto& j : r)
    if (!j.finite()) throw EvalError("non-finite value at (" + std::to_string(p.u) + ", " + std::to_string(p.v) + ")");
  return out;
}

template <int N>
inline V3 value(const Vec3<Jet<N>>& a) { return {a.x.value(), a.y.value(), a.z.value()}; }
template <int N>
inline V3 partial(const Vec3<Jet<N>>& a, int i, int j) { return {a.x.d(i, j), a.y.d(i, j), a.z.d(i, j)}; }

// ---------------------------------------------------------------- surface file

namespace detail {

inline std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

inline Vec2 as_point(const nlohmann::json& j, int line, const char* key) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError(std::string(key) + " must be [u, v]", line, 1);
  return {j[0].get<double>(), j[1].get<double>()};
}

inline double as_number(const nlohmann::json& j, int line, const char* key) {
  if (!j.is_number()) throw ParseError(std::string(key) + " must be a number", line, 1);
  return j.get<double>();
}

inline std::array<ExprPtr, 3> as_triple(const nlohmann::json& j, int line, int col, const char* key) {
  if (!j.is_array() || j.size() != 3)
    throw ParseError(std::string(key) + " requires exactly 3 components", line, col);
  std::array<ExprPtr, 3> r;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_string()) throw ParseError(std::string(key) + " components must be strings", line, col);
    try {
      r[i] = parse_expr(j[i].get<std::string>());
    } catch (const ParseError& e) {
      throw ParseError(std::string(key) + "[" + std::to_string(i) + "]: " + e.what(), line, col);
    }
  }
  return r;
}

}  // namespace detail

inline SurfaceDef parse_surface(const std::string& text) {
  SurfaceDef s;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  bool have_f = false, have_nu = false, have_kind = false;
  nlohmann::json dom = nlohmann::json::object();
  std::vector<int> dom_lines;
  int kind_line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string t = detail::trim(detail::strip_comment(raw));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError("unterminated section header", line, int(t.size()));
      section = detail::trim(t.substr(1, t.size() - 2));
      if (section != "surface" && section != "domain" && section != "options")
        throw ParseError("unknown section [" + section + "]", line, 1);
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", line, 1);
    if (section.empty()) throw ParseError("key outside of a section", line, 1);
    std::string key = detail::trim(t.substr(0, eq));
    std::string val = detail::trim(t.substr(eq + 1));
    int col = int(raw.find('=')) + 2;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(val);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("malformed value for '" + key + "'", line, col + int(e.byte) - 1);
    }
    if (section == "surface") {
      if (key == "name") {
        if (!j.is_string()) throw ParseError("name must be a string", line, col);
        s.name = j.get<std::string>();
      } else if (key == "f") {
        s.f = detail::as_triple(j, line, col, "f");
        have_f = true;
      } else if (key == "nu") {
        if (j.is_string() && j.get<std::string>() == "auto") {
          s.nu_auto = true;
        } else {
          s.nu = detail::as_triple(j, line, col, "nu");
        }
        have_nu = true;
      } else {
        throw ParseError("unknown key '" + key + "' in [surface]", line, 1);
      }
    } else if (section == "domain") {
      if (key == "kind") kind_line = line;
      dom[key] = j;
      dom_lines.push_back(line);
    } else {
      if (key == "grid") {
        if (!j.is_number_integer()) throw ParseError("grid must be an integer", line, col);
        s.options.grid = j.get<int>();
        if (s.options.grid < 32 || s.options.grid > 4096) throw ParseError("grid must lie in [32, 4096]", line, col);
      } else if (key == "angle_eps") {
        s.options.angle_eps = detail::as_number(j, line, "angle_eps");
      } else if (key == "tol") {
        s.options.tol = detail::as_number(j, line, "tol");
      } else {
        throw ParseError("unknown key '" + key + "' in [options]", line, 1);
      }
    }
  }
  if (!have_f) throw ParseError("missing f", line, 1);
  if (!have_nu) s.nu_auto = true;

  auto get = [&](const char* key) -> const nlohmann::json& {
    if (!dom.contains(key)) throw ParseError(std::string("[domain] missing '") + key + "'", kind_line, 1);
    return dom[key];
  };
  if (!dom.contains("kind") || !dom["kind"].is_string()) throw ParseError("[domain] missing kind", line, 1);
  have_kind = true;
  std::string kind = dom["kind"].get<std::string>();
  Domain& d = s.domain;
  if (kind == "rectangle") {
    d.kind = DomainKind::rectangle;
    const auto& c = get("corners");
    if (!c.is_array() || c.size() != 2) throw ParseError("corners must be [[u0, v0], [u1, v1]]", kind_line, 1);
    Vec2 a = detail::as_point(c[0], kind_line, "corners"), b = detail::as_point(c[1], kind_line, "corners");
    d.lo = {std::min(a.u, b.u), std::min(a.v, b.v)};
    d.hi = {std::max(a.u, b.u), std::max(a.v, b.v)};
    if (d.hi.u - d.lo.u <= 0 || d.hi.v - d.lo.v <= 0) throw ParseError("degenerate rectangle", kind_line, 1);
  } else if (kind == "disk") {
    d.kind = DomainKind::disk;
    d.center = dom.contains("center") ? detail::as_point(dom["center"], kind_line, "center") : Vec2{0, 0};
    d.r_outer = detail::as_number(get("radius"), kind_line, "radius");
    if (d.r_outer <= 0) throw ParseError("radius must be positive", kind_line, 1);
  } else if (kind == "annulus") {
    d.kind = DomainKind::annulus;
    d.center = dom.contains("center") ? detail::as_point(dom["center"], kind_line, "center") : Vec2{0, 0};
    d.r_inner = detail::as_number(get("r_inner"), kind_line, "r_inner");
    d.r_outer = detail::as_number(get("r_outer"), kind_line, "r_outer");
    if (!(0 < d.r_inner && d.r_inner < d.r_outer)) throw ParseError("need 0 < r_inner < r_outer", kind_line, 1);
  } else if (kind == "cylinder") {
    d.kind = DomainKind::cylinder;
    double period = detail::as_number(get("u_period"), kind_line, "u_period");
    double v0 = detail::as_number(get("v_min"), kind_line, "v_min");
    double v1 = detail::as_number(get("v_max"), kind_line, "v_max");
    if (period <= 0 || v1 <= v0) throw ParseError("need u_period > 0 and v_min < v_max", kind_line, 1);
    d.lo = {0, v0};
    d.hi = {period, v1};
  } else {
    throw ParseError("unknown domain kind '" + kind + "'", kind_line, 1);
  }
  (void)have_kind;
  s.compile();
  return s;
}

// ---------------------------------------------------------------- normal resolution and validation

// Sample points used for validation: a (k+1)^2 lattice over the domain box (center lines included), kept inside M.
inline std::vector<ParamPoint> validation_points(const Domain& d, int k = 64) {
  std::vector<ParamPoint> pts;
  Vec2 lo = d.box_lo(), hi = d.box_hi();
  for (int i = 0; i <= k; ++i)
    for (int j = 0; j <= k; ++j) {
      Vec2 p{lo.u + (hi.u - lo.u) * i / k, lo.v + (hi.v - lo.v) * j / k};
      if (d.contains(p)) pts.push_back(p);
    }
  return pts;
}

struct FrontalCheck {
  double max_tangency = 0;  // max |<f_u, nu>|, |<f_v, nu>|
  double max_unit = 0;      // max ||nu| - 1|
  ParamPoint worst;
  bool ok(double tol) const { return max_tangency < tol && max_unit < tol; }
};

inline FrontalCheck check_frontal(const SurfaceDef& s, const std::vector<ParamPoint>& pts) {
  FrontalCheck c;
  for (auto p : pts) {
    auto J = eval_jet<1>(s, p);
    V3 fu = partial(J.f, 1, 0), fv = partial(J.f, 0, 1), n = value(J.nu);
    double t = std::max(std::fabs(dot(fu, n)), std::fabs(dot(fv, n)));
    double un = std::fabs(norm(n) - 1.0);
    if (t > c.max_tangency || un > c.max_unit) c.worst = p;
    c.max_tangency = std::max(c.max_tangency, t);
    c.max_unit = std::max(c.max_unit, un);
  }
  return c;
}

inline SurfaceDef resolve_normal(SurfaceDef s) {
  if (s.nu_auto) {
    using namespace ex;
    std::array<ExprPtr, 3> fu, fv;
    for (int i = 0; i < 3; ++i) {
      fu[i] = derivative(s.f[i], Op::U);
      fv[i] = derivative(s.f[i], Op::V);
    }
    std::array<ExprPtr, 3> n = {
        sub(mul(fu[1], fv[2]), mul(fu[2], fv[1])),
        sub(mul(fu[2], fv[0]), mul(fu[0], fv[2])),
        sub(mul(fu[0], fv[1]), mul(fu[1], fv[0])),
    };
    // |n| check before the division is formed
    Program np(std::vector<ExprPtr>(n.begin(), n.end()));
    for (auto p : validation_points(s.domain)) {
      Jet<0> r[3];
      np.eval<0>(p.u, p.v, r);
      if (std::hypot(r[0].value(), r[1].value(), r[2].value()) < 1e-12)
        throw GeometryError("normal degenerates on singular set; supply nu explicitly");
    }
    ExprPtr len = call(Op::Sqrt, add(add(pow(n[0], 2), pow(n[1], 2)), pow(n[2], 2)));
    for (int i = 0; i < 3; ++i) s.nu[i] = div(n[i], len);
    s.nu_auto = false;
    s.compile();
  }
  auto c = check_frontal(s, validation_points(s.domain));
  if (!c.ok(s.options.tol)) {
    std::ostringstream os;
    os << "frontal condition violated at (" << c.worst.u << ", " << c.worst.v << "): tangency " << c.max_tangency
       << ", |nu|-1 " << c.max_unit;
    throw GeometryError(os.str());
  }
  return s;
}

inline SurfaceDef flip_normal(SurfaceDef s) {
  for (auto& e : s.nu) e = ex::make(Op::Neg, e);
  s.compile();
  return s;
}

}  // namespace fgb
