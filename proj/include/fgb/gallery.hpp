#pragma once

#include <map>
#include <string>
#include <vector>

#include "surface.hpp"

namespace fgb {

inline const std::map<std::string, std::string>& gallery_sources() {
  static const std::map<std::string, std::string> src = {
      {"flat_disk", R"S([surface]
name = "flat_disk"
f = ["u", "v", "0"]
nu = ["0", "0", "1"]
[domain]
kind = "disk"
radius = 1
)S"},
      {"sphere_cap", R"S([surface]
name = "sphere_cap"
f = ["u", "v", "sqrt(1 - u^2 - v^2)"]
nu = ["u", "v", "sqrt(1 - u^2 - v^2)"]
[domain]
kind = "disk"
radius = 0.8660254037844386
)S"},
      {"cuspidal_edge_flat", R"S([surface]
name = "cuspidal_edge_flat"
f = ["u", "(v - 0.5)^2", "(v - 0.5)^3"]
nu = ["0", "-3*(v - 0.5)/sqrt(4 + 9*(v - 0.5)^2)", "2/sqrt(4 + 9*(v - 0.5)^2)"]
[domain]
kind = "disk"
radius = 1
)S"},
      {"cuspidal_edge_tilted", R"S([surface]
name = "cuspidal_edge_tilted"
f = ["u", "v^2", "v^3 + u*v^2"]
nu = ["-2*v^2/sqrt(4*v^4 + (3*v + 2*u)^2 + 4)", "-(3*v + 2*u)/sqrt(4*v^4 + (3*v + 2*u)^2 + 4)", "2/sqrt(4*v^4 + (3*v + 2*u)^2 + 4)"]
[domain]
kind = "disk"
radius = 1
)S"},
      {"parabolic_graph", R"S([surface]
name = "parabolic_graph"
f = ["u", "v", "u^2 + v^3"]
nu = "auto"
[domain]
kind = "disk"
radius = 1
)S"},
      {"swallowtail_std", R"S([surface]
name = "swallowtail_std"
f = ["3*u^4 + u^2*v", "4*u^3 + 2*u*v", "v"]
nu = ["1/sqrt(1 + u^2 + u^4)", "-u/sqrt(1 + u^2 + u^4)", "u^2/sqrt(1 + u^2 + u^4)"]
[domain]
kind = "disk"
radius = 0.5
)S"},
      {"cuspidal_edge_revolution", R"S([surface]
name = "cuspidal_edge_revolution"
f = ["(2 + v^2)*cos(u)", "(2 + v^2)*sin(u)", "v^3"]
nu = ["3*v*cos(u)/sqrt(4 + 9*v^2)", "3*v*sin(u)/sqrt(4 + 9*v^2)", "-2/sqrt(4 + 9*v^2)"]
[domain]
kind = "cylinder"
u_period = 6.283185307179586
v_min = -0.5
v_max = 0.5
)S"},
      {"helicoid_annulus", R"S([surface]
name = "helicoid_annulus"
f = ["v*cos(u)", "v*sin(u)", "u"]
nu = ["-sin(u)/sqrt(1 + v^2)", "cos(u)/sqrt(1 + v^2)", "-v/sqrt(1 + v^2)"]
[domain]
kind = "cylinder"
u_period = 6.283185307179586
v_min = 0.5
v_max = 1.5
)S"},
      {"hyperbolic_paraboloid", R"S([surface]
name = "hyperbolic_paraboloid"
f = ["u", "v", "u*v"]
nu = "auto"
[domain]
kind = "disk"
radius = 1
)S"},
  };
  return src;
}

inline std::vector<std::string> gallery_names() {
  std::vector<std::string> r;
  for (auto& [k, _] : gallery_sources()) r.push_back(k);
  return r;
}

inline SurfaceDef gallery(const std::string& name) {
  auto& src = gallery_sources();
  auto it = src.find(name);
  if (it == src.end()) {
    std::string list;
    for (auto& [k, _] : src) list += (list.empty() ? "" : ", ") + k;
    throw std::invalid_argument("unknown gallery surface '" + name + "' (available: " + list + ")");
  }
  return resolve_normal(parse_surface(it->second));
}

// Expected values with the oracle that produced them.
struct GalleryExpectation {
  std::string surface, quantity;
  double value, tol;
  std::string oracle;
};

inline const std::vector<GalleryExpectation>& gallery_expectations() {
  static const double pi = 3.141592653589793;
  static const std::vector<GalleryExpectation> e = {
      {"flat_disk", "boundary_kappa_g", 2 * pi, 1e-8, "TRIVIAL: unit circle turning"},
      {"flat_disk", "chi_M", 1, 0, "TRIVIAL: disk"},
      {"sphere_cap", "area_K_dA", 2 * pi * (1 - 0.5), 1e-6, "TRIVIAL: cap area 2pi(1 - cos 60deg)"},
      {"sphere_cap", "boundary_kappa_g", 2 * pi * 0.5, 1e-6, "DERIVED: small circle of radius sin 60deg at height cos 60deg"},
      {"cuspidal_edge_flat", "singular_kappa_s", 0, 1e-8, "DERIVED: straight edge, D_t phi(gamma') = 0"},
      {"cuspidal_edge_flat", "boundary_kappa_g", 2 * pi, 1e-4, "DERIVED: flat metric"},
      {"cuspidal_edge_flat", "boundary_kappa_g_plus", 0, 1e-3, "DERIVED: split boundary back-solve"},
      {"cuspidal_edge_flat", "boundary_kappa_g_minus", 2 * pi, 1e-3, "DERIVED: split boundary back-solve"},
      {"cuspidal_edge_flat", "boundary_negative_count", 2, 0, "DERIVED: inward null ray into M-"},
      {"cuspidal_edge_revolution", "kappa_s_pointwise", -0.5, 1e-6, "DERIVED: hand computation"},
      {"cuspidal_edge_revolution", "singular_kappa_s", -2 * pi, 1e-5, "DERIVED: edge circle length 4pi"},
      {"cuspidal_edge_revolution", "chi_M", 0, 0, "TRIVIAL: cylinder"},
      {"swallowtail_std", "second_kind_count", 1, 0, "DERIVED: delta(t) = 12t"},
      {"swallowtail_std", "lambda_at_0_1", 2, 1e-12, "DERIVED: det[(0,2,0),(0,0,1),(1,0,0)]"},
      {"cuspidal_edge_tilted", "chi_M_plus", 1, 0, "DERIVED: half disk"},
      {"cuspidal_edge_tilted", "chi_M_minus", 1, 0, "DERIVED: half disk"},
      {"helicoid_annulus", "chi_M", 0, 0, "TRIVIAL: cylinder"},
      {"helicoid_annulus", "boundary_constant_c", 0, 1e-6, "DERIVED: asymptotic boundary helices"},
      {"parabolic_graph", "phi_singular_count", 0, 0, "TRIVIAL: graph immersion"},
  };
  return e;
}

}  // namespace fgb
