#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fgb/gallery.hpp"
#include "fgb/report.hpp"

namespace {

struct RunConfig {
  std::string command, source, out, json_path;
  std::optional<int> grid;
  std::optional<double> angle_eps;
  std::vector<std::string> formulas;
  std::vector<int> grids = {64, 128, 256, 512};
};

fgb::SurfaceDef load(const std::string& source) {
  const std::string tag = "gallery:";
  if (source.rfind(tag, 0) == 0) return fgb::gallery(source.substr(tag.size()));
  std::ifstream in(source);
  if (!in) throw std::runtime_error("cannot open " + source);
  std::stringstream buf;
  buf << in.rdbuf();
  return fgb::resolve_normal(fgb::parse_surface(buf.str()));
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream o(path, std::ios::binary);
  if (!o) throw std::runtime_error("cannot write " + path);
  o << text;
}

// degeneracy everywhere just means the side is empty; anything else is a rejection
bool rejected(const fgb::SideAnalysis& a) { return !a.applicable() && !a.topo.degenerate; }

void summary(const fgb::Verification& V) {
  for (auto& f : V.formulas)
    std::fprintf(stderr, "%-28s %-15s residual %.3e  tol %.0e\n", f.id.c_str(), fgb::to_string(f.verdict),
                 f.residual, f.tol);
}

int run(const RunConfig& cfg) {
  auto s = load(cfg.source);
  fgb::VerifyOptions opt;
  opt.grid = cfg.grid.value_or(s.options.grid);
  opt.angle_eps = cfg.angle_eps.value_or(s.options.angle_eps);

  if (cfg.command == "analyze" || cfg.command == "plot") {
    auto A = fgb::analyze(s, opt);
    auto H = fgb::check_thm_5_2_hypotheses(s, A);
    std::string report = fgb::dump_report(fgb::analyze_report(s, A, H));
    if (cfg.command == "plot") {
      emit(cfg.out, fgb::plot_svg(s, A));
      if (!cfg.json_path.empty()) emit(cfg.json_path, report);
      return 0;
    }
    emit(cfg.out.empty() ? cfg.json_path : cfg.out, report);
    if (!cfg.out.empty() && !cfg.json_path.empty()) emit(cfg.json_path, report);
    return rejected(A.phi()) || rejected(A.psi()) ? 2 : 0;
  }

  if (cfg.command == "verify") {
    auto V = fgb::verify(s, opt, cfg.formulas);
    std::string report = fgb::dump_report(fgb::verify_report(s, V, cfg.formulas));
    emit(cfg.out.empty() ? cfg.json_path : cfg.out, report);
    if (!cfg.out.empty() && !cfg.json_path.empty()) emit(cfg.json_path, report);
    summary(V);
    return V.exit_code();
  }

  // convergence
  if (cfg.formulas.empty()) throw std::runtime_error("convergence needs --formulas");
  auto V = fgb::verify(s, opt, cfg.formulas);
  std::vector<std::string> ids;
  for (auto& f : V.formulas) ids.push_back(f.id);
  if (ids.empty()) throw std::runtime_error("no formula matches the selection");
  fgb::json j = fgb::report_header("convergence", s, opt);
  j["config"]["formulas"] = cfg.formulas;
  j["config"]["grids"] = cfg.grids;
  fgb::json studies = fgb::json::array();
  bool any_failed = false, any_verified = false;
  for (auto& id : ids) {
    auto C = fgb::convergence_study(s, id, cfg.grids, opt);
    studies.push_back(fgb::convergence_json(C));
    auto last = C.rows.back().verdict;
    any_failed = any_failed || last == fgb::Verdict::failed;
    any_verified = any_verified || last == fgb::Verdict::verified;
    for (auto& r : C.rows)
      std::fprintf(stderr, "%-28s grid %5d residual %.3e order %6.2f %s\n", id.c_str(), r.grid, r.residual, r.order,
                   fgb::to_string(r.verdict));
  }
  j["convergence"] = studies;
  std::string report = fgb::dump_report(j);
  emit(cfg.out.empty() ? cfg.json_path : cfg.out, report);
  if (!cfg.out.empty() && !cfg.json_path.empty()) emit(cfg.json_path, report);
  return any_failed ? 1 : (any_verified ? 0 : 2);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gauss-Bonnet checks for frontals with boundary"};
  app.set_version_flag("--version", std::string(fgb::kToolVersion));
  app.require_subcommand(1);
  RunConfig cfg;
  auto add = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("surface", cfg.source, "gallery:NAME or a surface file")->required();
    sub->add_option("--grid", cfg.grid, "grid resolution")->check(CLI::Range(32, 4096));
    sub->add_option("--angle-eps", cfg.angle_eps, "radius for sector angle estimates")->check(CLI::PositiveNumber);
    sub->add_option("--formulas", cfg.formulas, "comma separated formula ids (prefix match)")->delimiter(',');
    sub->add_option("--out", cfg.out, "output path (default stdout)");
    sub->add_option("--json", cfg.json_path, "write the JSON report here");
    return sub;
  };
  add("analyze", "singular sets, classifications, Euler characteristics, hypotheses");
  add("verify", "evaluate every formula and report residuals");
  add("plot", "SVG of the parameter domain");
  add("convergence", "residuals under grid refinement")
      ->add_option("--grids", cfg.grids, "grid sequence")
      ->delimiter(',')
      ->check(CLI::Range(32, 4096));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  try {
    return run(cfg);
  } catch (const fgb::ParseError& e) {
    std::fprintf(stderr, "fgb: %s: %s\n", cfg.source.c_str(), e.what());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fgb: %s\n", e.what());
  }
  return 1;
}
