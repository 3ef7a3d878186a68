#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/simulate.hpp"
#include "core/svg.hpp"
#include "core/sweep.hpp"
#include "doctest.h"

using namespace msbif;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::size_t count_occurrences(const std::string& text, const std::string& what) {
  std::size_t n = 0, pos = 0;
  while ((pos = text.find(what, pos)) != std::string::npos) {
    ++n;
    pos += what.size();
  }
  return n;
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/msbif_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("bifurcation svg from a pitchfork sweep") {
  const ModelSpec m = builtin("pitchfork", {.variant = "additive"});
  const SweepResult sweep = run_sweep(m, "gamma", -0.5, 1.0, 61);
  TempFile csv("pitchfork_sweep.csv"), svg("pitchfork_sweep.svg");
  {
    std::ofstream os(csv.path);
    write_sweep_csv(os, m, sweep);
  }
  render_svg(csv.path, SvgKind::bifurcation, svg.path);
  const std::string body = slurp(svg.path);
  CHECK(body.find("<svg") != std::string::npos);
  CHECK(body.find("width=\"800\"") != std::string::npos);
  CHECK(body.find("height=\"600\"") != std::string::npos);
  // three branches drawn (segments may split at stability changes)
  CHECK(count_occurrences(body, "<polyline") >= 3);
  // beta band shading on the two stable outer branches
  CHECK(count_occurrences(body, "<polygon") >= 2);
  CHECK(svg_kind_from_csv(csv.path) == SvgKind::bifurcation);
}

TEST_CASE("paths svg with equilibrium lines and beta band") {
  const ModelSpec m = builtin("pitchfork", {.variant = "linear"});
  SimConfig cfg;
  cfg.t_final = 1.0;
  cfg.dt = 0.01;
  cfg.n_paths = 5;
  cfg.x0 = {0.5};
  cfg.radius = 1e-6;
  const PathEnsemble ens = tamed_em(m, cfg);
  TempFile csv("paths.csv"), svg("paths.svg");
  {
    std::ofstream os(csv.path);
    write_paths_csv(os, ens,
                    {{"model", "pitchfork"},
                     {"x_star", "0.5"},
                     {"beta", "0.05"},
                     {"equilibria", "0|0.5|-0.5"}});
  }
  render_svg(csv.path, SvgKind::paths, svg.path);
  const std::string body = slurp(svg.path);
  CHECK(count_occurrences(body, "<polyline") == 5);   // one per path
  CHECK(count_occurrences(body, "<polygon") == 1);    // the beta band
  CHECK(count_occurrences(body, "<line") >= 4);       // equilibria + ticks
  CHECK(svg_kind_from_csv(csv.path) == SvgKind::paths);
}

TEST_CASE("empty-row csv still renders axes") {
  TempFile csv("empty.csv"), svg("empty.svg");
  {
    std::ofstream os(csv.path);
    os << "param_name,param_value,branch_id,x_1,det_lambda_max,lambda_max_A,"
          "beta_sq,mu,det_stable,linear_ms_stable,nonlinear_ms_stable\n";
  }
  render_svg(csv.path, SvgKind::bifurcation, svg.path);
  const std::string body = slurp(svg.path);
  CHECK(body.find("<svg") != std::string::npos);
  CHECK(body.find("<rect") != std::string::npos);
  CHECK(body.find("</svg>") != std::string::npos);
}

TEST_CASE("schema mismatches are rejected") {
  TempFile csv("bad.csv"), svg("bad.svg");
  {
    std::ofstream os(csv.path);
    os << "a,b,c\n1,2,3\n";
  }
  CHECK_THROWS_AS(render_svg(csv.path, SvgKind::bifurcation, svg.path), Error);
  CHECK_THROWS_AS(render_svg(csv.path, SvgKind::paths, svg.path), Error);
  CHECK_THROWS_AS(render_svg("/nonexistent/x.csv", SvgKind::paths, svg.path),
                  Error);
  CHECK_THROWS_AS((void)svg_kind_from_string("scatter"), Error);
}

TEST_CASE("svg output is deterministic") {
  const ModelSpec m = builtin("pitchfork", {.variant = "additive"});
  const SweepResult sweep = run_sweep(m, "gamma", 0.1, 0.5, 11);
  TempFile csv("det.csv"), svg1("det1.svg"), svg2("det2.svg");
  {
    std::ofstream os(csv.path);
    write_sweep_csv(os, m, sweep);
  }
  render_svg(csv.path, SvgKind::bifurcation, svg1.path);
  render_svg(csv.path, SvgKind::bifurcation, svg2.path);
  CHECK(slurp(svg1.path) == slurp(svg2.path));
}
