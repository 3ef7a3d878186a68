#include <cmath>
#include <sstream>

#include "core/sweep.hpp"
#include "doctest.h"

using namespace msbif;

namespace {

const CrossingEvent* find_crossing(const std::vector<CrossingEvent>& events,
                                   const std::string& branch) {
  for (const auto& ev : events)
    if (ev.branch_id == branch && ev.refined) return &ev;
  return nullptr;
}

}  // namespace

TEST_CASE("pitchfork additive sweep carries the closed forms") {
  const ModelSpec m = builtin("pitchfork", {.variant = "additive"});
  const SweepResult sweep = run_sweep(m, "gamma", 0.05, 1.0, 96);
  const double sigma = 0.1;
  std::size_t plus_rows = 0;
  for (const SweepRow& row : sweep.rows) {
    if (row.branch_id != "+") continue;
    ++plus_rows;
    REQUIRE(row.lambda_max_A.has_value());
    REQUIRE(row.mu.has_value());
    REQUIRE(row.beta_sq.has_value());
    CHECK(*row.lambda_max_A < 0.0);
    CHECK(*row.mu < 0.0);
    CHECK(*row.linear_ms_stable);
    CHECK(*row.nonlinear_ms_stable);
    CHECK(*row.beta_sq ==
          doctest::Approx(sigma * sigma / (4.0 * row.param_value)).epsilon(1e-10));
  }
  CHECK(plus_rows == 96);
}

TEST_CASE("nonlinear stability implies linear stability on every row") {
  for (const char* name : {"pitchfork", "cir", "bistable2d"}) {
    const ModelSpec m = builtin(name);
    const char* param = std::string(name) == "cir" ? "sigma" : "gamma";
    const double lo = std::string(name) == "cir" ? 0.1 : -0.4;
    const double hi = std::string(name) == "cir" ? 0.8 : 0.4;
    const SweepResult sweep = run_sweep(m, param, lo, hi, 25);
    for (const SweepRow& row : sweep.rows) {
      if (row.nonlinear_ms_stable && *row.nonlinear_ms_stable) {
        REQUIRE(row.linear_ms_stable.has_value());
        CHECK(*row.linear_ms_stable);
      }
    }
  }
}

TEST_CASE("lambda_max crossing of the trivial branch under linear noise") {
  const ModelSpec m = builtin("pitchfork", {.variant = "linear"});
  const SweepResult sweep = run_sweep(m, "gamma", -0.2, 0.2, 97);
  const auto events = detect_crossings(m, sweep, "lambda_max_A");
  const CrossingEvent* ev = find_crossing(events, "0");
  REQUIRE(ev != nullptr);
  CHECK(std::fabs(ev->param_value - -0.005) <= 1e-7);
  CHECK(ev->hi - ev->lo <= 1e-8 * (1.0 + std::fabs(ev->param_value)));
}

TEST_CASE("mu crossing of the stable pitchfork branches at delta1/4") {
  const ModelSpec m = builtin("pitchfork", {.variant = "additive"});
  const SweepResult sweep = run_sweep(m, "gamma", 1e-4, 1e-2, 100);
  const auto events = detect_crossings(m, sweep, "mu");
  for (const char* branch : {"+", "-"}) {
    const CrossingEvent* ev = find_crossing(events, branch);
    REQUIRE(ev != nullptr);
    CHECK(std::fabs(ev->param_value - 2.5e-4) <= 1e-7);
  }
}

TEST_CASE("refined crossings are resolution independent") {
  const ModelSpec m = builtin("pitchfork", {.variant = "linear"});
  const SweepResult coarse = run_sweep(m, "gamma", -0.2, 0.2, 96);
  const SweepResult fine = run_sweep(m, "gamma", -0.2, 0.2, 192);
  const auto ev_coarse = detect_crossings(m, coarse, "lambda_max_A");
  const auto ev_fine = detect_crossings(m, fine, "lambda_max_A");
  const CrossingEvent* a = find_crossing(ev_coarse, "0");
  const CrossingEvent* b = find_crossing(ev_fine, "0");
  REQUIRE(a != nullptr);
  REQUIRE(b != nullptr);
  CHECK(std::fabs(a->param_value - b->param_value) <= 1e-7);
}

TEST_CASE("monotone fields produce no crossings") {
  const ModelSpec m = builtin("pitchfork", {.variant = "additive"});
  const SweepResult sweep = run_sweep(m, "gamma", 0.05, 0.5, 20);
  // mu = -4 gamma + delta1 < 0 on the whole range for the stable branches
  const auto events = detect_crossings(m, sweep, "mu");
  for (const auto& ev : events) CHECK(ev.branch_id == "0");
}

TEST_CASE("cir mu crossing in sigma near the paper threshold") {
  const ModelSpec m = builtin("cir");
  const SweepResult sweep = run_sweep(m, "sigma", 0.1, 0.8, 71);
  const auto events = detect_crossings(m, sweep, "mu");
  const CrossingEvent* ev = find_crossing(events, "theta");
  REQUIRE(ev != nullptr);
  const double exact = std::sqrt(4.0 * 0.02 * (2.0 * 2.0 - 1e-3) / (1.0 + 1e-3));
  CHECK(std::fabs(ev->param_value - exact) <= 1e-7);
  CHECK(std::fabs(ev->param_value - 0.565685) <= 0.002);
}

TEST_CASE("bistable2d lambda crossings sit strictly inside the fold window") {
  const ModelSpec m = builtin("bistable2d");
  const SweepResult sweep = run_sweep(m, "gamma", -0.6, 0.6, 97);
  const auto events = detect_crossings(m, sweep, "lambda_max_A");
  const double fold = 2.0 / (3.0 * std::sqrt(3.0));
  std::size_t inside = 0;
  for (const auto& ev : events) {
    if (!ev.refined) continue;
    CHECK(ev.param_value > -fold);
    CHECK(ev.param_value < fold);
    ++inside;
  }
  CHECK(inside >= 2);  // one near each fold, on the high and low branches
}

TEST_CASE("rows with unstable linearization keep deterministic fields") {
  // the trivial pitchfork branch at positive gamma is unstable: rows still
  // carry lambda/mu, but beta_sq stays absent
  const ModelSpec m = builtin("pitchfork", {.variant = "linear"});
  const SweepResult sweep = run_sweep(m, "gamma", 0.1, 0.5, 9);
  for (const SweepRow& row : sweep.rows) {
    if (row.branch_id != "0") continue;
    CHECK_FALSE(row.beta_sq.has_value());
    REQUIRE(row.lambda_max_A.has_value());
    CHECK(*row.lambda_max_A > 0.0);
    CHECK_FALSE(row.det_stable);
  }
}

TEST_CASE("sweep csv format") {
  const ModelSpec m = builtin("pitchfork", {.variant = "additive"});
  const SweepResult sweep = run_sweep(m, "gamma", 0.2, 0.3, 3);
  std::ostringstream os;
  write_sweep_csv(os, m, sweep);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line ==
        "# model=pitchfork, variant=additive, delta1=0.001, delta2=0.001");
  std::getline(is, line);
  CHECK(line.rfind("# params:", 0) == 0);
  std::getline(is, line);
  CHECK(line ==
        "param_name,param_value,branch_id,x_1,det_lambda_max,lambda_max_A,"
        "beta_sq,mu,det_stable,linear_ms_stable,nonlinear_ms_stable");
  std::size_t rows = 0;
  bool saw_empty_beta_field = false;
  while (std::getline(is, line)) {
    ++rows;
    CHECK(line.find("gamma,") == 0);
    if (line.find(",,") != std::string::npos) saw_empty_beta_field = true;
  }
  CHECK(rows == 9);  // 3 branches x 3 values
  CHECK(saw_empty_beta_field);  // the unstable zero branch prints no beta_sq
}
