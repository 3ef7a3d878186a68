#include <cmath>

#include "core/equilibria.hpp"
#include "doctest.h"

using namespace msbif;

TEST_CASE("newton finds pitchfork roots") {
  const ModelSpec m = builtin("pitchfork", {.variant = "additive"});
  const EquilibriumPoint pt = newton(m, {0.9});
  CHECK(pt.x_star[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(norm2(m.F(pt.x_star)) <= 1e-12);
  CHECK(pt.det_stable);
}

TEST_CASE("newton on lorenz from a rough guess") {
  const ModelSpec m = builtin("lorenz");
  const EquilibriumPoint pt = newton(m, {5.0, 5.0, 9.0});
  const double kappa = std::sqrt(8.0 / 3.0 * 9.0);  // sqrt(b (rho - 1))
  CHECK(pt.x_star[0] == doctest::Approx(kappa).epsilon(1e-10));
  CHECK(pt.x_star[1] == doctest::Approx(kappa).epsilon(1e-10));
  CHECK(pt.x_star[2] == doctest::Approx(9.0).epsilon(1e-10));
  CHECK(pt.x_star[0] == doctest::Approx(4.89898).epsilon(1e-5));
}

TEST_CASE("newton reports failure modes") {
  ModelSpec m = builtin("fold", {.variant = "multiplicative"});
  m.params.set("gamma", -0.1);  // no real equilibrium
  CHECK_THROWS_AS((void)newton(m, {0.9}), Error);
  CHECK_THROWS_WITH_AS((void)newton(m, {0.0}),
                       doctest::Contains("singular"), Error);
}

TEST_CASE("det_classify") {
  ModelSpec m = builtin("pitchfork", {.variant = "additive"});
  auto [l1, s1] = det_classify(m, {0.5});
  CHECK(l1 == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(s1);
  auto [l2, s2] = det_classify(m, {0.0});
  CHECK(l2 == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_FALSE(s2);

  const ModelSpec cir = builtin("cir");
  auto [l3, s3] = det_classify(cir, {0.02});
  CHECK(l3 == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(s3);
}

TEST_CASE("pitchfork branch structure over gamma") {
  const ModelSpec m = builtin("pitchfork", {.variant = "additive"});
  const auto branches = continue_branches(m, "gamma", -0.5, 1.0, 151);
  REQUIRE(branches.size() == 3);
  // ids sorted: "+", "-", "0"
  CHECK(branches[0].id == "+");
  CHECK(branches[1].id == "-");
  CHECK(branches[2].id == "0");
  CHECK(branches[2].points.size() == 151);
  for (const Branch& br : branches)
    for (const EquilibriumPoint& pt : br.points) {
      ModelSpec probe = m;
      probe.params.set("gamma", pt.param_value);
      CHECK(norm2(probe.F(pt.x_star)) <= 1e-10);
      if (br.id == "+")
        CHECK(pt.x_star[0] ==
              doctest::Approx(std::sqrt(pt.param_value)).epsilon(1e-10));
    }
  // the +/- branches exist only for gamma > 0
  for (const EquilibriumPoint& pt : branches[0].points)
    CHECK(pt.param_value > 0.0);
}

TEST_CASE("transcritical branches cross at zero") {
  const ModelSpec m = builtin("transcritical", {.variant = "multiplicative"});
  const auto branches = continue_branches(m, "gamma", -1.0, 1.0, 101);
  REQUIRE(branches.size() == 2);
  for (const Branch& br : branches) {
    CHECK(br.points.size() == 101);
    for (const EquilibriumPoint& pt : br.points) {
      if (br.id == "0") CHECK(pt.x_star[0] == 0.0);
      if (br.id == "gamma")
        CHECK(pt.x_star[0] == doctest::Approx(pt.param_value).epsilon(1e-12));
    }
  }
}

TEST_CASE("bistable2d folds at +-2/(3 sqrt 3)") {
  const ModelSpec m = builtin("bistable2d");
  const auto branches = continue_branches(m, "gamma", -0.6, 0.6, 97);
  const double fold = 2.0 / (3.0 * std::sqrt(3.0));
  std::vector<double> folds;
  for (const Branch& br : branches)
    for (double f : br.fold_params) folds.push_back(f);
  REQUIRE(!folds.empty());
  for (double f : folds)
    CHECK(std::min(std::fabs(f - fold), std::fabs(f + fold)) <= 1e-6);
  // both folds are seen
  bool has_plus = false, has_minus = false;
  for (double f : folds) {
    if (std::fabs(f - fold) <= 1e-6) has_plus = true;
    if (std::fabs(f + fold) <= 1e-6) has_minus = true;
  }
  CHECK(has_plus);
  CHECK(has_minus);
}

TEST_CASE("newton-path continuation matches the analytic branches") {
  // force the generic predictor/corrector machinery on bistable2d
  const ModelSpec m = builtin("bistable2d");
  ContinuationOptions opts;
  opts.force_newton = true;
  const auto branches = continue_branches(m, "gamma", -0.2, 0.2, 41, opts);
  REQUIRE(branches.size() == 3);
  for (const Branch& br : branches)
    for (const EquilibriumPoint& pt : br.points) {
      ModelSpec probe = m;
      probe.params.set("gamma", pt.param_value);
      CHECK(norm2(probe.F(pt.x_star)) <= 1e-10);
    }
}

TEST_CASE("newton-path rounds the fold with one arclength step") {
  const ModelSpec m = builtin("fold", {.variant = "multiplicative"});
  ContinuationOptions opts;
  opts.force_newton = true;
  opts.seeds = {{1.0}};
  // sweep downward toward the fold at gamma = 0
  const auto branches = continue_branches(m, "gamma", 1.0, -0.5, 61, opts);
  REQUIRE(branches.size() == 1);
  const Branch& br = branches[0];
  REQUIRE(!br.fold_params.empty());
  CHECK(std::fabs(br.fold_params.front()) <= 1e-6);
  // after the turn the branch tracks the lower sheet (x < 0, gamma rising)
  bool lower_sheet = false;
  for (const EquilibriumPoint& pt : br.points)
    if (pt.x_star[0] < -0.05) lower_sheet = true;
  CHECK(lower_sheet);
}

TEST_CASE("branch identity is stable under step halving") {
  const ModelSpec m = builtin("pitchfork", {.variant = "additive"});
  const auto coarse = continue_branches(m, "gamma", -0.5, 1.0, 76);
  const auto fine = continue_branches(m, "gamma", -0.5, 1.0, 151);
  CHECK(coarse.size() == fine.size());
  // every coarse point appears in the fine sweep (same grid endpoints)
  for (std::size_t b = 0; b < coarse.size(); ++b) {
    CHECK(coarse[b].id == fine[b].id);
    for (const EquilibriumPoint& pt : coarse[b].points) {
      double best = 1e300;
      for (const EquilibriumPoint& qt : fine[b].points)
        if (std::fabs(qt.param_value - pt.param_value) < 1e-12)
          best = std::min(best, std::fabs(qt.x_star[0] - pt.x_star[0]));
      CHECK(best <= 1e-10);
    }
  }
}

TEST_CASE("find_equilibria seeds a grid when nothing analytic exists") {
  ModelSpec m = builtin("pitchfork", {.variant = "additive"});
  m.equilibria = nullptr;  // strip the analytic roots
  const auto found = find_equilibria(m);
  REQUIRE(found.size() == 3);
  CHECK(found[0].x_star[0] == doctest::Approx(-0.5).epsilon(1e-10));
  CHECK(found[1].x_star[0] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(found[2].x_star[0] == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(found[0].branch_id == "b0");
}

TEST_CASE("branch_point_at honors labels") {
  const ModelSpec m = builtin("pitchfork", {.variant = "additive"});
  const auto pt = branch_point_at(m, "gamma", 0.09, "+", {0.3});
  REQUIRE(pt.has_value());
  CHECK(pt->x_star[0] == doctest::Approx(0.3).epsilon(1e-12));
  CHECK_FALSE(branch_point_at(m, "gamma", -0.1, "+", {0.3}).has_value());
}
