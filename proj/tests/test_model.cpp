#include <cmath>
#include <numbers>
#include <random>

#include "core/model.hpp"
#include "doctest.h"

using namespace msbif;

TEST_CASE("pitchfork additive defaults") {
  const ModelSpec m = builtin("pitchfork", {.variant = "additive"});
  CHECK(m.d == 1);
  CHECK(m.m == 1);
  CHECK(m.params.get("gamma") == 0.25);
  CHECK(m.params.get("sigma") == 0.1);
  CHECK(m.F({0.5})[0] == doctest::Approx(0.0));  // gamma x - x^3 at sqrt(gamma)
  CHECK(m.F({2.0})[0] == doctest::Approx(0.25 * 2.0 - 8.0));
  CHECK(m.G({123.0})(0, 0) == 0.1);
}

TEST_CASE("cir defaults and clamped diffusion") {
  const ModelSpec m = builtin("cir");
  CHECK(m.params.get("kappa") == 2.0);
  CHECK(m.params.get("theta") == 0.02);
  CHECK(m.F({0.02})[0] == doctest::Approx(0.0));
  CHECK(m.G({0.04})(0, 0) == doctest::Approx(0.2 * std::sqrt(0.04)));
  CHECK(m.G({-1.0})(0, 0) == 0.0);  // sqrt clamped at zero
  CHECK_FALSE(m.remainder().has_value());
}

TEST_CASE("allen_cahn grid constants") {
  BuiltinOptions opts;
  opts.d = 50;
  const ModelSpec m = builtin("allen_cahn", opts);
  CHECK(m.d == 50);
  CHECK(m.m == 50);
  const double dx = 2.0 * std::numbers::pi / 49.0;
  CHECK(m.derived.at("dx") == doctest::Approx(dx).epsilon(1e-15));
  CHECK(m.derived.at("sigma") ==
        doctest::Approx(0.1 / std::sqrt(dx)).epsilon(1e-15));
  CHECK(m.derived.at("sigma") == doctest::Approx(0.2793).epsilon(1e-3));

  // periodic second-difference rows sum to zero, so constant vectors are in
  // the kernel and the equilibria are 0 and +-sqrt(gamma) * ones
  const DenseMatrix j = jacobian(m, Vector(50, 0.0), JacobianTarget::drift);
  const double gamma = m.params.get("gamma");
  for (std::size_t i = 0; i < 50; ++i) {
    double row = 0.0;
    for (std::size_t c = 0; c < 50; ++c) row += j(i, c);
    CHECK(row == doctest::Approx(gamma).epsilon(1e-9));
  }
  for (const auto& eq : m.analytic_equilibria())
    CHECK(norm2(m.F(eq.x)) <= 1e-10);
}

TEST_CASE("unknown model and variant are rejected") {
  CHECK_THROWS_WITH_AS((void)builtin("noSuchModel"),
                       doctest::Contains("unknown model"), Error);
  CHECK_THROWS_AS((void)builtin("pitchfork", {.variant = "cubic"}), Error);
  CHECK_THROWS_AS((void)builtin("cir", {.variant = "additive"}), Error);
}

TEST_CASE("jacobian closed forms") {
  const ModelSpec pf = builtin("pitchfork", {.variant = "additive"});
  CHECK(jacobian(pf, {0.5}, JacobianTarget::drift)(0, 0) ==
        doctest::Approx(-0.5).epsilon(1e-14));  // gamma - 3 x^2

  const ModelSpec cir = builtin("cir");
  CHECK(jacobian(cir, {0.02}, JacobianTarget::diffusion_column, 0)(0, 0) ==
        doctest::Approx(0.707107).epsilon(1e-6));  // sigma/(2 sqrt(theta))

  const ModelSpec lorenz = builtin("lorenz");
  const DenseMatrix j = jacobian(lorenz, {0.0, 0.0, 0.0}, JacobianTarget::drift);
  const double s = lorenz.params.get("s"), rho = lorenz.params.get("rho"),
               b = lorenz.params.get("b");
  CHECK(j(0, 0) == -s);
  CHECK(j(0, 1) == s);
  CHECK(j(0, 2) == 0.0);
  CHECK(j(1, 0) == rho);
  CHECK(j(1, 1) == -1.0);
  CHECK(j(2, 2) == -b);
}

TEST_CASE("finite differences agree with analytic Jacobians") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  std::uniform_real_distribution<double> upos(0.05, 2.0);
  for (const std::string& name : builtin_names()) {
    BuiltinOptions opts;
    if (name == "allen_cahn") opts.d = 8;
    if (name == "lorenz") opts.variant = "nonlinear";
    const ModelSpec m = builtin(name, opts);
    for (int trial = 0; trial < 50; ++trial) {
      Vector x(m.d);
      for (double& v : x) v = name == "cir" ? upos(gen) : u(gen);
      const DenseMatrix fd =
          jacobian(m, x, JacobianTarget::drift, 0, JacobianMode::finite_difference);
      const DenseMatrix an =
          jacobian(m, x, JacobianTarget::drift, 0, JacobianMode::analytic);
      CHECK(fro_norm(fd - an) <= 1e-6 * (1.0 + fro_norm(an)));
      for (std::size_t col = 0; col < m.m; ++col) {
        const DenseMatrix gfd = jacobian(m, x, JacobianTarget::diffusion_column,
                                         col, JacobianMode::finite_difference);
        const DenseMatrix gan = jacobian(m, x, JacobianTarget::diffusion_column,
                                         col, JacobianMode::analytic);
        CHECK(fro_norm(gfd - gan) <= 1e-6 * (1.0 + fro_norm(gan)));
      }
    }
  }
}

TEST_CASE("registry equilibria satisfy F(x*) = 0 across parameter grids") {
  struct GridCase {
    const char* name;
    const char* variant;
    const char* param;
    double lo, hi;
  };
  const GridCase cases[] = {
      {"pitchfork", "additive", "gamma", -0.5, 1.0},
      {"pitchfork", "linear", "gamma", -0.5, 1.0},
      {"pitchfork", "quadratic", "gamma", -0.5, 1.0},
      {"fold", "multiplicative", "gamma", 0.0, 1.0},
      {"transcritical", "multiplicative", "gamma", -1.0, 1.0},
      {"cir", "", "sigma", 0.1, 0.8},
      {"bistable2d", "", "gamma", -0.6, 0.6},
      {"lorenz", "diagonal", "rho", 0.5, 25.0},
      {"allen_cahn", "", "gamma", 0.05, 1.0},
  };
  for (const auto& c : cases) {
    BuiltinOptions opts;
    opts.variant = c.variant;
    if (std::string(c.name) == "allen_cahn") opts.d = 12;
    ModelSpec m = builtin(c.name, opts);
    for (int k = 0; k < 20; ++k) {
      m.params.set(c.param, c.lo + (c.hi - c.lo) * k / 19.0);
      for (const auto& eq : m.analytic_equilibria()) {
        CHECK(norm2(m.F(eq.x)) <= 1e-10);
        CHECK(check_equilibrium(m, eq.x, 1e-10));
      }
    }
  }
}

TEST_CASE("bistable2d equilibria lie on x2 = 0") {
  ModelSpec m = builtin("bistable2d");
  for (double gamma : {-0.5, -0.3, -0.2, 0.0, 0.2, 0.3, 0.5}) {
    m.params.set("gamma", gamma);
    const auto eqs = m.analytic_equilibria();
    const double fold = 2.0 / (3.0 * std::sqrt(3.0));
    if (std::fabs(gamma) < fold)
      CHECK(eqs.size() == 3);
    else
      CHECK(eqs.size() == 1);
    for (const auto& eq : eqs) {
      CHECK(eq.x[1] == 0.0);
      // x1 solves gamma + x - x^3 = 0
      CHECK(gamma + eq.x[0] - std::pow(eq.x[0], 3) ==
            doctest::Approx(0.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("check_equilibrium tolerance") {
  const ModelSpec m = builtin("pitchfork", {.variant = "additive"});
  CHECK(check_equilibrium(m, {0.5}, 1e-10));
  CHECK_FALSE(check_equilibrium(m, {0.4}, 1e-10));  // F(0.4) = 0.036
  CHECK(check_equilibrium(m, {0.0}, 1e-15));
}

TEST_CASE("json model configuration") {
  const ModelSpec m = model_from_json(
      R"({"model": "pitchfork", "variant": "linear", "params": {"gamma": 0.4, "sigma": 0.2}})");
  CHECK(m.name == "pitchfork");
  CHECK(m.variant == "linear");
  CHECK(m.params.get("gamma") == 0.4);
  CHECK(m.params.get("sigma") == 0.2);

  const ModelSpec ac = model_from_json(R"({"model": "allen_cahn", "d": 16})");
  CHECK(ac.d == 16);

  CHECK_THROWS_WITH_AS(
      (void)model_from_json(R"({"model": "pitchfork", "extra": 1})"),
      doctest::Contains("unknown key"), Error);
  CHECK_THROWS_WITH_AS(
      (void)model_from_json(R"({"model": "pitchfork", "params": {"kappa": 1}})"),
      doctest::Contains("unknown parameter"), Error);
  CHECK_THROWS_AS((void)model_from_json("not json"), Error);
  CHECK_THROWS_AS((void)model_from_json(R"({"variant": "additive"})"), Error);
}

TEST_CASE("dissipativity metadata formulas") {
  const ModelSpec add = builtin("pitchfork", {.variant = "additive"});
  const auto meta = add.meta(2.0).value();
  CHECK(meta.alpha2 == 1.0);
  CHECK(meta.alpha3 ==
        doctest::Approx(0.395625).epsilon(1e-12));  // ((a2+g)/2)^2 + s^2/2

  ModelSpec quad = builtin("pitchfork", {.variant = "quadratic"});
  CHECK(quad.meta(2.0).has_value());
  quad.params.set("sigma", 1.5);  // sigma^2 >= 2/(p-1) kills the certificate
  CHECK_FALSE(quad.meta(2.0).has_value());

  const ModelSpec lorenz = builtin("lorenz", {.variant = "nonlinear"});
  const double k = lorenz.derived.at("kappa_cond");
  const double s22 = lorenz.params.get("sigma22"),
               s32 = lorenz.params.get("sigma32"),
               s33 = lorenz.params.get("sigma33"),
               s23 = lorenz.params.get("sigma23"),
               b = lorenz.params.get("b");
  CHECK(k == doctest::Approx(std::min((1.0 - s22 * s22) / (s32 * s32),
                                      (b - s33 * s33) / (s23 * s23))));
}
