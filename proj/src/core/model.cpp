#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "json.hpp"

namespace msbif {

double Params::get(const std::string& name) const {
  auto it = values_.find(name);
  if (it == values_.end())
    fail(ErrorCode::invalid_argument, "unknown parameter '" + name + "'");
  return it->second;
}

std::vector<LabeledEquilibrium> ModelSpec::analytic_equilibria() const {
  if (!equilibria) return {};
  return equilibria(params);
}

namespace {

constexpr double kTinyAlpha1 = 1e-12;

double sq(double x) { return x * x; }

// Real roots of t^3 + p t + q = 0, Newton-polished on the given residual.
std::vector<double> cubic_real_roots(double p, double q) {
  std::vector<double> roots;
  const double disc = -4.0 * p * p * p - 27.0 * q * q;
  if (disc > 0.0) {
    // three real roots, trigonometric form (requires p < 0 here)
    const double r = 2.0 * std::sqrt(-p / 3.0);
    const double arg =
        std::clamp(3.0 * q / (2.0 * p) * std::sqrt(-3.0 / p), -1.0, 1.0);
    const double phi = std::acos(arg);
    for (int k = 0; k < 3; ++k)
      roots.push_back(r * std::cos((phi - 2.0 * std::numbers::pi * k) / 3.0));
  } else {
    const double shifted = std::sqrt(std::max(0.0, q * q / 4.0 + p * p * p / 27.0));
    const double u = std::cbrt(-q / 2.0 + shifted);
    const double v = std::cbrt(-q / 2.0 - shifted);
    roots.push_back(u + v);
    if (disc == 0.0 && (u + v) != 0.0) roots.push_back(-(u + v) / 2.0);
  }
  for (double& t : roots) {
    for (int it = 0; it < 8; ++it) {  // polish to full precision
      const double f = t * t * t + p * t + q;
      const double df = 3.0 * t * t + p;
      if (df == 0.0) break;
      const double step = f / df;
      t -= step;
      if (std::fabs(step) < 1e-15 * std::max(1.0, std::fabs(t))) break;
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

ModelSpec make_pitchfork(const std::string& variant) {
  if (variant != "additive" && variant != "linear" && variant != "quadratic")
    fail(ErrorCode::unknown_variant,
         "pitchfork variant must be additive, linear or quadratic");
  ModelSpec m;
  m.name = "pitchfork";
  m.variant = variant;
  m.d = 1;
  m.m = 1;
  m.params.set("gamma", 0.25);
  m.params.set("sigma", 0.1);

  m.drift = [](const Params& p, const Vector& x) {
    const double g = p.get("gamma");
    return Vector{g * x[0] - x[0] * x[0] * x[0]};
  };
  m.jac_drift = [](const Params& p, const Vector& x) {
    DenseMatrix j(1, 1);
    j(0, 0) = p.get("gamma") - 3.0 * x[0] * x[0];
    return j;
  };
  if (variant == "additive") {
    m.diffusion = [](const Params& p, const Vector&) {
      DenseMatrix g(1, 1);
      g(0, 0) = p.get("sigma");
      return g;
    };
    m.jac_diffusion = [](const Params&, const Vector&) {
      return std::vector<DenseMatrix>{DenseMatrix(1, 1)};
    };
  } else if (variant == "linear") {
    m.diffusion = [](const Params& p, const Vector& x) {
      DenseMatrix g(1, 1);
      g(0, 0) = p.get("sigma") * x[0];
      return g;
    };
    m.jac_diffusion = [](const Params& p, const Vector&) {
      DenseMatrix j(1, 1);
      j(0, 0) = p.get("sigma");
      return std::vector<DenseMatrix>{j};
    };
  } else {
    m.diffusion = [](const Params& p, const Vector& x) {
      DenseMatrix g(1, 1);
      g(0, 0) = p.get("sigma") * x[0] * x[0];
      return g;
    };
    m.jac_diffusion = [](const Params& p, const Vector& x) {
      DenseMatrix j(1, 1);
      j(0, 0) = 2.0 * p.get("sigma") * x[0];
      return std::vector<DenseMatrix>{j};
    };
  }
  m.equilibria = [](const Params& p) {
    const double g = p.get("gamma");
    std::vector<LabeledEquilibrium> out{{"0", {0.0}}};
    if (g > 0.0) {
      out.push_back({"+", {std::sqrt(g)}});
      out.push_back({"-", {-std::sqrt(g)}});
    }
    return out;
  };
  m.dissipativity_meta = [variant](const Params& prm, double p)
      -> std::optional<DissipativityMeta> {
    const double g = prm.get("gamma");
    const double s = prm.get("sigma");
    DissipativityMeta meta;
    meta.p = p;
    meta.alpha2 = 1.0;
    if (variant == "additive") {
      meta.alpha3 = sq((meta.alpha2 + g) / 2.0) + (p - 1.0) * s * s / 2.0;
      meta.alpha1 =
          std::max({g, (p - 1.0) * s * s / 2.0, kTinyAlpha1});
    } else if (variant == "linear") {
      meta.alpha3 = 0.25 * sq(meta.alpha2 + g + (p - 1.0) * s * s / 2.0);
      meta.alpha1 = std::max(g + (p - 1.0) * s * s / 2.0, kTinyAlpha1);
    } else {
      if (s * s >= 2.0 / (p - 1.0)) return std::nullopt;
      meta.alpha3 = sq(g + meta.alpha2) / (2.0 * (2.0 - (p - 1.0) * s * s));
      meta.alpha1 = std::max(g, kTinyAlpha1);
    }
    return meta;
  };
  m.remainder_meta = [variant](const Params& p) -> std::optional<RemainderMeta> {
    RemainderMeta r;
    r.c1 = 6.0;
    r.q1 = 1.0;
    if (variant == "quadratic") {
      r.c2 = 2.0 * p.get("sigma");
      r.q2 = 0.0;
    }
    return r;
  };
  return m;
}

// fold: F = gamma - x^2; transcritical: F = x(gamma - x). Shared noise
// structure sigma11*x dW1 + sigma12 dW2.
ModelSpec make_fold_like(const std::string& name, const std::string& variant) {
  if (variant != "multiplicative" && variant != "additive")
    fail(ErrorCode::unknown_variant,
         name + " variant must be multiplicative or additive");
  const bool transcritical = (name == "transcritical");
  ModelSpec m;
  m.name = name;
  m.variant = variant;
  m.d = 1;
  m.m = 2;
  m.params.set("gamma", 0.25);
  m.params.set("sigma11", variant == "multiplicative" ? 0.1 : 0.0);
  m.params.set("sigma12", variant == "multiplicative" ? 0.0 : 0.1);
  if (variant == "multiplicative")
    m.invariant_domain = InvariantDomain::positive_cone;

  if (transcritical) {
    m.drift = [](const Params& p, const Vector& x) {
      return Vector{x[0] * (p.get("gamma") - x[0])};
    };
    m.jac_drift = [](const Params& p, const Vector& x) {
      DenseMatrix j(1, 1);
      j(0, 0) = p.get("gamma") - 2.0 * x[0];
      return j;
    };
    m.equilibria = [](const Params& p) {
      return std::vector<LabeledEquilibrium>{{"0", {0.0}},
                                             {"gamma", {p.get("gamma")}}};
    };
  } else {
    m.drift = [](const Params& p, const Vector& x) {
      return Vector{p.get("gamma") - x[0] * x[0]};
    };
    m.jac_drift = [](const Params&, const Vector& x) {
      DenseMatrix j(1, 1);
      j(0, 0) = -2.0 * x[0];
      return j;
    };
    m.equilibria = [](const Params& p) {
      const double g = p.get("gamma");
      std::vector<LabeledEquilibrium> out;
      if (g >= 0.0) {
        out.push_back({"+", {std::sqrt(g)}});
        out.push_back({"-", {-std::sqrt(g)}});
      }
      return out;
    };
  }
  m.diffusion = [](const Params& p, const Vector& x) {
    DenseMatrix g(1, 2);
    g(0, 0) = p.get("sigma11") * x[0];
    g(0, 1) = p.get("sigma12");
    return g;
  };
  m.jac_diffusion = [](const Params& p, const Vector&) {
    DenseMatrix j1(1, 1);
    j1(0, 0) = p.get("sigma11");
    return std::vector<DenseMatrix>{j1, DenseMatrix(1, 1)};
  };
  m.remainder_meta = [](const Params&) -> std::optional<RemainderMeta> {
    return RemainderMeta{2.0, 0.0, 0.0, 0.0};
  };
  return m;
}

ModelSpec make_cir() {
  ModelSpec m;
  m.name = "cir";
  m.d = 1;
  m.m = 1;
  m.params.set("kappa", 2.0);
  m.params.set("theta", 0.02);
  m.params.set("sigma", 0.2);
  m.invariant_domain = InvariantDomain::positive_cone;

  m.drift = [](const Params& p, const Vector& x) {
    return Vector{p.get("kappa") * (p.get("theta") - x[0])};
  };
  m.jac_drift = [](const Params& p, const Vector&) {
    DenseMatrix j(1, 1);
    j(0, 0) = -p.get("kappa");
    return j;
  };
  // sqrt is clamped at zero (Feller-regime convention); the analytic
  // derivative is taken on x > 0.
  m.diffusion = [](const Params& p, const Vector& x) {
    DenseMatrix g(1, 1);
    g(0, 0) = p.get("sigma") * std::sqrt(std::max(x[0], 0.0));
    return g;
  };
  m.jac_diffusion = [](const Params& p, const Vector& x) {
    DenseMatrix j(1, 1);
    j(0, 0) = x[0] > 0.0 ? p.get("sigma") / (2.0 * std::sqrt(x[0])) : 0.0;
    return std::vector<DenseMatrix>{j};
  };
  m.equilibria = [](const Params& p) {
    return std::vector<LabeledEquilibrium>{{"theta", {p.get("theta")}}};
  };
  m.dissipativity_meta = [](const Params& prm, double p)
      -> std::optional<DissipativityMeta> {
    const double kappa = prm.get("kappa");
    const double theta = prm.get("theta");
    const double s = prm.get("sigma");
    const double c = kappa * theta + (p - 1.0) * s * s / 2.0;
    DissipativityMeta meta;
    meta.p = p;
    meta.alpha2 = kappa / 2.0;
    meta.alpha3 = c * c / (2.0 * kappa);
    meta.alpha1 = std::max(c / 2.0, kTinyAlpha1);
    return meta;
  };
  // remainder_meta intentionally absent: sigma*sqrt(x) has no polynomial
  // second-derivative bound near zero.
  return m;
}

ModelSpec make_bistable2d() {
  ModelSpec m;
  m.name = "bistable2d";
  m.variant = "multiplicative";
  m.d = 2;
  m.m = 3;
  m.params.set("gamma", 0.25);
  m.params.set("sigma11", 0.25);
  m.params.set("sigma13", 0.01);
  m.params.set("sigma22", 0.1);
  m.params.set("sigma23", 0.01);

  m.drift = [](const Params& p, const Vector& x) {
    return Vector{p.get("gamma") + x[0] - x[0] * x[0] * x[0], -x[1]};
  };
  m.jac_drift = [](const Params&, const Vector& x) {
    DenseMatrix j(2, 2);
    j(0, 0) = 1.0 - 3.0 * x[0] * x[0];
    j(1, 1) = -1.0;
    return j;
  };
  m.diffusion = [](const Params& p, const Vector& x) {
    DenseMatrix g(2, 3);
    g(0, 0) = p.get("sigma11") * x[0];
    g(1, 1) = p.get("sigma22") * x[1];
    g(0, 2) = p.get("sigma13") * x[0] * x[1];
    g(1, 2) = p.get("sigma23") * x[0] * x[1];
    return g;
  };
  m.jac_diffusion = [](const Params& p, const Vector& x) {
    DenseMatrix j1(2, 2), j2(2, 2), j3(2, 2);
    j1(0, 0) = p.get("sigma11");
    j2(1, 1) = p.get("sigma22");
    j3(0, 0) = p.get("sigma13") * x[1];
    j3(0, 1) = p.get("sigma13") * x[0];
    j3(1, 0) = p.get("sigma23") * x[1];
    j3(1, 1) = p.get("sigma23") * x[0];
    return std::vector<DenseMatrix>{j1, j2, j3};
  };
  m.equilibria = [](const Params& p) {
    // x2* = 0 and gamma + x - x^3 = 0, i.e. x^3 - x - gamma = 0.
    const auto roots = cubic_real_roots(-1.0, -p.get("gamma"));
    std::vector<LabeledEquilibrium> out;
    if (roots.size() == 3) {
      out.push_back({"low", {roots[0], 0.0}});
      out.push_back({"mid", {roots[1], 0.0}});
      out.push_back({"high", {roots[2], 0.0}});
    } else if (!roots.empty()) {
      out.push_back({roots[0] > 0.0 ? "high" : "low", {roots[0], 0.0}});
    }
    return out;
  };
  m.remainder_meta = [](const Params& p) -> std::optional<RemainderMeta> {
    RemainderMeta r;
    r.c1 = 6.0;
    r.q1 = 1.0;
    r.c2 = std::sqrt(2.0 * (sq(p.get("sigma13")) + sq(p.get("sigma23"))));
    r.q2 = 0.0;
    return r;
  };
  return m;
}

ModelSpec make_lorenz(const std::string& variant) {
  if (variant != "diagonal" && variant != "nonlinear")
    fail(ErrorCode::unknown_variant,
         "lorenz variant must be diagonal or nonlinear");
  ModelSpec m;
  m.name = "lorenz";
  m.variant = variant;
  m.d = 3;
  m.m = 3;
  m.params.set("rho", 10.0);
  m.params.set("b", 8.0 / 3.0);
  m.params.set("s", 10.0);
  m.params.set("sigma11", 0.01);
  m.params.set("sigma22", 0.01);
  m.params.set("sigma33", 0.01);
  const double sig_off = variant == "nonlinear" ? 0.01 : 0.0;
  m.params.set("sigma23", sig_off);
  m.params.set("sigma32", sig_off);

  m.drift = [](const Params& p, const Vector& x) {
    const double s = p.get("s"), rho = p.get("rho"), b = p.get("b");
    return Vector{s * (x[1] - x[0]), x[0] * (rho - x[2]) - x[1],
                  x[0] * x[1] - b * x[2]};
  };
  m.jac_drift = [](const Params& p, const Vector& x) {
    const double s = p.get("s"), rho = p.get("rho"), b = p.get("b");
    DenseMatrix j(3, 3);
    j(0, 0) = -s;
    j(0, 1) = s;
    j(1, 0) = rho - x[2];
    j(1, 1) = -1.0;
    j(1, 2) = -x[0];
    j(2, 0) = x[1];
    j(2, 1) = x[0];
    j(2, 2) = -b;
    return j;
  };
  m.diffusion = [](const Params& p, const Vector& x) {
    DenseMatrix g(3, 3);
    g(0, 0) = p.get("sigma11") * x[0];
    g(1, 1) = p.get("sigma22") * x[1];
    g(2, 1) = p.get("sigma32") * x[0] * x[1];
    g(1, 2) = p.get("sigma23") * x[0] * x[2];
    g(2, 2) = p.get("sigma33") * x[2];
    return g;
  };
  m.jac_diffusion = [](const Params& p, const Vector& x) {
    DenseMatrix j1(3, 3), j2(3, 3), j3(3, 3);
    j1(0, 0) = p.get("sigma11");
    j2(1, 1) = p.get("sigma22");
    j2(2, 0) = p.get("sigma32") * x[1];
    j2(2, 1) = p.get("sigma32") * x[0];
    j3(1, 0) = p.get("sigma23") * x[2];
    j3(1, 2) = p.get("sigma23") * x[0];
    j3(2, 2) = p.get("sigma33");
    return std::vector<DenseMatrix>{j1, j2, j3};
  };
  m.equilibria = [](const Params& p) {
    const double rho = p.get("rho"), b = p.get("b");
    std::vector<LabeledEquilibrium> out{{"0", {0.0, 0.0, 0.0}}};
    if (rho > 1.0) {
      const double k = std::sqrt(b * (rho - 1.0));
      out.push_back({"+", {k, k, rho - 1.0}});
      out.push_back({"-", {-k, -k, rho - 1.0}});
    }
    return out;
  };
  // Lyapunov-weighted certificate form: V = rho x^2 + s y^2 + s (z - 2 rho)^2,
  // check (1/2)<DV,F> + (1/4)|Tr(G^T D2V G)| + a2 V - a3 <= 0.
  m.dissipativity_form = [](const Params& p, double, double a2, double a3,
                            const Vector& x) {
    const double s = p.get("s"), rho = p.get("rho"), b = p.get("b");
    const Vector f{s * (x[1] - x[0]), x[0] * (rho - x[2]) - x[1],
                   x[0] * x[1] - b * x[2]};
    const double dv_f = 2.0 * rho * x[0] * f[0] + 2.0 * s * x[1] * f[1] +
                        2.0 * s * (x[2] - 2.0 * rho) * f[2];
    DenseMatrix g(3, 3);
    g(0, 0) = p.get("sigma11") * x[0];
    g(1, 1) = p.get("sigma22") * x[1];
    g(2, 1) = p.get("sigma32") * x[0] * x[1];
    g(1, 2) = p.get("sigma23") * x[0] * x[2];
    g(2, 2) = p.get("sigma33") * x[2];
    double trace = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      trace += 2.0 * rho * sq(g(0, i)) + 2.0 * s * sq(g(1, i)) +
               2.0 * s * sq(g(2, i));
    const double v = rho * sq(x[0]) + s * sq(x[1]) + s * sq(x[2] - 2.0 * rho);
    return 0.5 * dv_f + 0.25 * std::fabs(trace) + a2 * v - a3;
  };
  // Constants for the Lyapunov-weighted inequality
  //   (1/2)<DV,F> + (1/4)|Tr(G^T D2V G)| <= -a2 V + a3.
  // Channel-wise: x needs a2 <= s - s11^2/2, y needs
  // a2 <= 1 - s22^2/2 - s32^2 X^2/2, and the z channel is the quadratic
  //   s[-(qz) z^2 + 2 rho (b - 2 a2) z + 4 rho^2 a2],
  // qz = b - s33^2/2 - s23^2 X^2/2 - a2, whose maximum fixes the minimal a3.
  // X^2 is 0 for diagonal noise and the kappa domain bound otherwise.
  m.dissipativity_meta = [variant](const Params& prm, double p)
      -> std::optional<DissipativityMeta> {
    const double s = prm.get("s"), rho = prm.get("rho"), b = prm.get("b");
    const double s11 = prm.get("sigma11"), s22 = prm.get("sigma22"),
                 s33 = prm.get("sigma33"), s23 = prm.get("sigma23"),
                 s32 = prm.get("sigma32");
    double x_sq_bound = 0.0;
    if (variant == "nonlinear") {
      x_sq_bound = std::min((1.0 - s22 * s22) / (s32 * s32),
                            (b - s33 * s33) / (s23 * s23));
      if (x_sq_bound <= 0.0) return std::nullopt;
    }
    const double alpha2_tilde = 0.5;
    const double cap_y = 1.0 - s22 * s22 / 2.0 - s32 * s32 * x_sq_bound / 2.0;
    const double cap_z = b - s33 * s33 / 2.0 - s23 * s23 * x_sq_bound / 2.0;
    DissipativityMeta meta;
    meta.p = p;
    meta.alpha2 = std::min({s - s11 * s11 / 2.0, cap_y, alpha2_tilde * cap_z});
    if (meta.alpha2 <= 0.0) return std::nullopt;
    const double qz = cap_z - meta.alpha2;
    meta.alpha3 = s * (4.0 * rho * rho * meta.alpha2 +
                       rho * rho * sq(b - 2.0 * meta.alpha2) / qz);
    meta.alpha1 = std::max(rho + s, kTinyAlpha1);
    return meta;
  };
  if (variant == "nonlinear") {
    // Noise-coupling domain bound from the published dissipativity condition.
    const double s22 = m.params.get("sigma22"), s33 = m.params.get("sigma33"),
                 s23 = m.params.get("sigma23"), s32 = m.params.get("sigma32"),
                 b = m.params.get("b");
    m.derived["kappa_cond"] =
        std::min((1.0 - s22 * s22) / (s32 * s32), (b - s33 * s33) / (s23 * s23));
    m.sample_restriction = [](const Params& p, const Vector& x) {
      const double s22 = p.get("sigma22"), s33 = p.get("sigma33"),
                   s23 = p.get("sigma23"), s32 = p.get("sigma32"),
                   b = p.get("b");
      const double kappa = std::min((1.0 - s22 * s22) / (s32 * s32),
                                    (b - s33 * s33) / (s23 * s23));
      return x[0] * x[0] <= kappa;
    };
  }
  m.remainder_meta = [variant](const Params& p) -> std::optional<RemainderMeta> {
    RemainderMeta r;
    r.c1 = 2.0;
    r.q1 = 0.0;
    if (variant == "nonlinear") {
      r.c2 = std::sqrt(2.0) * std::max(p.get("sigma23"), p.get("sigma32"));
      r.q2 = 0.0;
    }
    return r;
  };
  return m;
}

DenseMatrix periodic_second_difference(std::size_t d, double dx) {
  DenseMatrix a(d, d);
  const double w = 1.0 / (dx * dx);
  for (std::size_t i = 0; i < d; ++i) {
    a(i, i) = -2.0 * w;
    a(i, (i + 1) % d) = w;
    a(i, (i + d - 1) % d) = w;
  }
  return a;
}

ModelSpec make_allen_cahn(std::size_t d) {
  if (d == 0) d = 50;
  if (d < 4)
    fail(ErrorCode::invalid_argument, "allen_cahn needs dimension >= 4");
  ModelSpec m;
  m.name = "allen_cahn";
  m.d = d;
  m.m = d;
  m.params.set("gamma", 0.5);
  m.params.set("sigma_bar", 0.1);
  const double dx = 2.0 * std::numbers::pi / static_cast<double>(d - 1);
  m.derived["dx"] = dx;
  m.derived["sigma"] = 0.1 / std::sqrt(dx);

  auto sigma_of = [dx](const Params& p) {
    return p.get("sigma_bar") / std::sqrt(dx);
  };

  m.drift = [d, dx](const Params& p, const Vector& x) {
    const double g = p.get("gamma");
    const double w = 1.0 / (dx * dx);
    Vector f(d);
    for (std::size_t i = 0; i < d; ++i) {
      const double lap =
          x[(i + 1) % d] - 2.0 * x[i] + x[(i + d - 1) % d];
      f[i] = w * lap + g * x[i] - x[i] * x[i] * x[i];
    }
    return f;
  };
  m.jac_drift = [d, dx](const Params& p, const Vector& x) {
    DenseMatrix j = periodic_second_difference(d, dx);
    const double g = p.get("gamma");
    for (std::size_t i = 0; i < d; ++i)
      j(i, i) += g - 3.0 * x[i] * x[i];
    return j;
  };
  m.diffusion = [d, sigma_of](const Params& p, const Vector& x) {
    DenseMatrix g(d, d);
    const double s = sigma_of(p);
    for (std::size_t i = 0; i < d; ++i) g(i, i) = s * x[i];
    return g;
  };
  m.jac_diffusion = [d, sigma_of](const Params& p, const Vector&) {
    const double s = sigma_of(p);
    std::vector<DenseMatrix> js(d, DenseMatrix(d, d));
    for (std::size_t i = 0; i < d; ++i) js[i](i, i) = s;
    return js;
  };
  m.equilibria = [d](const Params& p) {
    const double g = p.get("gamma");
    std::vector<LabeledEquilibrium> out{{"0", Vector(d, 0.0)}};
    if (g > 0.0) {
      out.push_back({"+", Vector(d, std::sqrt(g))});
      out.push_back({"-", Vector(d, -std::sqrt(g))});
    }
    return out;
  };
  m.dissipativity_meta = [d, sigma_of](const Params& prm, double p)
      -> std::optional<DissipativityMeta> {
    const double g = prm.get("gamma");
    const double s = sigma_of(prm);
    DissipativityMeta meta;
    meta.p = p;
    meta.alpha2 = 1.0;
    // <x,Ax> <= 0 and sum x_i^4 >= ||x||^4/d give
    // (g + (p-1)s^2/2)||x||^2 - ||x||^4/d <= -a2||x||^2 + a3.
    meta.alpha3 =
        static_cast<double>(d) * sq(meta.alpha2 + g + (p - 1.0) * s * s / 2.0) /
        4.0;
    meta.alpha1 = std::max(g + (p - 1.0) * s * s / 2.0, kTinyAlpha1);
    return meta;
  };
  m.remainder_meta = [](const Params&) -> std::optional<RemainderMeta> {
    return RemainderMeta{6.0, 1.0, 0.0, 0.0};
  };
  return m;
}

}  // namespace

ModelSpec builtin(const std::string& name, const BuiltinOptions& options) {
  const std::string& v = options.variant;
  if (name == "pitchfork") return make_pitchfork(v.empty() ? "additive" : v);
  if (name == "fold")
    return make_fold_like("fold", v.empty() ? "multiplicative" : v);
  if (name == "transcritical")
    return make_fold_like("transcritical", v.empty() ? "multiplicative" : v);
  if (name == "cir") {
    if (!v.empty()) fail(ErrorCode::unknown_variant, "cir has no variants");
    return make_cir();
  }
  if (name == "bistable2d") {
    if (!v.empty() && v != "multiplicative")
      fail(ErrorCode::unknown_variant, "bistable2d variant must be multiplicative");
    return make_bistable2d();
  }
  if (name == "lorenz") return make_lorenz(v.empty() ? "diagonal" : v);
  if (name == "allen_cahn") {
    if (!v.empty())
      fail(ErrorCode::unknown_variant, "allen_cahn has no variants");
    return make_allen_cahn(options.d);
  }
  fail(ErrorCode::unknown_model, "unknown model '" + name + "'");
}

std::vector<std::string> builtin_names() {
  return {"pitchfork", "fold", "transcritical", "cir",
          "bistable2d", "lorenz", "allen_cahn"};
}

namespace {

DenseMatrix fd_jacobian(const ModelSpec& model, const Vector& x,
                        JacobianTarget target, std::size_t column) {
  const std::size_t d = model.d;
  const double base_h = std::cbrt(std::numeric_limits<double>::epsilon());
  DenseMatrix j(d, d);
  Vector xp = x, xm = x;
  for (std::size_t k = 0; k < d; ++k) {
    const double h = base_h * std::max(1.0, std::fabs(x[k]));
    xp[k] = x[k] + h;
    xm[k] = x[k] - h;
    Vector fp, fm;
    if (target == JacobianTarget::drift) {
      fp = model.F(xp);
      fm = model.F(xm);
    } else {
      const DenseMatrix gp = model.G(xp);
      const DenseMatrix gm = model.G(xm);
      fp.resize(d);
      fm.resize(d);
      for (std::size_t i = 0; i < d; ++i) {
        fp[i] = gp(i, column);
        fm[i] = gm(i, column);
      }
    }
    for (std::size_t i = 0; i < d; ++i) j(i, k) = (fp[i] - fm[i]) / (2.0 * h);
    xp[k] = x[k];
    xm[k] = x[k];
  }
  return j;
}

}  // namespace

DenseMatrix jacobian(const ModelSpec& model, const Vector& x,
                     JacobianTarget target, std::size_t column,
                     JacobianMode mode) {
  if (x.size() != model.d)
    fail(ErrorCode::invalid_argument, "jacobian point has wrong dimension");
  if (target == JacobianTarget::diffusion_column && column >= model.m)
    fail(ErrorCode::invalid_argument, "diffusion column out of range");
  const bool analytic_available = target == JacobianTarget::drift
                                      ? model.has_analytic_jac_drift()
                                      : model.has_analytic_jac_diffusion();
  if (mode == JacobianMode::analytic && !analytic_available)
    fail(ErrorCode::missing_analytic_jacobian,
         "model '" + model.name + "' has no analytic Jacobian");
  const bool use_analytic =
      mode != JacobianMode::finite_difference && analytic_available;
  if (!use_analytic) return fd_jacobian(model, x, target, column);
  if (target == JacobianTarget::drift) return model.jac_drift(model.params, x);
  return model.jac_diffusion(model.params, x).at(column);
}

bool check_equilibrium(const ModelSpec& model, const Vector& x, double tol) {
  if (x.size() != model.d)
    fail(ErrorCode::invalid_argument, "equilibrium point has wrong dimension");
  return norm2(model.F(x)) <= tol;
}

ModelSpec model_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::invalid_argument, std::string("bad JSON: ") + e.what());
  }
  if (!j.is_object())
    fail(ErrorCode::invalid_argument, "model config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "model" && key != "variant" && key != "params" && key != "d")
      fail(ErrorCode::invalid_argument,
           "unknown key '" + key + "' in model config");
  }
  if (!j.contains("model") || !j["model"].is_string())
    fail(ErrorCode::invalid_argument, "model config needs a string 'model'");
  BuiltinOptions opts;
  if (j.contains("variant")) {
    if (!j["variant"].is_string())
      fail(ErrorCode::invalid_argument, "'variant' must be a string");
    opts.variant = j["variant"].get<std::string>();
  }
  if (j.contains("d")) {
    if (!j["d"].is_number_integer() || j["d"].get<long>() <= 0)
      fail(ErrorCode::invalid_argument, "'d' must be a positive integer");
    opts.d = j["d"].get<std::size_t>();
  }
  ModelSpec model = builtin(j["model"].get<std::string>(), opts);
  if (j.contains("params")) {
    if (!j["params"].is_object())
      fail(ErrorCode::invalid_argument, "'params' must be an object");
    for (const auto& [key, value] : j["params"].items()) {
      if (!model.params.has(key))
        fail(ErrorCode::invalid_argument,
             "unknown parameter '" + key + "' for model " + model.name);
      if (!value.is_number())
        fail(ErrorCode::invalid_argument, "parameter '" + key + "' must be a number");
      model.params.set(key, value.get<double>());
    }
  }
  return model;
}

}  // namespace msbif
