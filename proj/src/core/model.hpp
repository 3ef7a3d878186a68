#pragma once

// SDE model interface dX = F(X)dt + G(X)dW and the registry of built-in
// example systems with their published default parameters. Models are
// immutable after construction apart from parameter values; evaluators are
// pure functions of (params, x).

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "linalg.hpp"

namespace msbif {

class Params {
public:
  double get(const std::string& name) const;
  void set(const std::string& name, double value) { values_[name] = value; }
  bool has(const std::string& name) const { return values_.count(name) != 0; }
  const std::map<std::string, double>& items() const { return values_; }

private:
  std::map<std::string, double> values_;
};

struct DissipativityMeta {
  double p = 2.0;       // moment order
  double alpha1 = 0.0;  // monotone constant
  double alpha2 = 0.0;  // decay rate, > 0
  double alpha3 = 0.0;  // offset, >= 0
};

struct RemainderMeta {
  double c1 = 0.0, q1 = 0.0;  // drift second-derivative growth
  double c2 = 0.0, q2 = 0.0;  // diffusion second-derivative growth
};

struct LabeledEquilibrium {
  std::string label;
  Vector x;
};

enum class InvariantDomain { unrestricted, positive_cone };

struct ModelSpec {
  std::string name;
  std::string variant;
  std::size_t d = 1;  // state dimension
  std::size_t m = 1;  // noise dimension
  Params params;

  std::function<Vector(const Params&, const Vector&)> drift;
  std::function<DenseMatrix(const Params&, const Vector&)> diffusion;  // d x m
  std::function<DenseMatrix(const Params&, const Vector&)> jac_drift;  // optional
  std::function<std::vector<DenseMatrix>(const Params&, const Vector&)>
      jac_diffusion;  // optional; m matrices, each d x d
  std::function<std::vector<LabeledEquilibrium>(const Params&)>
      equilibria;  // optional analytic equilibria
  std::function<std::optional<DissipativityMeta>(const Params&, double p)>
      dissipativity_meta;  // optional
  std::function<std::optional<RemainderMeta>(const Params&)>
      remainder_meta;  // optional
  // Optional replacement for the generic dissipativity test function
  // <x,F> + ((p-1)/2)||G||_F^2 + a2||x||^2 - a3 (used by the Lorenz
  // Lyapunov-weighted certificate).
  std::function<double(const Params&, double p, double a2, double a3,
                       const Vector& x)>
      dissipativity_form;
  // Optional extra restriction on dissipativity sample points.
  std::function<bool(const Params&, const Vector&)> sample_restriction;

  InvariantDomain invariant_domain = InvariantDomain::unrestricted;

  // Derived quantities fixed at construction (allen_cahn grid spacing and
  // noise scale, lorenz noise-coupling domain bound).
  std::map<std::string, double> derived;

  Vector F(const Vector& x) const { return drift(params, x); }
  DenseMatrix G(const Vector& x) const { return diffusion(params, x); }
  bool has_analytic_jac_drift() const { return static_cast<bool>(jac_drift); }
  bool has_analytic_jac_diffusion() const {
    return static_cast<bool>(jac_diffusion);
  }
  bool has_equilibria() const { return static_cast<bool>(equilibria); }
  std::vector<LabeledEquilibrium> analytic_equilibria() const;
  std::optional<DissipativityMeta> meta(double p = 2.0) const {
    return dissipativity_meta ? dissipativity_meta(params, p) : std::nullopt;
  }
  std::optional<RemainderMeta> remainder() const {
    return remainder_meta ? remainder_meta(params) : std::nullopt;
  }
};

struct BuiltinOptions {
  std::string variant;   // empty selects the model default
  std::size_t d = 0;     // 0 keeps the model default (allen_cahn only)
};

// Registry of the built-in example systems. Throws unknown_model /
// unknown_variant.
ModelSpec builtin(const std::string& name, const BuiltinOptions& options = {});

std::vector<std::string> builtin_names();

enum class JacobianTarget { drift, diffusion_column };
enum class JacobianMode { analytic, finite_difference, prefer_analytic };

// Jacobian of the drift, or of the i-th diffusion column, at x. Central
// differences use step h_j = cbrt(eps) * max(1, |x_j|).
DenseMatrix jacobian(const ModelSpec& model, const Vector& x,
                     JacobianTarget target, std::size_t column = 0,
                     JacobianMode mode = JacobianMode::prefer_analytic);

bool check_equilibrium(const ModelSpec& model, const Vector& x, double tol);

// Parses {"model": ..., "variant": ..., "params": {...}, "d": ...}; exact
// field names, unknown keys rejected.
ModelSpec model_from_json(const std::string& json_text);

}  // namespace msbif
