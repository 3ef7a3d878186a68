#include "equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace msbif {

namespace {

std::vector<double> linspace(double from, double to, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k)
    v[k] = from + (to - from) * static_cast<double>(k) /
                      static_cast<double>(n - 1);
  return v;
}

double point_distance(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double det_of_jacobian(const ModelSpec& model, const Vector& x) {
  return determinant(jacobian(model, x, JacobianTarget::drift));
}

std::vector<Vector> default_grid_seeds(std::size_t d) {
  const std::size_t active = std::min<std::size_t>(d, 3);
  const double levels[5] = {-2.0, -1.0, 0.0, 1.0, 2.0};
  std::size_t total = 1;
  for (std::size_t k = 0; k < active; ++k) total *= 5;
  std::vector<Vector> seeds;
  seeds.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    Vector x(d, 0.0);
    std::size_t rest = idx;
    for (std::size_t k = 0; k < active; ++k) {
      x[k] = levels[rest % 5];
      rest /= 5;
    }
    seeds.push_back(std::move(x));
  }
  return seeds;
}

}  // namespace

EquilibriumPoint newton(const ModelSpec& model, const Vector& x0, double tol,
                        int max_iter) {
  if (x0.size() != model.d)
    fail(ErrorCode::invalid_argument, "newton start point has wrong dimension");
  if (!(tol > 0.0))
    fail(ErrorCode::invalid_argument, "newton tolerance must be positive");
  Vector x = x0;
  for (int it = 0; it <= max_iter; ++it) {
    Vector f = model.F(x);
    if (norm2(f) <= tol) {
      EquilibriumPoint pt;
      pt.x_star = x;
      auto [lmax, stable] = det_classify(model, x);
      pt.det_lambda_max = lmax;
      pt.det_stable = stable;
      return pt;
    }
    if (it == max_iter) break;
    DenseMatrix j = jacobian(model, x, JacobianTarget::drift);
    Vector step;
    try {
      for (double& v : f) v = -v;
      step = solve_linear(j, f);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::singular_matrix)
        fail(ErrorCode::singular_matrix, "singular Jacobian in Newton iteration");
      throw;
    }
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += step[i];
    if (norm2(x) > 1e12)
      fail(ErrorCode::no_convergence, "Newton iteration diverged");
  }
  fail(ErrorCode::no_convergence, "Newton did not converge within max_iter");
}

std::pair<double, bool> det_classify(const ModelSpec& model,
                                     const Vector& x_star) {
  const DenseMatrix j = jacobian(model, x_star, JacobianTarget::drift);
  const double lmax = max_real_part(spectrum(j));
  return {lmax, lmax < 0.0};
}

std::vector<EquilibriumPoint> find_equilibria(const ModelSpec& model,
                                              const std::vector<Vector>& seeds) {
  std::vector<EquilibriumPoint> out;
  if (model.has_equilibria()) {
    for (const auto& eq : model.analytic_equilibria()) {
      EquilibriumPoint pt;
      pt.x_star = eq.x;
      pt.branch_id = eq.label;
      auto [lmax, stable] = det_classify(model, eq.x);
      pt.det_lambda_max = lmax;
      pt.det_stable = stable;
      out.push_back(std::move(pt));
    }
    return out;
  }
  const std::vector<Vector>& starts =
      seeds.empty() ? default_grid_seeds(model.d) : seeds;
  std::vector<EquilibriumPoint> found;
  for (const Vector& x0 : starts) {
    try {
      EquilibriumPoint pt = newton(model, x0);
      bool duplicate = false;
      for (const auto& prev : found)
        if (point_distance(prev.x_star, pt.x_star) < 1e-8) {
          duplicate = true;
          break;
        }
      if (!duplicate) found.push_back(std::move(pt));
    } catch (const Error&) {
      // seed did not converge; move on
    }
  }
  std::sort(found.begin(), found.end(),
            [](const EquilibriumPoint& a, const EquilibriumPoint& b) {
              return std::lexicographical_compare(
                  a.x_star.begin(), a.x_star.end(), b.x_star.begin(),
                  b.x_star.end());
            });
  for (std::size_t i = 0; i < found.size(); ++i)
    found[i].branch_id = "b" + std::to_string(i);
  return found;
}

namespace {

// Label-existence probe for analytic branches.
std::optional<EquilibriumPoint> analytic_point(const ModelSpec& base,
                                               const std::string& param_name,
                                               double value,
                                               const std::string& label) {
  ModelSpec model = base;
  model.params.set(param_name, value);
  for (const auto& eq : model.analytic_equilibria()) {
    if (eq.label != label) continue;
    EquilibriumPoint pt;
    pt.x_star = eq.x;
    pt.param_value = value;
    pt.branch_id = label;
    auto [lmax, stable] = det_classify(model, eq.x);
    pt.det_lambda_max = lmax;
    pt.det_stable = stable;
    return pt;
  }
  return std::nullopt;
}

// Bisection on the parameter for the boundary of label existence; assumes the
// label exists at `inside` and not at `outside`.
double refine_existence_boundary(const ModelSpec& model,
                                 const std::string& param_name, double inside,
                                 double outside, const std::string& label) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (inside + outside);
    if (std::fabs(outside - inside) <= 1e-8 * (1.0 + std::fabs(mid))) break;
    if (analytic_point(model, param_name, mid, label))
      inside = mid;
    else
      outside = mid;
  }
  return 0.5 * (inside + outside);
}

// Bisection on det(DF(x*)) = 0 between two points of one branch.
double refine_det_zero(const ModelSpec& base, const std::string& param_name,
                       const EquilibriumPoint& a, const EquilibriumPoint& b,
                       bool analytic) {
  double lo = a.param_value, hi = b.param_value;
  Vector x_lo = a.x_star, x_hi = b.x_star;
  ModelSpec model = base;
  model.params.set(param_name, lo);
  double f_lo = det_of_jacobian(model, x_lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::fabs(hi - lo) <= 1e-8 * (1.0 + std::fabs(mid))) break;
    std::optional<EquilibriumPoint> pt;
    if (analytic) {
      pt = analytic_point(base, param_name, mid, a.branch_id);
    } else {
      model.params.set(param_name, mid);
      Vector hint(x_lo.size());
      for (std::size_t i = 0; i < hint.size(); ++i)
        hint[i] = 0.5 * (x_lo[i] + x_hi[i]);
      try {
        pt = newton(model, hint);
        pt->param_value = mid;
      } catch (const Error&) {
        pt.reset();
      }
    }
    if (!pt) break;
    model.params.set(param_name, mid);
    const double f_mid = det_of_jacobian(model, pt->x_star);
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      x_lo = pt->x_star;
      f_lo = f_mid;
    } else {
      hi = mid;
      x_hi = pt->x_star;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<Branch> continue_analytic(const ModelSpec& base,
                                      const std::string& param_name,
                                      const std::vector<double>& values) {
  std::map<std::string, Branch> branches;
  ModelSpec model = base;
  for (double v : values) {
    model.params.set(param_name, v);
    for (const auto& eq : model.analytic_equilibria()) {
      EquilibriumPoint pt;
      pt.x_star = eq.x;
      pt.param_value = v;
      pt.branch_id = eq.label;
      auto [lmax, stable] = det_classify(model, eq.x);
      pt.det_lambda_max = lmax;
      pt.det_stable = stable;
      Branch& br = branches[eq.label];
      br.id = eq.label;
      br.points.push_back(std::move(pt));
    }
  }

  for (auto& [label, br] : branches) {
    // interior det(DF) sign changes
    for (std::size_t k = 0; k + 1 < br.points.size(); ++k) {
      const auto& a = br.points[k];
      const auto& b = br.points[k + 1];
      if (std::fabs(b.param_value - a.param_value) >
          1.5 * std::fabs(values[1] - values[0]))
        continue;  // gap in label existence
      ModelSpec probe = base;
      probe.params.set(param_name, a.param_value);
      const double da = det_of_jacobian(probe, a.x_star);
      probe.params.set(param_name, b.param_value);
      const double db = det_of_jacobian(probe, b.x_star);
      if (da == 0.0 || db == 0.0 || (da < 0.0) == (db < 0.0)) continue;
      br.fold_params.push_back(
          refine_det_zero(base, param_name, a, b, /*analytic=*/true));
    }
    // fold at a branch end strictly inside the sweep range
    const double lo_end = std::min(values.front(), values.back());
    const double hi_end = std::max(values.front(), values.back());
    for (bool at_start : {true, false}) {
      const auto& pt = at_start ? br.points.front() : br.points.back();
      const double step = std::fabs(values[1] - values[0]);
      const double outward =
          at_start == (values.front() < values.back()) ? -step : step;
      const double outside = pt.param_value + outward;
      if (outside < lo_end - 1e-12 || outside > hi_end + 1e-12) continue;
      if (analytic_point(base, param_name, outside, label)) continue;
      br.fold_params.push_back(refine_existence_boundary(
          base, param_name, pt.param_value, outside, label));
    }
    std::sort(br.fold_params.begin(), br.fold_params.end());
    br.fold_params.erase(
        std::unique(br.fold_params.begin(), br.fold_params.end(),
                    [](double a, double b) { return std::fabs(a - b) < 1e-7; }),
        br.fold_params.end());
  }

  std::vector<Branch> out;
  out.reserve(branches.size());
  for (auto& [label, br] : branches) out.push_back(std::move(br));
  return out;
}

std::vector<Branch> continue_newton(const ModelSpec& base,
                                    const std::string& param_name,
                                    const std::vector<double>& values,
                                    const ContinuationOptions& opts) {
  ModelSpec model = base;
  model.params.set(param_name, values.front());
  std::vector<Vector> seeds = opts.seeds;
  if (seeds.empty() && base.has_equilibria()) {
    for (const auto& eq : model.analytic_equilibria()) seeds.push_back(eq.x);
  }
  ModelSpec probe = model;
  probe.equilibria = nullptr;  // Newton from the seeds, not the formulas
  std::vector<EquilibriumPoint> first = find_equilibria(probe, seeds);

  std::vector<Branch> branches;
  for (std::size_t b = 0; b < first.size(); ++b) {
    Branch br;
    br.id = "b" + std::to_string(b);
    first[b].branch_id = br.id;
    first[b].param_value = values.front();
    br.points.push_back(first[b]);
    branches.push_back(std::move(br));
  }

  const double grid_step = values[1] - values[0];
  for (Branch& br : branches) {
    int direction = 1;  // index step through `values`
    std::size_t idx = 0;
    bool rounded_fold = false;
    while (true) {
      const long next = static_cast<long>(idx) + direction;
      if (next < 0 || next >= static_cast<long>(values.size())) break;
      idx = static_cast<std::size_t>(next);
      const double v = values[idx];
      const EquilibriumPoint& last = br.points.back();
      Vector pred = last.x_star;
      if (br.points.size() >= 2) {
        const auto& prev = br.points[br.points.size() - 2];
        if (std::fabs(last.param_value - prev.param_value) > 0.0) {
          const double scale =
              (v - last.param_value) / (last.param_value - prev.param_value);
          for (std::size_t i = 0; i < pred.size(); ++i)
            pred[i] = last.x_star[i] + scale * (last.x_star[i] - prev.x_star[i]);
        }
      }
      model.params.set(param_name, v);
      bool ok = false;
      EquilibriumPoint pt;
      try {
        pt = newton(model, pred, opts.newton_tol, opts.newton_max_iter);
        const double jump = point_distance(pt.x_star, last.x_star);
        ok = jump <= 0.5 * (1.0 + norm2(last.x_star));
      } catch (const Error&) {
        ok = false;
      }
      if (ok) {
        pt.param_value = v;
        pt.branch_id = br.id;
        br.points.push_back(std::move(pt));
        continue;
      }
      if (rounded_fold || br.points.size() < 2) break;
      // One pseudo-arclength step to round the turn: solve F(x, p) = 0
      // together with a tangent normalization.
      const auto& prev = br.points[br.points.size() - 2];
      Vector tangent(base.d + 1);
      for (std::size_t i = 0; i < base.d; ++i)
        tangent[i] = last.x_star[i] - prev.x_star[i];
      tangent[base.d] = last.param_value - prev.param_value;
      const double tnorm = norm2(tangent);
      if (tnorm == 0.0) break;
      for (double& t : tangent) t /= tnorm;
      const double ds = tnorm;
      Vector z(base.d + 1);
      for (std::size_t i = 0; i < base.d; ++i)
        z[i] = last.x_star[i] + ds * tangent[i];
      z[base.d] = last.param_value + ds * tangent[base.d];
      bool arc_ok = true;
      for (int it = 0; it < opts.newton_max_iter; ++it) {
        model.params.set(param_name, z[base.d]);
        Vector x(z.begin(), z.begin() + base.d);
        Vector f = model.F(x);
        double g = -ds;
        for (std::size_t i = 0; i < base.d; ++i)
          g += (z[i] - last.x_star[i]) * tangent[i];
        g += (z[base.d] - last.param_value) * tangent[base.d];
        if (norm2(f) <= opts.newton_tol && std::fabs(g) <= opts.newton_tol)
          break;
        DenseMatrix jx = jacobian(model, x, JacobianTarget::drift);
        // dF/dp by central differences
        const double hp = 1e-6 * (1.0 + std::fabs(z[base.d]));
        model.params.set(param_name, z[base.d] + hp);
        Vector fp = model.F(x);
        model.params.set(param_name, z[base.d] - hp);
        Vector fm = model.F(x);
        DenseMatrix aug(base.d + 1, base.d + 1);
        for (std::size_t i = 0; i < base.d; ++i) {
          for (std::size_t j = 0; j < base.d; ++j) aug(i, j) = jx(i, j);
          aug(i, base.d) = (fp[i] - fm[i]) / (2.0 * hp);
        }
        for (std::size_t j = 0; j <= base.d; ++j) aug(base.d, j) = tangent[j];
        Vector rhs(base.d + 1);
        for (std::size_t i = 0; i < base.d; ++i) rhs[i] = -f[i];
        rhs[base.d] = -g;
        Vector dz;
        try {
          dz = solve_linear(aug, rhs);
        } catch (const Error&) {
          arc_ok = false;
          break;
        }
        for (std::size_t i = 0; i <= base.d; ++i) z[i] += dz[i];
        if (it == opts.newton_max_iter - 1) arc_ok = false;
      }
      if (!arc_ok) break;
      model.params.set(param_name, z[base.d]);
      Vector x_new(z.begin(), z.begin() + base.d);
      if (norm2(model.F(x_new)) > 1e-8) break;
      EquilibriumPoint turned;
      turned.x_star = x_new;
      turned.param_value = z[base.d];
      turned.branch_id = br.id;
      auto [lmax, stable] = det_classify(model, x_new);
      turned.det_lambda_max = lmax;
      turned.det_stable = stable;
      const bool reversed =
          (turned.param_value - last.param_value) * grid_step * direction < 0.0;
      br.fold_params.push_back(refine_det_zero(base, param_name, last, turned,
                                               /*analytic=*/false));
      br.points.push_back(std::move(turned));
      rounded_fold = true;
      if (reversed) {
        direction = -direction;
        // resume the grid on the reversed side of the current parameter
        while (true) {
          const long back = static_cast<long>(idx) + direction;
          if (back < 0 || back >= static_cast<long>(values.size())) break;
          const double cand = values[static_cast<std::size_t>(back)];
          const bool passed = direction > 0
                                  ? cand > br.points.back().param_value
                                  : cand < br.points.back().param_value;
          if (passed) break;
          idx = static_cast<std::size_t>(back);
        }
      }
    }
  }

  // Merge branches whose points coincide.
  std::vector<Branch> merged;
  for (auto& br : branches) {
    bool dup = false;
    for (const auto& kept : merged) {
      if (kept.points.size() != br.points.size()) continue;
      bool same = true;
      for (std::size_t k = 0; k < br.points.size(); ++k) {
        if (std::fabs(kept.points[k].param_value - br.points[k].param_value) >
                1e-12 ||
            point_distance(kept.points[k].x_star, br.points[k].x_star) > 1e-8) {
          same = false;
          break;
        }
      }
      if (same) {
        dup = true;
        break;
      }
    }
    if (!dup) merged.push_back(std::move(br));
  }
  return merged;
}

}  // namespace

std::vector<Branch> continue_branches(const ModelSpec& model,
                                      const std::string& param_name,
                                      double from, double to,
                                      std::size_t n_steps,
                                      const ContinuationOptions& opts) {
  if (n_steps < 2)
    fail(ErrorCode::invalid_argument, "continuation needs at least 2 steps");
  if (!std::isfinite(from) || !std::isfinite(to) || from == to)
    fail(ErrorCode::invalid_argument, "continuation range must be finite");
  const std::vector<double> values = linspace(from, to, n_steps);
  std::vector<Branch> out;
  if (model.has_equilibria() && !opts.force_newton)
    out = continue_analytic(model, param_name, values);
  else
    out = continue_newton(model, param_name, values, opts);
  std::sort(out.begin(), out.end(),
            [](const Branch& a, const Branch& b) { return a.id < b.id; });
  return out;
}

std::optional<EquilibriumPoint> branch_point_at(const ModelSpec& model,
                                                const std::string& param_name,
                                                double value,
                                                const std::string& branch_id,
                                                const Vector& hint) {
  if (model.has_equilibria())
    return analytic_point(model, param_name, value, branch_id);
  ModelSpec probe = model;
  probe.params.set(param_name, value);
  try {
    EquilibriumPoint pt = newton(probe, hint);
    pt.param_value = value;
    pt.branch_id = branch_id;
    return pt;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace msbif
