#include "sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "threads.hpp"

namespace msbif {

namespace {

SweepRow make_row(const ModelSpec& base, const std::string& param_name,
                  const EquilibriumPoint& pt, double delta1, double delta2) {
  SweepRow row;
  row.param_name = param_name;
  row.param_value = pt.param_value;
  row.branch_id = pt.branch_id;
  row.x_star = pt.x_star;
  row.det_lambda_max = pt.det_lambda_max;
  row.det_stable = pt.det_stable;
  ModelSpec model = base;
  model.params.set(param_name, pt.param_value);
  try {
    const StabilityReport rep =
        analyze_equilibrium(model, pt.x_star, delta1, delta2);
    row.lambda_max_A = rep.lambda_max_A;
    row.mu = rep.mu;
    row.linear_ms_stable = rep.linear_ms_stable;
    row.nonlinear_ms_stable = rep.nonlinear_ms_stable;
    if (rep.beta_sq) row.beta_sq = *rep.beta_sq;
  } catch (const Error&) {
    // analysis failure: the row keeps its deterministic fields only
  }
  return row;
}

// Field value at an off-grid parameter for one branch.
std::optional<double> field_at(const ModelSpec& base,
                               const std::string& param_name, double value,
                               const std::string& branch_id, const Vector& hint,
                               const std::string& field, double delta1,
                               double delta2) {
  const auto pt = branch_point_at(base, param_name, value, branch_id, hint);
  if (!pt) return std::nullopt;
  ModelSpec model = base;
  model.params.set(param_name, value);
  try {
    if (field == "mu") return compute_mu(model, pt->x_star, delta1, delta2);
    const Linearization lin = linearize(model, pt->x_star);
    return lambda_max_ms(build_moment_system(lin));
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

SweepResult run_sweep(const ModelSpec& model, const std::string& param_name,
                      double from, double to, std::size_t n_steps,
                      double delta1, double delta2) {
  if (n_steps < 2)
    fail(ErrorCode::invalid_argument, "sweep needs at least 2 steps");
  SweepResult result;
  result.param_name = param_name;
  result.delta1 = delta1;
  result.delta2 = delta2;
  result.branches = continue_branches(model, param_name, from, to, n_steps);

  std::vector<const EquilibriumPoint*> points;
  for (const Branch& br : result.branches)
    for (const EquilibriumPoint& pt : br.points) points.push_back(&pt);

  result.rows.assign(points.size(), {});
  parallel_for(points.size(), [&](std::size_t i) {
    result.rows[i] = make_row(model, param_name, *points[i], delta1, delta2);
  });
  std::sort(result.rows.begin(), result.rows.end(),
            [](const SweepRow& a, const SweepRow& b) {
              if (a.branch_id != b.branch_id) return a.branch_id < b.branch_id;
              return a.param_value < b.param_value;
            });
  return result;
}

std::vector<CrossingEvent> detect_crossings(const ModelSpec& model,
                                            const SweepResult& sweep,
                                            const std::string& field) {
  if (field != "lambda_max_A" && field != "mu")
    fail(ErrorCode::invalid_argument, "crossing field must be lambda_max_A or mu");
  auto get = [&](const SweepRow& r) {
    return field == "mu" ? r.mu : r.lambda_max_A;
  };

  std::vector<CrossingEvent> events;
  auto refine = [&](const std::string& branch_id, double lo, double hi,
                    double f_lo, Vector hint) {
    CrossingEvent ev;
    ev.branch_id = branch_id;
    ev.field = field;
    bool lost = false;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (std::fabs(hi - lo) <= 1e-8 * (1.0 + std::fabs(mid))) break;
      const auto fm = field_at(model, sweep.param_name, mid, branch_id, hint,
                               field, sweep.delta1, sweep.delta2);
      if (!fm) {
        lost = true;
        break;
      }
      if ((*fm < 0.0) == (f_lo < 0.0)) {
        lo = mid;
        f_lo = *fm;
      } else {
        hi = mid;
      }
      const auto pt = branch_point_at(model, sweep.param_name, mid, branch_id, hint);
      if (pt) hint = pt->x_star;
    }
    ev.lo = lo;
    ev.hi = hi;
    ev.param_value = 0.5 * (lo + hi);
    ev.refined = !lost;
    events.push_back(ev);
  };

  // group rows per branch (rows are sorted by branch, then parameter)
  std::size_t start = 0;
  while (start < sweep.rows.size()) {
    std::size_t end = start;
    while (end < sweep.rows.size() &&
           sweep.rows[end].branch_id == sweep.rows[start].branch_id)
      ++end;
    const std::string& branch_id = sweep.rows[start].branch_id;

    for (std::size_t k = start; k + 1 < end; ++k) {
      const auto fa = get(sweep.rows[k]);
      const auto fb = get(sweep.rows[k + 1]);
      if (!fa || !fb) continue;
      if ((*fa < 0.0) == (*fb < 0.0)) continue;
      refine(branch_id, sweep.rows[k].param_value,
             sweep.rows[k + 1].param_value, *fa, sweep.rows[k].x_star);
    }

    // probe the terminal segments against fold endpoints
    const Branch* branch = nullptr;
    for (const Branch& br : sweep.branches)
      if (br.id == branch_id) branch = &br;
    if (branch && !branch->fold_params.empty()) {
      const SweepRow& first = sweep.rows[start];
      const SweepRow& last = sweep.rows[end - 1];
      for (double fold : branch->fold_params) {
        const SweepRow* anchor = nullptr;
        if (fold < first.param_value)
          anchor = &first;
        else if (fold > last.param_value)
          anchor = &last;
        if (!anchor) continue;
        const auto fa = get(*anchor);
        if (!fa) continue;
        // The existence boundary is only resolved to ~1e-8, so probe a hair
        // inside the branch rather than at the fold itself.
        const double probe =
            fold + (anchor->param_value - fold) * 1e-4;
        const auto fb =
            field_at(model, sweep.param_name, probe, branch_id, anchor->x_star,
                     field, sweep.delta1, sweep.delta2);
        if (!fb) {
          CrossingEvent ev;
          ev.branch_id = branch_id;
          ev.field = field;
          ev.lo = std::min(anchor->param_value, fold);
          ev.hi = std::max(anchor->param_value, fold);
          ev.param_value = 0.5 * (ev.lo + ev.hi);
          ev.refined = false;
          events.push_back(ev);
          continue;
        }
        if ((*fa < 0.0) == (*fb < 0.0)) continue;
        refine(branch_id, anchor->param_value, probe, *fa, anchor->x_star);
      }
    }
    start = end;
  }
  std::sort(events.begin(), events.end(),
            [](const CrossingEvent& a, const CrossingEvent& b) {
              if (a.branch_id != b.branch_id) return a.branch_id < b.branch_id;
              return a.param_value < b.param_value;
            });
  return events;
}

void write_sweep_csv(std::ostream& os, const ModelSpec& model,
                     const SweepResult& sweep) {
  char buf[64];
  auto fmt = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "# model=" << model.name << ", variant=" << model.variant
     << ", delta1=" << fmt(sweep.delta1) << ", delta2=" << fmt(sweep.delta2)
     << "\n";
  os << "# params:";
  bool first = true;
  for (const auto& [key, value] : model.params.items()) {
    os << (first ? " " : ", ") << key << "=" << fmt(value);
    first = false;
  }
  os << "\n";
  const std::size_t d = model.d;
  os << "param_name,param_value,branch_id";
  for (std::size_t i = 1; i <= d; ++i) os << ",x_" << i;
  os << ",det_lambda_max,lambda_max_A,beta_sq,mu,det_stable,linear_ms_stable,"
        "nonlinear_ms_stable\n";
  for (const SweepRow& row : sweep.rows) {
    os << row.param_name << "," << fmt(row.param_value) << "," << row.branch_id;
    for (std::size_t i = 0; i < d; ++i) os << "," << fmt(row.x_star[i]);
    os << "," << fmt(row.det_lambda_max);
    os << "," << (row.lambda_max_A ? fmt(*row.lambda_max_A) : "");
    os << "," << (row.beta_sq ? fmt(*row.beta_sq) : "");
    os << "," << (row.mu ? fmt(*row.mu) : "");
    os << "," << (row.det_stable ? "1" : "0");
    os << ","
       << (row.linear_ms_stable ? (*row.linear_ms_stable ? "1" : "0") : "");
    os << ","
       << (row.nonlinear_ms_stable ? (*row.nonlinear_ms_stable ? "1" : "0")
                                   : "");
    os << "\n";
  }
}

}  // namespace msbif
