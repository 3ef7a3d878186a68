#include "msbif.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

#include "core/equilibria.hpp"
#include "core/linearization.hpp"
#include "core/model.hpp"
#include "core/simulate.hpp"
#include "core/svg.hpp"
#include "core/sweep.hpp"
#include "core/validate.hpp"

using msbif::Error;
using msbif::ErrorCode;

struct msbif_model {
  msbif::ModelSpec spec;
};

struct msbif_reports {
  std::vector<msbif::EquilibriumPoint> equilibria;
  std::vector<msbif::StabilityReport> reports;
};

struct msbif_sweep_result {
  msbif::ModelSpec spec;
  msbif::SweepResult result;
};

namespace {

thread_local std::string g_last_error;

msbif_status status_from(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return MSBIF_ERR_INVALID_ARGUMENT;
    case ErrorCode::unknown_model: return MSBIF_ERR_UNKNOWN_MODEL;
    case ErrorCode::unknown_variant: return MSBIF_ERR_UNKNOWN_VARIANT;
    case ErrorCode::singular_matrix: return MSBIF_ERR_SINGULAR_MATRIX;
    case ErrorCode::no_convergence: return MSBIF_ERR_NO_CONVERGENCE;
    case ErrorCode::inconsistent_symmetry: return MSBIF_ERR_INCONSISTENT_SYMMETRY;
    case ErrorCode::not_mean_square_stable: return MSBIF_ERR_NOT_MEAN_SQUARE_STABLE;
    case ErrorCode::missing_analytic_jacobian: return MSBIF_ERR_MISSING_ANALYTIC_JACOBIAN;
    case ErrorCode::missing_remainder_meta: return MSBIF_ERR_MISSING_REMAINDER_META;
    case ErrorCode::missing_inputs: return MSBIF_ERR_MISSING_INPUTS;
    case ErrorCode::too_few_paths: return MSBIF_ERR_TOO_FEW_PATHS;
    case ErrorCode::schema_mismatch: return MSBIF_ERR_SCHEMA_MISMATCH;
    case ErrorCode::io_error: return MSBIF_ERR_IO;
  }
  return MSBIF_ERR_INTERNAL;
}

template <typename Fn>
msbif_status guarded(Fn&& fn) {
  try {
    fn();
    return MSBIF_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_from(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MSBIF_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return MSBIF_ERR_INTERNAL;
  }
}

msbif_status fail_invalid(const char* msg) {
  g_last_error = msg;
  return MSBIF_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nlohmann::json report_to_json(const msbif::EquilibriumPoint& eq,
                              const msbif::StabilityReport& rep) {
  nlohmann::json j;
  j["branch_id"] = eq.branch_id;
  j["x_star"] = eq.x_star;
  j["det_lambda_max"] = eq.det_lambda_max;
  j["det_stable"] = eq.det_stable;
  j["lambda_max_A"] = rep.lambda_max_A;
  if (rep.beta_sq) {
    j["beta_sq"] = *rep.beta_sq;
    j["beta"] = std::sqrt(*rep.beta_sq);
  } else {
    j["beta_sq"] = nullptr;
    j["beta"] = nullptr;
  }
  j["mu"] = rep.mu;
  j["delta1"] = rep.delta1;
  j["delta2"] = rep.delta2;
  j["dg_tensor_norm_sq"] = rep.dg_tensor_norm_sq;
  j["linear_ms_stable"] = rep.linear_ms_stable;
  j["nonlinear_ms_stable"] = rep.nonlinear_ms_stable;
  j["nonnormality_warning"] = rep.nonnormality_warning;
  return j;
}

}  // namespace

extern "C" {

const char* msbif_version(void) { return "0.1.0"; }

const char* msbif_last_error(void) { return g_last_error.c_str(); }

msbif_status msbif_model_create(const char* name, const char* variant, int dim,
                                msbif_model** out) {
  if (!name || !out) return fail_invalid("name and out must be non-null");
  *out = nullptr;
  return guarded([&] {
    msbif::BuiltinOptions opts;
    if (variant) opts.variant = variant;
    if (dim > 0) opts.d = static_cast<std::size_t>(dim);
    *out = new msbif_model{msbif::builtin(name, opts)};
  });
}

msbif_status msbif_model_create_from_json(const char* json_text,
                                          msbif_model** out) {
  if (!json_text || !out) return fail_invalid("json and out must be non-null");
  *out = nullptr;
  return guarded([&] { *out = new msbif_model{msbif::model_from_json(json_text)}; });
}

msbif_status msbif_model_set_param(msbif_model* model, const char* name,
                                   double value) {
  if (!model || !name) return fail_invalid("model and name must be non-null");
  return guarded([&] {
    if (!model->spec.params.has(name))
      msbif::fail(ErrorCode::invalid_argument,
                  std::string("unknown parameter '") + name + "' for model " +
                      model->spec.name);
    model->spec.params.set(name, value);
  });
}

int msbif_model_dim(const msbif_model* model) {
  return model ? static_cast<int>(model->spec.d) : 0;
}

int msbif_model_noise_dim(const msbif_model* model) {
  return model ? static_cast<int>(model->spec.m) : 0;
}

void msbif_model_free(msbif_model* model) { delete model; }

msbif_status msbif_analyze(const msbif_model* model, double delta1,
                           double delta2, msbif_reports** out) {
  if (!model || !out) return fail_invalid("model and out must be non-null");
  *out = nullptr;
  return guarded([&] {
    auto reports = std::make_unique<msbif_reports>();
    reports->equilibria = msbif::find_equilibria(model->spec);
    for (const auto& eq : reports->equilibria)
      reports->reports.push_back(msbif::analyze_equilibrium(
          model->spec, eq.x_star, delta1, delta2));
    *out = reports.release();
  });
}

int msbif_reports_count(const msbif_reports* reports) {
  return reports ? static_cast<int>(reports->reports.size()) : 0;
}

msbif_status msbif_reports_scalars(const msbif_reports* reports, int index,
                                   msbif_report_scalars* out) {
  if (!reports || !out) return fail_invalid("reports and out must be non-null");
  if (index < 0 || index >= msbif_reports_count(reports))
    return fail_invalid("report index out of range");
  const auto& eq = reports->equilibria[index];
  const auto& rep = reports->reports[index];
  out->det_lambda_max = eq.det_lambda_max;
  out->lambda_max_A = rep.lambda_max_A;
  out->beta_sq =
      rep.beta_sq ? *rep.beta_sq : std::numeric_limits<double>::quiet_NaN();
  out->mu = rep.mu;
  out->dg_tensor_norm_sq = rep.dg_tensor_norm_sq;
  out->det_stable = eq.det_stable ? 1 : 0;
  out->linear_ms_stable = rep.linear_ms_stable ? 1 : 0;
  out->nonlinear_ms_stable = rep.nonlinear_ms_stable ? 1 : 0;
  out->nonnormality_warning = rep.nonnormality_warning ? 1 : 0;
  return MSBIF_OK;
}

msbif_status msbif_reports_equilibrium(const msbif_reports* reports, int index,
                                       double* x_star, size_t capacity) {
  if (!reports || !x_star) return fail_invalid("reports and x_star must be non-null");
  if (index < 0 || index >= msbif_reports_count(reports))
    return fail_invalid("report index out of range");
  const auto& x = reports->equilibria[index].x_star;
  if (capacity < x.size()) return fail_invalid("x_star capacity too small");
  std::memcpy(x_star, x.data(), x.size() * sizeof(double));
  return MSBIF_OK;
}

msbif_status msbif_reports_branch_id(const msbif_reports* reports, int index,
                                     char* buffer, size_t capacity) {
  if (!reports || !buffer) return fail_invalid("reports and buffer must be non-null");
  if (index < 0 || index >= msbif_reports_count(reports))
    return fail_invalid("report index out of range");
  const std::string& id = reports->equilibria[index].branch_id;
  if (capacity < id.size() + 1) return fail_invalid("branch id buffer too small");
  std::memcpy(buffer, id.c_str(), id.size() + 1);
  return MSBIF_OK;
}

msbif_status msbif_reports_to_json(const msbif_reports* reports,
                                   char** out_json) {
  if (!reports || !out_json) return fail_invalid("reports and out must be non-null");
  *out_json = nullptr;
  return guarded([&] {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < reports->reports.size(); ++i)
      arr.push_back(report_to_json(reports->equilibria[i], reports->reports[i]));
    *out_json = dup_string(arr.dump(2));
  });
}

void msbif_reports_free(msbif_reports* reports) { delete reports; }

msbif_status msbif_sweep_run(const msbif_model* model, const char* param_name,
                             double from, double to, int steps, double delta1,
                             double delta2, msbif_sweep_result** out) {
  if (!model || !param_name || !out)
    return fail_invalid("model, param_name and out must be non-null");
  if (steps < 2) return fail_invalid("sweep needs at least 2 steps");
  *out = nullptr;
  return guarded([&] {
    if (!model->spec.params.has(param_name))
      msbif::fail(ErrorCode::invalid_argument,
                  std::string("unknown sweep parameter '") + param_name + "'");
    auto sweep = std::make_unique<msbif_sweep_result>();
    sweep->spec = model->spec;
    sweep->result =
        msbif::run_sweep(model->spec, param_name, from, to,
                         static_cast<std::size_t>(steps), delta1, delta2);
    *out = sweep.release();
  });
}

msbif_status msbif_sweep_write_csv(const msbif_sweep_result* sweep,
                                   const char* path) {
  if (!sweep || !path) return fail_invalid("sweep and path must be non-null");
  return guarded([&] {
    std::ofstream os(path);
    if (!os) msbif::fail(ErrorCode::io_error, std::string("cannot write ") + path);
    msbif::write_sweep_csv(os, sweep->spec, sweep->result);
  });
}

msbif_status msbif_sweep_crossings_json(const msbif_sweep_result* sweep,
                                        const char* field, char** out_json) {
  if (!sweep || !field || !out_json)
    return fail_invalid("sweep, field and out must be non-null");
  *out_json = nullptr;
  return guarded([&] {
    const auto events =
        msbif::detect_crossings(sweep->spec, sweep->result, field);
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& ev : events) {
      nlohmann::json j;
      j["branch_id"] = ev.branch_id;
      j["field"] = ev.field;
      j["param_value"] = ev.param_value;
      j["bracket"] = {ev.lo, ev.hi};
      j["refined"] = ev.refined;
      arr.push_back(std::move(j));
    }
    *out_json = dup_string(arr.dump(2));
  });
}

void msbif_sweep_free(msbif_sweep_result* sweep) { delete sweep; }

void msbif_sim_options_init(msbif_sim_options* opts) {
  if (!opts) return;
  opts->t_final = 100.0;
  opts->dt = 0.01;
  opts->n_paths = 5;
  opts->seed = 0;
  opts->radius = 1e-6;
  opts->output_stride = 1;
  opts->taming = 1;
}

msbif_status msbif_simulate_to_csv(const msbif_model* model, const double* x0,
                                   const char* equilibrium_label,
                                   const msbif_sim_options* opts,
                                   const char* csv_path) {
  if (!model || !opts || !csv_path)
    return fail_invalid("model, opts and csv_path must be non-null");
  return guarded([&] {
    const msbif::ModelSpec& spec = model->spec;
    msbif::SimConfig cfg;
    cfg.t_final = opts->t_final;
    cfg.dt = opts->dt;
    cfg.n_paths = opts->n_paths > 0 ? static_cast<std::size_t>(opts->n_paths) : 0;
    cfg.seed = opts->seed;
    cfg.radius = opts->radius;
    cfg.output_stride =
        opts->output_stride > 0 ? static_cast<std::size_t>(opts->output_stride) : 1;
    cfg.taming = opts->taming != 0;

    std::vector<std::pair<std::string, std::string>> metadata;
    metadata.emplace_back("model", spec.name);
    if (!spec.variant.empty()) metadata.emplace_back("variant", spec.variant);
    {
      std::string params;
      for (const auto& [key, value] : spec.params.items()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", value);
        if (!params.empty()) params += ", ";
        params += key + "=" + buf;
      }
      metadata.emplace_back("params", params);
    }

    const std::vector<msbif::EquilibriumPoint> eqs =
        msbif::find_equilibria(spec);
    if (x0) {
      cfg.x0.assign(x0, x0 + spec.d);
    } else {
      const msbif::EquilibriumPoint* chosen = nullptr;
      if (equilibrium_label && *equilibrium_label) {
        for (const auto& eq : eqs)
          if (eq.branch_id == equilibrium_label) chosen = &eq;
        if (!chosen)
          msbif::fail(ErrorCode::invalid_argument,
                      std::string("no equilibrium labeled '") +
                          equilibrium_label + "'");
      } else {
        for (const auto& eq : eqs)
          if (eq.det_stable) {
            chosen = &eq;
            break;
          }
        if (!chosen && !eqs.empty()) chosen = &eqs.front();
        if (!chosen)
          msbif::fail(ErrorCode::invalid_argument,
                      "model has no equilibrium to start from");
      }
      cfg.x0 = chosen->x_star;
      std::string xs;
      for (std::size_t i = 0; i < cfg.x0.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", cfg.x0[i]);
        if (i) xs += ";";
        xs += buf;
      }
      metadata.emplace_back("x_star", xs);
      try {
        const msbif::StabilityReport rep =
            msbif::analyze_equilibrium(spec, chosen->x_star);
        if (rep.beta_sq) {
          char buf[64];
          std::snprintf(buf, sizeof buf, "%.17g", std::sqrt(*rep.beta_sq));
          metadata.emplace_back("beta", buf);
        }
      } catch (const Error&) {
        // no beta annotation when the analysis fails
      }
    }
    if (!eqs.empty()) {
      std::string all;
      for (std::size_t e = 0; e < eqs.size(); ++e) {
        if (e) all += "|";
        for (std::size_t i = 0; i < eqs[e].x_star.size(); ++i) {
          char buf[64];
          std::snprintf(buf, sizeof buf, "%.17g", eqs[e].x_star[i]);
          if (i) all += ";";
          all += buf;
        }
      }
      metadata.emplace_back("equilibria", all);
    }
    {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%llu",
                    static_cast<unsigned long long>(cfg.seed));
      metadata.emplace_back("seed", buf);
    }

    const msbif::PathEnsemble ens = msbif::tamed_em(spec, cfg);
    std::ofstream os(csv_path);
    if (!os)
      msbif::fail(ErrorCode::io_error, std::string("cannot write ") + csv_path);
    msbif::write_paths_csv(os, ens, metadata);
  });
}

msbif_status msbif_render_svg(const char* csv_path, const char* kind,
                              const char* svg_path) {
  if (!csv_path || !svg_path)
    return fail_invalid("csv_path and svg_path must be non-null");
  return guarded([&] {
    const msbif::SvgKind k = kind ? msbif::svg_kind_from_string(kind)
                                  : msbif::svg_kind_from_csv(csv_path);
    msbif::render_svg(csv_path, k, svg_path);
  });
}

msbif_status msbif_validate(int quick, msbif_line_callback cb, void* user_data,
                            int* n_failed) {
  return guarded([&] {
    const msbif::ValidationReport report = msbif::run_validation(quick != 0);
    if (cb) {
      for (const auto& check : report.checks) {
        const std::string line = std::string(check.pass ? "PASS" : "FAIL") +
                                 "  " + check.name + ": " + check.detail;
        cb(line.c_str(), user_data);
      }
    }
    if (n_failed) *n_failed = report.n_failed;
  });
}

void msbif_string_free(char* s) { std::free(s); }

}  // extern "C"
