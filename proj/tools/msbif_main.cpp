// msbif command-line tool: analyze / sweep / simulate / validate / render.
// Talks to the analysis core exclusively through the C API in msbif.h.

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "msbif.h"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitAnalysis = 2;
constexpr int kExitValidation = 3;

struct ModelArgs {
  std::string model;
  std::string variant;
  std::vector<std::string> params;  // "name=value"
  std::string config_path;
  int dim = 0;
};

void add_model_flags(CLI::App* cmd, ModelArgs& args) {
  cmd->add_option("--model", args.model, "built-in model name");
  cmd->add_option("--variant", args.variant, "model variant");
  cmd->add_option("--param", args.params,
                  "parameter override name=value (repeatable)");
  cmd->add_option("--config", args.config_path,
                  "JSON config file; flags override its values");
  cmd->add_option("--dim", args.dim, "state dimension (allen_cahn only)");
}

// Merge --config file with command-line flags (flags win) into the JSON
// document the C API accepts.
int build_model(const ModelArgs& args, msbif_model** out) {
  nlohmann::json doc = nlohmann::json::object();
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) {
      std::fprintf(stderr, "error: cannot open config '%s'\n",
                   args.config_path.c_str());
      return kExitConfig;
    }
    try {
      in >> doc;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: bad config JSON: %s\n", e.what());
      return kExitConfig;
    }
  }
  if (!args.model.empty()) doc["model"] = args.model;
  if (!args.variant.empty()) doc["variant"] = args.variant;
  if (args.dim > 0) doc["d"] = args.dim;
  if (!doc.contains("params")) doc["params"] = nlohmann::json::object();
  for (const std::string& kv : args.params) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --param expects name=value, got '%s'\n",
                   kv.c_str());
      return kExitConfig;
    }
    try {
      doc["params"][kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      std::fprintf(stderr, "error: bad numeric value in '%s'\n", kv.c_str());
      return kExitConfig;
    }
  }
  if (!doc.contains("model")) {
    std::fprintf(stderr, "error: no model given (use --model or --config)\n");
    return kExitConfig;
  }
  if (doc["params"].empty()) doc.erase("params");
  if (msbif_model_create_from_json(doc.dump().c_str(), out) != MSBIF_OK) {
    std::fprintf(stderr, "error: %s\n", msbif_last_error());
    return kExitConfig;
  }
  return 0;
}

struct ModelHandle {
  msbif_model* ptr = nullptr;
  ~ModelHandle() { msbif_model_free(ptr); }
};

int cmd_analyze(const ModelArgs& margs, double delta1, double delta2,
                const std::string& out_json) {
  ModelHandle model;
  if (int rc = build_model(margs, &model.ptr)) return rc;
  msbif_reports* reports = nullptr;
  if (msbif_analyze(model.ptr, delta1, delta2, &reports) != MSBIF_OK) {
    std::fprintf(stderr, "error: %s\n", msbif_last_error());
    return kExitAnalysis;
  }
  const int n = msbif_reports_count(reports);
  const int d = msbif_model_dim(model.ptr);
  std::printf("%-8s %-24s %14s %14s %12s %12s  %s\n", "branch", "x_star",
              "det_lambda", "lambda_max_A", "beta", "mu", "flags");
  for (int i = 0; i < n; ++i) {
    msbif_report_scalars s;
    msbif_reports_scalars(reports, i, &s);
    std::vector<double> x(d);
    msbif_reports_equilibrium(reports, i, x.data(), x.size());
    char branch[64];
    msbif_reports_branch_id(reports, i, branch, sizeof branch);
    std::string xs;
    char buf[48];
    for (int k = 0; k < d; ++k) {
      std::snprintf(buf, sizeof buf, "%.6g", x[k]);
      if (k) xs += ",";
      xs += buf;
      if (static_cast<int>(xs.size()) > 22 && k + 1 < d) {
        xs += ",...";
        break;
      }
    }
    std::string beta = "-";
    if (!std::isnan(s.beta_sq)) {
      std::snprintf(buf, sizeof buf, "%.6g", std::sqrt(s.beta_sq));
      beta = buf;
    }
    std::string flags;
    flags += s.det_stable ? "det+" : "det-";
    flags += s.linear_ms_stable ? " lin+" : " lin-";
    flags += s.nonlinear_ms_stable ? " nonlin+" : " nonlin-";
    if (s.nonnormality_warning) flags += " nonnormal!";
    std::printf("%-8s %-24s %14.6g %14.6g %12s %12.6g  %s\n", branch,
                xs.c_str(), s.det_lambda_max, s.lambda_max_A, beta.c_str(),
                s.mu, flags.c_str());
  }
  if (!out_json.empty()) {
    char* json = nullptr;
    if (msbif_reports_to_json(reports, &json) == MSBIF_OK && json) {
      std::ofstream out(out_json);
      out << json << "\n";
      msbif_string_free(json);
    }
  }
  msbif_reports_free(reports);
  return 0;
}

int cmd_sweep(const ModelArgs& margs, const std::string& param, double from,
              double to, int steps, double delta1, double delta2,
              const std::string& out_csv, const std::string& out_svg) {
  ModelHandle model;
  if (int rc = build_model(margs, &model.ptr)) return rc;
  if (param.empty()) {
    std::fprintf(stderr, "error: --sweep-param is required\n");
    return kExitConfig;
  }
  msbif_sweep_result* sweep = nullptr;
  if (msbif_sweep_run(model.ptr, param.c_str(), from, to, steps, delta1,
                      delta2, &sweep) != MSBIF_OK) {
    std::fprintf(stderr, "error: %s\n", msbif_last_error());
    return kExitAnalysis;
  }
  int rc = 0;
  if (msbif_sweep_write_csv(sweep, out_csv.c_str()) != MSBIF_OK) {
    std::fprintf(stderr, "error: %s\n", msbif_last_error());
    rc = kExitAnalysis;
  } else {
    std::printf("wrote %s\n", out_csv.c_str());
    char* json = nullptr;
    if (msbif_sweep_crossings_json(sweep, "lambda_max_A", &json) == MSBIF_OK &&
        json) {
      const auto arr = nlohmann::json::parse(json);
      for (const auto& ev : arr)
        std::printf("lambda_max crossing on branch %s at %s = %.9g\n",
                    ev["branch_id"].get<std::string>().c_str(), param.c_str(),
                    ev["param_value"].get<double>());
      msbif_string_free(json);
    }
    if (!out_svg.empty()) {
      if (msbif_render_svg(out_csv.c_str(), "bifurcation", out_svg.c_str()) !=
          MSBIF_OK) {
        std::fprintf(stderr, "error: %s\n", msbif_last_error());
        rc = kExitAnalysis;
      } else {
        std::printf("wrote %s\n", out_svg.c_str());
      }
    }
  }
  msbif_sweep_free(sweep);
  return rc;
}

int cmd_simulate(const ModelArgs& margs, const std::string& equilibrium,
                 const msbif_sim_options& opts, const std::string& out_csv,
                 const std::string& out_svg) {
  ModelHandle model;
  if (int rc = build_model(margs, &model.ptr)) return rc;
  const msbif_status st = msbif_simulate_to_csv(
      model.ptr, nullptr, equilibrium.empty() ? nullptr : equilibrium.c_str(),
      &opts, out_csv.c_str());
  if (st != MSBIF_OK) {
    std::fprintf(stderr, "error: %s\n", msbif_last_error());
    return st == MSBIF_ERR_INVALID_ARGUMENT ? kExitConfig : kExitAnalysis;
  }
  std::printf("wrote %s\n", out_csv.c_str());
  if (!out_svg.empty()) {
    if (msbif_render_svg(out_csv.c_str(), "paths", out_svg.c_str()) != MSBIF_OK) {
      std::fprintf(stderr, "error: %s\n", msbif_last_error());
      return kExitAnalysis;
    }
    std::printf("wrote %s\n", out_svg.c_str());
  }
  return 0;
}

void print_line(const char* line, void*) { std::printf("%s\n", line); }

int cmd_validate(bool quick) {
  int n_failed = 0;
  if (msbif_validate(quick ? 1 : 0, print_line, nullptr, &n_failed) !=
      MSBIF_OK) {
    std::fprintf(stderr, "error: %s\n", msbif_last_error());
    return kExitAnalysis;
  }
  if (n_failed > 0) {
    std::printf("%d check(s) failed\n", n_failed);
    return kExitValidation;
  }
  std::printf("all checks passed\n");
  return 0;
}

int cmd_render(const std::string& csv, const std::string& kind,
               const std::string& out) {
  const msbif_status st = msbif_render_svg(
      csv.c_str(), kind.empty() ? nullptr : kind.c_str(), out.c_str());
  if (st != MSBIF_OK) {
    std::fprintf(stderr, "error: %s\n", msbif_last_error());
    return st == MSBIF_ERR_SCHEMA_MISMATCH ? kExitConfig : kExitAnalysis;
  }
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "mean-square stability and bifurcation analysis for Ito SDEs "
      "(set MSBIF_THREADS to cap worker count, 0 = auto)"};
  app.require_subcommand(1);

  // analyze
  ModelArgs an_model;
  double an_delta1 = 1e-3, an_delta2 = 1e-3;
  std::string an_out;
  CLI::App* analyze =
      app.add_subcommand("analyze", "stability reports at one parameter point");
  add_model_flags(analyze, an_model);
  analyze->add_option("--delta1", an_delta1, "slack delta1 (default 1e-3)");
  analyze->add_option("--delta2", an_delta2, "slack delta2 (default 1e-3)");
  analyze->add_option("--out", an_out, "also write reports as JSON");

  // sweep
  ModelArgs sw_model;
  std::string sw_param;
  double sw_from = 0.0, sw_to = 1.0;
  int sw_steps = 96;
  double sw_delta1 = 1e-3, sw_delta2 = 1e-3;
  std::string sw_out = "sweep.csv", sw_svg;
  CLI::App* sweep =
      app.add_subcommand("sweep", "bifurcation table over a parameter range");
  add_model_flags(sweep, sw_model);
  sweep->add_option("--sweep-param", sw_param, "parameter to sweep")
      ->required();
  sweep->add_option("--from", sw_from, "range start")->required();
  sweep->add_option("--to", sw_to, "range end")->required();
  sweep->add_option("--steps", sw_steps, "number of grid values (default 96)");
  sweep->add_option("--delta1", sw_delta1, "slack delta1 (default 1e-3)");
  sweep->add_option("--delta2", sw_delta2, "slack delta2 (default 1e-3)");
  sweep->add_option("--out", sw_out, "output CSV path (default sweep.csv)");
  sweep->add_option("--svg", sw_svg, "also render a bifurcation SVG");

  // simulate
  ModelArgs sim_model;
  std::string sim_equilibrium;
  msbif_sim_options sim_opts;
  msbif_sim_options_init(&sim_opts);
  std::string sim_out = "paths.csv", sim_svg;
  CLI::App* simulate =
      app.add_subcommand("simulate", "tamed Euler-Maruyama sample paths");
  add_model_flags(simulate, sim_model);
  simulate->add_option("--equilibrium", sim_equilibrium,
                       "equilibrium label to start near (default: first stable)");
  simulate->add_option("--paths", sim_opts.n_paths, "paths (default 5)");
  simulate->add_option("--T", sim_opts.t_final, "horizon (default 100)");
  simulate->add_option("--dt", sim_opts.dt, "step size (default 0.01)");
  simulate->add_option("--seed", sim_opts.seed, "master seed (default 0)");
  simulate->add_option("--radius", sim_opts.radius,
                       "initial ball radius (default 1e-6)");
  simulate->add_option("--stride", sim_opts.output_stride,
                       "steps between recorded samples (default 1)");
  simulate->add_flag("--no-taming", [&sim_opts](std::int64_t) {
    sim_opts.taming = 0;
  }, "disable drift taming");
  simulate->add_option("--out", sim_out, "output CSV path (default paths.csv)");
  simulate->add_option("--svg", sim_svg, "also render a paths SVG");

  // validate
  bool quick = false;
  CLI::App* validate =
      app.add_subcommand("validate", "run the oracle cross-checks");
  validate->add_flag("--quick", quick, "skip the 10^4-path Monte Carlo suites");

  // render
  std::string r_csv, r_kind, r_out = "figure.svg";
  CLI::App* render = app.add_subcommand("render", "render an SVG from a CSV");
  render->add_option("csv", r_csv, "input CSV (sweep or paths)")->required();
  render->add_option("--kind", r_kind, "bifurcation|paths (default: infer)");
  render->add_option("--out", r_out, "output SVG path (default figure.svg)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  if (analyze->parsed())
    return cmd_analyze(an_model, an_delta1, an_delta2, an_out);
  if (sweep->parsed())
    return cmd_sweep(sw_model, sw_param, sw_from, sw_to, sw_steps, sw_delta1,
                     sw_delta2, sw_out, sw_svg);
  if (simulate->parsed())
    return cmd_simulate(sim_model, sim_equilibrium, sim_opts, sim_out, sim_svg);
  if (validate->parsed()) return cmd_validate(quick);
  if (render->parsed()) return cmd_render(r_csv, r_kind, r_out);
  return kExitConfig;
}
