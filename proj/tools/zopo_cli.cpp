// zopo: run ZOPPA / S-ZOPPA, regenerate figure data, evaluate bounds.
//
// Exit status: 0 success, 1 runtime failure, 2 configuration or usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zopo/zopo.hpp"

namespace {

using nlohmann::json;
namespace cmd = zopo::commands;

std::filesystem::path output_dir() {
  const char* env = std::getenv("ZOPO_OUTPUT_DIR");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("results");
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw zopo::InvalidInput("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw zopo::InvalidInput("config file " + path + " is not valid JSON: " + e.what());
  }
}

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

struct RunFlags {
  std::string config, objective, x0, mu, lambda_schedule, sample_schedule, out;
  std::size_t dim = 0, n = 0, iters = 0;
  double C = 0, delta = 0, lambda = 0, step_tol = 0, min_mean_weight = 0;
  std::uint64_t seed = 0;
  bool exact = false, sampled = false;
};

struct FigureFlags {
  std::string which, config, out_dir;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::size_t trials = 0, seeds = 0, iters = 0;
};

struct BoundsFlags {
  std::string config, objective, trace, out;
  std::vector<std::string> cases;
  std::vector<std::string> constants;
  std::size_t dim = 0, n = 0;
  double lambda = 0, delta = 0, g = 0, dist = 0, R = 0, z_lower = 0, eps = 0, c = 0;
};

json resolve_run_flags(const RunFlags& f, CLI::App& sub) {
  json cfg = cmd::run_defaults();
  if (!f.config.empty()) cmd::merge(cfg, load_config(f.config));
  auto set = [&](const char* flag) { return sub.get_option(flag)->count() > 0; };
  if (set("--objective")) cfg["objective"] = f.objective;
  if (set("--dim")) cfg["dim"] = f.dim;
  if (set("--C")) cfg["C"] = f.C;
  if (set("--mu")) cfg["mu"] = cmd::parse_list(f.mu);
  if (set("--x0")) cfg["x0"] = cmd::parse_list(f.x0);
  if (set("--delta")) cfg["delta"] = f.delta;
  if (f.exact && f.sampled) throw zopo::InvalidInput("--exact and --sampled are mutually exclusive");
  if (f.exact) cfg["mode"] = "exact";
  if (f.sampled) cfg["mode"] = "sampled";
  if (set("--iters")) cfg["iters"] = f.iters;
  if (set("--lambda") && set("--lambda-schedule")) throw zopo::InvalidInput("give --lambda or --lambda-schedule, not both");
  if (set("--lambda")) cfg["lambda_schedule"] = {{"kind", "fixed"}, {"value", f.lambda}};
  if (set("--lambda-schedule")) cfg["lambda_schedule"] = cmd::parse_lambda_schedule(f.lambda_schedule, cfg["iters"].get<std::size_t>());
  if (set("--n") && set("--sample-schedule")) throw zopo::InvalidInput("give --n or --sample-schedule, not both");
  if (set("--n")) cfg["sample_schedule"] = {{"kind", "fixed"}, {"n", f.n}};
  if (set("--sample-schedule")) cfg["sample_schedule"] = cmd::parse_sample_schedule(f.sample_schedule);
  if (set("--step-tol")) cfg["step_tol"] = f.step_tol;
  if (set("--min-mean-weight")) cfg["min_mean_weight"] = f.min_mean_weight;
  if (set("--seed")) cfg["seed"] = f.seed;
  if (cfg["objective"].is_null()) throw zopo::InvalidInput("--objective is required");
  return cmd::resolve_run(cfg);
}

json resolve_bounds_flags(const BoundsFlags& f, CLI::App& sub) {
  json cfg = cmd::bounds_defaults();
  if (!f.config.empty()) cmd::merge(cfg, load_config(f.config));
  auto set = [&](const char* flag) { return sub.get_option(flag)->count() > 0; };
  if (set("--objective")) cfg["objective"] = f.objective;
  if (set("--dim")) cfg["dim"] = f.dim;
  if (set("--lambda")) cfg["lambda"] = f.lambda;
  if (set("--delta")) cfg["delta"] = f.delta;
  if (set("--case")) cfg["cases"] = f.cases;
  if (set("--g")) cfg["env_grad_norm"] = f.g;
  if (set("--dist")) cfg["dist"] = f.dist;
  if (set("--n")) cfg["n"] = f.n;
  if (set("--R")) cfg["R"] = f.R;
  if (set("--z-lower")) cfg["z_lower"] = f.z_lower;
  if (set("--eps")) cfg["eps"] = f.eps;
  if (set("--c")) cfg["c"] = f.c;
  if (set("--trace")) cfg["trace"] = f.trace;
  for (const auto& kv : f.constants) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw zopo::InvalidInput("--const expects NAME=VALUE, got '" + kv + "'");
    cfg["constants"][kv.substr(0, eq)] = zopo::io::parse_double(kv.substr(eq + 1));
  }
  return cfg;
}

void print_list() {
  std::cout << "objectives:\n";
  for (const auto& e : zopo::corpus()) {
    std::cout << "  " << e.name << "  dim=" << e.objective.dim << "  domain=[" << e.domain.lo << ", " << e.domain.hi
              << "]";
    if (e.known_min) std::cout << "  min=" << e.known_min->value;
    for (const auto& [k, v] : e.declared_constants) std::cout << "  " << k << "=" << v;
    std::cout << '\n';
  }
  std::cout << "figures: fig1c fig2 fig3 fig5 fig6\nbound cases:";
  for (const auto& c : cmd::bound_case_names()) std::cout << ' ' << c;
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zeroth-order proximal point methods"};
  app.require_subcommand(1);

  RunFlags rf;
  auto* run = app.add_subcommand("run", "run ZOPPA (exact) or S-ZOPPA (sampled) and write a trace");
  run->add_option("--config", rf.config, "JSON config; explicit flags override it");
  run->add_option("--objective", rf.objective, "objective name (see `zopo list`)");
  run->add_option("--dim", rf.dim, "dimension for the d-dimensional objectives");
  run->add_option("--C", rf.C, "quadratic curvature parameter");
  run->add_option("--mu", rf.mu, "quadratic minimiser, comma separated or one value broadcast");
  run->add_option("--x0", rf.x0, "starting point, comma separated or one value broadcast");
  run->add_option("--delta", rf.delta, "temperature");
  run->add_flag("--exact", rf.exact, "exact oracle (default)");
  run->add_flag("--sampled", rf.sampled, "Monte Carlo estimator");
  run->add_option("--lambda", rf.lambda, "fixed stepsize");
  run->add_option("--lambda-schedule", rf.lambda_schedule, "fixed:V | geometric:START:END:N[:SWITCH]");
  run->add_option("--n", rf.n, "fixed sample count");
  run->add_option("--sample-schedule", rf.sample_schedule, "fixed:N | poly:N0:P");
  run->add_option("--iters", rf.iters, "maximum number of iterations");
  run->add_option("--step-tol", rf.step_tol, "stop when |x^{k+1}-x^k| falls below this (0 disables)");
  run->add_option("--min-mean-weight", rf.min_mean_weight, "warning threshold for the mean importance weight");
  run->add_option("--seed", rf.seed, "master seed");
  run->add_option("--out", rf.out, "output stem; writes STEM.csv and STEM.json");

  FigureFlags ff;
  auto* fig = app.add_subcommand("figure", "regenerate the data behind a figure");
  fig->add_option("which", ff.which, "fig1c | fig2 | fig3 | fig5 | fig6")->required();
  fig->add_option("--config", ff.config, "JSON config overriding the figure defaults");
  fig->add_option("--out-dir", ff.out_dir, "output directory (default $ZOPO_OUTPUT_DIR or results)");
  fig->add_option("--seed", ff.seed, "master seed");
  fig->add_option("--threads", ff.threads, "worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  fig->add_option("--trials", ff.trials, "Monte Carlo trials (fig1c, fig3, fig6)");
  fig->add_option("--seeds", ff.seeds, "runs per benchmark and schedule (fig2)");
  fig->add_option("--iters", ff.iters, "iterations per run (fig2)");

  BoundsFlags bf;
  auto* bounds = app.add_subcommand("bounds", "evaluate the theoretical bounds");
  bounds->add_option("--config", bf.config, "JSON config; explicit flags override it");
  bounds->add_option("--objective", bf.objective, "take constants from this corpus entry");
  bounds->add_option("--dim", bf.dim, "dimension");
  bounds->add_option("--lambda", bf.lambda, "stepsize");
  bounds->add_option("--delta", bf.delta, "temperature");
  bounds->add_option("--case", bf.cases, "bound case (repeatable); default: every applicable case");
  bounds->add_option("--const", bf.constants, "constant NAME=VALUE (L, G, kappa, osc, m, b, R)");
  bounds->add_option("--g", bf.g, "envelope gradient norm");
  bounds->add_option("--dist", bf.dist, "distance to the minimiser (convex cases)");
  bounds->add_option("--n", bf.n, "sample count (escape, stability)");
  bounds->add_option("--R", bf.R, "squared radius (escape)");
  bounds->add_option("--z-lower", bf.z_lower, "lower bound on the normaliser (stability)");
  bounds->add_option("--eps", bf.eps, "accuracy (stability)");
  bounds->add_option("--c", bf.c, "constant c (stability)");
  bounds->add_option("--trace", bf.trace, "trace CSV from `zopo run`; evaluate the bounds at every iterate");
  bounds->add_option("--out", bf.out, "also write the report to this JSON file");

  app.add_subcommand("list", "list objectives, figures and bound cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      const json cfg = resolve_run_flags(rf, *run);
      std::filesystem::path stem = rf.out;
      if (stem.empty())
        stem = output_dir() / ("run_" + cfg["objective"].get<std::string>() + "_" + cfg["mode"].get<std::string>());
      const zopo::RunTrace trace = cmd::cmd_run(cfg, stem);
      std::cout << "wrote " << stem.string() << ".csv and " << stem.string() << ".json\n";
      print_json(zopo::io::trace_summary(trace));
    } else if (*fig) {
      json cfg = cmd::figure_defaults(ff.which);
      if (!ff.config.empty()) cmd::merge(cfg, load_config(ff.config));
      cfg["figure"] = ff.which;
      if (fig->get_option("--seed")->count()) cfg["seed"] = ff.seed;
      if (fig->get_option("--trials")->count()) cfg["trials"] = ff.trials;
      if (fig->get_option("--seeds")->count()) cfg["seeds"] = ff.seeds;
      if (fig->get_option("--iters")->count()) cfg["iters"] = ff.iters;
      const zopo::experiments::Result r = cmd::cmd_figure(cfg, ff.threads);
      const std::filesystem::path dir = ff.out_dir.empty() ? output_dir() : std::filesystem::path(ff.out_dir);
      zopo::experiments::write(dir, r);
      for (const auto& o : r.outputs) std::cout << "wrote " << (dir / (o.name + ".csv")).string() << '\n';
    } else if (*bounds) {
      const json report = cmd::cmd_bounds(resolve_bounds_flags(bf, *bounds));
      if (!bf.out.empty()) zopo::io::write_json(bf.out, report);
      print_json(report);
    } else {
      print_list();
    }
  } catch (const zopo::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
