#pragma once

// Data generators behind the figure commands. Every generator returns
// tables plus the resolved configuration; all randomness comes from derived
// streams of one master seed and results are stored by index, so output does
// not depend on the thread count.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "zopo/algorithms.hpp"
#include "zopo/bench.hpp"
#include "zopo/core/parallel.hpp"
#include "zopo/estimator.hpp"
#include "zopo/io.hpp"
#include "zopo/oracles.hpp"

namespace zopo::experiments {

/// 10^(log10(lo) + i / per_decade) for i = 0 .. round(per_decade log10(hi/lo)).
inline std::vector<double> log_sweep(double lo, double hi, std::size_t per_decade) {
  if (!(lo > 0.0) || !(hi > lo) || per_decade < 1) throw InvalidInput("log sweep needs 0 < lo < hi, per_decade >= 1");
  const double a = std::log10(lo);
  const auto n = static_cast<std::size_t>(std::llround(std::log10(hi / lo) * static_cast<double>(per_decade)));
  std::vector<double> out(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out[i] = std::pow(10.0, a + static_cast<double>(i) / static_cast<double>(per_decade));
  return out;
}

struct Output {
  std::string name;
  io::Table table;
};

struct Result {
  nlohmann::json config;
  std::vector<Output> outputs;
};

// ---------------------------------------------------------------------------
// Temperature sweep on |x| (fig1c, fig3)

struct DeltaSweepConfig {
  double x = 2.0;
  double lambda = 1.0;
  double delta_lo = 1e-5;
  double delta_hi = 1e2;
  std::size_t per_decade = 25;
  std::vector<std::size_t> n_values{5000};
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

inline nlohmann::json to_json(const DeltaSweepConfig& c) {
  return {{"objective", "abs"},     {"x", c.x},           {"lambda", c.lambda},       {"delta_lo", c.delta_lo},
          {"delta_hi", c.delta_hi}, {"per_decade", c.per_decade}, {"n_values", c.n_values}, {"trials", c.trials},
          {"seed", c.seed}};
}

struct DeltaSweepCell {
  double mean = 0.0;
  double variance = 0.0;  // spread of the estimates around their mean
  double mse = 0.0;       // against the exact value
  double mean_ess = 0.0;
  double min_ess = 0.0;
};

struct DeltaSweep {
  std::vector<double> deltas;
  std::vector<double> exact;
  // cells[n_index][delta_index]
  std::vector<std::vector<DeltaSweepCell>> cells;
  // ess[n_index][delta_index][trial]
  std::vector<std::vector<std::vector<double>>> ess;
};

/// Each trial draws its standard noise once and reuses it across the sweep
/// (common random numbers), on stream (seed, n_index, trial).
inline DeltaSweep delta_sweep(const DeltaSweepConfig& c) {
  const ObjectiveSpec f = objectives::abs_value();
  DeltaSweep out;
  out.deltas = log_sweep(c.delta_lo, c.delta_hi, c.per_decade);
  const std::size_t nd = out.deltas.size();
  for (double d : out.deltas) out.exact.push_back(zprox_abs(c.x, GibbsProxParams(c.lambda, d)));
  const Point x = make_point({c.x});
  for (std::size_t ni = 0; ni < c.n_values.size(); ++ni) {
    const std::size_t n = c.n_values[ni];
    std::vector<std::vector<double>> est(c.trials, std::vector<double>(nd));
    std::vector<std::vector<double>> ess(nd, std::vector<double>(c.trials));
    parallel_for(c.trials, c.threads, [&](std::size_t t) {
      const Eigen::MatrixXd noise = draw_noise(1, n, SeedSpec{c.seed, {ni, t}});
      for (std::size_t j = 0; j < nd; ++j) {
        const ZoproxEstimate e = szopo_with_noise(f, x, GibbsProxParams(c.lambda, out.deltas[j]), noise);
        est[t][j] = e.point[0];
        ess[j][t] = e.ess;
      }
    });
    std::vector<DeltaSweepCell> row(nd);
    for (std::size_t j = 0; j < nd; ++j) {
      DeltaSweepCell& cell = row[j];
      cell.min_ess = ess[j][0];
      for (std::size_t t = 0; t < c.trials; ++t) {
        cell.mean += est[t][j];
        cell.mean_ess += ess[j][t];
        cell.min_ess = std::min(cell.min_ess, ess[j][t]);
      }
      const double inv = 1.0 / static_cast<double>(c.trials);
      cell.mean *= inv;
      cell.mean_ess *= inv;
      for (std::size_t t = 0; t < c.trials; ++t) {
        cell.variance += (est[t][j] - cell.mean) * (est[t][j] - cell.mean);
        cell.mse += (est[t][j] - out.exact[j]) * (est[t][j] - out.exact[j]);
      }
      cell.variance *= inv;
      cell.mse *= inv;
    }
    out.cells.push_back(std::move(row));
    out.ess.push_back(std::move(ess));
  }
  return out;
}

/// delta, classical prox (= 1 at x = 2, lambda = 1), exact ZOPO, S-ZOPO mean,
/// mean ESS; first entry of n_values only.
inline Result fig1c(DeltaSweepConfig c) {
  if (c.n_values.empty()) c.n_values = {5000};
  c.n_values.resize(1);
  const DeltaSweep s = delta_sweep(c);
  io::Table t;
  t.columns = {"delta", "classical_prox", "exact_zprox", "szopo_mean", "mean_ess", "n_samples"};
  const double prox = c.x > c.lambda ? c.x - c.lambda : (c.x < -c.lambda ? c.x + c.lambda : 0.0);
  for (std::size_t j = 0; j < s.deltas.size(); ++j)
    t.add({s.deltas[j], prox, s.exact[j], s.cells[0][j].mean, s.cells[0][j].mean_ess,
           static_cast<std::int64_t>(c.n_values[0])});
  nlohmann::json cfg = to_json(c);
  cfg["figure"] = "fig1c";
  return {cfg, {{"fig1c", std::move(t)}}};
}

/// Per N and delta: mean estimate, bias, variance, MSE and ESS.
inline Result fig3(DeltaSweepConfig c) {
  if (c.n_values.empty() || c.n_values == std::vector<std::size_t>{5000}) c.n_values = {50, 500, 5000};
  const DeltaSweep s = delta_sweep(c);
  io::Table t;
  t.columns = {"n_samples", "delta", "exact_zprox", "szopo_mean", "bias", "variance", "mse", "mean_ess", "min_ess"};
  for (std::size_t ni = 0; ni < c.n_values.size(); ++ni)
    for (std::size_t j = 0; j < s.deltas.size(); ++j) {
      const auto& cell = s.cells[ni][j];
      t.add({static_cast<std::int64_t>(c.n_values[ni]), s.deltas[j], s.exact[j], cell.mean, cell.mean - s.exact[j],
             cell.variance, cell.mse, cell.mean_ess, cell.min_ess});
    }
  nlohmann::json cfg = to_json(c);
  cfg["figure"] = "fig3";
  return {cfg, {{"fig3", std::move(t)}}};
}

// ---------------------------------------------------------------------------
// Quadratic variance vs distance (fig6)

struct Fig6Config {
  std::size_t dim = 2;
  double delta = 1.0;
  double lambda = 0.5;
  double C = 1.0;
  std::size_t n = 1000;
  std::size_t trials = 500;
  std::vector<double> distances{0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.25, 2.5, 2.75, 3.0};
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

inline nlohmann::json to_json(const Fig6Config& c) {
  return {{"objective", "quadratic"}, {"dim", c.dim},       {"delta", c.delta},   {"lambda", c.lambda},
          {"C", c.C},                 {"n", c.n},           {"trials", c.trials}, {"distances", c.distances},
          {"seed", c.seed},           {"mu", "0"},          {"direction", "e1"}};
}

/// x = mu + dist e1 with mu = 0. Theoretical variance C2/N against the
/// empirical mean squared error over `trials` (stream (seed, dist_index)).
inline Result fig6(const Fig6Config& c) {
  const Point mu = Point::Zero(static_cast<Eigen::Index>(c.dim));
  const ObjectiveSpec f = objectives::quadratic(c.C, mu);
  const GibbsProxParams p(c.lambda, c.delta);
  io::Table t;
  t.columns = {"dist", "c2", "theoretical_variance", "empirical_mse", "empirical_variance", "mean_ess", "n_samples"};
  for (std::size_t i = 0; i < c.distances.size(); ++i) {
    Point x = mu;
    x[0] += c.distances[i];
    const Point ref = zprox_quadratic(c.C, mu, x, p);
    const auto consts = c1_c2_quadratic(c.C, mu, x, p);
    const auto study = bias_variance_study(f, x, p, c.n, c.trials, ref, SeedSpec{c.seed, {i}}, c.threads);
    Point mean = Point::Zero(x.size());
    for (const auto& r : study.per_trial) mean += r.point;
    mean /= static_cast<double>(c.trials);
    double var = 0.0;
    for (const auto& r : study.per_trial) var += (r.point - mean).squaredNorm();
    var /= static_cast<double>(c.trials);
    t.add({c.distances[i], consts.c2, consts.c2 / static_cast<double>(c.n), study.mse, var, study.mean_ess,
           static_cast<std::int64_t>(c.n)});
  }
  nlohmann::json cfg = to_json(c);
  cfg["figure"] = "fig6";
  return {cfg, {{"fig6", std::move(t)}}};
}

// ---------------------------------------------------------------------------
// Envelope shapes (fig5)

struct Fig5Config {
  std::vector<std::string> objectives{"abs", "quadratic", "wiggly1d"};
  std::vector<double> lambdas{0.01, 0.1, 1.0, 10.0, 35.0, 100.0};
  double delta = 1.0;
  double lo = -5.0;
  double hi = 5.0;
  std::size_t points = 201;
  std::size_t threads = 1;
};

inline nlohmann::json to_json(const Fig5Config& c) {
  return {{"objectives", c.objectives}, {"lambdas", c.lambdas}, {"delta", c.delta},
          {"lo", c.lo},                 {"hi", c.hi},           {"points", c.points}};
}

inline Result fig5(const Fig5Config& c) {
  if (c.points < 2) throw InvalidInput("fig5 needs at least 2 grid points");
  io::Table t;
  t.columns = {"objective", "lambda", "delta", "x", "f", "env_value", "zprox", "hessian_env", "method"};
  for (const std::string& name : c.objectives) {
    const BenchmarkEntry e = find_benchmark(name, 1);
    if (e.objective.dim != 1) throw InvalidInput("fig5 covers one-dimensional objectives only");
    for (double lam : c.lambdas) {
      const GibbsProxParams p(lam, c.delta);
      const ExactOracle oracle(e.objective, p);
      std::vector<std::vector<io::Cell>> rows(c.points);
      parallel_for(c.points, c.threads, [&](std::size_t i) {
        const double x = c.lo + (c.hi - c.lo) * static_cast<double>(i) / static_cast<double>(c.points - 1);
        const EnvelopeValue ev = oracle.evaluate(make_point({x}));
        const double h = covariance_quadrature_1d(e.objective, x, p).hessian_env;
        rows[i] = {name, lam, c.delta, x, e.objective.at(x), ev.value, ev.zprox[0], h, std::string(to_string(ev.method))};
      });
      for (auto& r : rows) t.add(std::move(r));
    }
  }
  nlohmann::json cfg = to_json(c);
  cfg["figure"] = "fig5";
  return {cfg, {{"fig5", std::move(t)}}};
}

// ---------------------------------------------------------------------------
// Fixed lambda against continuation (fig2)

struct Fig2Config {
  std::vector<std::string> benchmarks{"wiggly1d", "rastrigin", "ackley", "levy"};
  std::size_t dim = 10;  // for the d-dimensional benchmarks
  std::size_t seeds = 20;
  double delta = 1.0;
  std::size_t n = 10000;
  std::size_t iters = 1000;
  std::vector<double> fixed_lambdas{0.01, 0.1, 1.0, 10.0};
  schedule::GeometricContinuation continuation{10.0, 0.01, 10, 100};
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

inline nlohmann::json to_json(const Fig2Config& c) {
  return {{"benchmarks", c.benchmarks},
          {"dim", c.dim},
          {"seeds", c.seeds},
          {"delta", c.delta},
          {"n", c.n},
          {"iters", c.iters},
          {"fixed_lambdas", c.fixed_lambdas},
          {"continuation", zopo::to_json(LambdaSchedule(c.continuation))},
          {"seed", c.seed},
          {"streams",
           "x0 from (seed, 1, benchmark, run) unless the benchmark has a preset; sampling from (seed, 2, benchmark, "
           "run), shared by every schedule"}};
}

struct Fig2Run {
  std::string benchmark;
  std::string schedule;  // "fixed:<lambda>" or "continuation"
  std::size_t run;
  double final_f;
  std::vector<double> f_trace;
};

inline std::vector<Fig2Run> fig2_runs(const Fig2Config& c) {
  std::vector<LambdaSchedule> schedules;
  std::vector<std::string> labels;
  for (double l : c.fixed_lambdas) {
    schedules.push_back(schedule::Fixed{l});
    labels.push_back("fixed:" + io::format_double(l));
  }
  schedules.push_back(c.continuation);
  labels.push_back("continuation");

  std::vector<BenchmarkEntry> entries;
  for (const auto& name : c.benchmarks) entries.push_back(find_benchmark(name, c.dim));
  const std::size_t ns = schedules.size();
  const std::size_t jobs = entries.size() * ns * c.seeds;
  std::vector<Fig2Run> runs(jobs);
  parallel_for(jobs, c.threads, [&](std::size_t j) {
    const std::size_t b = j / (ns * c.seeds);
    const std::size_t s = (j / c.seeds) % ns;
    const std::size_t r = j % c.seeds;
    const BenchmarkEntry& e = entries[b];
    const Point x0 = initial_point(e, SeedSpec{c.seed, {1, b, r}});
    SzoppaOptions opt;
    opt.max_iter = c.iters;
    const RunTrace tr =
        szoppa_run(e.objective, x0, c.delta, schedules[s], schedule::FixedSamples{c.n}, SeedSpec{c.seed, {2, b, r}}, opt);
    Fig2Run out{e.name, labels[s], r, tr.final_record().f_value, {}};
    out.f_trace.reserve(tr.records.size());
    for (const auto& rec : tr.records) out.f_trace.push_back(rec.f_value);
    runs[j] = std::move(out);
  });
  return runs;
}

inline Result fig2(const Fig2Config& c, const std::vector<Fig2Run>& runs) {
  io::Table finals;
  finals.columns = {"benchmark", "schedule", "run", "final_f"};
  io::Table traces;
  traces.columns = {"benchmark", "schedule", "run", "iter", "f"};
  for (const auto& r : runs) {
    finals.add({r.benchmark, r.schedule, static_cast<std::int64_t>(r.run), r.final_f});
    for (std::size_t k = 0; k < r.f_trace.size(); ++k)
      traces.add({r.benchmark, r.schedule, static_cast<std::int64_t>(r.run), static_cast<std::int64_t>(k), r.f_trace[k]});
  }
  nlohmann::json cfg = to_json(c);
  cfg["figure"] = "fig2";
  return {cfg, {{"fig2_final", std::move(finals)}, {"fig2_traces", std::move(traces)}}};
}

inline Result fig2(const Fig2Config& c) { return fig2(c, fig2_runs(c)); }

inline void write(const std::filesystem::path& dir, const Result& r) {
  for (const auto& o : r.outputs) io::write_csv(dir / (o.name + ".csv"), o.table, r.config);
}

}  // namespace zopo::experiments
