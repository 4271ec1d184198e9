#pragma once

// ZOPPA (exact proximal-point iteration on the soft Moreau envelope) and
// S-ZOPPA (the sampled iteration), with lambda and sample-size schedules.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "zopo/core/error.hpp"
#include "zopo/core/random.hpp"
#include "zopo/core/types.hpp"
#include "zopo/estimator.hpp"
#include "zopo/oracles.hpp"

namespace zopo {

// ---------------------------------------------------------------------------
// Schedules

namespace schedule {

struct Fixed {
  double value;
};

/// n_values geometric stages from start down to end, each lasting
/// switch_every iterations; the last stage holds for the rest of the run.
struct GeometricContinuation {
  double start;
  double end;
  std::size_t n_values;
  std::size_t switch_every;
};

struct FixedSamples {
  std::size_t n;
};

/// N_k = ceil(n0 (k + 1)^p)
struct Polynomial {
  double n0;
  double p;
};

}  // namespace schedule

using LambdaSchedule = std::variant<schedule::Fixed, schedule::GeometricContinuation>;
using SampleSchedule = std::variant<schedule::FixedSamples, schedule::Polynomial>;

inline void validate(const LambdaSchedule& s) {
  if (const auto* f = std::get_if<schedule::Fixed>(&s)) {
    if (!(f->value > 0.0) || !std::isfinite(f->value)) throw InvalidSchedule("fixed lambda must be positive and finite");
    return;
  }
  const auto& g = std::get<schedule::GeometricContinuation>(s);
  if (!(g.end > 0.0) || !(g.start >= g.end) || !std::isfinite(g.start))
    throw InvalidSchedule("geometric continuation needs start >= end > 0");
  if (g.n_values < 1) throw InvalidSchedule("geometric continuation needs n_values >= 1");
  if (g.switch_every < 1) throw InvalidSchedule("geometric continuation needs switch_every >= 1");
}

inline void validate(const SampleSchedule& s) {
  if (const auto* f = std::get_if<schedule::FixedSamples>(&s)) {
    if (f->n < 1) throw InvalidSchedule("sample count must be positive");
    return;
  }
  const auto& p = std::get<schedule::Polynomial>(s);
  if (!(p.n0 > 0.0) || !std::isfinite(p.n0)) throw InvalidSchedule("polynomial schedule needs n0 > 0");
  if (!(p.p > 2.0)) throw InvalidSchedule("polynomial schedule needs p > 2 so that sum N_k^(-1/2) converges");
}

inline double lambda_at(const LambdaSchedule& s, std::size_t k) {
  if (const auto* f = std::get_if<schedule::Fixed>(&s)) return f->value;
  const auto& g = std::get<schedule::GeometricContinuation>(s);
  const std::size_t stage = std::min(k / g.switch_every, g.n_values - 1);
  if (stage == 0) return g.start;
  if (stage == g.n_values - 1) return g.end;
  const double t = static_cast<double>(stage) / static_cast<double>(g.n_values - 1);
  return g.start * std::pow(g.end / g.start, t);
}

inline std::size_t samples_at(const SampleSchedule& s, std::size_t k) {
  validate(s);
  if (const auto* f = std::get_if<schedule::FixedSamples>(&s)) return f->n;
  const auto& p = std::get<schedule::Polynomial>(s);
  const double n = std::ceil(p.n0 * std::pow(static_cast<double>(k + 1), p.p) - 1e-9);
  if (!(n < 1e15)) throw InvalidSchedule("polynomial schedule overflows the sample budget");
  return static_cast<std::size_t>(n);
}

inline nlohmann::json to_json(const LambdaSchedule& s) {
  if (const auto* f = std::get_if<schedule::Fixed>(&s)) return {{"kind", "fixed"}, {"value", f->value}};
  const auto& g = std::get<schedule::GeometricContinuation>(s);
  return {{"kind", "geometric"},
          {"start", g.start},
          {"end", g.end},
          {"n_values", g.n_values},
          {"switch_every", g.switch_every}};
}

inline nlohmann::json to_json(const SampleSchedule& s) {
  if (const auto* f = std::get_if<schedule::FixedSamples>(&s)) return {{"kind", "fixed"}, {"n", f->n}};
  const auto& p = std::get<schedule::Polynomial>(s);
  return {{"kind", "polynomial"}, {"n0", p.n0}, {"p", p.p}};
}

// ---------------------------------------------------------------------------
// Traces

/// Record k describes the iterate x^k and the step taken from it:
/// step_norm = |x^{k+1} - x^k| and env_grad_norm = step_norm / lambda.
/// The last record of a run holds the final iterate; in sampled runs it has
/// no step and no sampling diagnostics.
struct IterationRecord {
  std::size_t k = 0;
  Point x;
  double f_value = 0.0;
  std::optional<double> env_value;
  std::optional<double> env_grad_norm;
  bool env_grad_estimated = false;  // true when env_grad_norm is the sampled surrogate
  std::optional<double> step_norm;
  std::optional<double> ess;
  std::optional<std::size_t> n_samples;
  double lambda = 0.0;
  double delta = 0.0;
  std::optional<double> mean_weight_log;
};

enum class Termination { MaxIter, StepTol, GradTol };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::MaxIter: return "MaxIter";
    case Termination::StepTol: return "StepTol";
    case Termination::GradTol: return "GradTol";
  }
  return "unknown";
}

struct RunWarning {
  std::size_t k;
  std::string message;
  double log_ratio;  // log of (mean weight / exp(-best f / delta))
};

struct RunTrace {
  std::vector<IterationRecord> records;
  nlohmann::json config_echo;
  SeedSpec seed;
  Termination terminated_by = Termination::MaxIter;
  std::vector<RunWarning> warnings;

  const IterationRecord& final_record() const { return records.back(); }
  /// Sum of the realised step lengths.
  double path_length() const {
    double s = 0.0;
    for (const auto& r : records)
      if (r.step_norm) s += *r.step_norm;
    return s;
  }
};

// ---------------------------------------------------------------------------

struct ZoppaOptions {
  std::size_t max_iter = 1000;
  double step_tol = 1e-10;  // 0 disables
  double grad_tol = 0.0;    // 0 disables
  QuadratureOptions quadrature{};
};

/// ZOPPA: x^{k+1} = zprox(x^k) with the exact oracle.
inline RunTrace zoppa_run(const ObjectiveSpec& f, const Point& x0, double delta, const LambdaSchedule& lambda,
                          const ZoppaOptions& opt = {}) {
  validate(lambda);
  if (static_cast<std::size_t>(x0.size()) != f.dim) throw InvalidInput("zoppa_run: x0 dimension mismatch");
  if (!ExactOracle::available(f))
    throw NoOracle("no exact oracle for '" + f.name + "': needs a quadratic/|x| structure or dim = 1");
  GibbsProxParams check(lambda_at(lambda, 0), delta);
  (void)check;

  RunTrace trace;
  trace.config_echo = {{"algorithm", "zoppa"},
                       {"objective", f.name},
                       {"dim", f.dim},
                       {"delta", delta},
                       {"lambda_schedule", to_json(lambda)},
                       {"max_iter", opt.max_iter},
                       {"step_tol", opt.step_tol},
                       {"grad_tol", opt.grad_tol}};
  trace.config_echo["x0"] = std::vector<double>(x0.data(), x0.data() + x0.size());

  Point x = x0;
  for (std::size_t k = 0;; ++k) {
    const double lam = lambda_at(lambda, k);
    const ExactOracle oracle(f, GibbsProxParams(lam, delta), opt.quadrature);
    const EnvelopeValue ev = oracle.evaluate(x);
    IterationRecord rec;
    rec.k = k;
    rec.x = x;
    rec.f_value = f(x);
    rec.env_value = ev.value;
    rec.step_norm = (ev.zprox - x).norm();
    rec.env_grad_norm = *rec.step_norm / lam;
    rec.lambda = lam;
    rec.delta = delta;
    trace.records.push_back(rec);
    if (k >= 1) {
      const double last_step = *trace.records[k - 1].step_norm;
      if (opt.step_tol > 0.0 && last_step < opt.step_tol) {
        trace.terminated_by = Termination::StepTol;
        break;
      }
      if (opt.grad_tol > 0.0 && *trace.records[k - 1].env_grad_norm < opt.grad_tol) {
        trace.terminated_by = Termination::GradTol;
        break;
      }
    }
    if (k >= opt.max_iter) {
      trace.terminated_by = Termination::MaxIter;
      break;
    }
    x = ev.zprox;
  }
  return trace;
}

struct SzoppaOptions {
  std::size_t max_iter = 1000;
  double step_tol = 0.0;  // disabled by default for sampled runs
  // Warn when (1/N) sum exp(-f(y_i)/delta) drops below
  // min_mean_weight * exp(-best_f/delta), best_f the smallest value seen so far.
  double min_mean_weight = 1e-12;
};

/// S-ZOPPA: x^{k+1} = szopo(x^k) with N_k samples drawn on
/// derive_stream(seed, k).
inline RunTrace szoppa_run(const ObjectiveSpec& f, const Point& x0, double delta, const LambdaSchedule& lambda,
                           const SampleSchedule& samples, const SeedSpec& seed, const SzoppaOptions& opt = {}) {
  validate(lambda);
  validate(samples);
  if (static_cast<std::size_t>(x0.size()) != f.dim) throw InvalidInput("szoppa_run: x0 dimension mismatch");
  if (!x0.allFinite()) throw InvalidInput("szoppa_run: x0 must be finite");
  if (!(opt.min_mean_weight > 0.0)) throw InvalidInput("szoppa_run: min_mean_weight must be positive");
  GibbsProxParams check(lambda_at(lambda, 0), delta);
  (void)check;

  RunTrace trace;
  trace.seed = seed;
  trace.config_echo = {{"algorithm", "szoppa"},
                       {"objective", f.name},
                       {"dim", f.dim},
                       {"delta", delta},
                       {"lambda_schedule", to_json(lambda)},
                       {"sample_schedule", to_json(samples)},
                       {"max_iter", opt.max_iter},
                       {"step_tol", opt.step_tol},
                       {"min_mean_weight", opt.min_mean_weight},
                       {"seed", {{"master_seed", seed.master_seed}, {"stream_path", seed.stream_path}}}};
  trace.config_echo["x0"] = std::vector<double>(x0.data(), x0.data() + x0.size());

  const double log_floor = std::log(opt.min_mean_weight);
  Point x = x0;
  double best_f = f(x0);
  for (std::size_t k = 0;; ++k) {
    const double lam = lambda_at(lambda, k);
    IterationRecord rec;
    rec.k = k;
    rec.x = x;
    rec.f_value = f(x);
    rec.lambda = lam;
    rec.delta = delta;
    best_f = std::min(best_f, rec.f_value);
    const bool last = k >= opt.max_iter;
    if (last) {
      trace.records.push_back(rec);
      trace.terminated_by = Termination::MaxIter;
      break;
    }
    const std::size_t n = samples_at(samples, k);
    const ZoproxEstimate est = szopo(f, x, GibbsProxParams(lam, delta), n, derive_stream(seed, k));
    best_f = std::min(best_f, est.min_f);
    rec.step_norm = (est.point - x).norm();
    rec.env_grad_norm = *rec.step_norm / lam;
    rec.env_grad_estimated = true;
    rec.ess = est.ess;
    rec.n_samples = n;
    rec.mean_weight_log = est.log_mean_weight;
    const double log_ratio = est.log_mean_weight + best_f / delta;
    if (log_ratio < log_floor)
      trace.warnings.push_back({k, "mean weight below the assumed lower bound", log_ratio});
    trace.records.push_back(rec);
    x = est.point;
    if (opt.step_tol > 0.0 && *rec.step_norm < opt.step_tol) {
      IterationRecord fin;
      fin.k = k + 1;
      fin.x = x;
      fin.f_value = f(x);
      fin.lambda = lambda_at(lambda, k + 1);
      fin.delta = delta;
      trace.records.push_back(fin);
      trace.terminated_by = Termination::StepTol;
      break;
    }
  }
  return trace;
}

}  // namespace zopo
