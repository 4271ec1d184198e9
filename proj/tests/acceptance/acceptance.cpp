// Acceptance suite. Prints one PASS/FAIL line per criterion and writes the
// data behind each check into --out. Files hold no timings, so two runs with
// the same seed can be compared byte for byte (--compare A B).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zopo/zopo.hpp"

namespace {

using namespace zopo;
using nlohmann::json;
namespace fs = std::filesystem;

struct Context {
  fs::path out;
  std::size_t threads = 1;
  std::uint64_t seed = 20240601;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_summary(const Context& ctx, const std::string& name, json j) {
  j["schema"] = io::kSchemaVersion;
  io::write_json(ctx.out / (name + ".json"), j);
}

double fd_grad_norm(const ObjectiveSpec& f, const Point& x, double h = 1e-6) {
  Point y = x;
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    y[i] = x[i] + h;
    const double fp = f(y);
    y[i] = x[i] - h;
    const double fm = f(y);
    y[i] = x[i];
    s += std::pow((fp - fm) / (2 * h), 2);
  }
  return std::sqrt(s);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * double(i) / double(n - 1);
  return v;
}

std::vector<double> logspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, double(i) / double(n - 1));
  return v;
}

// 1. closed-form |x| against quadrature
Outcome oracle_agreement(const Context& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto f = objectives::abs_value();
  const auto xs = linspace(-5, 5, 10);
  const auto lams = logspace(0.1, 10, 10);
  const auto dels = logspace(1e-3, 10, 10);
  std::vector<std::array<double, 5>> rows(1000);
  parallel_for(1000, ctx.threads, [&](std::size_t i) {
    const double x = xs[i / 100], l = lams[(i / 10) % 10], d = dels[i % 10];
    const GibbsProxParams p(l, d);
    rows[i] = {x, l, d, zprox_abs(x, p), envelope_quadrature_1d(f, x, p).zprox[0]};
  });
  io::Table t;
  t.columns = {"x", "lambda", "delta", "closed_form", "quadrature", "abs_diff"};
  double worst = 0.0;
  for (const auto& r : rows) {
    const double diff = std::abs(r[3] - r[4]);
    worst = std::max(worst, diff);
    t.add({r[0], r[1], r[2], r[3], r[4], diff});
  }
  const double secs = seconds_since(t0);
  io::write_csv(ctx.out / "c01_oracle_grid.csv", t, {{"criterion", 1}, {"grid", "x linear, lambda/delta log, 10 each"}});
  write_summary(ctx, "c01_oracle", {{"max_abs_diff", worst}, {"tolerance", 1e-8}, {"pass", worst <= 1e-8}});
  return {worst <= 1e-8 && secs < 10.0, "max |diff| = " + fmt(worst) + " (tol 1e-8), " + fmt(secs) + " s (limit 10 s)"};
}

// 2. quadratic closed form and S-ZOPO at N = 1e5
Outcome quadratic_exactness(const Context& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double C : {0.3, 1.0, 4.0})
    for (double lam : {0.1, 1.0, 7.5})
      for (double x : {-3.0, 0.0, 2.0, 9.0})
        for (double mu : {-1.0, 0.0, 0.5}) {
          const GibbsProxParams p(lam, 1.0);
          const double z = zprox_quadratic(C, make_point({mu, 2 * mu}), make_point({x, -x}), p)[0];
          worst = std::max(worst, std::abs(z - (lam * mu + C * x) / (C + lam)));
        }
  const Point mu = make_point({0.0});
  const Point x = make_point({2.0});
  const GibbsProxParams p(1.0, 1.0);
  const auto f = objectives::quadratic(1.0, mu);
  const Point ref = zprox_quadratic(1.0, mu, x, p);
  const double c2 = c1_c2_quadratic(1.0, mu, x, p).c2;
  const std::size_t n = 100000, trials = 100;
  const auto study = bias_variance_study(f, x, p, n, trials, ref, SeedSpec{ctx.seed, {2}}, ctx.threads);
  const double radius = 3.0 * std::sqrt(c2 / double(n));
  io::Table t;
  t.columns = {"trial", "estimate", "abs_error", "within"};
  int inside = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    const double e = std::abs(study.per_trial[i].point[0] - ref[0]);
    inside += e <= radius;
    t.add({std::int64_t(i), study.per_trial[i].point[0], e, std::int64_t(e <= radius)});
  }
  const double secs = seconds_since(t0);
  const bool pass = worst <= 1e-14 && inside >= 99 && secs < 30.0;
  io::write_csv(ctx.out / "c02_quadratic_trials.csv", t, {{"criterion", 2}, {"n", n}, {"c2", c2}, {"radius", radius}});
  write_summary(ctx, "c02_quadratic",
                {{"closed_form_max_diff", worst}, {"c2", c2}, {"radius", radius}, {"inside", inside}, {"pass", pass}});
  return {pass, "closed form max diff " + fmt(worst) + ", " + std::to_string(inside) + "/100 within 3 sqrt(C2/N) = " +
                    fmt(radius) + ", " + fmt(secs) + " s (limit 30 s)"};
}

// 3. descent and convergence on wiggly1d
Outcome descent(const Context& ctx) {
  const auto e = wiggly1d_entry();
  ZoppaOptions opt;
  opt.max_iter = 1000;
  opt.step_tol = 1e-10;
  auto tr = zoppa_run(e.objective, *e.preset_x0, 1.0, schedule::Fixed{1.0}, opt);
  tr.config_echo["criterion"] = 3;
  io::write_trace(ctx.out / "c03_wiggly_trace", tr);
  double worst = -INFINITY;
  for (std::size_t k = 1; k < tr.records.size(); ++k) {
    const auto& a = tr.records[k - 1];
    const auto& b = tr.records[k];
    worst = std::max(worst, *b.env_value - (*a.env_value - (*a.step_norm) * (*a.step_norm) / (2.0 * a.lambda)));
  }
  const double path = tr.path_length();
  const bool pass = worst <= 1e-8 && tr.terminated_by == Termination::StepTol && tr.final_record().k <= 1000 &&
                    std::isfinite(path);
  write_summary(ctx, "c03_descent",
                {{"max_descent_violation", worst},
                 {"terminated_by", to_string(tr.terminated_by)},
                 {"iterations", tr.final_record().k},
                 {"path_length", path},
                 {"final_x", tr.final_record().x[0]},
                 {"pass", pass}});
  return {pass, std::string("terminated by ") + to_string(tr.terminated_by) + " at k = " +
                    std::to_string(tr.final_record().k) + ", worst descent residual " + fmt(worst) +
                    " (tol 1e-8), path length " + fmt(path)};
}

// 4. convex rates on |x|
Outcome convex_rates(const Context& ctx) {
  const auto f = objectives::abs_value();
  const GibbsProxParams p(1.0, 1.0);
  ZoppaOptions opt;
  opt.max_iter = 200;
  opt.step_tol = 0.0;
  auto tr = zoppa_run(f, make_point({2.0}), 1.0, schedule::Fixed{1.0}, opt);
  tr.config_echo["criterion"] = 4;
  io::write_trace(ctx.out / "c04_abs_trace", tr);
  const auto m = *envelope_minimum(f, p);
  const double dist0 = std::abs(2.0 - m.point[0]);
  const double slack = 1e-8;
  io::Table t;
  t.columns = {"k", "env_gap", "env_gap_bound", "env_grad", "env_grad_bound", "f_gap", "f_gap_bound"};
  bool ok = true;
  double margin = INFINITY;
  for (std::size_t k = 1; k <= 200; ++k) {
    const auto& r = tr.records[k];
    const double gap = *r.env_value - m.value;
    const double gap_b = envelope_gap_rate(dist0, 1.0, k);
    const double grad = *r.env_grad_norm;
    const double grad_b = envelope_grad_rate(dist0, 1.0, k);
    const double fgap = r.f_value - 0.0;
    const double fgap_b =
        convex_suboptimality_bound(convex_case::NonSmooth{}, 1, p, *tr.records[k - 1].env_grad_norm, std::abs(r.x[0])).bound;
    ok = ok && gap <= gap_b + slack && grad <= grad_b + slack && fgap <= fgap_b + slack;
    margin = std::min({margin, gap_b - gap, grad_b - grad, fgap_b - fgap});
    t.add({std::int64_t(k), gap, gap_b, grad, grad_b, fgap, fgap_b});
  }
  io::write_csv(ctx.out / "c04_convex_rates.csv", t, {{"criterion", 4}, {"dist0", dist0}});
  write_summary(ctx, "c04_convex_rates", {{"min_margin", margin}, {"slack", slack}, {"pass", ok}});
  return {ok, "k = 1..200, smallest margin " + fmt(margin) + " (slack 1e-8)"};
}

// 5. rate bound dominates |grad f| on the quadratic
Outcome rate_dominance(const Context& ctx) {
  const double C = 1.0, L = 1.0 / C, lam = 0.4 / L;
  const Point mu = Point::Zero(2);
  const auto f = objectives::quadratic(C, mu);
  ZoppaOptions opt;
  opt.max_iter = 100;
  auto tr = zoppa_run(f, make_point({3.0, -2.0}), 1.0, schedule::Fixed{lam}, opt);
  tr.config_echo["criterion"] = 5;
  io::write_trace(ctx.out / "c05_quadratic_trace", tr);
  io::Table t;
  t.columns = {"k", "fd_grad_norm", "bound"};
  bool ok = true;
  double margin = INFINITY;
  for (const auto& r : tr.records) {
    if (!r.env_grad_norm) continue;
    const auto rep = with_empirical(rate_bound(rate_case::Smooth{L}, 2, GibbsProxParams(lam, 1.0), *r.env_grad_norm),
                                    fd_grad_norm(f, r.x));
    ok = ok && *rep.satisfied;
    margin = std::min(margin, rep.bound - *rep.empirical);
    t.add({std::int64_t(r.k), *rep.empirical, rep.bound});
  }
  io::write_csv(ctx.out / "c05_rate_bound.csv", t, {{"criterion", 5}, {"L", L}, {"lambda", lam}});
  write_summary(ctx, "c05_rate_bound", {{"iterations", tr.records.size()}, {"min_margin", margin}, {"pass", ok}});
  return {ok, std::to_string(tr.records.size()) + " iterates, smallest margin " + fmt(margin) + " (slack 1e-6)"};
}

// 6. Hessian identity against finite differences
Outcome hessian_identity(const Context& ctx) {
  const auto f = objectives::wiggly1d();
  const GibbsProxParams p(1.0, 1.0);
  const auto xs = linspace(-5, 5, 21);
  const double h = 1e-4;
  std::vector<std::array<double, 3>> rows(xs.size());
  parallel_for(xs.size(), ctx.threads, [&](std::size_t i) {
    const double x = xs[i];
    const double fd =
        (envelope_quadrature_1d(f, x + h, p).gradient[0] - envelope_quadrature_1d(f, x - h, p).gradient[0]) / (2 * h);
    rows[i] = {x, covariance_quadrature_1d(f, x, p).hessian_env, fd};
  });
  io::Table t;
  t.columns = {"x", "hessian_identity", "fd_hessian", "abs_diff"};
  double worst = 0.0;
  for (const auto& r : rows) {
    worst = std::max(worst, std::abs(r[1] - r[2]));
    t.add({r[0], r[1], r[2], std::abs(r[1] - r[2])});
  }
  io::write_csv(ctx.out / "c06_hessian.csv", t, {{"criterion", 6}, {"fd_step", h}});
  write_summary(ctx, "c06_hessian", {{"max_abs_diff", worst}, {"pass", worst <= 1e-5}});
  return {worst <= 1e-5, "21 points, max |diff| = " + fmt(worst) + " (tol 1e-5)"};
}

// 7. convexification threshold and certificates
Outcome convexification(const Context& ctx) {
  const auto e = wiggly1d_entry();
  const double thr = convexification_threshold(
      threshold_case::KappaOsc{e.declared_constants.at("kappa"), e.declared_constants.at("osc")}, 1.0);
  const auto hi = convexity_certificate_1d(e.objective, GibbsProxParams(35.0, 1.0), -5, 5, 401, ctx.threads);
  const auto lo = convexity_certificate_1d(e.objective, GibbsProxParams(0.01, 1.0), -5, 5, 401, ctx.threads);
  io::Table t;
  t.columns = {"x", "hessian_lambda_35", "hessian_lambda_0.01"};
  for (std::size_t i = 0; i < hi.grid.size(); ++i) t.add({hi.grid[i], hi.hessian[i], lo.hessian[i]});
  io::write_csv(ctx.out / "c07_certificates.csv", t, {{"criterion", 7}, {"delta", 1.0}});
  const bool thr_ok = std::abs(thr - 31.80) < 0.01;
  const bool pass = thr_ok && hi.all_nonneg && !lo.all_nonneg;
  write_summary(ctx, "c07_convexification",
                {{"threshold", thr},
                 {"lambda_35", {{"min_hessian", hi.min_hessian}, {"all_nonneg", hi.all_nonneg}}},
                 {"lambda_0.01", {{"min_hessian", lo.min_hessian}, {"all_nonneg", lo.all_nonneg}}},
                 {"pass", pass}});
  return {pass, "threshold " + fmt(thr) + ", lambda 35 min hessian " + fmt(hi.min_hessian) +
                    (hi.all_nonneg ? " (convex)" : " (NOT convex)") + ", lambda 0.01 min hessian " + fmt(lo.min_hessian)};
}

// 8. ESS across the temperature sweep
Outcome ess_behaviour(const Context& ctx) {
  const auto t0 = std::chrono::steady_clock::now();
  experiments::DeltaSweepConfig c;
  c.n_values = {50, 500, 5000};
  c.trials = 100;
  c.seed = ctx.seed;
  c.threads = ctx.threads;
  const auto s = experiments::delta_sweep(c);
  const std::size_t ni = 2;  // N = 5000
  const auto& cells = s.cells[ni];
  bool monotone = true;
  for (std::size_t j = 1; j < cells.size(); ++j) monotone = monotone && cells[j].mean_ess >= cells[j - 1].mean_ess;
  const double n = 5000.0;
  const bool top = cells.back().mean_ess > 0.9 * n;
  bool collapse = true;
  double worst_small = 0.0;
  for (std::size_t j = 0; j < cells.size(); ++j)
    if (s.deltas[j] <= 1e-4 * (1 + 1e-12)) {
      collapse = collapse && cells[j].mean_ess < 10.0;
      worst_small = std::max(worst_small, cells[j].mean_ess);
    }
  // Same data as `zopo figure fig3` / `fig1c` with these settings.
  const auto f3 = experiments::fig3(c);
  experiments::write(ctx.out, f3);
  experiments::DeltaSweepConfig c1 = c;
  c1.n_values = {5000};
  experiments::write(ctx.out, experiments::fig1c(c1));
  const double secs = seconds_since(t0);
  const bool pass = monotone && top && collapse && secs < 120.0;
  write_summary(ctx, "c08_ess",
                {{"monotone", monotone},
                 {"top_mean_ess", cells.back().mean_ess},
                 {"max_mean_ess_at_or_below_1e-4", worst_small},
                 {"pass", pass}});
  return {pass, std::string(monotone ? "nondecreasing" : "NOT monotone") + ", mean ESS at delta=100: " +
                    fmt(cells.back().mean_ess) + " (> 4500), max at delta <= 1e-4: " + fmt(worst_small) +
                    " (< 10), " + fmt(secs) + " s (limit 120 s)"};
}

// 9. bias and variance constants
Outcome bias_variance(const Context& ctx) {
  const GibbsProxParams p(0.5, 1.0);
  const Point mu2 = Point::Zero(2);
  const auto f2 = objectives::quadratic(1.0, mu2);
  const double c2 = c1_c2_quadratic(1.0, mu2, mu2, p).c2;
  const auto var = bias_variance_study(f2, mu2, p, 1000, 500, mu2, SeedSpec{ctx.seed, {9, 1}}, ctx.threads);
  const double ratio_var = var.mse * 1000.0 / c2;

  const Point mu1 = make_point({0.0});
  const Point x1 = make_point({1.0});
  const auto f1 = objectives::quadratic(1.0, mu1);
  const double c1 = c1_c2_quadratic(1.0, mu1, x1, p).c1[0];
  const Point ref = zprox_quadratic(1.0, mu1, x1, p);
  const double lw = -envelope_quadratic(1.0, mu1, x1, p).value / p.delta();
  const std::size_t n = 100000, trials = 1000;
  const auto bias = bias_variance_study(f1, x1, p, n, trials, ref, SeedSpec{ctx.seed, {9, 2}}, ctx.threads, lw);
  const double cv = (*bias.control_variate_bias)[0];
  const double ratio_bias = cv * double(n) / c1;
  // Standard error of the control-variate mean, for the record.
  double sq = 0.0;
  for (const auto& r : bias.per_trial) {
    const double v = (r.point[0] - ref[0]) * (1.0 - std::exp(r.log_mean_weight - lw)) * double(n);
    sq += (v - cv * double(n)) * (v - cv * double(n));
  }
  const double se = std::sqrt(sq / double(trials - 1) / double(trials));

  experiments::Fig6Config f6;
  f6.seed = ctx.seed;
  f6.threads = ctx.threads;
  experiments::write(ctx.out, experiments::fig6(f6));

  const bool ok_var = std::abs(ratio_var - 1.0) <= 0.2;
  const bool ok_bias = std::abs(ratio_bias - 1.0) <= 0.3;
  write_summary(ctx, "c09_bias_variance",
                {{"c2", c2},
                 {"mse_times_n", var.mse * 1000.0},
                 {"mse_ratio", ratio_var},
                 {"c1", c1},
                 {"bias_times_n_control_variate", cv * double(n)},
                 {"bias_times_n_control_variate_stderr", se},
                 {"bias_times_n_plain", bias.mean_bias[0] * double(n)},
                 {"bias_ratio", ratio_bias},
                 {"pass", ok_var && ok_bias}});
  return {ok_var && ok_bias, "MSE*N/C2 = " + fmt(ratio_var) + " (within 20%), bias*N/C1 = " + fmt(ratio_bias) +
                                 " +- " + fmt(se / c1) + " (within 30%)"};
}

// 10. escape frequency against the bound
Outcome escape(const Context& ctx) {
  const std::size_t d = 4, batches = 10000;
  const GibbsProxParams p(1.0, 1.0);
  const double alpha = 4.0;
  const double R = alpha * double(d) * p.variance();  // squared radius
  const double bound = escape_probability_bound(1, d, p, R);
  RandomStream rng(SeedSpec{ctx.seed, {10}});
  std::size_t escapes = 0;
  for (std::size_t b = 0; b < batches; ++b) {
    double r2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double z = p.sigma() * rng.normal();
      r2 += z * z;
    }
    escapes += r2 > R;
  }
  const double freq = double(escapes) / double(batches);
  const double limit = bound + 3.0 * std::sqrt(bound * (1.0 - bound) / double(batches));
  const bool pass = freq <= limit;
  write_summary(ctx, "c10_escape",
                {{"d", d}, {"alpha", alpha}, {"R", R}, {"batches", batches}, {"escapes", escapes},
                 {"frequency", freq}, {"bound", bound}, {"limit", limit}, {"pass", pass}});
  return {pass, "frequency " + fmt(freq) + " vs bound " + fmt(bound) + " (+3 se: " + fmt(limit) + ")"};
}

// 11. continuation against fixed lambda
Outcome continuation(const Context& ctx) {
  experiments::Fig2Config c;
  c.seed = ctx.seed;
  c.threads = ctx.threads;
  const auto runs = experiments::fig2_runs(c);
  // final f indexed by benchmark, schedule, run
  std::map<std::string, std::map<std::string, std::vector<double>>> fin;
  for (const auto& r : runs) {
    auto& v = fin[r.benchmark][r.schedule];
    v.resize(c.seeds);
    v[r.run] = r.final_f;
  }
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  json summary;
  int wiggly_wins = 0;
  const auto& w = fin.at("wiggly1d");
  for (std::size_t r = 0; r < c.seeds; ++r) {
    double best_fixed = INFINITY;
    for (const auto& [label, v] : w)
      if (label != "continuation") best_fixed = std::min(best_fixed, v[r]);
    wiggly_wins += w.at("continuation")[r] <= best_fixed;
  }
  summary["wiggly1d_wins"] = wiggly_wins;
  int bench_wins = 0;
  std::string detail;
  for (const std::string b : {"rastrigin", "ackley", "levy"}) {
    const auto& m = fin.at(b);
    const double cont = median(m.at("continuation"));
    bool beats = true;
    json meds;
    for (const auto& [label, v] : m) {
      meds[label] = median(v);
      if (label != "continuation") beats = beats && cont < median(v);
    }
    summary["medians"][b] = meds;
    summary["continuation_beats_all"][b] = beats;
    bench_wins += beats;
    detail += " " + b + (beats ? " yes" : " no");
  }
  const bool pass = wiggly_wins >= 12 && bench_wins >= 2;
  summary["pass"] = pass;
  experiments::write(ctx.out, experiments::fig2(c, runs));
  write_summary(ctx, "c11_continuation", summary);
  return {pass, "wiggly1d continuation best in " + std::to_string(wiggly_wins) + "/20 seeds (need 12); median wins:" +
                    detail + " (need 2 of 3)"};
}

// 12. S-ZOPPA convergence on the quadratic
Outcome szoppa_convergence(const Context& ctx) {
  const auto e = quadratic_entry(1.0, Point::Zero(2), 2);
  const std::size_t seeds = 100;
  std::vector<double> dist(seeds);
  std::vector<std::size_t> warnings(seeds);
  std::vector<Point> x0s(seeds);
  parallel_for(seeds, ctx.threads, [&](std::size_t s) {
    x0s[s] = random_x0(e, SeedSpec{ctx.seed, {12, 1, s}});
    SzoppaOptions opt;
    opt.max_iter = 50;
    const auto tr = szoppa_run(e.objective, x0s[s], 1.0, schedule::Fixed{1.0}, schedule::Polynomial{100, 3},
                               SeedSpec{ctx.seed, {12, 2, s}}, opt);
    dist[s] = tr.final_record().x.norm();
    warnings[s] = tr.warnings.size();
  });
  io::Table t;
  t.columns = {"seed", "x0", "final_dist", "warnings"};
  int ok = 0;
  std::size_t warn_total = 0;
  for (std::size_t s = 0; s < seeds; ++s) {
    ok += dist[s] < 0.05;
    warn_total += warnings[s];
    t.add({std::int64_t(s), io::join_point(x0s[s]), dist[s], std::int64_t(warnings[s])});
  }
  io::write_csv(ctx.out / "c12_szoppa.csv", t,
                {{"criterion", 12}, {"schedule", "polynomial 100 (k+1)^3"}, {"iterations", 50}, {"lambda", 1.0},
                 {"delta", 1.0}});
  const bool pass = ok >= 95 && warn_total == 0;
  write_summary(ctx, "c12_szoppa", {{"converged", ok}, {"warnings", warn_total}, {"pass", pass}});
  return {pass, std::to_string(ok) + "/100 runs within 0.05 of mu (need 95), " + std::to_string(warn_total) +
                    " mean-weight warnings"};
}

// 13. byte comparison of two output trees
Outcome compare_dirs(const fs::path& a, const fs::path& b) {
  auto listing = [](const fs::path& root) {
    std::set<std::string> files;
    if (fs::exists(root))
      for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) files.insert(fs::relative(e.path(), root).string());
    return files;
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const auto fa = listing(a);
  const auto fb = listing(b);
  if (fa.empty()) return {false, "no files in " + a.string()};
  if (fa != fb) return {false, "file sets differ between " + a.string() + " and " + b.string()};
  std::set<int> covered;
  for (const auto& name : fa)
    if (name.size() > 3 && name[0] == 'c' && std::isdigit(name[1]) && std::isdigit(name[2]))
      covered.insert(std::stoi(name.substr(1, 2)));
  for (const auto& name : fa)
    if (slurp(a / name) != slurp(b / name)) return {false, name + " differs"};
  const bool all = covered.size() == 12;
  return {all, std::to_string(fa.size()) + " files byte-identical, covering " + std::to_string(covered.size()) +
                   "/12 criteria"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"zopo acceptance suite"};
  Context ctx;
  std::string out = "acceptance_out";
  std::vector<int> only;
  std::vector<std::string> compare;
  app.add_option("--threads", ctx.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "output directory");
  app.add_option("--seed", ctx.seed, "master seed");
  app.add_option("--only", only, "run only these criteria")->delimiter(',');
  app.add_option("--compare", compare, "compare two output directories (criterion 13)")->expected(2);
  CLI11_PARSE(app, argc, argv);

  if (!compare.empty()) {
    const Outcome o = compare_dirs(compare[0], compare[1]);
    std::cout << "criterion 13 determinism: " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    return o.pass ? 0 : 1;
  }

  ctx.out = out;
  fs::create_directories(ctx.out);
  const std::vector<std::pair<std::string, std::function<Outcome(const Context&)>>> criteria{
      {"oracle agreement", oracle_agreement},   {"quadratic exactness", quadratic_exactness},
      {"descent and convergence", descent},     {"convex rates", convex_rates},
      {"rate-bound dominance", rate_dominance}, {"hessian identity", hessian_identity},
      {"convexification", convexification},    {"ESS behaviour", ess_behaviour},
      {"bias/variance asymptotics", bias_variance}, {"escape bound", escape},
      {"continuation beats fixed lambda", continuation}, {"S-ZOPPA convergence", szoppa_convergence},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << "criterion " << id << " " << criteria[i].first << ": " << (o.pass ? "PASS" : "FAIL") << "  "
              << o.detail << "  [" << fmt(seconds_since(t0)) << " s]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
