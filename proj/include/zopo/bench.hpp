#pragma once

// Objective corpus: |x|, quadratics, the 1-D wiggly test function and three
// standard d-dimensional nonconvex benchmarks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zopo/core/error.hpp"
#include "zopo/core/random.hpp"
#include "zopo/core/types.hpp"

namespace zopo {

struct KnownMinimum {
  Point point;
  double value;
};

struct Box {
  double lo;
  double hi;  // same interval on every coordinate
};

struct BenchmarkEntry {
  std::string name;
  ObjectiveSpec objective;
  std::optional<KnownMinimum> known_min;
  Box domain;
  std::map<std::string, double> declared_constants;
  std::optional<Point> preset_x0;
};

namespace objectives {

inline ObjectiveSpec abs_value() {
  ObjectiveSpec f;
  f.name = "abs";
  f.dim = 1;
  f.eval = [](std::span<const double> y) { return std::abs(y[0]); };
  f.lower_bound = 0.0;
  f.structure = structure::AbsValue{};
  f.breakpoints = {0.0};
  return f;
}

/// f(y) = |y - mu|^2 / (2C)
inline ObjectiveSpec quadratic(double C, const Point& mu) {
  if (!(C > 0.0) || !std::isfinite(C)) throw InvalidInput("quadratic: C must be positive and finite");
  if (mu.size() < 1) throw InvalidInput("quadratic: mu must have dimension >= 1");
  ObjectiveSpec f;
  f.name = "quadratic";
  f.dim = static_cast<std::size_t>(mu.size());
  f.eval = [C, mu](std::span<const double> y) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double d = y[i] - mu[static_cast<Eigen::Index>(i)];
      s += d * d;
    }
    return s / (2.0 * C);
  };
  f.lower_bound = 0.0;
  f.structure = structure::Quadratic{C, mu};
  return f;
}

inline double wiggly_value(double x) { return 0.3 * x * x + std::sin(4.0 * x) + 0.5 * std::cos(20.0 * x); }
inline double wiggly_second_derivative(double x) {
  return 0.6 - 16.0 * std::sin(4.0 * x) - 200.0 * std::cos(20.0 * x);
}

/// f(x) = 0.3 x^2 + sin(4x) + 0.5 cos(20x) = (0.6/2) x^2 + V(x), osc(V) <= 3.
inline ObjectiveSpec wiggly1d() {
  ObjectiveSpec f;
  f.name = "wiggly1d";
  f.dim = 1;
  f.eval = [](std::span<const double> y) { return wiggly_value(y[0]); };
  f.lower_bound = -1.5;
  f.structure = structure::KappaPlusBounded{0.6, 3.0};
  return f;
}

inline ObjectiveSpec rastrigin(std::size_t d) {
  ObjectiveSpec f;
  f.name = "rastrigin";
  f.dim = d;
  f.eval = [](std::span<const double> y) {
    double s = 10.0 * static_cast<double>(y.size());
    for (double v : y) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
    return s;
  };
  f.lower_bound = 0.0;
  f.structure = structure::KappaPlusBounded{2.0, 20.0 * static_cast<double>(d)};
  return f;
}

inline ObjectiveSpec ackley(std::size_t d) {
  ObjectiveSpec f;
  f.name = "ackley";
  f.dim = d;
  f.eval = [](std::span<const double> y) {
    double sq = 0.0;
    double cs = 0.0;
    for (double v : y) {
      sq += v * v;
      cs += std::cos(2.0 * std::numbers::pi * v);
    }
    const double n = static_cast<double>(y.size());
    return -20.0 * std::exp(-0.2 * std::sqrt(sq / n)) - std::exp(cs / n) + 20.0 + std::numbers::e;
  };
  f.lower_bound = 0.0;
  return f;
}

inline ObjectiveSpec levy(std::size_t d) {
  ObjectiveSpec f;
  f.name = "levy";
  f.dim = d;
  f.eval = [](std::span<const double> y) {
    constexpr double pi = std::numbers::pi;
    auto w = [](double v) { return 1.0 + (v - 1.0) / 4.0; };
    const std::size_t n = y.size();
    const double w0 = w(y[0]);
    const double wn = w(y[n - 1]);
    double s = std::pow(std::sin(pi * w0), 2);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double wi = w(y[i]);
      s += (wi - 1.0) * (wi - 1.0) * (1.0 + 10.0 * std::pow(std::sin(pi * wi + 1.0), 2));
    }
    s += (wn - 1.0) * (wn - 1.0) * (1.0 + std::pow(std::sin(2.0 * pi * wn), 2));
    return s;
  };
  f.lower_bound = 0.0;
  return f;
}

inline ObjectiveSpec constant(std::size_t d, double value = 0.0) {
  ObjectiveSpec f;
  f.name = "constant";
  f.dim = d;
  f.eval = [value](std::span<const double>) { return value; };
  f.lower_bound = value;
  return f;
}

}  // namespace objectives

namespace detail {

inline double sampled_sup_abs(double (*g)(double), Box box, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = box.lo + (box.hi - box.lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    m = std::max(m, std::abs(g(x)));
  }
  return m;
}

}  // namespace detail

inline BenchmarkEntry abs_entry() {
  return {"abs", objectives::abs_value(), KnownMinimum{make_point({0.0}), 0.0}, {-5.0, 5.0}, {{"G", 1.0}}, std::nullopt};
}

inline BenchmarkEntry quadratic_entry(double C = 1.0, std::optional<Point> mu = std::nullopt, std::size_t d = 1) {
  const Point m = mu ? *mu : Point::Zero(static_cast<Eigen::Index>(d));
  return {"quadratic",
          objectives::quadratic(C, m),
          KnownMinimum{m, 0.0},
          {-5.0, 5.0},
          {{"L", 1.0 / C}, {"kappa", 1.0 / C}, {"osc", 0.0}, {"m", 1.0 / C}},
          std::nullopt};
}

inline BenchmarkEntry wiggly1d_entry() {
  const Box box{-5.0, 5.0};
  const double L = detail::sampled_sup_abs(&objectives::wiggly_second_derivative, box, 1000001);
  const Point xmin = make_point({-0.4641819233644507});
  return {"wiggly1d",
          objectives::wiggly1d(),
          KnownMinimum{xmin, objectives::wiggly_value(xmin[0])},
          box,
          {{"kappa", 0.6}, {"osc", 3.0}, {"L", L}},
          make_point({3.0})};
}

inline BenchmarkEntry rastrigin_entry(std::size_t d = 10) {
  return {"rastrigin",
          objectives::rastrigin(d),
          KnownMinimum{Point::Zero(static_cast<Eigen::Index>(d)), 0.0},
          {-5.12, 5.12},
          {{"L", 2.0 + 40.0 * std::numbers::pi * std::numbers::pi}, {"kappa", 2.0}, {"osc", 20.0 * double(d)}},
          std::nullopt};
}

inline BenchmarkEntry ackley_entry(std::size_t d = 10) {
  return {"ackley", objectives::ackley(d), KnownMinimum{Point::Zero(static_cast<Eigen::Index>(d)), 0.0},
          {-32.768, 32.768}, {}, std::nullopt};
}

inline BenchmarkEntry levy_entry(std::size_t d = 10) {
  return {"levy", objectives::levy(d), KnownMinimum{Point::Ones(static_cast<Eigen::Index>(d)), 0.0},
          {-10.0, 10.0}, {}, std::nullopt};
}

/// Default corpus: abs, quadratic (C = 1, mu = 0, d = 1), wiggly1d and the
/// d = 10 rastrigin / ackley / levy functions.
inline std::vector<BenchmarkEntry> corpus() {
  return {abs_entry(), quadratic_entry(), wiggly1d_entry(), rastrigin_entry(), ackley_entry(), levy_entry()};
}

inline std::vector<std::string> corpus_names() {
  return {"abs", "quadratic", "wiggly1d", "rastrigin", "ackley", "levy"};
}

/// Entry by name; quadratic and the d-dimensional benchmarks take C, mu, d.
inline BenchmarkEntry find_benchmark(const std::string& name, std::size_t d = 10, double C = 1.0,
                                     std::optional<Point> mu = std::nullopt) {
  if (name == "abs") return abs_entry();
  if (name == "quadratic") return quadratic_entry(C, mu, mu ? static_cast<std::size_t>(mu->size()) : d);
  if (name == "wiggly1d") return wiggly1d_entry();
  if (name == "rastrigin") return rastrigin_entry(d);
  if (name == "ackley") return ackley_entry(d);
  if (name == "levy") return levy_entry(d);
  std::string names;
  for (const auto& n : corpus_names()) names += (names.empty() ? "" : ", ") + n;
  throw InvalidInput("unknown objective '" + name + "' (available: " + names + ")");
}

/// Uniform draw from the entry's domain box.
inline Point random_x0(const BenchmarkEntry& entry, const SeedSpec& seed) {
  RandomStream rng(seed);
  Point x(static_cast<Eigen::Index>(entry.objective.dim));
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = entry.domain.lo + (entry.domain.hi - entry.domain.lo) * rng.uniform();
  return x;
}

/// The preset starting point when the entry has one, otherwise a draw.
inline Point initial_point(const BenchmarkEntry& entry, const SeedSpec& seed) {
  if (entry.preset_x0) return *entry.preset_x0;
  return random_x0(entry, seed);
}

}  // namespace zopo
