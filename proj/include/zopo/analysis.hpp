#pragma once

// Closed-form bound calculators: gradient rates, Poincare constants,
// convexification thresholds, escape and stability probabilities.
// Exponential factors are carried in log space; `bound` is exp(log_bound)
// clamped to the largest finite double.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "zopo/core/error.hpp"
#include "zopo/core/numerics.hpp"
#include "zopo/core/parallel.hpp"
#include "zopo/core/types.hpp"
#include "zopo/oracles.hpp"

namespace zopo {

struct BoundReport {
  std::string name;
  std::map<std::string, double> inputs;
  double bound = 0.0;
  double log_bound = 0.0;
  std::optional<double> empirical;
  std::optional<bool> satisfied;
};

inline constexpr double kBoundSlackAbs = 1e-6;
inline constexpr double kBoundSlackRel = 1e-8;

/// Attaches an empirical value and checks empirical <= bound + slack.
inline BoundReport with_empirical(BoundReport r, double empirical, double slack_abs = kBoundSlackAbs,
                                  double slack_rel = kBoundSlackRel) {
  r.empirical = empirical;
  r.satisfied = empirical <= r.bound + slack_abs + slack_rel * std::abs(r.bound);
  return r;
}

namespace detail {

inline double clamp_exp(double log_value) {
  if (log_value >= std::log(std::numeric_limits<double>::max())) return std::numeric_limits<double>::max();
  return std::exp(log_value);
}

inline double safe_log(double v) { return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity(); }

inline BoundReport make_report(std::string name, std::map<std::string, double> inputs, double log_bound) {
  BoundReport r;
  r.name = std::move(name);
  r.inputs = std::move(inputs);
  r.log_bound = log_bound;
  r.bound = clamp_exp(log_bound);
  return r;
}

inline void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(what) + " must be positive and finite");
}

inline void require_nonneg(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(what) + " must be nonnegative and finite");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Gradient-norm rates for the exact iteration

namespace rate_case {
struct Smooth {
  double L;
};
struct SmoothLipschitz {
  double L;
  double G;
};
struct KappaOsc {
  double L;
  double kappa;
  double osc;
};
}  // namespace rate_case

using RateCase = std::variant<rate_case::Smooth, rate_case::SmoothLipschitz, rate_case::KappaOsc>;

/// Bound on |grad f(x)| given g = |grad env(x)|:
///   smooth:            (1 + lambda L) g + L sqrt(d lambda delta / (1 - lambda L)),  lambda L < 1
///   smooth+Lipschitz:  (1 + lambda L) g + L min{ sqrt(2 d lambda delta) exp(2 sqrt(2d/pi) G^2 lambda^2),
///                                   (sqrt(2d) G lambda + 2 sqrt(d lambda delta)) exp(G^2 lambda / (4 delta)) }
///   kappa+bounded:     (1 + lambda L) g + L sqrt(d exp(osc/delta) lambda delta / (1 + kappa lambda))
inline BoundReport rate_bound(const RateCase& c, std::size_t d, const GibbsProxParams& params, double env_grad_norm) {
  detail::require_nonneg(env_grad_norm, "env_grad_norm");
  if (d < 1) throw InvalidInput("dimension must be >= 1");
  const double lam = params.lambda();
  const double del = params.delta();
  const double dd = static_cast<double>(d);
  std::map<std::string, double> in{{"lambda", lam}, {"delta", del}, {"d", dd}, {"g", env_grad_norm}};

  if (const auto* s = std::get_if<rate_case::Smooth>(&c)) {
    detail::require_nonneg(s->L, "L");
    if (lam * s->L >= 1.0) throw LambdaTooLarge("smooth rate bound needs lambda < 1/L");
    in["L"] = s->L;
    const double lead = (1.0 + lam * s->L) * env_grad_norm;
    const double tail = s->L * std::sqrt(dd * lam * del / (1.0 - lam * s->L));
    return detail::make_report("rate_smooth", in, detail::safe_log(lead + tail));
  }
  if (const auto* s = std::get_if<rate_case::SmoothLipschitz>(&c)) {
    detail::require_nonneg(s->L, "L");
    detail::require_nonneg(s->G, "G");
    in["L"] = s->L;
    in["G"] = s->G;
    const double G2 = s->G * s->G;
    const double log_a = 0.5 * std::log(2.0 * dd * lam * del) + 2.0 * std::sqrt(2.0 * dd / std::numbers::pi) * G2 * lam * lam;
    const double log_b =
        std::log(std::sqrt(2.0 * dd) * s->G * lam + 2.0 * std::sqrt(dd * lam * del)) + G2 * lam / (4.0 * del);
    const double log_tail = detail::safe_log(s->L) + std::min(log_a, log_b);
    const double log_lead = detail::safe_log((1.0 + lam * s->L) * env_grad_norm);
    const double lb = std::isinf(log_lead) ? log_tail : log_add_exp(log_lead, log_tail);
    return detail::make_report("rate_smooth_lipschitz", in, lb);
  }
  const auto& s = std::get<rate_case::KappaOsc>(c);
  detail::require_nonneg(s.L, "L");
  detail::require_positive(s.kappa, "kappa");
  detail::require_nonneg(s.osc, "osc");
  in["L"] = s.L;
  in["kappa"] = s.kappa;
  in["osc"] = s.osc;
  const double log_tail =
      detail::safe_log(s.L) + 0.5 * (std::log(dd * lam * del / (1.0 + s.kappa * lam)) + s.osc / del);
  const double log_lead = detail::safe_log((1.0 + lam * s.L) * env_grad_norm);
  const double lb = std::isinf(log_lead) ? log_tail : log_add_exp(log_lead, log_tail);
  return detail::make_report("rate_kappa_osc", in, lb);
}

// ---------------------------------------------------------------------------
// Poincare constants of the Gibbs posterior

namespace poincare_case {
struct StrongViaSmooth {
  double L;
};
struct Lipschitz {
  double G;
  std::size_t d;
};
struct KappaOsc {
  double kappa;
  double osc;
};
}  // namespace poincare_case

using PoincareCase = std::variant<poincare_case::StrongViaSmooth, poincare_case::Lipschitz, poincare_case::KappaOsc>;

///   smooth:            lambda delta / (1 - lambda L),  lambda L < 1
///   Lipschitz:         min{ 2 lambda delta exp(4 sqrt(2d/pi) G^2 lambda^2),
///              (2 G lambda + sqrt(8 lambda delta))^2 / 2 * exp(G^2 lambda / (2 delta)) }
///   kappa+bounded:     exp(osc/delta) lambda delta / (1 + kappa lambda)
inline BoundReport poincare_bound(const PoincareCase& c, const GibbsProxParams& params) {
  const double lam = params.lambda();
  const double del = params.delta();
  std::map<std::string, double> in{{"lambda", lam}, {"delta", del}};
  if (const auto* s = std::get_if<poincare_case::StrongViaSmooth>(&c)) {
    detail::require_nonneg(s->L, "L");
    if (lam * s->L >= 1.0) throw LambdaTooLarge("smooth Poincare bound needs lambda < 1/L");
    in["L"] = s->L;
    return detail::make_report("poincare_smooth", in, std::log(lam * del / (1.0 - lam * s->L)));
  }
  if (const auto* s = std::get_if<poincare_case::Lipschitz>(&c)) {
    detail::require_nonneg(s->G, "G");
    if (s->d < 1) throw InvalidInput("dimension must be >= 1");
    const double dd = static_cast<double>(s->d);
    in["G"] = s->G;
    in["d"] = dd;
    const double G2 = s->G * s->G;
    const double log_a = std::log(2.0 * lam * del) + 4.0 * std::sqrt(2.0 * dd / std::numbers::pi) * G2 * lam * lam;
    const double root = 2.0 * s->G * lam + std::sqrt(8.0 * lam * del);
    const double log_b = std::log(0.5 * root * root) + G2 * lam / (2.0 * del);
    return detail::make_report("poincare_lipschitz", in, std::min(log_a, log_b));
  }
  const auto& s = std::get<poincare_case::KappaOsc>(c);
  detail::require_positive(s.kappa, "kappa");
  detail::require_nonneg(s.osc, "osc");
  in["kappa"] = s.kappa;
  in["osc"] = s.osc;
  return detail::make_report("poincare_kappa_osc", in, s.osc / del + std::log(lam * del / (1.0 + s.kappa * lam)));
}

// ---------------------------------------------------------------------------
// Convexification threshold on lambda

namespace threshold_case {
struct Dissipative {
  double m;
  double b;
  double R;
  std::size_t d;
};
struct KappaOsc {
  double kappa;
  double osc;
};
}  // namespace threshold_case

using ThresholdCase = std::variant<threshold_case::Dissipative, threshold_case::KappaOsc>;

///   dissipative: (delta d + b + sqrt((delta d + b)^2 + 2 delta m R^2)) / (2 delta m)
///   kappa/osc:   (exp(osc/delta) - 1) / kappa
inline double convexification_threshold(const ThresholdCase& c, double delta) {
  detail::require_positive(delta, "delta");
  if (const auto* s = std::get_if<threshold_case::Dissipative>(&c)) {
    detail::require_positive(s->m, "m");
    detail::require_nonneg(s->b, "b");
    detail::require_nonneg(s->R, "R");
    if (s->d < 1) throw InvalidInput("dimension must be >= 1");
    const double a = delta * static_cast<double>(s->d) + s->b;
    return (a + std::sqrt(a * a + 2.0 * delta * s->m * s->R * s->R)) / (2.0 * delta * s->m);
  }
  const auto& s = std::get<threshold_case::KappaOsc>(c);
  detail::require_positive(s.kappa, "kappa");
  detail::require_nonneg(s.osc, "osc");
  return std::expm1(s.osc / delta) / s.kappa;
}

// ---------------------------------------------------------------------------
// Sample escape probability

/// log of N exp(-(alpha - 1)^2 d / (4 alpha)), alpha = R / (lambda delta d),
/// before clamping to 1.
inline double escape_probability_log_bound(std::size_t n, std::size_t d, const GibbsProxParams& params, double R) {
  if (d < 1) throw InvalidInput("dimension must be >= 1");
  const double dd = static_cast<double>(d);
  if (!(R > dd * params.variance()) || !std::isfinite(R))
    throw InvalidRadius("escape bound needs R > d lambda delta");
  const double alpha = R / (params.variance() * dd);
  return std::log(static_cast<double>(n)) - (alpha - 1.0) * (alpha - 1.0) * dd / (4.0 * alpha);
}

/// Bound on the probability that some of N proposal samples leaves the ball
/// of squared radius R around x, clamped to 1.
inline double escape_probability_bound(std::size_t n, std::size_t d, const GibbsProxParams& params, double R) {
  const double lb = escape_probability_log_bound(n, d, params, R);
  return lb >= 0.0 ? 1.0 : std::exp(lb);
}

// ---------------------------------------------------------------------------
// Convex case

namespace convex_case {
struct NonSmooth {};
struct Smooth {
  double L;
};
}  // namespace convex_case

using ConvexCase = std::variant<convex_case::NonSmooth, convex_case::Smooth>;

///   nonsmooth: f(x) - min f <= g dist + d delta
///   smooth:    f(x) - min f <= ((1 + lambda L) g + L sqrt(d lambda delta)) dist
/// The smooth report also carries the gradient bound in inputs["gradient_bound"].
inline BoundReport convex_suboptimality_bound(const ConvexCase& c, std::size_t d, const GibbsProxParams& params,
                                              double env_grad_norm, double dist_to_xstar) {
  detail::require_nonneg(env_grad_norm, "env_grad_norm");
  detail::require_nonneg(dist_to_xstar, "dist_to_xstar");
  const double lam = params.lambda();
  const double del = params.delta();
  const double dd = static_cast<double>(d);
  std::map<std::string, double> in{
      {"lambda", lam}, {"delta", del}, {"d", dd}, {"g", env_grad_norm}, {"dist", dist_to_xstar}};
  if (std::holds_alternative<convex_case::NonSmooth>(c)) {
    return detail::make_report("convex_nonsmooth", in, std::log(env_grad_norm * dist_to_xstar + dd * del));
  }
  const double L = std::get<convex_case::Smooth>(c).L;
  detail::require_nonneg(L, "L");
  const double grad = (1.0 + lam * L) * env_grad_norm + L * std::sqrt(dd * lam * del);
  in["L"] = L;
  in["gradient_bound"] = grad;
  return detail::make_report("convex_smooth", in, detail::safe_log(grad * dist_to_xstar));
}

/// env(x^k) - min env <= dist^2 / (2 lambda k), k >= 1.
inline double envelope_gap_rate(double dist, double lambda, std::size_t k) {
  if (k < 1) throw InvalidInput("envelope rate needs k >= 1");
  return dist * dist / (2.0 * lambda * static_cast<double>(k));
}

/// |grad env(x^k)| <= 2 dist / (lambda (k + 1)).
inline double envelope_grad_rate(double dist, double lambda, std::size_t k) {
  return 2.0 * dist / (lambda * static_cast<double>(k + 1));
}

// ---------------------------------------------------------------------------
// Sampled normalisation constant

struct StabilityBound {
  double log_bound;
  double bound;
};

/// Hoeffding bound exp(-2 N (Z - eps)^2 / c^2) on the event that the sample
/// mean weight falls below eps, where Z lower-bounds its expectation and
/// c = exp(-inf f / delta) bounds each weight.
inline StabilityBound stability_bound(std::size_t n, double z_lower, double eps, double c) {
  detail::require_positive(z_lower, "z_lower");
  detail::require_positive(c, "c");
  if (!(eps > 0.0) || !(eps < z_lower)) throw InvalidEpsilon("stability bound needs 0 < eps < z_lower");
  const double margin = (z_lower - eps) / c;
  const double lb = -2.0 * static_cast<double>(n) * margin * margin;
  return {lb, std::exp(lb)};
}

// ---------------------------------------------------------------------------

struct ConvexityCertificate {
  double min_hessian;
  double argmin;
  bool all_nonneg;
  std::vector<double> grid;
  std::vector<double> hessian;
};

/// Envelope second derivative 1/lambda - Var/(lambda^2 delta) by quadrature at
/// `count` equally spaced points of [lo, hi]; all_nonneg iff min >= -1e-8.
inline ConvexityCertificate convexity_certificate_1d(const ObjectiveSpec& f, const GibbsProxParams& params, double lo,
                                                     double hi, std::size_t count, std::size_t threads = 1,
                                                     const QuadratureOptions& opt = {}) {
  if (f.dim != 1) throw InvalidInput("convexity certificate requires dim = 1");
  if (count < 2 || !(hi > lo)) throw InvalidInput("convexity certificate needs count >= 2 and lo < hi");
  ConvexityCertificate out;
  out.grid.resize(count);
  out.hessian.resize(count);
  for (std::size_t i = 0; i < count; ++i)
    out.grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  parallel_for(count, threads,
               [&](std::size_t i) { out.hessian[i] = covariance_quadrature_1d(f, out.grid[i], params, opt).hessian_env; });
  const auto it = std::min_element(out.hessian.begin(), out.hessian.end());
  out.min_hessian = *it;
  out.argmin = out.grid[static_cast<std::size_t>(it - out.hessian.begin())];
  out.all_nonneg = out.min_hessian >= -1e-8;
  return out;
}

}  // namespace zopo
