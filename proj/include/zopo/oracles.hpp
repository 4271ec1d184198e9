#pragma once

// Reference evaluations of the Gibbs-weighted proximal operator and of the
// soft Moreau envelope
//
//   env(x)   = -delta * log E_{y ~ N(x, lambda delta I)} exp(-f(y)/delta)
//   zprox(x) = x - lambda * grad env(x)
//
// Closed forms cover quadratics and |x|; any other 1-D objective goes through
// adaptive quadrature of the Gibbs posterior.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "zopo/core/error.hpp"
#include "zopo/core/numerics.hpp"
#include "zopo/core/types.hpp"

namespace zopo {

enum class OracleMethod { ClosedQuadratic, ClosedAbs, Quadrature };

inline const char* to_string(OracleMethod m) {
  switch (m) {
    case OracleMethod::ClosedQuadratic: return "closed_quadratic";
    case OracleMethod::ClosedAbs: return "closed_abs";
    case OracleMethod::Quadrature: return "quadrature";
  }
  return "unknown";
}

struct EnvelopeValue {
  double value = 0.0;
  Point gradient;
  Point zprox;
  OracleMethod method = OracleMethod::Quadrature;
};

// ---------------------------------------------------------------------------
// Quadratic f(y) = |y - mu|^2 / (2C)

inline Point zprox_quadratic(double C, const Point& mu, const Point& x, const GibbsProxParams& params) {
  if (!(C > 0.0)) throw InvalidInput("zprox_quadratic: C must be positive");
  const double lambda = params.lambda();
  return (lambda * mu + C * x) / (C + lambda);
}

inline EnvelopeValue envelope_quadratic(double C, const Point& mu, const Point& x, const GibbsProxParams& params) {
  const double lambda = params.lambda();
  const double d = static_cast<double>(x.size());
  EnvelopeValue out;
  out.zprox = zprox_quadratic(C, mu, x, params);
  out.gradient = (x - mu) / (C + lambda);
  out.value = 0.5 * params.delta() * d * std::log((C + lambda) / C) + (x - mu).squaredNorm() / (2.0 * (C + lambda));
  out.method = OracleMethod::ClosedQuadratic;
  return out;
}

// ---------------------------------------------------------------------------
// f(y) = |y| in one dimension. With z1 = (x + lambda)/sqrt(2 lambda delta) and
// z2 = (lambda - x)/sqrt(2 lambda delta):
//   E exp(-|y|/delta) = exp(-x^2/(2 lambda delta)) (erfcx(z1) + erfcx(z2)) / 2
//   zprox(x)          = x + lambda tanh((log erfcx(z1) - log erfcx(z2)) / 2)

inline EnvelopeValue envelope_abs(double x, const GibbsProxParams& params) {
  const double lambda = params.lambda();
  const double delta = params.delta();
  const double scale = std::sqrt(2.0 * lambda * delta);
  const double l1 = log_erfcx((x + lambda) / scale);
  const double l2 = log_erfcx((lambda - x) / scale);
  EnvelopeValue out;
  const double z = x + lambda * std::tanh(0.5 * (l1 - l2));
  out.zprox = make_point({z});
  out.gradient = make_point({(x - z) / lambda});
  out.value = x * x / (2.0 * lambda) - delta * (log_add_exp(l1, l2) - std::numbers::ln2);
  out.method = OracleMethod::ClosedAbs;
  return out;
}

inline double zprox_abs(double x, const GibbsProxParams& params) { return envelope_abs(x, params).zprox[0]; }

// ---------------------------------------------------------------------------
// 1-D quadrature of the Gibbs posterior
//   q_x(y) ∝ exp(phi(y)),  phi(y) = -f(y)/delta - (y - x)^2 / (2 lambda delta).
// A grid scan locates the region where phi is within `window_margin` of its
// maximum; adaptive Gauss-Kronrod then integrates exp(phi - max) on that
// window, split at the grid maximiser and at the objective's breakpoints.

struct QuadratureOptions {
  double rel_tol = 1e-13;           // target for the adaptive rule
  double accept_rel_error = 1e-10;  // error estimate above this throws
  unsigned max_depth = 12;          // at most 2^max_depth subintervals per segment
  std::size_t initial_pieces = 8;
  std::size_t grid_points = 2001;
  double window_margin = 60.0;     // log-density drop that bounds the window
};

struct GibbsMoments1d {
  double log_mean_weight = 0.0;  // log E_proposal exp(-f/delta)
  double mean = 0.0;
  std::optional<double> variance;
  double window_lo = 0.0;
  double window_hi = 0.0;
};

namespace detail {

struct Window {
  double lo, hi, center, max_phi;
};

template <class Phi>
Window locate_window(const Phi& phi, double x, double sigma, const QuadratureOptions& opt) {
  const std::size_t n = std::max<std::size_t>(opt.grid_points, 11);
  std::vector<double> values(n);
  auto scan = [&](double lo, double hi, Window& w, bool& open_lo, bool& open_hi) {
    const double h = (hi - lo) / static_cast<double>(n - 1);
    std::size_t imax = 0;
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double v = phi(lo + h * static_cast<double>(i));
      values[i] = std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
      if (values[i] > m) {
        m = values[i];
        imax = i;
      }
    }
    if (m == -std::numeric_limits<double>::infinity()) throw DegenerateWeights();
    std::size_t i0 = n, i1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (values[i] > m - opt.window_margin) {
        i0 = std::min(i0, i);
        i1 = std::max(i1, i);
      }
    }
    open_lo = i0 == 0;
    open_hi = i1 == n - 1;
    w.lo = lo + h * static_cast<double>(i0 == 0 ? 0 : i0 - 1);
    w.hi = lo + h * static_cast<double>(i1 == n - 1 ? n - 1 : i1 + 1);
    w.center = lo + h * static_cast<double>(imax);
    w.max_phi = m;
  };

  double half = 10.0 * sigma;
  Window w{};
  for (int attempt = 0;; ++attempt) {
    bool open_lo = false, open_hi = false;
    scan(x - half, x + half, w, open_lo, open_hi);
    if (!open_lo && !open_hi) break;
    half *= 2.0;
    if (attempt > 60 || half > 1e12 * (1.0 + std::abs(x)))
      throw QuadratureNotConverged(w.max_phi, std::numeric_limits<double>::infinity(), 0);
  }
  // Two refinement passes on the located window sharpen the centre and bounds.
  for (int pass = 0; pass < 2; ++pass) {
    bool open_lo = false, open_hi = false;
    Window refined{};
    scan(w.lo, w.hi, refined, open_lo, open_hi);
    if (refined.max_phi < w.max_phi) refined.max_phi = w.max_phi;
    if (open_lo) refined.lo = w.lo;
    if (open_hi) refined.hi = w.hi;
    w = refined;
  }
  return w;
}

// Globally adaptive Gauss-Kronrod (G15/K31) integration of a vector-valued
// integrand: the subinterval with the largest relative error is bisected until
// every component satisfies err <= rel_tol * L1 or the interval budget is spent.
template <std::size_t K, class G>
std::array<double, K> kronrod_adaptive(const G& g, double lo, double hi, const QuadratureOptions& opt) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  using Gauss = boost::math::quadrature::gauss<double, 15>;
  using Vec = std::array<double, K>;
  struct Piece {
    double a, b;
    Vec value, error, l1;
  };
  auto apply = [&](double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const auto& xk = Rule::abscissa();
    const auto& wk = Rule::weights();
    const auto& wg = Gauss::weights();
    Vec kron{}, gauss{}, l1{};
    const Vec f0 = g(mid);
    for (std::size_t j = 0; j < K; ++j) {
      kron[j] = f0[j] * wk[0];
      gauss[j] = f0[j] * wg[0];
      l1[j] = std::abs(f0[j]) * wk[0];
    }
    for (std::size_t i = 1; i < xk.size(); ++i) {
      const Vec fp = g(mid + half * xk[i]);
      const Vec fm = g(mid - half * xk[i]);
      for (std::size_t j = 0; j < K; ++j) {
        kron[j] += (fp[j] + fm[j]) * wk[i];
        l1[j] += (std::abs(fp[j]) + std::abs(fm[j])) * wk[i];
        if (i % 2 == 0) gauss[j] += (fp[j] + fm[j]) * wg[i / 2];
      }
    }
    Piece p{a, b, {}, {}, {}};
    for (std::size_t j = 0; j < K; ++j) {
      p.value[j] = half * kron[j];
      p.l1[j] = half * l1[j];
      p.error[j] = std::max(half * std::abs(kron[j] - gauss[j]), 2.0 * std::numeric_limits<double>::epsilon() * p.l1[j]);
    }
    return p;
  };

  std::vector<Piece> pieces;
  const std::size_t initial = std::max<std::size_t>(1, opt.initial_pieces);
  for (std::size_t i = 0; i < initial; ++i)
    pieces.push_back(apply(lo + (hi - lo) * double(i) / double(initial),
                           i + 1 == initial ? hi : lo + (hi - lo) * double(i + 1) / double(initial)));
  const std::size_t max_pieces = std::size_t(1) << std::min(opt.max_depth, 16u);
  for (;;) {
    Vec total{}, err{}, l1{};
    for (const Piece& p : pieces)
      for (std::size_t j = 0; j < K; ++j) {
        total[j] += p.value[j];
        err[j] += p.error[j];
        l1[j] += p.l1[j];
      }
    bool done = true;
    for (std::size_t j = 0; j < K; ++j) done = done && err[j] <= opt.rel_tol * l1[j];
    if (done) return total;
    if (pieces.size() >= max_pieces) {
      for (std::size_t j = 0; j < K; ++j)
        if (!(err[j] <= opt.accept_rel_error * l1[j] + std::numeric_limits<double>::min()))
          throw QuadratureNotConverged(total[j], err[j], pieces.size());
      return total;
    }
    std::size_t worst = 0;
    double worst_score = -1.0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      double score = 0.0;
      for (std::size_t j = 0; j < K; ++j) score = std::max(score, pieces[i].error[j] / (l1[j] + std::numeric_limits<double>::min()));
      if (score > worst_score) {
        worst_score = score;
        worst = i;
      }
    }
    const Piece p = pieces[worst];
    const double mid = 0.5 * (p.a + p.b);
    pieces[worst] = apply(p.a, mid);
    pieces.push_back(apply(mid, p.b));
  }
}

}  // namespace detail

inline GibbsMoments1d gibbs_moments_1d(const ObjectiveSpec& f, double x, const GibbsProxParams& params,
                                       bool with_variance, const QuadratureOptions& opt = {}) {
  if (f.dim != 1) throw InvalidInput("1-D quadrature requires a one-dimensional objective");
  const double delta = params.delta();
  const double two_var = 2.0 * params.variance();
  auto phi = [&](double y) { return -f.at(y) / delta - (y - x) * (y - x) / two_var; };
  const detail::Window win = detail::locate_window(phi, x, params.sigma(), opt);
  const double c = win.center;
  const double w_max = win.max_phi;
  auto integrand = [&](double y) {
    double w = std::exp(phi(y) - w_max);
    if (std::isnan(w)) w = 0.0;
    const double u = y - c;
    return std::array<double, 3>{w, u * w, u * u * w};
  };
  // Segments end at the window edges, the grid maximiser and any declared kink.
  std::vector<double> cuts{win.lo, c, win.hi};
  for (double b : f.breakpoints)
    if (b > win.lo && b < win.hi) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::array<double, 3> m{};
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const auto part = detail::kronrod_adaptive<3>(integrand, cuts[s], cuts[s + 1], opt);
    for (std::size_t j = 0; j < 3; ++j) m[j] += part[j];
  }
  if (!(m[0] > 0.0)) throw DegenerateWeights();
  GibbsMoments1d out;
  const double shift = m[1] / m[0];
  out.mean = c + shift;
  out.log_mean_weight = w_max + std::log(m[0]) - 0.5 * std::log(2.0 * std::numbers::pi * params.variance());
  out.window_lo = win.lo;
  out.window_hi = win.hi;
  if (with_variance) out.variance = std::max(0.0, m[2] / m[0] - shift * shift);
  return out;
}

inline EnvelopeValue envelope_quadrature_1d(const ObjectiveSpec& f, double x, const GibbsProxParams& params,
                                            const QuadratureOptions& opt = {}) {
  const GibbsMoments1d m = gibbs_moments_1d(f, x, params, false, opt);
  EnvelopeValue out;
  out.zprox = make_point({m.mean});
  out.gradient = make_point({(x - m.mean) / params.lambda()});
  out.value = -params.delta() * m.log_mean_weight;
  out.method = OracleMethod::Quadrature;
  return out;
}

struct PosteriorCovariance1d {
  double sigma2;       // variance of the Gibbs posterior
  double hessian_env;  // 1/lambda - sigma2 / (lambda^2 delta)
};

inline PosteriorCovariance1d covariance_quadrature_1d(const ObjectiveSpec& f, double x,
                                                      const GibbsProxParams& params,
                                                      const QuadratureOptions& opt = {}) {
  const GibbsMoments1d m = gibbs_moments_1d(f, x, params, true, opt);
  const double lambda = params.lambda();
  const double s2 = *m.variance;
  return {s2, 1.0 / lambda - s2 / (lambda * lambda * params.delta())};
}

// ---------------------------------------------------------------------------

/// Picks the exact evaluation route for an objective: closed form when the
/// structure is Quadratic or AbsValue, quadrature for any other 1-D objective.
class ExactOracle {
 public:
  ExactOracle(ObjectiveSpec f, GibbsProxParams params, QuadratureOptions opt = {})
      : f_(std::move(f)), params_(params), opt_(opt) {
    if (!available(f_))
      throw NoOracle("no exact oracle for '" + f_.name + "': needs a quadratic/|x| structure or dim = 1");
  }

  static bool available(const ObjectiveSpec& f) {
    return f.as<structure::Quadratic>() != nullptr || f.as<structure::AbsValue>() != nullptr || f.dim == 1;
  }

  EnvelopeValue evaluate(const Point& x) const {
    if (const auto* q = f_.as<structure::Quadratic>()) return envelope_quadratic(q->C, q->mu, x, params_);
    if (f_.as<structure::AbsValue>() != nullptr) return envelope_abs(x[0], params_);
    return envelope_quadrature_1d(f_, x[0], params_, opt_);
  }

  Point zprox(const Point& x) const { return evaluate(x).zprox; }
  double zprox(double x) const { return evaluate(make_point({x})).zprox[0]; }

  OracleMethod method() const {
    if (f_.as<structure::Quadratic>() != nullptr) return OracleMethod::ClosedQuadratic;
    if (f_.as<structure::AbsValue>() != nullptr) return OracleMethod::ClosedAbs;
    return OracleMethod::Quadrature;
  }

  const ObjectiveSpec& objective() const { return f_; }
  const GibbsProxParams& params() const { return params_; }
  const QuadratureOptions& quadrature_options() const { return opt_; }

 private:
  ObjectiveSpec f_;
  GibbsProxParams params_;
  QuadratureOptions opt_;
};

/// Minimiser and minimum of the envelope when they are known in closed form
/// (quadratic: mu; |x|: 0 by symmetry and convexity).
struct EnvelopeMinimum {
  Point point;
  double value;
};

inline std::optional<EnvelopeMinimum> envelope_minimum(const ObjectiveSpec& f, const GibbsProxParams& params) {
  if (const auto* q = f.as<structure::Quadratic>()) {
    return EnvelopeMinimum{q->mu, envelope_quadratic(q->C, q->mu, q->mu, params).value};
  }
  if (f.as<structure::AbsValue>() != nullptr) {
    return EnvelopeMinimum{make_point({0.0}), envelope_abs(0.0, params).value};
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

struct Interval {
  double lo;
  double hi;
};

/// Preimage of z under the (increasing, bijective) 1-D zprox map. The bracket
/// is widened geometrically until it straddles z; TOMS 748 (bracketing with
/// secant/inverse-cubic steps) then refines it to |zprox(x) - z| <= 1e-10.
inline double zprox_inverse_1d(const ExactOracle& oracle, double z, Interval bracket = {-1.0, 1.0}) {
  if (oracle.objective().dim != 1) throw InvalidInput("zprox_inverse_1d requires dim = 1");
  auto g = [&](double x) { return oracle.zprox(x) - z; };
  double a = std::min(bracket.lo, bracket.hi);
  double b = std::max(bracket.lo, bracket.hi);
  if (a == b) {
    a -= 0.5;
    b += 0.5;
  }
  double ga = g(a);
  double gb = g(b);
  while (ga > 0.0 || gb < 0.0) {
    const double width = b - a;
    if (width > 1e6) throw BracketFailure("zprox_inverse_1d: bracket exceeded width 1e6");
    if (ga > 0.0) {
      b = a;
      gb = ga;
      a -= width;
      ga = g(a);
    } else {
      a = b;
      ga = gb;
      b += width;
      gb = g(b);
    }
  }
  if (ga == 0.0) return a;
  if (gb == 0.0) return b;
  std::uintmax_t max_iter = 200;
  const auto root = boost::math::tools::toms748_solve(g, a, b, ga, gb, boost::math::tools::eps_tolerance<double>(52),
                                                      max_iter);
  const double r1 = root.first;
  const double r2 = root.second;
  const double e1 = std::abs(g(r1));
  const double e2 = std::abs(g(r2));
  const double best = e1 <= e2 ? r1 : r2;
  if (std::min(e1, e2) > 1e-10) throw BracketFailure("zprox_inverse_1d: residual above 1e-10 after refinement");
  return best;
}

inline double zprox_inverse_1d(const ObjectiveSpec& f, double z, const GibbsProxParams& params,
                               Interval bracket = {-1.0, 1.0}) {
  return zprox_inverse_1d(ExactOracle(f, params), z, bracket);
}

/// H(x) = -|T^{-1}(x) - x|^2 / (2 lambda delta) + env(T^{-1}(x)) / delta with
/// T = zprox; zprox is the proximal map of lambda*delta*H.
inline double h_eval_1d(const ExactOracle& oracle, double x) {
  const GibbsProxParams& p = oracle.params();
  const double pre = zprox_inverse_1d(oracle, x, {x - 1.0, x + 1.0});
  const double env = oracle.evaluate(make_point({pre})).value;
  return -(pre - x) * (pre - x) / (2.0 * p.variance()) + env / p.delta();
}

inline double h_eval_1d(const ObjectiveSpec& f, double x, const GibbsProxParams& params) {
  return h_eval_1d(ExactOracle(f, params), x);
}

// ---------------------------------------------------------------------------

/// Leading-order bias and variance constants of the self-normalised estimator
/// for a quadratic objective: E[est] = zprox + c1/N, E|est - zprox|^2 = c2/N.
struct QuadraticSamplingConstants {
  Point c1;
  double c2;
  double phi;
};

inline QuadraticSamplingConstants c1_c2_quadratic(double C, const Point& mu, const Point& x,
                                                  const GibbsProxParams& params) {
  if (!(C > 0.0)) throw InvalidInput("c1_c2_quadratic: C must be positive");
  const double lambda = params.lambda();
  const double delta = params.delta();
  const double d = static_cast<double>(x.size());
  const double dist2 = (x - mu).squaredNorm();
  const double a = 2.0 * lambda + C;
  const double b = lambda + C;
  const double phi = std::pow(b / std::sqrt(C * a), d) * std::exp(lambda * dist2 / (delta * a * b));
  QuadraticSamplingConstants out;
  out.phi = phi;
  out.c1 = lambda * (x - mu) / (a * b) * phi;
  out.c2 = (lambda * lambda * C * C * dist2 / (a * a * b * b) + d * lambda * delta * C / a) * phi;
  return out;
}

}  // namespace zopo
