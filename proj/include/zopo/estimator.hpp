#pragma once

// Self-normalised Monte Carlo estimate of the Gibbs-weighted proximal
// operator, plus effective-sample-size diagnostics.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "zopo/core/error.hpp"
#include "zopo/core/numerics.hpp"
#include "zopo/core/parallel.hpp"
#include "zopo/core/random.hpp"
#include "zopo/core/types.hpp"

namespace zopo {

struct ZoproxEstimate {
  Point point;
  double ess = 0.0;
  std::size_t n_samples = 0;
  double log_mean_weight = 0.0;  // log((1/N) sum exp(-f(y_i)/delta))
  double max_weight_share = 0.0;
  Point argmin_sample;
  double min_f = std::numeric_limits<double>::infinity();
};

/// Streaming accumulator for log-weights. Sums are kept relative to the
/// running maximum log-weight, so nothing overflows or underflows to a 0/0.
class WeightAccumulator {
 public:
  explicit WeightAccumulator(const Point& center)
      : center_(center), dim_(static_cast<std::size_t>(center.size())), s1_(dim_, 0.0), argmin_offset_(dim_, 0.0) {}

  // offset = y - center, dim() entries
  void add(const double* offset, double f_value, double delta) {
    ++n_;
    if (std::isnan(f_value)) throw InvalidInput("objective returned NaN");
    if (f_value < min_f_) {
      min_f_ = f_value;
      std::copy(offset, offset + dim_, argmin_offset_.begin());
    }
    const double lw = -f_value / delta;
    if (lw == -std::numeric_limits<double>::infinity()) return;
    if (lw > max_lw_) {
      if (s0_ > 0.0) {
        const double scale = std::exp(max_lw_ - lw);
        s0_ *= scale;
        for (double& v : s1_) v *= scale;
        s2_ *= scale * scale;
      }
      max_lw_ = lw;
    }
    const double w = std::exp(lw - max_lw_);
    s0_ += w;
    s2_ += w * w;
    for (std::size_t j = 0; j < dim_; ++j) s1_[j] += w * offset[j];
  }

  std::size_t dim() const { return dim_; }

  ZoproxEstimate finish() const {
    if (n_ == 0) throw InvalidInput("szopo: no samples");
    if (!(s0_ > 0.0)) throw DegenerateWeights();
    ZoproxEstimate out;
    out.point = center_;
    out.argmin_sample = center_;
    for (std::size_t j = 0; j < dim_; ++j) {
      out.point[static_cast<Eigen::Index>(j)] += s1_[j] / s0_;
      out.argmin_sample[static_cast<Eigen::Index>(j)] += argmin_offset_[j];
    }
    out.ess = s0_ * s0_ / s2_;
    out.n_samples = n_;
    out.log_mean_weight = max_lw_ + std::log(s0_) - std::log(static_cast<double>(n_));
    out.max_weight_share = 1.0 / s0_;
    out.min_f = min_f_;
    return out;
  }

 private:
  Point center_;
  std::size_t dim_;
  std::vector<double> s1_;
  double s0_ = 0.0;
  double s2_ = 0.0;
  double max_lw_ = -std::numeric_limits<double>::infinity();
  std::size_t n_ = 0;
  double min_f_ = std::numeric_limits<double>::infinity();
  std::vector<double> argmin_offset_;
};

/// S-ZOPO: y_i = x + sigma * eps_i with eps_i ~ N(0, I) drawn from `seed`,
/// weights exp(-f(y_i)/delta), weighted mean of the y_i. Samples are streamed,
/// so memory does not grow with n.
inline ZoproxEstimate szopo(const ObjectiveSpec& f, const Point& x, const GibbsProxParams& params, std::size_t n,
                            const SeedSpec& seed) {
  if (n == 0) throw InvalidInput("szopo: n must be positive");
  if (static_cast<std::size_t>(x.size()) != f.dim) throw InvalidInput("szopo: point dimension mismatch");
  RandomStream rng(seed);
  WeightAccumulator acc(x);
  const std::size_t d = acc.dim();
  const double sigma = params.sigma();
  std::vector<double> offset(d);
  std::vector<double> y(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      offset[j] = sigma * rng.normal();
      y[j] = x[static_cast<Eigen::Index>(j)] + offset[j];
    }
    acc.add(offset.data(), f(std::span<const double>(y)), params.delta());
  }
  return acc.finish();
}

/// Standard normal noise matrix (dim x n) for common-random-number studies.
inline Eigen::MatrixXd draw_noise(std::size_t dim, std::size_t n, const SeedSpec& seed) {
  RandomStream rng(seed);
  Eigen::MatrixXd eps(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < eps.cols(); ++i)
    for (Eigen::Index j = 0; j < eps.rows(); ++j) eps(j, i) = rng.normal();
  return eps;
}

/// S-ZOPO on caller-supplied standard noise: y_i = x + sigma * noise.col(i).
inline ZoproxEstimate szopo_with_noise(const ObjectiveSpec& f, const Point& x, const GibbsProxParams& params,
                                       const Eigen::MatrixXd& noise) {
  if (noise.rows() != x.size()) throw InvalidInput("szopo_with_noise: noise rows must equal dim");
  WeightAccumulator acc(x);
  const std::size_t d = acc.dim();
  std::vector<double> offset(d);
  std::vector<double> y(d);
  for (Eigen::Index i = 0; i < noise.cols(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      offset[j] = params.sigma() * noise(static_cast<Eigen::Index>(j), i);
      y[j] = x[static_cast<Eigen::Index>(j)] + offset[j];
    }
    acc.add(offset.data(), f(std::span<const double>(y)), params.delta());
  }
  return acc.finish();
}

/// (sum w)^2 / sum w^2 from log-weights, via two log-sum-exps.
inline double ess_of_weights(std::span<const double> log_weights) {
  if (log_weights.empty()) throw InvalidInput("ess_of_weights: empty input");
  const double m = *std::max_element(log_weights.begin(), log_weights.end());
  std::vector<double> shifted(log_weights.begin(), log_weights.end());
  if (std::isfinite(m))
    for (double& v : shifted) v -= m;
  std::vector<double> doubled = shifted;
  for (double& v : doubled) v *= 2.0;
  const double log_s1 = log_sum_exp(shifted).log_sum;
  const double log_s2 = log_sum_exp(doubled).log_sum;
  return std::exp(2.0 * log_s1 - log_s2);
}

struct TrialResult {
  Point point;
  double ess;
  double log_mean_weight;
};

struct BiasVarianceResult {
  Point mean_bias;   // mean(point) - reference
  double mse = 0.0;  // mean |point - reference|^2
  double mean_ess = 0.0;
  // Control-variate bias estimate mean[(point - reference) (1 - W_hat / W)],
  // where W_hat is the sample mean weight and W its exact expectation. Only
  // available when the exact log-normaliser is supplied. Same expectation as
  // mean_bias, with O(1/N) instead of O(1/sqrt(N)) per-trial spread.
  std::optional<Point> control_variate_bias;
  std::vector<TrialResult> per_trial;
};

/// Repeats szopo on streams derive_stream(seed, t) for t < trials and
/// aggregates against a reference point in trial order.
inline BiasVarianceResult bias_variance_study(const ObjectiveSpec& f, const Point& x, const GibbsProxParams& params,
                                              std::size_t n, std::size_t trials, const Point& reference,
                                              const SeedSpec& seed, std::size_t threads = 1,
                                              std::optional<double> exact_log_mean_weight = std::nullopt) {
  if (trials < 2) throw InvalidInput("bias_variance_study: trials must be >= 2");
  if (reference.size() != x.size()) throw InvalidInput("bias_variance_study: reference dimension mismatch");
  BiasVarianceResult out;
  out.per_trial.resize(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    const ZoproxEstimate est = szopo(f, x, params, n, derive_stream(seed, t));
    out.per_trial[t] = {est.point, est.ess, est.log_mean_weight};
  });
  out.mean_bias = Point::Zero(x.size());
  Point cv = Point::Zero(x.size());
  for (const TrialResult& r : out.per_trial) {
    const Point err = r.point - reference;
    out.mean_bias += err;
    out.mse += err.squaredNorm();
    out.mean_ess += r.ess;
    if (exact_log_mean_weight) cv += err * (1.0 - std::exp(r.log_mean_weight - *exact_log_mean_weight));
  }
  const double inv = 1.0 / static_cast<double>(trials);
  out.mean_bias *= inv;
  out.mse *= inv;
  out.mean_ess *= inv;
  if (exact_log_mean_weight) out.control_variate_bias = cv * inv;
  return out;
}

}  // namespace zopo
