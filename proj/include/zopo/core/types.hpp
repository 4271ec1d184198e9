#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "zopo/core/error.hpp"

namespace zopo {

using Point = Eigen::VectorXd;

/// Stepsize / temperature pair. The Gaussian proposal has covariance
/// variance() * I with variance() == lambda * delta exactly.
class GibbsProxParams {
 public:
  GibbsProxParams(double lambda, double delta) : lambda_(lambda), delta_(delta), variance_(lambda * delta) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidInput("lambda must be a positive finite number");
    if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidInput("delta must be a positive finite number");
    sigma_ = std::sqrt(variance_);
  }

  double lambda() const { return lambda_; }
  double delta() const { return delta_; }
  double variance() const { return variance_; }
  double sigma() const { return sigma_; }

  GibbsProxParams with_lambda(double lambda) const { return {lambda, delta_}; }

 private:
  double lambda_;
  double delta_;
  double variance_;
  double sigma_;
};

namespace structure {

/// f(y) = |y - mu|^2 / (2 C)
struct Quadratic {
  double C;
  Point mu;
};

/// f(y) = |y|, one-dimensional.
struct AbsValue {};

/// f(y) = kappa/2 |y|^2 + V(y) with sup V - inf V <= osc_V.
struct KappaPlusBounded {
  double kappa;
  double osc_V;
};

struct Generic {
  std::optional<double> L;  // smoothness
  std::optional<double> G;  // Lipschitz
  std::optional<double> m;  // dissipativity <grad f(y), y> >= m|y|^2 - b
  std::optional<double> b;
};

}  // namespace structure

using Structure =
    std::variant<structure::Generic, structure::Quadratic, structure::AbsValue, structure::KappaPlusBounded>;

using EvalFn = std::function<double(std::span<const double>)>;

/// A black-box objective on R^dim plus whatever structure is known about it.
struct ObjectiveSpec {
  std::string name;
  std::size_t dim = 1;
  EvalFn eval;
  std::optional<double> lower_bound;
  Structure structure = structure::Generic{};
  std::vector<double> breakpoints;  // 1-D only: where f is not smooth, used by quadrature

  double operator()(std::span<const double> y) const { return eval(y); }
  double operator()(const Point& y) const { return eval(std::span<const double>(y.data(), std::size_t(y.size()))); }
  double at(double y) const { return eval(std::span<const double>(&y, 1)); }

  template <class S>
  const S* as() const {
    return std::get_if<S>(&structure);
  }
};

inline Point make_point(std::initializer_list<double> values) {
  Point p(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) p[i++] = v;
  return p;
}

inline Point constant_point(std::size_t dim, double value) {
  return Point::Constant(static_cast<Eigen::Index>(dim), value);
}

}  // namespace zopo
