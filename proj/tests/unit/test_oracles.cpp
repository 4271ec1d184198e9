#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "zopo/bench.hpp"
#include "zopo/oracles.hpp"

namespace {

using namespace zopo;

ObjectiveSpec zero_1d() { return objectives::constant(1, 0.0); }

TEST(ZproxQuadratic, ClosedForm) {
  const Point mu = make_point({0.0});
  EXPECT_EQ(zprox_quadratic(1.0, mu, make_point({2.0}), GibbsProxParams(1.0, 0.3))[0], 1.0);
  EXPECT_EQ(zprox_quadratic(1.0, mu, make_point({4.0}), GibbsProxParams(3.0, 7.0))[0], 1.0);
  const Point m2 = make_point({1.5, -2.0});
  EXPECT_EQ(zprox_quadratic(2.0, m2, m2, GibbsProxParams(0.4, 1.0)), m2);
}

TEST(EnvelopeQuadratic, ValueFormulaAndGradientIdentity) {
  const Point mu = make_point({1.0, -1.0});
  const Point x = make_point({0.5, 2.0});
  const GibbsProxParams p(0.7, 1.3);
  const auto e = envelope_quadratic(2.0, mu, x, p);
  EXPECT_NEAR(e.value, 0.5 * 1.3 * 2.0 * std::log(2.7 / 2.0) + (x - mu).squaredNorm() / (2.0 * 2.7), 1e-15);
  EXPECT_LT(((x - e.zprox) / 0.7 - e.gradient).norm(), 1e-12 * (1 + e.gradient.norm()));
  EXPECT_EQ(e.method, OracleMethod::ClosedQuadratic);
}

TEST(ZproxAbs, HighPrecisionReferences) {
  EXPECT_NEAR(zprox_abs(2.0, GibbsProxParams(1, 1)), 1.161088907843145517, 2e-15);
  EXPECT_NEAR(zprox_abs(0.3, GibbsProxParams(2, 0.05)), 0.013639286370241535785, 1e-15);
  EXPECT_NEAR(zprox_abs(-4.0, GibbsProxParams(0.1, 1e-3)), -3.8999999999999999944, 1e-15);
  EXPECT_NEAR(zprox_abs(5.0, GibbsProxParams(10, 1e-3)), 0.0013319730516642135127, 1e-15);
  EXPECT_EQ(zprox_abs(0.0, GibbsProxParams(1, 1)), 0.0);
}

TEST(ZproxAbs, LowTemperatureRecoversClassicalProx) {
  EXPECT_NEAR(zprox_abs(2.0, GibbsProxParams(1, 1e-6)), 1.0, 1e-3);
  for (double d : {1e-8, 1e-7, 1e-6})
    for (double x : {-30.0, -2.0, 0.5, 3.0, 40.0}) EXPECT_TRUE(std::isfinite(zprox_abs(x, GibbsProxParams(1, d))));
}

TEST(ZproxAbs, OddInX) {
  for (double x : {0.1, 0.9, 2.5, 7.0})
    for (double d : {1e-3, 0.2, 5.0}) {
      const GibbsProxParams p(0.8, d);
      EXPECT_NEAR(zprox_abs(-x, p), -zprox_abs(x, p), 1e-15 * (1 + x));
    }
}

TEST(EnvelopeAbs, ValueMatchesQuadratureReference) {
  EXPECT_NEAR(envelope_abs(2.0, GibbsProxParams(1, 1)).value, 1.5887801971621578, 1e-13);
}

TEST(Quadrature, QuadraticExamples) {
  const auto f = objectives::quadratic(1.0, make_point({0.0}));
  const auto e = envelope_quadrature_1d(f, 0.0, GibbsProxParams(1, 1));
  EXPECT_NEAR(e.value, 0.5 * std::log(2.0), 1e-13);
  EXPECT_NEAR(e.zprox[0], 0.0, 1e-14);
  for (double x : {-3.0, 0.4, 2.0}) {
    const GibbsProxParams p(0.6, 1.7);
    const auto q = envelope_quadrature_1d(f, x, p);
    const auto c = envelope_quadratic(1.0, make_point({0.0}), make_point({x}), p);
    EXPECT_NEAR(q.value, c.value, 1e-12);
    EXPECT_NEAR(q.zprox[0], c.zprox[0], 1e-12);
  }
}

TEST(Quadrature, ZeroObjective) {
  const auto e = envelope_quadrature_1d(zero_1d(), 1.7, GibbsProxParams(0.5, 2.0));
  EXPECT_NEAR(e.value, 0.0, 1e-13);
  EXPECT_NEAR(e.gradient[0], 0.0, 1e-13);
  EXPECT_NEAR(e.zprox[0], 1.7, 1e-13);
  const auto c = covariance_quadrature_1d(zero_1d(), 1.7, GibbsProxParams(0.5, 2.0));
  EXPECT_NEAR(c.sigma2, 1.0, 1e-12);
  EXPECT_NEAR(c.hessian_env, 0.0, 1e-12);
}

TEST(Quadrature, AbsAgreesWithClosedForm) {
  const auto f = objectives::abs_value();
  const GibbsProxParams p(1, 1);
  EXPECT_NEAR(envelope_quadrature_1d(f, 2.0, p).zprox[0], zprox_abs(2.0, p), 1e-8);
  double worst = 0.0;
  for (double x : {-5.0, -1.1, -0.01, 0.0, 0.3, 2.0, 4.9})
    for (double lam : {0.1, 1.0, 10.0})
      for (double d : {1e-3, 0.05, 1.0, 10.0}) {
        const GibbsProxParams q(lam, d);
        worst = std::max(worst, std::abs(envelope_quadrature_1d(f, x, q).zprox[0] - zprox_abs(x, q)));
        const auto a = envelope_abs(x, q);
        const auto b = envelope_quadrature_1d(f, x, q);
        EXPECT_NEAR(a.value, b.value, 1e-9 * (1 + std::abs(a.value)));
      }
  EXPECT_LT(worst, 1e-8);
}

TEST(Quadrature, WigglyReferences) {
  const auto f = objectives::wiggly1d();
  const GibbsProxParams p(1, 1);
  const struct {
    double x, hess, value, zprox;
  } ref[] = {{-2.0, 0.3387439559188107, 0.6933248499018358, -1.2542737901667629},
             {0.0, 0.3751823632487623, -0.06245525573367261, -0.015038864945756701},
             {1.3, 0.3793317903486718, 0.25375513966215835, 0.8274387556365504}};
  for (const auto& r : ref) {
    const auto e = envelope_quadrature_1d(f, r.x, p);
    EXPECT_NEAR(e.value, r.value, 1e-11);
    EXPECT_NEAR(e.zprox[0], r.zprox, 1e-11);
    EXPECT_NEAR(covariance_quadrature_1d(f, r.x, p).hessian_env, r.hess, 1e-10);
  }
}

TEST(Quadrature, GradientMatchesFiniteDifferences) {
  const GibbsProxParams p(0.7, 0.9);
  for (const auto& f : {objectives::wiggly1d(), objectives::levy(1), objectives::rastrigin(1)}) {
    for (double x : {-1.3, 0.2, 2.1}) {
      const double h = 1e-5;
      const double fd = (envelope_quadrature_1d(f, x + h, p).value - envelope_quadrature_1d(f, x - h, p).value) / (2 * h);
      EXPECT_NEAR(envelope_quadrature_1d(f, x, p).gradient[0], fd, 1e-6) << f.name << " " << x;
    }
  }
}

TEST(Quadrature, HessianIdentityAgainstFiniteDifferences) {
  const auto f = objectives::abs_value();
  const GibbsProxParams p(1, 1);
  const double h = 1e-4;
  const double fd =
      (envelope_quadrature_1d(f, 2 + h, p).gradient[0] - envelope_quadrature_1d(f, 2 - h, p).gradient[0]) / (2 * h);
  EXPECT_NEAR(covariance_quadrature_1d(f, 2.0, p).hessian_env, fd, 1e-5);
}

TEST(Quadrature, QuadraticPosteriorVariance) {
  const double C = 2.0;
  const auto f = objectives::quadratic(C, make_point({0.5}));
  const GibbsProxParams p(0.3, 1.5);
  for (double x : {-1.0, 0.5, 3.0}) {
    const auto c = covariance_quadrature_1d(f, x, p);
    EXPECT_NEAR(c.sigma2, 1.5 * C * 0.3 / (C + 0.3), 1e-12);
    EXPECT_NEAR(c.hessian_env, 1.0 / (C + 0.3), 1e-11);
  }
}

TEST(Quadrature, HessianNeverExceedsInverseLambda) {
  const auto f = objectives::wiggly1d();
  for (double lam : {0.01, 1.0, 35.0})
    for (double x = -5; x <= 5; x += 0.37)
      EXPECT_LE(covariance_quadrature_1d(f, x, GibbsProxParams(lam, 1)).hessian_env, 1.0 / lam + 1e-12);
}

TEST(Quadrature, FirmNonexpansivenessOnConvexObjectives) {
  for (const auto& f : {objectives::abs_value(), objectives::quadratic(0.5, make_point({1.0}))}) {
    const ExactOracle o(f, GibbsProxParams(0.9, 0.4));
    for (double a = -4; a < 4; a += 0.7)
      for (double b = a + 0.05; b < 4.5; b += 1.1) {
        const double za = o.zprox(a), zb = o.zprox(b);
        EXPECT_GE((zb - za) * (b - a), 0.0);
        EXPECT_LE(std::abs(zb - za), std::abs(b - a) + 1e-12);
      }
  }
}

TEST(Quadrature, NotConvergedIsReported) {
  QuadratureOptions opt;
  opt.max_depth = 1;
  opt.initial_pieces = 1;
  opt.accept_rel_error = 1e-15;
  const auto f = objectives::wiggly1d();
  EXPECT_THROW(envelope_quadrature_1d(f, 0.0, GibbsProxParams(100, 1), opt), QuadratureNotConverged);
}

TEST(ExactOracle, RoutesByStructure) {
  const GibbsProxParams p(1, 1);
  EXPECT_EQ(ExactOracle(objectives::abs_value(), p).method(), OracleMethod::ClosedAbs);
  EXPECT_EQ(ExactOracle(objectives::quadratic(1, Point::Zero(3)), p).method(), OracleMethod::ClosedQuadratic);
  EXPECT_EQ(ExactOracle(objectives::wiggly1d(), p).method(), OracleMethod::Quadrature);
  EXPECT_THROW(ExactOracle(objectives::rastrigin(2), p), NoOracle);
}

TEST(Inverse, QuadraticClosedForm) {
  const auto f = objectives::quadratic(1.0, make_point({0.0}));
  EXPECT_NEAR(zprox_inverse_1d(f, 1.0, GibbsProxParams(1, 1)), 2.0, 1e-9);
}

TEST(Inverse, AbsRoundTripAndFixedPoint) {
  const auto f = objectives::abs_value();
  const GibbsProxParams p(1, 1);
  EXPECT_NEAR(zprox_inverse_1d(f, zprox_abs(2.0, p), p), 2.0, 1e-8);
  EXPECT_NEAR(zprox_inverse_1d(f, 0.0, p), 0.0, 1e-10);
  const auto w = objectives::wiggly1d();
  const double xs = -0.039885201387633844;
  EXPECT_NEAR(zprox_inverse_1d(w, xs, p, {-3.0, 3.0}), xs, 1e-8);
}

TEST(Inverse, WidensBracket) {
  const auto f = objectives::quadratic(1.0, make_point({0.0}));
  EXPECT_NEAR(zprox_inverse_1d(f, 50.0, GibbsProxParams(1, 1), {-0.1, 0.1}), 100.0, 1e-8);
}

TEST(HFunction, FixedPointAndQuadratic) {
  const auto q = objectives::quadratic(1.0, make_point({0.0}));
  EXPECT_NEAR(h_eval_1d(q, 0.0, GibbsProxParams(1, 1)), 0.5 * std::log(2.0), 1e-10);
  const auto w = objectives::wiggly1d();
  const double xs = -0.039885201387633844;
  EXPECT_NEAR(h_eval_1d(w, xs, GibbsProxParams(1, 1)), -0.062755665472215, 1e-8);
}

TEST(HFunction, DescentAlongAbsIterates) {
  const auto f = objectives::abs_value();
  const GibbsProxParams p(1, 1);
  const ExactOracle o(f, p);
  double x = 3.0;
  for (int k = 0; k < 10; ++k) {
    const double xn = o.zprox(x);
    EXPECT_LE(h_eval_1d(o, xn), h_eval_1d(o, x) - (xn - x) * (xn - x) / (2 * p.variance()) + 1e-8) << k;
    x = xn;
  }
}

TEST(C1C2, Examples) {
  const GibbsProxParams p(0.5, 1.0);
  const auto a = c1_c2_quadratic(1.0, Point::Zero(2), Point::Zero(2), p);
  EXPECT_EQ(a.c1.norm(), 0.0);
  EXPECT_NEAR(a.c2, 0.5625, 1e-15);
  const auto b = c1_c2_quadratic(1.0, make_point({0.0}), make_point({1.0}), p);
  EXPECT_NEAR(b.phi, 1.2530219384439565, 1e-15);
  EXPECT_NEAR(b.c1[0], 0.2088369897406594, 1e-15);
  EXPECT_NEAR(b.c2, 0.3480616495677657, 1e-15);
}

TEST(EnvelopeMinimum, ClosedForms) {
  const GibbsProxParams p(1, 1);
  const auto m = envelope_minimum(objectives::abs_value(), p);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->point[0], 0.0);
  EXPECT_FALSE(envelope_minimum(objectives::wiggly1d(), p));
}

}  // namespace
