#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "cblab/errors.hpp"
#include "cblab/holofun.hpp"

namespace cblab {
namespace {

HoloFunction geometric_half() { return moebius_quotient(identity_function(), 0.5); }

ComplexVector vec(std::vector<Complex> c) {
  ComplexVector v(static_cast<Eigen::Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) v(static_cast<Eigen::Index>(i)) = c[i];
  return v;
}

std::vector<HoloFunction> scalar_zoo() {
  return {identity_function(),
          monomial(3, Complex(0.0, 0.5)),
          power_series({0.5, Complex(0.1, 0.2), -0.3}),
          blaschke(1.0, 1, {0.5}),
          blaschke(Complex(0.0, 1.0), 2, {Complex(0.2, -0.4), -0.6}),
          geometric_half(),
          moebius_quotient(monomial(2), Complex(0.0, 0.7)),
          product(identity_function(), geometric_half()),
          sum(monomial(2), scale(0.3, blaschke(1.0, 1, {0.1}))),
          scale(Complex(0.0, -2.0), geometric_half())};
}

TEST(Evaluate, Examples) {
  EXPECT_NEAR(std::abs(evaluate(power_series({0.5}), 0.4) - Complex(0.2)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(evaluate(blaschke(1.0, 1, {0.5}), 0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(evaluate(geometric_half(), 0.5) - Complex(0.5 / 0.75)), 0.0, 1e-15);
}

TEST(Evaluate, VanishesAtZero) {
  for (const auto& f : scalar_zoo()) EXPECT_EQ(evaluate(f, 0.0), Complex(0.0)) << describe(f);
}

TEST(Evaluate, BoundaryIsDomainError) {
  EXPECT_THROW((void)evaluate(identity_function(), 1.0), DomainError);
  EXPECT_THROW((void)evaluate(geometric_half(), Complex(0.0, -1.2)), DomainError);
}

TEST(Evaluate, BlaschkeIsUnimodularNearCircle) {
  const auto f = blaschke(Complex(0.0, 1.0), 2, {Complex(0.2, -0.4), -0.6});
  EXPECT_NEAR(std::abs(evaluate(f, std::polar(1.0 - 1e-12, 0.7))), 1.0, 1e-9);
}

TEST(Constructors, Validation) {
  EXPECT_THROW((void)blaschke(2.0, 1, {}), InvalidInput);
  EXPECT_THROW((void)blaschke(1.0, 0, {0.5}), InvalidInput);
  EXPECT_THROW((void)blaschke(1.0, 1, {1.0}), InvalidInput);
  EXPECT_THROW((void)moebius_quotient(identity_function(), 1.0), InvalidInput);
  EXPECT_THROW((void)power_series({}), InvalidInput);
}

TEST(Constructors, NestedScalesCollapse) {
  const auto f = scale(2.0, scale(3.0, identity_function()));
  const auto* s = std::get_if<holo::Scale>(&f.node().payload);
  ASSERT_NE(s, nullptr);
  EXPECT_EQ(s->c, Complex(6.0));
  EXPECT_FALSE(std::holds_alternative<holo::Scale>(s->inner.node().payload));
  const auto g = identity_function();
  EXPECT_EQ(scale(1.0, g).ptr(), g.ptr());
}

TEST(Constructors, UncertifiedFunctionalRejected) {
  // l1 norm of (0.6, 0.6) on MIN(l_inf^2) is 1.2
  EXPECT_THROW((void)geometric_phi(space_min_linf(2), vec({0.6, 0.6}), 0.6), ConfigurationError);
  EXPECT_THROW((void)geometric_phi(space_min_linf(2), vec({0.2, 0.2}), 1.0), ConfigurationError);
  EXPECT_THROW((void)composite(monomial(2), space_row(2), vec({0.6, 0.6}), 0.5), ConfigurationError);
  EXPECT_NO_THROW((void)composite(monomial(2), space_row(2), vec({0.3, 0.4}), 0.5));
}

TEST(Amplify, IdentityReturnsInput) {
  const ComplexMatrix x = sample_ball(3, 0.8, RngSeed{1});
  EXPECT_EQ(amplify(power_series({1.0}), x), x);
}

TEST(Amplify, DiagonalSquares) {
  ComplexMatrix x = ComplexMatrix::Zero(2, 2);
  x(0, 0) = 0.5;
  x(1, 1) = 0.3;
  const ComplexMatrix y = amplify(monomial(2), x);
  EXPECT_NEAR(std::abs(y(0, 0) - 0.25), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(y(1, 1) - 0.09), 0.0, 1e-15);
  EXPECT_EQ(y(0, 1), Complex(0.0));
}

TEST(Amplify, OnesSquared) {
  const ComplexMatrix x = ComplexMatrix::Constant(2, 2, 0.45);
  const ComplexMatrix y = amplify(monomial(2), x);
  // every entry is 0.45^2 and the all-c 2x2 matrix has norm 2c
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(y(i) - 0.2025), 0.0, 1e-15);
  EXPECT_NEAR(operator_norm(y), 0.405, 1e-14);
}

TEST(Amplify, OutsideBallIsDomainError) {
  EXPECT_THROW((void)amplify(monomial(2), ComplexMatrix::Identity(2, 2)), DomainError);
}

TEST(Amplify, CommutesWithDirectSum) {
  Rng rng = make_rng(RngSeed{2});
  for (const auto& f : scalar_zoo()) {
    const ComplexMatrix x = sample_ball(2, 0.6, rng);
    const ComplexMatrix y = sample_ball(3, 0.7, rng);
    EXPECT_EQ(amplify(f, direct_sum(x, y)), direct_sum(amplify(f, x), amplify(f, y))) << describe(f);
  }
}

TEST(Amplify, LevelOneMatchesEvaluate) {
  Rng rng = make_rng(RngSeed{3});
  for (const auto& f : scalar_zoo()) {
    for (int t = 0; t < 20; ++t) {
      const ComplexMatrix z = sample_ball(1, 0.05 + 0.9 * (t / 20.0), rng);
      EXPECT_NEAR(std::abs(amplify(f, z)(0, 0) - evaluate(f, z(0, 0))), 0.0, 1e-14) << describe(f);
    }
  }
}

TEST(Amplify, CompositeUsesFunctionalImage) {
  const auto s = space_row(2);
  const auto f = composite(monomial(2), s, vec({0.3, 0.4}), 0.5);
  Rng rng = make_rng(RngSeed{4});
  const auto x = sample_space_ball(s, 3, 0.9, rng);
  const auto& c = std::get<holo::Composite>(f.node().payload);
  const ComplexMatrix image = c.functional.apply(x);
  EXPECT_LE(operator_norm(image), 0.5 * 0.9 + 1e-12);
  EXPECT_LT((amplify(f, x) - image.cwiseProduct(image)).norm(), 1e-14);
}

TEST(Amplify, GeometricPhiMatchesFormula) {
  const auto s = space_min_linf(2);
  const auto f = geometric_phi(s, vec({0.25, 0.25}), 0.5);
  const OpSpaceElement x{s, vec({0.8, -0.2})};
  const Complex w = 0.25 * 0.8 - 0.25 * 0.2;
  EXPECT_NEAR(std::abs(evaluate(f, x) - w / (1.0 - w)), 0.0, 1e-15);
}

TEST(Taylor, PolynomialCopiedExactly) {
  const auto t = taylor_coefficients(power_series({0.0, 1.0}), 4);
  ASSERT_EQ(t.truncation(), 4);
  EXPECT_EQ(t.coeffs[0], Complex(0.0));
  EXPECT_EQ(t.coeffs[1], Complex(1.0));
  EXPECT_EQ(t.coeffs[2], Complex(0.0));
  ASSERT_TRUE(t.tail_bound.has_value());
  EXPECT_EQ(*t.tail_bound, 0.0);
}

TEST(Taylor, GeometricCoefficients) {
  const auto t = taylor_coefficients(geometric_half(), 30);
  for (int n = 1; n <= 30; ++n) EXPECT_NEAR(std::abs(t.coeffs[n - 1] - std::pow(0.5, n - 1)), 0.0, 1e-9) << n;
  ASSERT_TRUE(t.tail_bound.has_value());
  // true tail is sum_{n>30} 0.5^{n-1} = 2^-29
  EXPECT_GE(*t.tail_bound, std::pow(0.5, 29));
}

TEST(Taylor, BlaschkeDerivativeAtZero) {
  const auto t = taylor_coefficients(blaschke(1.0, 1, {0.5}), 8);
  EXPECT_NEAR(std::abs(t.coeffs[0] - Complex(-0.5)), 0.0, 1e-12);
  // z(z-1/2)/(1-z/2) = -z/2 + (3/4) z^2 + (3/8) z^3 + ...
  EXPECT_NEAR(std::abs(t.coeffs[1] - Complex(0.75)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(t.coeffs[2] - Complex(0.375)), 0.0, 1e-12);
}

TEST(Taylor, ProductIsCauchyConvolution) {
  const std::vector<HoloFunction> factors = {geometric_half(), blaschke(1.0, 1, {Complex(0.0, 0.3)}),
                                             power_series({1.0, -0.5, 0.25})};
  const int k = 24;
  for (const auto& f : factors) {
    for (const auto& g : factors) {
      const auto tf = taylor_coefficients(f, k);
      const auto tg = taylor_coefficients(g, k);
      const auto tp = taylor_coefficients(product(f, g), k);
      for (int n = 1; n <= k; ++n) {
        Complex conv = 0.0;
        for (int i = 1; i < n; ++i) conv += tf.coeffs[i - 1] * tg.coeffs[n - i - 1];
        EXPECT_NEAR(std::abs(tp.coeffs[n - 1] - conv), 0.0, 1e-8) << describe(f) << " * " << describe(g) << " n=" << n;
      }
    }
  }
}

TEST(Taylor, TailUnknownBelowUnitRadius) {
  // pole at 1/0.99: analytic radius barely above 1 still gives a tail; a
  // power series claiming radius 1 does not extend past the disk.
  EXPECT_TRUE(taylor_coefficients(moebius_quotient(identity_function(), 0.99), 8).tail_bound.has_value());
  EXPECT_DOUBLE_EQ(analytic_radius(geometric_half()), 2.0);
  EXPECT_TRUE(std::isinf(analytic_radius(monomial(3))));
}

TEST(Describe, Stable) {
  EXPECT_EQ(describe(geometric_half()), describe(moebius_quotient(identity_function(), 0.5)));
  EXPECT_NE(describe(geometric_half()), describe(moebius_quotient(identity_function(), 0.25)));
}

}  // namespace
}  // namespace cblab
