#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "cblab/cbnorm.hpp"
#include "cblab/errors.hpp"
#include "cblab/gcb.hpp"

namespace cblab {
namespace {

OpSpaceMatrix scalar(Complex c) { return OpSpaceMatrix::from_scalar(ComplexMatrix::Constant(1, 1, c)); }

ComplexVector vec(std::vector<Complex> c) {
  ComplexVector v(static_cast<Eigen::Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) v(static_cast<Eigen::Index>(i)) = c[i];
  return v;
}

// Prop-5.3 style cost of one group, evaluated straight from the formula.
double group_cost(const std::vector<GcbTerm>& terms) {
  const Eigen::Index n = terms.front().alpha.rows();
  ComplexMatrix aa = ComplexMatrix::Zero(n, n);
  ComplexMatrix bb = ComplexMatrix::Zero(n, n);
  double m = 0.0;
  for (const auto& t : terms) {
    aa += t.alpha * t.alpha.adjoint();
    bb += t.beta.adjoint() * t.beta;
    m = std::max(m, std::abs(t.c) * matrix_norm(t.point));
  }
  return std::sqrt(operator_norm(aa)) * std::sqrt(operator_norm(bb)) * m;
}

GcbElement two_term_element(std::uint64_t seed) {
  Rng rng = make_rng(RngSeed{seed});
  const auto s = space_row(2);
  GcbElement u{s, 2, {}};
  u.terms.push_back({Complex(0.5, 0.2), gaussian_matrix(2, 1, rng), sample_space_ball(s, 1, 0.6, rng),
                     gaussian_matrix(1, 2, rng)});
  u.terms.push_back({Complex(-0.3, 0.0), gaussian_matrix(2, 2, rng), sample_space_ball(s, 2, 0.8, rng),
                     gaussian_matrix(2, 2, rng)});
  return u;
}

TEST(Validate, PointMustBeInside) {
  EXPECT_THROW((void)delta_element(scalar(1.0 - 1e-10)), InvalidInput);
  GcbElement u = delta_element(scalar(0.5));
  EXPECT_NO_THROW(validate_gcb(u));
  u.terms[0].alpha = ComplexMatrix::Identity(2, 2);
  EXPECT_THROW(validate_gcb(u), InvalidInput);
}

TEST(Cost, TrivialRepresentationIsNorm) {
  Rng rng = make_rng(RngSeed{1});
  for (const auto& s : {space_scalar(), space_Mk(2), space_column(3)}) {
    const auto x = sample_space_ball(s, 2, 0.7, rng);
    EXPECT_EQ(representation_cost(delta_element(x), {0}), matrix_norm(x));
  }
}

TEST(Cost, HomogeneousInCoefficient) {
  auto u = delta_element(scalar(0.4));
  const double base = representation_cost(u, {0});
  u.terms[0].c = 2.0;
  EXPECT_DOUBLE_EQ(representation_cost(u, {0}), 2.0 * base);
}

TEST(Cost, GroupingsMatchFormula) {
  const auto u = two_term_element(2);
  EXPECT_NEAR(representation_cost(u, {0, 1}), group_cost({u.terms[0]}) + group_cost({u.terms[1]}), 1e-13);
  EXPECT_NEAR(representation_cost(u, {0, 0}), group_cost(u.terms), 1e-13);
  EXPECT_NEAR(representation_cost(u, {1, 0}), representation_cost(u, {0, 1}), 1e-13);
  EXPECT_THROW((void)representation_cost(u, {0}), InvalidInput);
}

TEST(UpperBound, Examples) {
  Rng rng = make_rng(RngSeed{3});
  const auto x = sample_space_ball(space_Mk(2), 2, 0.6, rng);
  EXPECT_LE(gcb_upper_bound(delta_element(x), 1000, RngSeed{4}).value, 0.6 + 1e-12);
  const GcbElement empty{space_row(2), 2, {}};
  EXPECT_EQ(gcb_upper_bound(empty, 1000, RngSeed{5}).value, 0.0);
}

TEST(UpperBound, NeverAboveAnyGroupingCost) {
  const auto u = two_term_element(6);
  const auto r = gcb_upper_bound(u, 100000, RngSeed{7});
  EXPECT_LE(r.value, representation_cost(u, {0, 0}) + 1e-12);
  EXPECT_LE(r.value, representation_cost(u, {0, 1}) + 1e-12);
  EXPECT_GT(r.evaluations, 0);
}

TEST(UpperBound, DuplicateTermPinnedByNormingFunctional) {
  Rng rng = make_rng(RngSeed{8});
  const auto s = space_row(2);
  const auto x = sample_space_ball(s, 1, 0.45, rng);
  GcbElement u = delta_element(x);
  u.terms.push_back(u.terms.front());
  const double upper = gcb_upper_bound(u, 100000, RngSeed{9}).value;
  const double lower = gcb_lower_bound(u, {norming_functional_entry({s, x.entry(0, 0)})}).value;
  EXPECT_NEAR(lower, 0.9, 1e-12);
  EXPECT_LE(upper, 0.9 + 1e-12);
  EXPECT_GE(upper, 0.9 - 1e-9);
}

TEST(Pairing, TrivialDeltaAgainstFunctional) {
  Rng rng = make_rng(RngSeed{10});
  const auto s = space_min_linf(2);
  const auto x = sample_space_ball(s, 3, 0.8, rng);
  const ComplexVector phi = vec({0.25, Complex(0.0, 0.25)});
  const DictionaryEntry e{"phi", ScalarEntry{composite(identity_function(), s, phi, 0.5), 0.5}};
  const CertifiedFunctional f{s, phi, 0.5};
  EXPECT_LT((gcb_pairing(delta_element(x), e) - f.apply(x)).norm(), 1e-15);
}

TEST(Pairing, EmptyElementIsZero) {
  const GcbElement empty{space_scalar(), 2, {}};
  const DictionaryEntry e{"z2", ScalarEntry{monomial(2), 1.0}};
  EXPECT_EQ(gcb_pairing(empty, e), ComplexMatrix::Zero(2, 2));
}

TEST(Pairing, TwoTermsAgainstSquareByHand) {
  Rng rng = make_rng(RngSeed{11});
  GcbElement u{space_scalar(), 2, {}};
  for (int t = 0; t < 2; ++t)
    u.terms.push_back({complex_gaussian(rng), gaussian_matrix(2, 1 + t, rng),
                       OpSpaceMatrix::from_scalar(sample_ball(1 + t, 0.7, rng)), gaussian_matrix(1 + t, 2, rng)});
  ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
  for (const auto& t : u.terms) {
    const ComplexMatrix x = t.point.as_scalar();
    expected += t.c * t.alpha * x.cwiseProduct(x) * t.beta;
  }
  const DictionaryEntry e{"z2", ScalarEntry{monomial(2), 1.0}};
  EXPECT_LT((gcb_pairing(u, e) - expected).norm(), 1e-14);
}

TEST(Pairing, LinearInElementAndScaleOfFunction) {
  const auto u = two_term_element(12);
  const auto s = u.space;
  const ComplexVector phi = vec({0.3, 0.4});
  const auto f = composite(monomial(2), s, phi, 0.5);
  const DictionaryEntry e{"f", ScalarEntry{f, 1.0}};
  const DictionaryEntry e3{"3f", ScalarEntry{scale(3.0, f), 3.0}};
  EXPECT_LT((gcb_pairing(u, e3) - 3.0 * gcb_pairing(u, e)).norm(), 1e-13);
  GcbElement doubled = u;
  for (auto& t : doubled.terms) t.c *= Complex(0.0, 2.0);
  EXPECT_LT((gcb_pairing(doubled, e) - Complex(0.0, 2.0) * gcb_pairing(u, e)).norm(), 1e-13);
  GcbElement first{s, 2, {u.terms[0]}};
  GcbElement second{s, 2, {u.terms[1]}};
  EXPECT_LT((gcb_pairing(u, e) - gcb_pairing(first, e) - gcb_pairing(second, e)).norm(), 1e-14);
}

TEST(LowerBound, NormingFunctionalPinsNorm) {
  Rng rng = make_rng(RngSeed{13});
  for (const auto& s : {space_scalar(), space_row(3), space_Mk(2), space_min_linf(3)}) {
    const auto x = sample_space_ball(s, 1, 0.65, rng);
    const auto r = gcb_lower_bound(delta_element(x), {norming_functional_entry({s, x.entry(0, 0)})});
    EXPECT_GE(r.value, 0.65 - 1e-6) << s->label();
    EXPECT_LE(r.value, 0.65 + 1e-12) << s->label();
  }
}

TEST(LowerBound, ZeroPointGivesZero) {
  const auto s = space_row(2);
  const GcbElement u = delta_element(OpSpaceMatrix::zero(s, 1));
  EXPECT_EQ(gcb_lower_bound(u, coordinate_entries(s)).value, 0.0);
  EXPECT_THROW((void)gcb_lower_bound(u, {}), InvalidInput);
}

TEST(LowerBound, EmbeddingPinsMatrixNorm) {
  Rng rng = make_rng(RngSeed{14});
  for (const auto& s : {space_row(2), space_column(2), space_Mk(2)}) {
    const auto x = sample_space_ball(s, 3, 0.8, rng);
    EXPECT_NEAR(gcb_lower_bound(delta_element(x), {embedding_entry(s)}).value, 0.8, 1e-12) << s->label();
  }
}

TEST(Dictionary, BoundsAreCertified) {
  Rng rng = make_rng(RngSeed{15});
  for (const auto& s : {space_scalar(), space_row(2), space_min_linf(2)}) {
    const auto dict = standard_dictionary(sample_space_ball(s, 2, 0.5, rng));
    EXPECT_GE(dict.size(), 3u);
    for (const auto& e : dict) {
      if (const auto* se = std::get_if<ScalarEntry>(&e.test)) {
        const auto u = cb_upper_bound(se->function);
        ASSERT_TRUE(u.value.has_value()) << e.name;
        EXPECT_LE(*u.value, se->bound + 1e-12) << e.name;
      }
    }
  }
}

TEST(Sandwich, LowerNeverAboveUpper) {
  for (std::uint64_t seed = 20; seed < 30; ++seed) {
    const auto u = two_term_element(seed);
    FunctionDictionary dict = standard_dictionary(u.terms[1].point);
    const double lower = gcb_lower_bound(u, dict).value;
    const double upper = gcb_upper_bound(u, 20000, RngSeed{seed}).value;
    EXPECT_LE(lower, upper + 1e-6);
  }
}

TEST(DeltaIsometry, Examples) {
  const auto a = delta_isometry_check(scalar(0.5), 10000, RngSeed{31});
  EXPECT_TRUE(a.passed());
  EXPECT_NEAR(a.upper, 0.5, 1e-9);
  EXPECT_NEAR(a.lower, 0.5, 1e-6);

  // 0.9 * identity at level 2 over M_2
  const auto s = space_Mk(2);
  std::vector<ComplexMatrix> planes(4, ComplexMatrix::Zero(2, 2));
  planes[0] = ComplexMatrix::Identity(2, 2) * 0.9;
  planes[3] = ComplexMatrix::Identity(2, 2) * 0.9;
  const auto b = delta_isometry_check(OpSpaceMatrix(s, planes), 10000, RngSeed{32});
  EXPECT_TRUE(b.passed());
  EXPECT_NEAR(b.norm, 0.9, 1e-14);

  Rng rng = make_rng(RngSeed{33});
  const auto c = delta_isometry_check(sample_space_ball(space_row(2), 3, 0.7, rng), 10000, RngSeed{34});
  EXPECT_LE(c.upper_gap(), 1e-9);
  EXPECT_LE(c.lower_gap(), 1e-4);
}

TEST(DeltaIsometry, RejectsBoundaryPoint) {
  EXPECT_THROW((void)delta_isometry_check(scalar(1.0), 100, RngSeed{1}), DomainError);
}

}  // namespace
}  // namespace cblab
