#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "cblab/errors.hpp"
#include "cblab/mconvex.hpp"

namespace cblab {
namespace {

OpSpaceMatrix scalar(Complex c) { return OpSpaceMatrix::from_scalar(ComplexMatrix::Constant(1, 1, c)); }

MatrixSet random_set(const SpacePtr& s, std::vector<std::pair<int, double>> shapes, std::uint64_t seed) {
  Rng rng = make_rng(RngSeed{seed});
  std::vector<OpSpaceMatrix> gens;
  for (auto [level, radius] : shapes) gens.push_back(sample_space_ball(s, level, radius, rng));
  return MatrixSet(s, gens);
}

// (f_ij(x_kl)) by four nested loops over coefficient vectors.
ComplexMatrix pairing_oracle(const SeparationCertificate& f, const OpSpaceMatrix& x) {
  const int n = f.level();
  const int m = x.level();
  ComplexMatrix out(n * m, n * m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          Complex v = 0.0;
          for (std::size_t t = 0; t < f.planes.size(); ++t) v += f.planes[t](i, j) * x.plane(static_cast<int>(t))(k, l);
          out(i * m + k, j * m + l) = v;
        }
  return out;
}

SeparationCertificate random_certificate(const SpacePtr& s, int n, Rng& rng) {
  SeparationCertificate f{s, {}};
  for (int t = 0; t < s->dim(); ++t) f.planes.push_back(gaussian_matrix(n, n, rng));
  return f;
}

TEST(MatrixSet, Norm) {
  const MatrixSet k(space_scalar(), {scalar(0.3), scalar(Complex(0.0, -0.9))});
  EXPECT_NEAR(k.norm(), 0.9, 1e-15);
  EXPECT_THROW(MatrixSet(space_scalar(), {}), InvalidInput);
  EXPECT_THROW(MatrixSet(space_row(2), {scalar(0.3)}), InvalidInput);
}

TEST(HullElement, IdentityRepresentationIsExact) {
  const auto k = random_set(space_Mk(2), {{1, 0.4}, {2, 0.8}, {3, 0.6}}, 1);
  for (int i = 0; i < k.size(); ++i) {
    const auto h = hull_element(k, identity_representation(k, i));
    EXPECT_EQ(realize(h), realize(k.generator(i)));
  }
}

TEST(HullElement, EmbeddingIntoCorner) {
  const MatrixSet k(space_scalar(), {scalar(1.0)});
  HullRepresentation rep{2, {{ComplexMatrix::Zero(2, 1), 0, ComplexMatrix::Zero(1, 2)}}};
  rep.terms[0].alpha(0, 0) = 1.0;
  rep.terms[0].beta(0, 0) = 1.0;
  ComplexMatrix e11 = ComplexMatrix::Zero(2, 2);
  e11(0, 0) = 1.0;
  EXPECT_EQ(hull_element(k, rep).as_scalar(), e11);
}

TEST(HullElement, TwoTermsMatchBlockArithmetic) {
  const auto s = space_row(2);
  const auto k = random_set(s, {{1, 0.5}, {2, 0.7}}, 2);
  Rng rng = make_rng(RngSeed{3});
  HullRepresentation rep{2, {{gaussian_matrix(2, 1, rng) * 0.4, 0, gaussian_matrix(1, 2, rng) * 0.4},
                             {gaussian_matrix(2, 2, rng) * 0.3, 1, gaussian_matrix(2, 2, rng) * 0.3}}};
  const auto h = hull_element(k, rep);
  // realized: (alpha (x) I_N) X (beta (x) I_N), summed
  auto pad = [](const ComplexMatrix& a, int n) {
    ComplexMatrix out = ComplexMatrix::Zero(a.rows() * n, a.cols() * n);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * n, j * n, n, n).diagonal().setConstant(a(i, j));
    return out;
  };
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  for (const auto& t : rep.terms) expected += pad(t.alpha, 2) * realize(k.generator(t.generator)) * pad(t.beta, 2);
  EXPECT_LT((realize(h) - expected).norm(), 1e-14);
}

TEST(HullElement, ConstraintViolationRejected) {
  const MatrixSet k(space_scalar(), {scalar(0.5)});
  HullRepresentation rep{1, {{ComplexMatrix::Constant(1, 1, 1.1), 0, ComplexMatrix::Constant(1, 1, 1.0)}}};
  EXPECT_THROW(validate_representation(k, rep), InvalidInput);
  EXPECT_THROW((void)hull_element(k, rep), InvalidInput);
  rep.terms[0].alpha = ComplexMatrix::Constant(2, 1, 0.5);
  EXPECT_THROW((void)hull_element(k, rep), InvalidInput);
}

TEST(HullSampling, ConstraintsHold) {
  const auto k = random_set(space_column(2), {{1, 0.5}, {3, 0.9}}, 4);
  Rng rng = make_rng(RngSeed{5});
  for (int t = 0; t < 200; ++t) {
    const auto rep = sample_representation(k, 1 + t % 4, 1 + t % 5, rng);
    EXPECT_NO_THROW(validate_representation(k, rep));
  }
}

TEST(HullNorm, ScalarSingleton) {
  const MatrixSet k(space_scalar(), {scalar(0.7)});
  const auto r = hull_norm_check(k, 500, RngSeed{6});
  EXPECT_TRUE(r.passed());
  EXPECT_LE(r.max_hull_norm, 0.7 + 1e-8);
  EXPECT_EQ(r.identity_max, 0.7);
}

TEST(HullNorm, BoundIsMaxGenerator) {
  const MatrixSet k(space_scalar(), {scalar(0.3), OpSpaceMatrix::from_scalar(sample_ball(2, 0.9, RngSeed{7}))});
  const auto r = hull_norm_check(k, 500, RngSeed{8});
  EXPECT_TRUE(r.passed());
  EXPECT_NEAR(r.set_norm, 0.9, 1e-12);
  EXPECT_LE(r.max_hull_norm, 0.9 + 1e-8);
}

TEST(HullNorm, ThousandTrialsOverM2) {
  const auto k = random_set(space_Mk(2), {{1, 0.6}, {2, 0.8}}, 9);
  const auto r = hull_norm_check(k, 1000, RngSeed{10});
  EXPECT_EQ(r.trials, 1000);
  EXPECT_EQ(r.violations, 0);
  EXPECT_TRUE(r.passed());
}

TEST(Pairing, ScalarCases) {
  SeparationCertificate f{space_scalar(), {ComplexMatrix::Constant(1, 1, Complex(0.0, 2.0))}};
  EXPECT_EQ(pairing(f, scalar(3.0))(0, 0), Complex(0.0, 6.0));
  SeparationCertificate id{space_scalar(), {ComplexMatrix::Identity(1, 1)}};
  const ComplexMatrix x = sample_ball(3, 0.5, RngSeed{11});
  EXPECT_EQ(pairing(id, OpSpaceMatrix::from_scalar(x)), x);
}

TEST(Pairing, MatchesIndexOracle) {
  Rng rng = make_rng(RngSeed{12});
  for (const auto& s : {space_row(2), space_Mk(2), space_min_linf(3)}) {
    const auto f = random_certificate(s, 2, rng);
    const auto x = sample_space_ball(s, 2, 0.8, rng);
    EXPECT_LT((pairing(f, x) - pairing_oracle(f, x)).norm(), 1e-13);
  }
}

TEST(Pairing, Bilinear) {
  Rng rng = make_rng(RngSeed{13});
  const auto s = space_Mk(2);
  for (int t = 0; t < 50; ++t) {
    const auto f = random_certificate(s, 1 + t % 3, rng);
    const auto x = sample_space_ball(s, 2, 0.5, rng);
    const auto y = sample_space_ball(s, 2, 0.5, rng);
    const Complex a = complex_gaussian(rng);
    const Complex b = complex_gaussian(rng);
    const ComplexMatrix lhs = pairing(f, x.scaled(a) + y.scaled(b));
    const ComplexMatrix rhs = a * pairing(f, x) + b * pairing(f, y);
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Pairing, SpaceMismatchRejected) {
  SeparationCertificate f{space_row(2), {ComplexMatrix::Identity(1, 1), ComplexMatrix::Identity(1, 1)}};
  Rng rng = make_rng(RngSeed{14});
  EXPECT_THROW((void)pairing(f, sample_space_ball(space_column(2), 1, 0.5, rng)), InvalidInput);
}

TEST(Pairing, HullNeverBeatsGenerators) {
  Rng rng = make_rng(RngSeed{15});
  const auto s = space_row(2);
  const auto k = random_set(s, {{1, 0.6}, {2, 0.9}}, 16);
  for (int t = 0; t < 20; ++t) {
    const auto f = random_certificate(s, 1 + t % 2, rng);
    double gen_max = 0.0;
    for (const auto& g : k.generators()) gen_max = std::max(gen_max, operator_norm(pairing(f, g)));
    for (int h = 0; h < 50; ++h) {
      const auto rep = sample_representation(k, 1 + h % 3, 1 + h % 4, rng);
      EXPECT_LE(operator_norm(pairing(f, hull_element(k, rep))), gen_max + 1e-8);
    }
  }
}

TEST(Certificate, ScalarValid) {
  const MatrixSet k(space_scalar(), {scalar(0.5)});
  SeparationCertificate f{space_scalar(), {ComplexMatrix::Identity(1, 1)}};
  const auto v = check_certificate(f, k, scalar(2.0));
  EXPECT_TRUE(v.valid);
  EXPECT_NEAR(v.max_generator_pairing, 0.5, 1e-15);
  EXPECT_NEAR(v.target_pairing, 2.0, 1e-15);
}

TEST(Certificate, InteriorPointNeverValid) {
  Rng rng = make_rng(RngSeed{17});
  const auto s = space_Mk(2);
  const auto k = random_set(s, {{1, 0.6}, {2, 0.9}}, 18);
  for (int t = 0; t < 100; ++t) {
    const auto x0 = hull_element(k, sample_representation(k, 1 + t % 2, 3, rng));
    auto f = random_certificate(s, 1 + t % 3, rng);
    double gen_max = 0.0;
    for (const auto& g : k.generators()) gen_max = std::max(gen_max, operator_norm(pairing(f, g)));
    for (auto& p : f.planes) p /= gen_max;
    EXPECT_FALSE(check_certificate(f, k, x0).valid);
  }
}

TEST(Certificate, NormingFunctionalSeparatesScaledBoundaryPoint) {
  const auto s = space_row(2);
  Rng rng = make_rng(RngSeed{19});
  const MatrixSet k(s, {sample_space_ball(s, 1, 0.8, rng)});
  const auto x0 = k.generator(0).scaled(1.1);
  // f(y) = u^* (sum y_t B_t) v / 0.8 for the top singular pair of x
  Eigen::JacobiSVD<ComplexMatrix> svd(realize(k.generator(0)), Eigen::ComputeFullU | Eigen::ComputeFullV);
  SeparationCertificate f{s, {}};
  for (int t = 0; t < s->dim(); ++t)
    f.planes.push_back(ComplexMatrix::Constant(
        1, 1, (svd.matrixU().col(0).adjoint() * s->basis(t) * svd.matrixV().col(0)).value() / 0.8));
  const auto v = check_certificate(f, k, x0);
  EXPECT_TRUE(v.valid);
  EXPECT_NEAR(v.target_pairing, 1.1, 1e-12);
}

TEST(FindCertificate, ScalarCase) {
  const MatrixSet k(space_scalar(), {scalar(0.5)});
  const auto f = find_certificate(k, scalar(2.0), 1000, RngSeed{20});
  ASSERT_TRUE(f.has_value());
  EXPECT_TRUE(check_certificate(*f, k, scalar(2.0)).valid);
}

TEST(FindCertificate, GeneratorNeverSeparated) {
  const auto k = random_set(space_row(2), {{1, 0.6}, {2, 0.9}}, 21);
  for (int i = 0; i < k.size(); ++i) EXPECT_FALSE(find_certificate(k, k.generator(i), 2000, RngSeed{22}).has_value());
}

TEST(FindCertificate, CoordinatePointInMin) {
  const auto s = space_min_linf(2);
  std::vector<ComplexMatrix> a{ComplexMatrix::Constant(1, 1, 0.5), ComplexMatrix::Constant(1, 1, 0.0)};
  std::vector<ComplexMatrix> b{ComplexMatrix::Constant(1, 1, 0.0), ComplexMatrix::Constant(1, 1, 0.5)};
  const MatrixSet k(s, {OpSpaceMatrix(s, a), OpSpaceMatrix(s, b)});
  std::vector<ComplexMatrix> c{ComplexMatrix::Constant(1, 1, 0.0), ComplexMatrix::Constant(1, 1, 0.9)};
  const OpSpaceMatrix x0(s, c);
  const auto f = find_certificate(k, x0, 10000, RngSeed{23});
  ASSERT_TRUE(f.has_value());
  EXPECT_TRUE(check_certificate(*f, k, x0).valid);
}

TEST(FindCertificate, ReturnedCertificatesAreSound) {
  Rng rng = make_rng(RngSeed{24});
  int found = 0;
  for (int t = 0; t < 20; ++t) {
    const auto s = t % 2 == 0 ? space_Mk(2) : space_column(2);
    const auto k = random_set(s, {{1, 0.5}, {2, 0.5}}, 100 + t);
    const auto x0 = sample_space_ball(s, 1 + t % 2, 0.3 + 0.09 * (t % 8), rng);
    const auto f = find_certificate(k, x0, 2000, RngSeed{static_cast<std::uint64_t>(t)});
    if (!f) continue;
    ++found;
    EXPECT_TRUE(check_certificate(*f, k, x0).valid);
  }
  EXPECT_GT(found, 0);
}

}  // namespace
}  // namespace cblab
