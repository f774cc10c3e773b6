#include "cblab/matcore.hpp"

#include <cmath>
#include <string>

#include "cblab/errors.hpp"

namespace cblab {

namespace {

constexpr Eigen::Index kDenseSvdLimit = 64;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double power_iteration_norm(const ComplexMatrix& a) {
  ComplexVector v(a.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v(i) = Complex(1.0 + 0.01 * static_cast<double>(i % 7), 0.001 * static_cast<double>(i % 5));
  }
  v.normalize();
  double sigma2 = 0.0;
  for (int it = 0; it < 20000; ++it) {
    ComplexVector w = a.adjoint() * (a * v);
    const double next = w.norm();
    if (next == 0.0) return 0.0;
    v = w / next;
    if (std::abs(next - sigma2) <= 1e-15 * next) {
      sigma2 = next;
      break;
    }
    sigma2 = next;
  }
  return std::sqrt(sigma2);
}

}  // namespace

RngSeed RngSeed::derive(std::uint64_t index) const {
  return RngSeed{splitmix64(value ^ splitmix64(index + 0x632be59bd9b4e019ULL))};
}

Rng make_rng(RngSeed seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed.value), static_cast<std::uint32_t>(seed.value >> 32)};
  return Rng(seq);
}

Complex complex_gaussian(Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

ComplexMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  ComplexMatrix out(rows, cols);
  // Column-major fill order is part of the determinism contract.
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) out(i, j) = complex_gaussian(rng);
  }
  return out;
}

bool all_finite(const ComplexMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
    }
  }
  return true;
}

double operator_norm(const ComplexMatrix& a) {
  if (!all_finite(a)) throw InvalidInput("operator_norm: matrix has non-finite entries");
  if (a.size() == 0) return 0.0;
  if (a.rows() == 1 || a.cols() == 1) return a.norm();
  if (std::max(a.rows(), a.cols()) > kDenseSvdLimit) return power_iteration_norm(a);
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out = ComplexMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

ComplexMatrix schur_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidInput("schur_product: shape mismatch " + std::to_string(a.rows()) + "x" +
                       std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                       std::to_string(b.cols()));
  }
  return a.cwiseProduct(b);
}

ComplexMatrix sample_ball(Eigen::Index m, double radius, Rng& rng) {
  if (!(radius > 0.0 && radius < 1.0)) {
    throw InvalidInput("sample_ball: radius must lie in (0,1), got " + std::to_string(radius));
  }
  if (m < 1) throw InvalidInput("sample_ball: level must be positive");
  for (;;) {
    ComplexMatrix g = gaussian_matrix(m, m, rng);
    const double n = operator_norm(g);
    if (n > 0.0) return g * (radius / n);
  }
}

ComplexMatrix sample_ball(Eigen::Index m, double radius, RngSeed seed) {
  Rng rng = make_rng(seed);
  return sample_ball(m, radius, rng);
}

ComplexMatrix project_ball(const ComplexMatrix& a, double r) {
  if (!(r > 0.0)) throw InvalidInput("project_ball: radius must be positive");
  if (operator_norm(a) <= r) return a;
  if (a.rows() == 1 || a.cols() == 1) return a * (r / a.norm());
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd s = svd.singularValues().cwiseMin(r);
  return svd.matrixU() * s.cast<Complex>().asDiagonal() * svd.matrixV().adjoint();
}

ComplexMatrix inverse_sqrt_psd(const ComplexMatrix& h, double ridge) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h);
  Eigen::VectorXd d = eig.eigenvalues().cwiseMax(0.0);
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = 1.0 / std::sqrt(d(i) + ridge);
  return eig.eigenvectors() * d.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace cblab
