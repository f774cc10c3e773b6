#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace cblab {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Explicit seed for every randomized routine. Same seed and same call
/// sequence give the same output.
struct RngSeed {
  std::uint64_t value = 0;

  /// Seed for the `index`-th independent sub-stream (restart, trial, ...).
  [[nodiscard]] RngSeed derive(std::uint64_t index) const;

  friend bool operator==(RngSeed, RngSeed) = default;
};

using Rng = std::mt19937_64;

[[nodiscard]] Rng make_rng(RngSeed seed);

/// Standard complex Gaussian (independent N(0, 1/2) real and imaginary parts).
[[nodiscard]] Complex complex_gaussian(Rng& rng);
[[nodiscard]] ComplexMatrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

[[nodiscard]] bool all_finite(const ComplexMatrix& a);

/// Largest singular value. Dense SVD up to dimension 64, power iteration on
/// A*A above. Throws InvalidInput on NaN/Inf entries.
[[nodiscard]] double operator_norm(const ComplexMatrix& a);

[[nodiscard]] ComplexMatrix direct_sum(const ComplexMatrix& a, const ComplexMatrix& b);

/// Entrywise (Hadamard) product. Throws InvalidInput on shape mismatch.
[[nodiscard]] ComplexMatrix schur_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// m x m matrix with operator norm exactly `radius`, from a rescaled complex
/// Gaussian draw. Throws InvalidInput unless 0 < radius < 1.
[[nodiscard]] ComplexMatrix sample_ball(Eigen::Index m, double radius, RngSeed seed);
[[nodiscard]] ComplexMatrix sample_ball(Eigen::Index m, double radius, Rng& rng);

/// Clips the singular values of `a` at `r`. Points already inside are
/// returned unchanged.
[[nodiscard]] ComplexMatrix project_ball(const ComplexMatrix& a, double r);

/// Hermitian square root of (h + ridge I)^{-1}; h must be positive semidefinite.
[[nodiscard]] ComplexMatrix inverse_sqrt_psd(const ComplexMatrix& h, double ridge);

}  // namespace cblab
