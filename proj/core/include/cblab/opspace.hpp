#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cblab/matcore.hpp"

namespace cblab {

enum class SpaceKind { kScalar, kMatrix, kRow, kColumn, kMinLinf, kCustom };

[[nodiscard]] std::string to_string(SpaceKind kind);

/// A d-dimensional operator space realized by d linearly independent N x N
/// basis matrices. The level-m norm of (x_ij) is the operator norm of the
/// mN x mN block matrix whose (i,j) block is sum_k x_ij[k] B_k.
class ConcreteOperatorSpace {
 public:
  /// Throws InvalidInput if the basis is empty, ragged, non-finite or
  /// linearly dependent (smallest singular value of the d x N^2 coordinate
  /// matrix below 1e-10).
  ConcreteOperatorSpace(SpaceKind kind, int param, std::vector<ComplexMatrix> basis);

  [[nodiscard]] SpaceKind kind() const { return kind_; }
  [[nodiscard]] int param() const { return param_; }
  [[nodiscard]] int dim() const { return static_cast<int>(basis_.size()); }
  [[nodiscard]] int ambient() const { return ambient_; }
  [[nodiscard]] const std::vector<ComplexMatrix>& basis() const { return basis_; }
  [[nodiscard]] const ComplexMatrix& basis(int k) const { return basis_[static_cast<std::size_t>(k)]; }

  /// True for the one-dimensional space C realized in M_1.
  [[nodiscard]] bool is_scalar() const { return basis_.size() == 1 && ambient_ == 1; }

  /// sum_k coeffs[k] B_k.
  [[nodiscard]] ComplexMatrix combine(const ComplexVector& coeffs) const;

  /// Short human-readable identifier, e.g. "row(2)".
  [[nodiscard]] std::string label() const;

 private:
  SpaceKind kind_;
  int param_;
  int ambient_;
  std::vector<ComplexMatrix> basis_;
};

using SpacePtr = std::shared_ptr<const ConcreteOperatorSpace>;

[[nodiscard]] bool same_space(const SpacePtr& a, const SpacePtr& b);

[[nodiscard]] SpacePtr space_scalar();
/// Full matrix algebra M_k; basis E_ij in row-major order.
[[nodiscard]] SpacePtr space_Mk(int k);
/// Row Hilbertian space R_n = span{E_1j} in M_n.
[[nodiscard]] SpacePtr space_row(int n);
/// Column Hilbertian space C_n = span{E_i1} in M_n.
[[nodiscard]] SpacePtr space_column(int n);
/// MIN(l_inf^d) realized on the diagonal of M_d.
[[nodiscard]] SpacePtr space_min_linf(int d);
[[nodiscard]] SpacePtr space_custom(std::vector<ComplexMatrix> basis);

struct OpSpaceElement {
  SpacePtr space;
  ComplexVector coeffs;
};

/// An element of M_m(V), stored as d coefficient planes C_k (each m x m) so
/// that the (i,j) entry has coordinates (C_1(i,j), ..., C_d(i,j)).
class OpSpaceMatrix {
 public:
  OpSpaceMatrix(SpacePtr space, std::vector<ComplexMatrix> planes);

  [[nodiscard]] static OpSpaceMatrix zero(SpacePtr space, int level);
  /// Level-m matrix over the scalar space.
  [[nodiscard]] static OpSpaceMatrix from_scalar(const ComplexMatrix& a);
  [[nodiscard]] static OpSpaceMatrix from_element(const OpSpaceElement& x);

  [[nodiscard]] const SpacePtr& space() const { return space_; }
  [[nodiscard]] int level() const { return static_cast<int>(planes_.front().rows()); }
  [[nodiscard]] const std::vector<ComplexMatrix>& planes() const { return planes_; }
  [[nodiscard]] const ComplexMatrix& plane(int k) const { return planes_[static_cast<std::size_t>(k)]; }
  [[nodiscard]] ComplexVector entry(int i, int j) const;

  /// The plain scalar matrix; only meaningful for the scalar space.
  [[nodiscard]] const ComplexMatrix& as_scalar() const { return planes_.front(); }

  /// alpha X beta for scalar matrices alpha (n x m), beta (m x n').
  [[nodiscard]] OpSpaceMatrix compress(const ComplexMatrix& alpha, const ComplexMatrix& beta) const;
  [[nodiscard]] OpSpaceMatrix scaled(Complex c) const;

  friend OpSpaceMatrix operator+(const OpSpaceMatrix& a, const OpSpaceMatrix& b);

 private:
  SpacePtr space_;
  std::vector<ComplexMatrix> planes_;
};

[[nodiscard]] OpSpaceMatrix direct_sum(const OpSpaceMatrix& x, const OpSpaceMatrix& y);

/// The mN x mN concrete block matrix of X.
[[nodiscard]] ComplexMatrix realize(const OpSpaceMatrix& x);

/// The M_m(V) norm, i.e. operator_norm(realize(x)).
[[nodiscard]] double matrix_norm(const OpSpaceMatrix& x);
[[nodiscard]] double element_norm(const OpSpaceElement& x);

/// Level-m element with matrix_norm exactly `radius`, Gaussian coefficients.
[[nodiscard]] OpSpaceMatrix sample_space_ball(const SpacePtr& space, int level, double radius, Rng& rng);

/// Lower bound on sup{|sum_k phi_k x_k| : x in V, ||x|| <= 1} by random
/// restarts and normalized gradient ascent. `budget` counts evaluations.
[[nodiscard]] double dual_functional_norm(const SpacePtr& space, const ComplexVector& phi, int budget,
                                          RngSeed seed);

/// Closed-form dual norm for the built-in spaces (nullopt for custom ones):
/// |c| for C, l1 for MIN(l_inf), l2 for rows and columns, trace norm for M_k.
[[nodiscard]] std::optional<double> exact_dual_norm(const SpacePtr& space, const ComplexVector& phi);

}  // namespace cblab
