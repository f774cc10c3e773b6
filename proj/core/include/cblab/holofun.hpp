#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cblab/matcore.hpp"
#include "cblab/opspace.hpp"

namespace cblab {

struct HoloNode;

/// Immutable handle to a holomorphic function on an open matrix unit ball
/// with f(0) = 0. Cheap to copy; the expression tree is shared.
class HoloFunction {
 public:
  explicit HoloFunction(std::shared_ptr<const HoloNode> node);

  [[nodiscard]] const HoloNode& node() const { return *node_; }
  [[nodiscard]] const std::shared_ptr<const HoloNode>& ptr() const { return node_; }

  /// The operator space the function is defined on (the scalar space for
  /// functions on the disk).
  [[nodiscard]] const SpacePtr& domain() const;
  [[nodiscard]] bool scalar_domain() const;

 private:
  std::shared_ptr<const HoloNode> node_;
};

/// A linear functional phi on a concrete space together with a certified
/// upper bound r on its norm (which equals its cb-norm). Requires r < 1.
struct CertifiedFunctional {
  SpacePtr space;
  ComplexVector phi;
  double certified_norm = 0.0;

  [[nodiscard]] Complex apply(const ComplexVector& coords) const { return (phi.transpose() * coords).value(); }
  /// The scalar matrix (phi(x_ij)).
  [[nodiscard]] ComplexMatrix apply(const OpSpaceMatrix& x) const;
};

namespace holo {

/// sum_{n=1}^{K} a_n z^n; coeffs[0] is a_1.
struct PowerSeries {
  std::vector<Complex> coeffs;
  double analytic_radius;
};
/// c z^m prod_j (z - a_j) / (1 - conj(a_j) z).
struct Blaschke {
  Complex c;
  int m;
  std::vector<Complex> zeros;
};
/// inner(z) / (1 - a z).
struct MoebiusQuotient {
  HoloFunction inner;
  Complex a;
};
/// phi(x) / (1 - phi(x)).
struct GeometricPhi {
  CertifiedFunctional functional;
};
struct Product {
  HoloFunction left;
  HoloFunction right;
};
struct Sum {
  HoloFunction left;
  HoloFunction right;
};
struct Scale {
  Complex c;
  HoloFunction inner;
};
/// scalar(phi(x)).
struct Composite {
  HoloFunction scalar;
  CertifiedFunctional functional;
};

}  // namespace holo

struct HoloNode {
  using Payload = std::variant<holo::PowerSeries, holo::Blaschke, holo::MoebiusQuotient, holo::GeometricPhi,
                               holo::Product, holo::Sum, holo::Scale, holo::Composite>;
  Payload payload;
  SpacePtr domain;
};

// Constructors. All validate their invariants and throw InvalidInput or
// ConfigurationError.

[[nodiscard]] HoloFunction power_series(std::vector<Complex> coeffs,
                                        double analytic_radius = std::numeric_limits<double>::infinity());
[[nodiscard]] HoloFunction identity_function();
/// coeff * z^n.
[[nodiscard]] HoloFunction monomial(int n, Complex coeff = 1.0);
[[nodiscard]] HoloFunction blaschke(Complex c, int m, std::vector<Complex> zeros);
[[nodiscard]] HoloFunction moebius_quotient(HoloFunction inner, Complex a);
[[nodiscard]] HoloFunction geometric_phi(SpacePtr space, ComplexVector phi, double certified_norm);
[[nodiscard]] HoloFunction product(HoloFunction left, HoloFunction right);
[[nodiscard]] HoloFunction sum(HoloFunction left, HoloFunction right);
/// Nested scales collapse into one node; scale(1, f) is f itself.
[[nodiscard]] HoloFunction scale(Complex c, HoloFunction inner);
[[nodiscard]] HoloFunction composite(HoloFunction scalar, SpacePtr space, ComplexVector phi, double certified_norm);

/// Validates and packages a functional. Throws ConfigurationError when the
/// certified norm is not < 1 or is contradicted by the space's dual norm.
[[nodiscard]] CertifiedFunctional certify_functional(SpacePtr space, ComplexVector phi, double certified_norm);

/// f(z) for a function on the disk. Throws DomainError unless |z| < 1.
[[nodiscard]] Complex evaluate(const HoloFunction& f, Complex z);
/// f(x) for x in the open unit ball of the function's domain.
[[nodiscard]] Complex evaluate(const HoloFunction& f, const OpSpaceElement& x);

/// The entrywise amplification f_m(X) = (f(x_ij)). Throws DomainError if
/// matrix_norm(X) >= 1 or if a functional image (phi(x_ij)) reaches norm
/// 1 - 1e-9.
[[nodiscard]] ComplexMatrix amplify(const HoloFunction& f, const OpSpaceMatrix& x);
[[nodiscard]] ComplexMatrix amplify(const HoloFunction& f, const ComplexMatrix& x);

/// Radius of the largest disk on which a scalar-domain function is
/// holomorphic (infinity for polynomials).
[[nodiscard]] double analytic_radius(const HoloFunction& f);

struct TaylorCoeffs {
  std::vector<Complex> coeffs;       // a_1 .. a_K
  std::optional<double> tail_bound;  // dominates sum_{n>K} |a_n| when present
  [[nodiscard]] int truncation() const { return static_cast<int>(coeffs.size()); }
};

/// Taylor coefficients at 0 of a scalar-domain function. Polynomials are
/// copied exactly; everything else goes through discrete Fourier inversion
/// on a circle (radius 1 with a Cauchy tail estimate when the function
/// extends past the closed disk, radius 0.9 and no tail otherwise).
[[nodiscard]] TaylorCoeffs taylor_coefficients(const HoloFunction& f, int truncation);

/// Stable identifier used in result records.
[[nodiscard]] std::string describe(const HoloFunction& f);

}  // namespace cblab
