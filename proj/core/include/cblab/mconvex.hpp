#pragma once

#include <optional>
#include <vector>

#include "cblab/matcore.hpp"
#include "cblab/opspace.hpp"

namespace cblab {

/// A finite matrix set over a concrete space: generators x_i at levels n_i.
class MatrixSet {
 public:
  MatrixSet(SpacePtr space, std::vector<OpSpaceMatrix> generators);

  [[nodiscard]] const SpacePtr& space() const { return space_; }
  [[nodiscard]] const std::vector<OpSpaceMatrix>& generators() const { return generators_; }
  [[nodiscard]] const OpSpaceMatrix& generator(int i) const { return generators_[static_cast<std::size_t>(i)]; }
  [[nodiscard]] int size() const { return static_cast<int>(generators_.size()); }

  /// sup of the generator norms.
  [[nodiscard]] double norm() const;

 private:
  SpacePtr space_;
  std::vector<OpSpaceMatrix> generators_;
};

struct HullTerm {
  ComplexMatrix alpha;  // n x k_i
  int generator = 0;
  ComplexMatrix beta;   // k_i x n
};

/// sum_i alpha_i x_i beta_i with ||sum alpha_i alpha_i^*|| <= 1 and
/// ||sum beta_i^* beta_i|| <= 1.
struct HullRepresentation {
  int target_level = 1;
  std::vector<HullTerm> terms;
};

inline constexpr double kHullConstraintTol = 1e-10;

/// Throws InvalidInput if shapes are inconsistent or either constraint
/// exceeds 1 + 1e-10.
void validate_representation(const MatrixSet& set, const HullRepresentation& rep);

[[nodiscard]] OpSpaceMatrix hull_element(const MatrixSet& set, const HullRepresentation& rep);

/// alpha = beta = I on generator i; reproduces the generator exactly.
[[nodiscard]] HullRepresentation identity_representation(const MatrixSet& set, int generator);

/// Gaussian alpha/beta normalized by (sum alpha alpha^* + 1e-12)^{-1/2} on
/// the left and (sum beta^* beta + 1e-12)^{-1/2} on the right.
[[nodiscard]] HullRepresentation sample_representation(const MatrixSet& set, int target_level, int max_terms,
                                                       Rng& rng);

struct HullNormReport {
  int trials = 0;
  int violations = 0;
  double set_norm = 0.0;
  double max_hull_norm = 0.0;
  double identity_max = 0.0;  // max norm over identity representations
  [[nodiscard]] bool passed() const { return violations == 0 && identity_max == set_norm; }
};

[[nodiscard]] HullNormReport hull_norm_check(const MatrixSet& set, int trials, RngSeed seed, int max_level = 4);

/// f in M_n(V'), stored as coefficient planes: f_ij(x) = sum_t F_t(i,j) x_t.
struct SeparationCertificate {
  SpacePtr space;
  std::vector<ComplexMatrix> planes;
  [[nodiscard]] int level() const { return static_cast<int>(planes.front().rows()); }
};

/// The nm x nm matrix (f_ij(x_kl)), rows ordered (i,k), columns (j,l).
[[nodiscard]] ComplexMatrix pairing(const SeparationCertificate& f, const OpSpaceMatrix& x);

struct CertificateVerdict {
  bool valid = false;
  double max_generator_pairing = 0.0;
  double target_pairing = 0.0;
};

/// VALID iff ||<f, x>|| <= 1 + 1e-9 on every generator and
/// ||<f, x0>|| > 1 + 1e-9.
[[nodiscard]] CertificateVerdict check_certificate(const SeparationCertificate& f, const MatrixSet& set,
                                                   const OpSpaceMatrix& x0);

/// The defining embedding V -> M_N as a level-N certificate; its pairing
/// with x has norm matrix_norm(x).
[[nodiscard]] SeparationCertificate embedding_certificate(const SpacePtr& space);

/// Heuristic search for a separating certificate. nullopt means the search
/// failed, not that x0 lies in the hull. Every returned certificate passes
/// check_certificate.
[[nodiscard]] std::optional<SeparationCertificate> find_certificate(const MatrixSet& set, const OpSpaceMatrix& x0,
                                                                    std::int64_t budget, RngSeed seed);

}  // namespace cblab
