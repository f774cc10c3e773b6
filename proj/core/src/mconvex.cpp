#include "cblab/mconvex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "cblab/errors.hpp"

namespace cblab {

namespace {

constexpr double kCertTol = 1e-9;

double max_generator_pairing(const SeparationCertificate& f, const MatrixSet& set) {
  double best = 0.0;
  for (const auto& x : set.generators()) best = std::max(best, operator_norm(pairing(f, x)));
  return best;
}

/// ||<f, x0>|| / max_i ||<f, x_i>||, infinite when the generators are
/// annihilated but x0 is not.
double separation_ratio(const SeparationCertificate& f, const MatrixSet& set, const OpSpaceMatrix& x0) {
  const double target = operator_norm(pairing(f, x0));
  const double gens = max_generator_pairing(f, set);
  if (gens == 0.0) return target > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return target / gens;
}

/// Rescales f to sit strictly between the generators and the target.
std::optional<SeparationCertificate> normalize(SeparationCertificate f, const MatrixSet& set,
                                               const OpSpaceMatrix& x0) {
  const double target = operator_norm(pairing(f, x0));
  const double gens = max_generator_pairing(f, set);
  if (!(target > 0.0)) return std::nullopt;
  const double s = gens == 0.0 ? 2.0 / target : 2.0 / (gens + target);
  for (auto& p : f.planes) p *= s;
  if (!check_certificate(f, set, x0).valid) return std::nullopt;
  return f;
}

}  // namespace

MatrixSet::MatrixSet(SpacePtr space, std::vector<OpSpaceMatrix> generators)
    : space_(std::move(space)), generators_(std::move(generators)) {
  if (!space_) throw InvalidInput("matrix set: null space");
  if (generators_.empty()) throw InvalidInput("matrix set: needs at least one generator");
  for (const auto& g : generators_) {
    if (!same_space(g.space(), space_)) throw InvalidInput("matrix set: generator lives in a different space");
  }
}

double MatrixSet::norm() const {
  double best = 0.0;
  for (const auto& g : generators_) best = std::max(best, matrix_norm(g));
  return best;
}

void validate_representation(const MatrixSet& set, const HullRepresentation& rep) {
  const int n = rep.target_level;
  if (n < 1) throw InvalidInput("hull representation: target level must be >= 1");
  if (rep.terms.empty()) throw InvalidInput("hull representation: no terms");
  ComplexMatrix aa = ComplexMatrix::Zero(n, n);
  ComplexMatrix bb = ComplexMatrix::Zero(n, n);
  for (std::size_t t = 0; t < rep.terms.size(); ++t) {
    const auto& term = rep.terms[t];
    if (term.generator < 0 || term.generator >= set.size()) {
      throw InvalidInput("hull representation: term " + std::to_string(t) + " references unknown generator");
    }
    const int k = set.generator(term.generator).level();
    if (term.alpha.rows() != n || term.alpha.cols() != k || term.beta.rows() != k || term.beta.cols() != n) {
      throw InvalidInput("hull representation: term " + std::to_string(t) + " has inconsistent alpha/beta shapes");
    }
    aa += term.alpha * term.alpha.adjoint();
    bb += term.beta.adjoint() * term.beta;
  }
  const double a_norm = operator_norm(aa);
  const double b_norm = operator_norm(bb);
  if (a_norm > 1.0 + kHullConstraintTol || b_norm > 1.0 + kHullConstraintTol) {
    throw InvalidInput("hull representation: constraint violated (||sum aa*|| = " + std::to_string(a_norm) +
                       ", ||sum b*b|| = " + std::to_string(b_norm) + ")");
  }
}

OpSpaceMatrix hull_element(const MatrixSet& set, const HullRepresentation& rep) {
  validate_representation(set, rep);
  OpSpaceMatrix out = OpSpaceMatrix::zero(set.space(), rep.target_level);
  for (const auto& term : rep.terms) out = out + set.generator(term.generator).compress(term.alpha, term.beta);
  return out;
}

HullRepresentation identity_representation(const MatrixSet& set, int generator) {
  if (generator < 0 || generator >= set.size()) throw InvalidInput("identity_representation: unknown generator");
  const int k = set.generator(generator).level();
  return HullRepresentation{k, {HullTerm{ComplexMatrix::Identity(k, k), generator, ComplexMatrix::Identity(k, k)}}};
}

HullRepresentation sample_representation(const MatrixSet& set, int target_level, int max_terms, Rng& rng) {
  if (target_level < 1 || max_terms < 1) throw InvalidInput("sample_representation: bad level or term count");
  std::uniform_int_distribution<int> term_count(1, max_terms);
  std::uniform_int_distribution<int> pick(0, set.size() - 1);
  HullRepresentation rep{target_level, {}};
  const int terms = term_count(rng);
  const int n = target_level;
  ComplexMatrix aa = ComplexMatrix::Zero(n, n);
  ComplexMatrix bb = ComplexMatrix::Zero(n, n);
  for (int t = 0; t < terms; ++t) {
    const int g = pick(rng);
    const int k = set.generator(g).level();
    HullTerm term{gaussian_matrix(n, k, rng), g, gaussian_matrix(k, n, rng)};
    aa += term.alpha * term.alpha.adjoint();
    bb += term.beta.adjoint() * term.beta;
    rep.terms.push_back(std::move(term));
  }
  const ComplexMatrix left = inverse_sqrt_psd(aa, 1e-12);
  const ComplexMatrix right = inverse_sqrt_psd(bb, 1e-12);
  ComplexMatrix aa2 = ComplexMatrix::Zero(n, n);
  ComplexMatrix bb2 = ComplexMatrix::Zero(n, n);
  for (auto& term : rep.terms) {
    term.alpha = left * term.alpha;
    term.beta = term.beta * right;
    aa2 += term.alpha * term.alpha.adjoint();
    bb2 += term.beta.adjoint() * term.beta;
  }
  // When sum alpha alpha^* is singular the ridge amplifies round-off in its
  // null space by 1e6; a final rescale restores the constraint exactly.
  const double sa = std::sqrt(std::max(1.0, operator_norm(aa2)));
  const double sb = std::sqrt(std::max(1.0, operator_norm(bb2)));
  for (auto& term : rep.terms) {
    term.alpha /= sa;
    term.beta /= sb;
  }
  return rep;
}

HullNormReport hull_norm_check(const MatrixSet& set, int trials, RngSeed seed, int max_level) {
  if (trials < 1) throw InvalidInput("hull_norm_check: trials must be >= 1");
  HullNormReport report;
  report.trials = trials;
  report.set_norm = set.norm();
  for (int i = 0; i < set.size(); ++i) {
    report.identity_max = std::max(report.identity_max, matrix_norm(hull_element(set, identity_representation(set, i))));
  }
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<int> level(1, max_level);
  for (int t = 0; t < trials; ++t) {
    const HullRepresentation rep = sample_representation(set, level(rng), 3, rng);
    const double norm = matrix_norm(hull_element(set, rep));
    report.max_hull_norm = std::max(report.max_hull_norm, norm);
    if (norm > report.set_norm + 1e-8) ++report.violations;
  }
  return report;
}

ComplexMatrix pairing(const SeparationCertificate& f, const OpSpaceMatrix& x) {
  if (!same_space(f.space, x.space())) throw InvalidInput("pairing: certificate and matrix live in different spaces");
  const Eigen::Index n = f.level();
  const Eigen::Index m = x.level();
  ComplexMatrix out = ComplexMatrix::Zero(n * m, n * m);
  for (std::size_t t = 0; t < f.planes.size(); ++t) {
    const ComplexMatrix& ft = f.planes[t];
    const ComplexMatrix& xt = x.plane(static_cast<int>(t));
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (ft(i, j) == Complex(0.0)) continue;
        out.block(i * m, j * m, m, m) += ft(i, j) * xt;
      }
    }
  }
  return out;
}

CertificateVerdict check_certificate(const SeparationCertificate& f, const MatrixSet& set, const OpSpaceMatrix& x0) {
  CertificateVerdict verdict;
  verdict.max_generator_pairing = max_generator_pairing(f, set);
  verdict.target_pairing = operator_norm(pairing(f, x0));
  verdict.valid = verdict.max_generator_pairing <= 1.0 + kCertTol && verdict.target_pairing > 1.0 + kCertTol;
  return verdict;
}

SeparationCertificate embedding_certificate(const SpacePtr& space) {
  return SeparationCertificate{space, space->basis()};
}

std::optional<SeparationCertificate> find_certificate(const MatrixSet& set, const OpSpaceMatrix& x0,
                                                      std::int64_t budget, RngSeed seed) {
  if (!same_space(set.space(), x0.space())) throw InvalidInput("find_certificate: x0 lives in a different space");
  const SpacePtr& space = set.space();
  std::int64_t used = 0;

  std::optional<SeparationCertificate> best;
  double best_ratio = 0.0;
  auto offer = [&](const SeparationCertificate& f) {
    ++used;
    const double r = separation_ratio(f, set, x0);
    if (r > best_ratio) {
      best_ratio = r;
      best = f;
    }
    return r;
  };

  // Structured candidates: the defining embedding, then the scalar
  // functional built from the top singular pair of realize(x0).
  offer(embedding_certificate(space));
  if (x0.level() == 1) {
    Eigen::JacobiSVD<ComplexMatrix> svd(realize(x0), Eigen::ComputeFullU | Eigen::ComputeFullV);
    const ComplexVector u = svd.matrixU().col(0);
    const ComplexVector v = svd.matrixV().col(0);
    std::vector<ComplexMatrix> planes;
    for (const auto& b : space->basis()) planes.push_back(ComplexMatrix::Constant(1, 1, (u.adjoint() * b * v).value()));
    offer(SeparationCertificate{space, std::move(planes)});
  }
  if (best && best_ratio > 1.0 + 1e-8) {
    if (auto cert = normalize(*best, set, x0)) return cert;
  }

  // Random functional grids with finite-difference ascent on the ratio.
  constexpr double kFdStep = 1e-6;
  const int d = space->dim();
  for (std::uint64_t restart = 0; used < budget; ++restart) {
    Rng rng = make_rng(seed.derive(restart));
    const int level = 1 + static_cast<int>(restart % 3);
    SeparationCertificate f{space, {}};
    for (int t = 0; t < d; ++t) f.planes.push_back(gaussian_matrix(level, level, rng));
    double r = offer(f);
    double step = 0.5;
    const std::int64_t params = 2LL * d * level * level;
    for (int it = 0; it < 100 && used + params < budget && std::isfinite(r); ++it) {
      std::vector<ComplexMatrix> grad;
      double g2 = 0.0;
      for (int t = 0; t < d; ++t) {
        ComplexMatrix g = ComplexMatrix::Zero(level, level);
        for (int i = 0; i < level; ++i) {
          for (int j = 0; j < level; ++j) {
            for (const Complex dir : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
              SeparationCertificate probe = f;
              probe.planes[static_cast<std::size_t>(t)](i, j) += kFdStep * dir;
              ++used;
              g(i, j) += ((separation_ratio(probe, set, x0) - r) / kFdStep) * dir;
            }
          }
        }
        g2 += g.squaredNorm();
        grad.push_back(std::move(g));
      }
      const double gn = std::sqrt(g2);
      if (!(gn > 0.0) || !std::isfinite(gn)) break;
      double fnorm = 0.0;
      for (const auto& p : f.planes) fnorm += p.squaredNorm();
      fnorm = std::sqrt(fnorm);
      bool improved = false;
      for (double s = step; s > 1e-10 && used < budget; s *= 0.5) {
        SeparationCertificate trial = f;
        for (std::size_t t = 0; t < grad.size(); ++t) trial.planes[t] += (s * fnorm / gn) * grad[t];
        const double rt = offer(trial);
        if (rt > r + 1e-14) {
          f = std::move(trial);
          r = rt;
          step = std::min(2.0 * s, 1.0);
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }
    if (best && best_ratio > 1.0 + 1e-8) {
      if (auto cert = normalize(*best, set, x0)) return cert;
    }
  }
  return std::nullopt;
}

}  // namespace cblab
