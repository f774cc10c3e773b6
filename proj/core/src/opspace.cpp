#include "cblab/opspace.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "cblab/errors.hpp"

namespace cblab {

std::string to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::kScalar: return "scalar";
    case SpaceKind::kMatrix: return "matrix";
    case SpaceKind::kRow: return "row";
    case SpaceKind::kColumn: return "column";
    case SpaceKind::kMinLinf: return "min_linf";
    case SpaceKind::kCustom: return "custom";
  }
  return "custom";
}

ConcreteOperatorSpace::ConcreteOperatorSpace(SpaceKind kind, int param, std::vector<ComplexMatrix> basis)
    : kind_(kind), param_(param), ambient_(0), basis_(std::move(basis)) {
  if (basis_.empty()) throw InvalidInput("operator space: empty basis");
  ambient_ = static_cast<int>(basis_.front().rows());
  if (ambient_ < 1) throw InvalidInput("operator space: ambient size must be positive");
  const Eigen::Index n2 = static_cast<Eigen::Index>(ambient_) * ambient_;
  ComplexMatrix coords(static_cast<Eigen::Index>(basis_.size()), n2);
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    const ComplexMatrix& b = basis_[k];
    if (b.rows() != ambient_ || b.cols() != ambient_) {
      throw InvalidInput("operator space: basis element " + std::to_string(k) + " is not " +
                         std::to_string(ambient_) + "x" + std::to_string(ambient_));
    }
    if (!all_finite(b)) throw InvalidInput("operator space: non-finite basis entry");
    for (Eigen::Index i = 0; i < ambient_; ++i) {
      for (Eigen::Index j = 0; j < ambient_; ++j) coords(static_cast<Eigen::Index>(k), i * ambient_ + j) = b(i, j);
    }
  }
  if (coords.rows() > n2) throw InvalidInput("operator space: more basis elements than ambient dimension");
  Eigen::JacobiSVD<ComplexMatrix> svd(coords);
  if (svd.singularValues()(svd.singularValues().size() - 1) < 1e-10) {
    throw InvalidInput("operator space: basis is linearly dependent");
  }
}

ComplexMatrix ConcreteOperatorSpace::combine(const ComplexVector& coeffs) const {
  if (coeffs.size() != dim()) throw InvalidInput("operator space: coefficient vector has wrong length");
  ComplexMatrix out = ComplexMatrix::Zero(ambient_, ambient_);
  for (int k = 0; k < dim(); ++k) out += coeffs(k) * basis(k);
  return out;
}

std::string ConcreteOperatorSpace::label() const {
  if (kind_ == SpaceKind::kScalar) return "scalar";
  if (kind_ == SpaceKind::kCustom) return "custom(d=" + std::to_string(dim()) + ",N=" + std::to_string(ambient_) + ")";
  return to_string(kind_) + "(" + std::to_string(param_) + ")";
}

bool same_space(const SpacePtr& a, const SpacePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->dim() != b->dim() || a->ambient() != b->ambient()) return false;
  for (int k = 0; k < a->dim(); ++k) {
    if (a->basis(k) != b->basis(k)) return false;
  }
  return true;
}

namespace {

ComplexMatrix unit(int n, int i, int j) {
  ComplexMatrix e = ComplexMatrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

void require_positive(int n, const char* what) {
  if (n < 1) throw InvalidInput(std::string(what) + ": parameter must be >= 1");
}

}  // namespace

SpacePtr space_scalar() {
  return std::make_shared<const ConcreteOperatorSpace>(SpaceKind::kScalar, 1,
                                                       std::vector<ComplexMatrix>{ComplexMatrix::Ones(1, 1)});
}

SpacePtr space_Mk(int k) {
  require_positive(k, "space_Mk");
  std::vector<ComplexMatrix> basis;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) basis.push_back(unit(k, i, j));
  }
  return std::make_shared<const ConcreteOperatorSpace>(SpaceKind::kMatrix, k, std::move(basis));
}

SpacePtr space_row(int n) {
  require_positive(n, "space_row");
  std::vector<ComplexMatrix> basis;
  for (int j = 0; j < n; ++j) basis.push_back(unit(n, 0, j));
  return std::make_shared<const ConcreteOperatorSpace>(SpaceKind::kRow, n, std::move(basis));
}

SpacePtr space_column(int n) {
  require_positive(n, "space_column");
  std::vector<ComplexMatrix> basis;
  for (int i = 0; i < n; ++i) basis.push_back(unit(n, i, 0));
  return std::make_shared<const ConcreteOperatorSpace>(SpaceKind::kColumn, n, std::move(basis));
}

SpacePtr space_min_linf(int d) {
  require_positive(d, "space_min_linf");
  std::vector<ComplexMatrix> basis;
  for (int i = 0; i < d; ++i) basis.push_back(unit(d, i, i));
  return std::make_shared<const ConcreteOperatorSpace>(SpaceKind::kMinLinf, d, std::move(basis));
}

SpacePtr space_custom(std::vector<ComplexMatrix> basis) {
  return std::make_shared<const ConcreteOperatorSpace>(SpaceKind::kCustom, 0, std::move(basis));
}

OpSpaceMatrix::OpSpaceMatrix(SpacePtr space, std::vector<ComplexMatrix> planes)
    : space_(std::move(space)), planes_(std::move(planes)) {
  if (!space_) throw InvalidInput("operator space matrix: null space");
  if (static_cast<int>(planes_.size()) != space_->dim()) {
    throw InvalidInput("operator space matrix: expected " + std::to_string(space_->dim()) +
                       " coefficient planes, got " + std::to_string(planes_.size()));
  }
  const Eigen::Index m = planes_.front().rows();
  if (m < 1) throw InvalidInput("operator space matrix: level must be positive");
  for (const auto& p : planes_) {
    if (p.rows() != m || p.cols() != m) throw InvalidInput("operator space matrix: ragged coefficient planes");
    if (!all_finite(p)) throw InvalidInput("operator space matrix: non-finite coefficient");
  }
}

OpSpaceMatrix OpSpaceMatrix::zero(SpacePtr space, int level) {
  if (!space) throw InvalidInput("operator space matrix: null space");
  std::vector<ComplexMatrix> planes(static_cast<std::size_t>(space->dim()), ComplexMatrix::Zero(level, level));
  return {std::move(space), std::move(planes)};
}

OpSpaceMatrix OpSpaceMatrix::from_scalar(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidInput("operator space matrix: scalar matrix must be square");
  return {space_scalar(), {a}};
}

OpSpaceMatrix OpSpaceMatrix::from_element(const OpSpaceElement& x) {
  if (!x.space || x.coeffs.size() != x.space->dim()) throw InvalidInput("operator space element: bad coefficients");
  std::vector<ComplexMatrix> planes;
  for (int k = 0; k < x.space->dim(); ++k) planes.push_back(ComplexMatrix::Constant(1, 1, x.coeffs(k)));
  return {x.space, std::move(planes)};
}

ComplexVector OpSpaceMatrix::entry(int i, int j) const {
  ComplexVector v(static_cast<Eigen::Index>(planes_.size()));
  for (std::size_t k = 0; k < planes_.size(); ++k) v(static_cast<Eigen::Index>(k)) = planes_[k](i, j);
  return v;
}

OpSpaceMatrix OpSpaceMatrix::compress(const ComplexMatrix& alpha, const ComplexMatrix& beta) const {
  if (alpha.cols() != level() || beta.rows() != level() || alpha.rows() != beta.cols()) {
    throw InvalidInput("compress: alpha/beta shapes do not match level " + std::to_string(level()));
  }
  std::vector<ComplexMatrix> out;
  out.reserve(planes_.size());
  for (const auto& p : planes_) out.emplace_back(alpha * p * beta);
  return {space_, std::move(out)};
}

OpSpaceMatrix OpSpaceMatrix::scaled(Complex c) const {
  std::vector<ComplexMatrix> out;
  out.reserve(planes_.size());
  for (const auto& p : planes_) out.emplace_back(c * p);
  return {space_, std::move(out)};
}

OpSpaceMatrix operator+(const OpSpaceMatrix& a, const OpSpaceMatrix& b) {
  if (!same_space(a.space_, b.space_)) throw InvalidInput("operator space matrix: adding across spaces");
  if (a.level() != b.level()) throw InvalidInput("operator space matrix: adding different levels");
  std::vector<ComplexMatrix> out;
  out.reserve(a.planes_.size());
  for (std::size_t k = 0; k < a.planes_.size(); ++k) out.emplace_back(a.planes_[k] + b.planes_[k]);
  return {a.space_, std::move(out)};
}

OpSpaceMatrix direct_sum(const OpSpaceMatrix& x, const OpSpaceMatrix& y) {
  if (!same_space(x.space(), y.space())) throw InvalidInput("direct_sum: operands live in different spaces");
  std::vector<ComplexMatrix> out;
  for (int k = 0; k < x.space()->dim(); ++k) out.push_back(direct_sum(x.plane(k), y.plane(k)));
  return {x.space(), std::move(out)};
}

ComplexMatrix realize(const OpSpaceMatrix& x) {
  const auto& space = *x.space();
  if (space.is_scalar()) return x.as_scalar() * space.basis(0)(0, 0);
  const int m = x.level();
  const int n = space.ambient();
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(m) * n, static_cast<Eigen::Index>(m) * n);
  for (int k = 0; k < space.dim(); ++k) {
    const ComplexMatrix& b = space.basis(k);
    const ComplexMatrix& c = x.plane(k);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        if (c(i, j) == Complex(0.0)) continue;
        out.block(static_cast<Eigen::Index>(i) * n, static_cast<Eigen::Index>(j) * n, n, n) += c(i, j) * b;
      }
    }
  }
  return out;
}

double matrix_norm(const OpSpaceMatrix& x) { return operator_norm(realize(x)); }

double element_norm(const OpSpaceElement& x) { return operator_norm(x.space->combine(x.coeffs)); }

OpSpaceMatrix sample_space_ball(const SpacePtr& space, int level, double radius, Rng& rng) {
  if (!(radius > 0.0 && radius < 1.0)) throw InvalidInput("sample_space_ball: radius must lie in (0,1)");
  if (space->is_scalar()) return OpSpaceMatrix::from_scalar(sample_ball(level, radius, rng));
  for (;;) {
    std::vector<ComplexMatrix> planes;
    for (int k = 0; k < space->dim(); ++k) planes.push_back(gaussian_matrix(level, level, rng));
    OpSpaceMatrix x(space, std::move(planes));
    const double n = matrix_norm(x);
    if (n > 0.0) return x.scaled(radius / n);
  }
}

double dual_functional_norm(const SpacePtr& space, const ComplexVector& phi, int budget, RngSeed seed) {
  if (budget < 1) throw InvalidInput("dual_functional_norm: budget must be >= 1");
  if (phi.size() != space->dim()) throw InvalidInput("dual_functional_norm: functional has wrong length");
  if (phi.norm() == 0.0) return 0.0;

  // Maximizes |phi.x| / ||x||_p for p = 2, 4, ..., 4096. The Schatten norm
  // dominates the operator norm and is smooth, so the ascent does not stall
  // on kinks; candidates are always scored with the operator norm.
  int used = 0;
  auto value = [&](const ComplexVector& x) {
    ++used;
    return std::abs((phi.transpose() * x).value()) / element_norm({space, x});
  };
  auto smoothed = [&](const ComplexVector& x, double p, ComplexVector* grad) {
    const Complex s = (phi.transpose() * x).value();
    Eigen::JacobiSVD<ComplexMatrix> svd(space->combine(x), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd sv = svd.singularValues();
    const double top = sv(0);
    if (top == 0.0 || std::abs(s) == 0.0) return 0.0;
    const Eigen::VectorXd w = (sv / top).array().pow(p);
    const double total = w.sum();
    if (grad != nullptr) {
      const Complex phase = s / std::abs(s);
      ComplexVector g = phi.conjugate() * phase / std::abs(s);
      const ComplexMatrix m = svd.matrixU() * (w.array() / sv.array().max(1e-300)).matrix().cast<Complex>().asDiagonal() *
                              svd.matrixV().adjoint();
      for (int k = 0; k < space->dim(); ++k) g(k) -= (space->basis(k).adjoint() * m).trace() / total;
      *grad = g;
    }
    return std::log(std::abs(s)) - std::log(top) - std::log(total) / p;
  };
  Rng rng = make_rng(seed);
  double best = 0.0;
  for (int restart = 0; used < budget; ++restart) {
    ComplexVector x(space->dim());
    if (restart == 0) {
      x = phi.conjugate();
    } else {
      for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = complex_gaussian(rng);
    }
    x /= element_norm({space, x});
    best = std::max(best, value(x));
    for (double p = 2.0; p <= 4096.0 && used < budget; p *= 2.0) {
      double step = 0.5;
      ComplexVector g;
      double current = smoothed(x, p, &g);
      for (int it = 0; it < 100 && used < budget && step > 1e-10; ++it) {
        if (g.norm() < 1e-12) break;
        const ComplexVector dir = g / g.norm();
        bool improved = false;
        while (step > 1e-10 && used < budget) {
          ComplexVector trial = x + step * dir;
          trial /= element_norm({space, trial});
          ComplexVector trial_grad;
          const double v = smoothed(trial, p, &trial_grad);
          ++used;
          if (v > current + 1e-15) {
            x = trial;
            g = trial_grad;
            current = v;
            improved = true;
            step = std::min(1.0, step * 2.0);
            break;
          }
          step *= 0.5;
        }
        if (!improved) break;
      }
      best = std::max(best, value(x));
    }
  }
  return best;
}

std::optional<double> exact_dual_norm(const SpacePtr& space, const ComplexVector& phi) {
  if (phi.size() != space->dim()) throw InvalidInput("exact_dual_norm: functional has wrong length");
  switch (space->kind()) {
    case SpaceKind::kScalar: return std::abs(phi(0));
    case SpaceKind::kMinLinf: return phi.cwiseAbs().sum();
    case SpaceKind::kRow:
    case SpaceKind::kColumn: return phi.norm();
    case SpaceKind::kMatrix: {
      const int k = space->param();
      ComplexMatrix p(k, k);
      for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) p(i, j) = phi(i * k + j);
      }
      Eigen::JacobiSVD<ComplexMatrix> svd(p);
      return svd.singularValues().sum();
    }
    case SpaceKind::kCustom: return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace cblab
