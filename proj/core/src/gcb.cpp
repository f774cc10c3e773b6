#include "cblab/gcb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "cblab/cbnorm.hpp"
#include "cblab/errors.hpp"

namespace cblab {

namespace {

constexpr double kPointCap = 1.0 - 1e-9;
constexpr int kMaxGroups = 3;
constexpr int kExhaustiveTerms = 10;

ComplexMatrix kron_identity(const ComplexMatrix& a, Eigen::Index p) {
  if (p == 1) return a;
  ComplexMatrix out = ComplexMatrix::Zero(a.rows() * p, a.cols() * p);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      for (Eigen::Index q = 0; q < p; ++q) out(i * p + q, j * p + q) = a(i, j);
    }
  }
  return out;
}

/// (sum_t X_t (x) F_t): blocks indexed by the point's level, inner size p.
ComplexMatrix apply_linear(const LinearEntry& entry, const OpSpaceMatrix& x) {
  const Eigen::Index k = x.level();
  const Eigen::Index p = entry.size();
  ComplexMatrix out = ComplexMatrix::Zero(k * p, k * p);
  for (std::size_t t = 0; t < entry.maps.size(); ++t) {
    const ComplexMatrix& xt = x.plane(static_cast<int>(t));
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) {
        if (xt(i, j) == Complex(0.0)) continue;
        out.block(i * p, j * p, p, p) += xt(i, j) * entry.maps[t];
      }
    }
  }
  return out;
}

/// All restricted growth strings of length n with labels < kMaxGroups.
void enumerate_groupings(std::size_t n, Grouping& current, int used, std::vector<Grouping>& out) {
  if (current.size() == n) {
    out.push_back(current);
    return;
  }
  for (int g = 0; g <= std::min(used, kMaxGroups - 1); ++g) {
    current.push_back(g);
    enumerate_groupings(n, current, std::max(used, g + 1), out);
    current.pop_back();
  }
}

struct CostModel {
  const GcbElement& u;
  std::vector<double> point_norms;

  double cost(const Grouping& grouping, const std::vector<double>& s, const std::vector<double>& r) const {
    const int groups = *std::max_element(grouping.begin(), grouping.end()) + 1;
    const int n = u.target_level;
    double total = 0.0;
    for (int g = 0; g < groups; ++g) {
      ComplexMatrix aa = ComplexMatrix::Zero(n, n);
      ComplexMatrix bb = ComplexMatrix::Zero(n, n);
      double peak = 0.0;
      bool any = false;
      for (std::size_t i = 0; i < u.terms.size(); ++i) {
        if (grouping[i] != g) continue;
        any = true;
        const auto& term = u.terms[i];
        aa += (s[i] * s[i]) * (term.alpha * term.alpha.adjoint());
        bb += (r[i] * r[i]) * (term.beta.adjoint() * term.beta);
        peak = std::max(peak, std::abs(term.c) / (s[i] * r[i]) * point_norms[i]);
      }
      if (!any) continue;
      total += std::sqrt(operator_norm(aa)) * std::sqrt(operator_norm(bb)) * peak;
    }
    return total;
  }
};

std::vector<double> scaling_grid() {
  std::vector<double> grid;
  for (int e = -16; e <= 16; ++e) grid.push_back(std::pow(2.0, 0.5 * e));
  return grid;
}

}  // namespace

void validate_gcb(const GcbElement& u) {
  if (!u.space) throw InvalidInput("gcb element: null space");
  if (u.target_level < 1) throw InvalidInput("gcb element: target level must be >= 1");
  for (std::size_t i = 0; i < u.terms.size(); ++i) {
    const auto& t = u.terms[i];
    const std::string where = "gcb element: term " + std::to_string(i);
    if (!same_space(t.point.space(), u.space)) throw InvalidInput(where + " lives in a different space");
    const int k = t.point.level();
    if (t.alpha.rows() != u.target_level || t.alpha.cols() != k || t.beta.rows() != k ||
        t.beta.cols() != u.target_level) {
      throw InvalidInput(where + " has inconsistent alpha/beta shapes");
    }
    if (!all_finite(t.alpha) || !all_finite(t.beta) || !std::isfinite(std::abs(t.c))) {
      throw InvalidInput(where + " has non-finite data");
    }
    if (matrix_norm(t.point) > kPointCap) throw InvalidInput(where + " has a point outside the open unit ball");
  }
}

GcbElement delta_element(const OpSpaceMatrix& x) {
  const int n = x.level();
  GcbElement u{x.space(), n, {GcbTerm{Complex(1.0), ComplexMatrix::Identity(n, n), x, ComplexMatrix::Identity(n, n)}}};
  validate_gcb(u);
  return u;
}

double representation_cost(const GcbElement& u, const Grouping& grouping) {
  validate_gcb(u);
  if (u.terms.empty()) return 0.0;
  if (grouping.size() != u.terms.size()) throw InvalidInput("representation_cost: grouping length mismatch");
  for (int g : grouping) {
    if (g < 0) throw InvalidInput("representation_cost: negative group index");
  }
  CostModel model{u, {}};
  for (const auto& t : u.terms) model.point_norms.push_back(matrix_norm(t.point));
  const std::vector<double> ones(u.terms.size(), 1.0);
  return model.cost(grouping, ones, ones);
}

GcbUpperResult gcb_upper_bound(const GcbElement& u, std::int64_t budget, RngSeed seed) {
  validate_gcb(u);
  GcbUpperResult result;
  if (u.terms.empty()) return result;
  const std::size_t n = u.terms.size();

  CostModel model{u, {}};
  for (const auto& t : u.terms) model.point_norms.push_back(matrix_norm(t.point));

  std::vector<Grouping> groupings;
  if (n <= kExhaustiveTerms) {
    Grouping current;
    enumerate_groupings(n, current, 0, groupings);
  } else {
    Grouping singles(n);
    for (std::size_t i = 0; i < n; ++i) singles[i] = static_cast<int>(i);
    groupings.push_back(std::move(singles));
    groupings.emplace_back(n, 0);
    Rng rng = make_rng(seed);
    std::uniform_int_distribution<int> label(0, kMaxGroups - 1);
    for (int extra = 0; extra < 2000; ++extra) {
      Grouping g(n);
      for (auto& v : g) v = label(rng);
      groupings.push_back(std::move(g));
    }
  }

  const std::vector<double> grid = scaling_grid();
  const std::vector<double> ones(n, 1.0);
  result.value = std::numeric_limits<double>::infinity();
  auto consider = [&](double c, const Grouping& g) {
    ++result.evaluations;
    if (c < result.value) {
      result.value = c;
      result.grouping = g;
    }
  };

  for (const auto& g : groupings) {
    if (result.evaluations >= budget && std::isfinite(result.value)) break;
    std::vector<double> s = ones;
    std::vector<double> r = ones;
    double current = model.cost(g, s, r);
    consider(current, g);

    const int groups = *std::max_element(g.begin(), g.end()) + 1;
    if (groups == static_cast<int>(n)) continue;  // singletons are scale invariant
    // Coordinate descent over the per-term transfers.
    for (int sweep = 0; sweep < 2 && result.evaluations < budget; ++sweep) {
      for (std::size_t i = 0; i < n && result.evaluations < budget; ++i) {
        for (auto* scales : {&s, &r}) {
          double best_scale = (*scales)[i];
          for (double t : grid) {
            (*scales)[i] = t;
            const double c = model.cost(g, s, r);
            consider(c, g);
            if (c < current) {
              current = c;
              best_scale = t;
            }
          }
          (*scales)[i] = best_scale;
        }
      }
    }
  }
  return result;
}

ComplexMatrix gcb_pairing(const GcbElement& u, const DictionaryEntry& entry) {
  validate_gcb(u);
  const int n = u.target_level;
  return std::visit(
      [&](const auto& test) -> ComplexMatrix {
        using T = std::decay_t<decltype(test)>;
        Eigen::Index p = 1;
        if constexpr (std::is_same_v<T, LinearEntry>) {
          if (static_cast<int>(test.maps.size()) != u.space->dim()) {
            throw InvalidInput("gcb_pairing: linear entry has wrong number of maps");
          }
          p = test.size();
        } else {
          if (!same_space(test.function.domain(), u.space)) {
            throw InvalidInput("gcb_pairing: function domain differs from the element's space");
          }
        }
        ComplexMatrix out = ComplexMatrix::Zero(n * p, n * p);
        for (const auto& term : u.terms) {
          ComplexMatrix value;
          if constexpr (std::is_same_v<T, LinearEntry>) {
            value = apply_linear(test, term.point);
          } else {
            value = amplify(test.function, term.point);
          }
          out += term.c * (kron_identity(term.alpha, p) * value * kron_identity(term.beta, p));
        }
        return out;
      },
      entry.test);
}

GcbLowerResult gcb_lower_bound(const GcbElement& u, const FunctionDictionary& dict) {
  if (dict.empty()) throw InvalidInput("gcb_lower_bound: empty dictionary");
  GcbLowerResult result;
  for (std::size_t e = 0; e < dict.size(); ++e) {
    const double bound = std::visit([](const auto& t) { return t.bound; }, dict[e].test);
    if (!(bound > 0.0)) continue;
    const double value = operator_norm(gcb_pairing(u, dict[e])) / bound;
    if (value > result.value) {
      result.value = value;
      result.best_entry = static_cast<int>(e);
    }
  }
  return result;
}

DictionaryEntry embedding_entry(const SpacePtr& space) {
  return DictionaryEntry{"embedding", LinearEntry{space->basis(), 1.0}};
}

FunctionDictionary coordinate_entries(const SpacePtr& space) {
  FunctionDictionary out;
  for (int t = 0; t < space->dim(); ++t) {
    ComplexVector e = ComplexVector::Zero(space->dim());
    e(t) = 1.0;
    const auto dual = exact_dual_norm(space, e);
    if (!dual || *dual == 0.0) continue;
    std::vector<ComplexMatrix> maps(static_cast<std::size_t>(space->dim()), ComplexMatrix::Zero(1, 1));
    maps[static_cast<std::size_t>(t)](0, 0) = 1.0;
    out.push_back(DictionaryEntry{"coordinate[" + std::to_string(t) + "]", LinearEntry{std::move(maps), *dual}});
  }
  return out;
}

DictionaryEntry norming_functional_entry(const OpSpaceElement& x) {
  Eigen::JacobiSVD<ComplexMatrix> svd(x.space->combine(x.coeffs), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const ComplexVector u = svd.matrixU().col(0);
  const ComplexVector v = svd.matrixV().col(0);
  std::vector<ComplexMatrix> maps;
  for (const auto& b : x.space->basis()) maps.push_back(ComplexMatrix::Constant(1, 1, (u.adjoint() * b * v).value()));
  return DictionaryEntry{"norming_functional", LinearEntry{std::move(maps), 1.0}};
}

FunctionDictionary standard_dictionary(const OpSpaceMatrix& x) {
  const SpacePtr& space = x.space();
  FunctionDictionary dict{embedding_entry(space)};
  for (auto& e : coordinate_entries(space)) dict.push_back(std::move(e));
  if (x.level() == 1) dict.push_back(norming_functional_entry(OpSpaceElement{space, x.entry(0, 0)}));

  auto add_function = [&](std::string name, const HoloFunction& f) {
    const auto ub = cb_upper_bound(f);
    if (ub.value && *ub.value > 0.0) dict.push_back(DictionaryEntry{std::move(name), ScalarEntry{f, *ub.value}});
  };
  if (space->is_scalar()) {
    for (const Complex a : {Complex(0.5), Complex(-0.5), Complex(0.0, 0.5)}) {
      add_function("z/(1-az)", moebius_quotient(identity_function(), a));
    }
    add_function("z^2", monomial(2));
    add_function("blaschke", blaschke(1.0, 1, {Complex(0.5)}));
  } else {
    for (int t = 0; t < space->dim(); ++t) {
      ComplexVector e = ComplexVector::Zero(space->dim());
      e(t) = 1.0;
      const auto dual = exact_dual_norm(space, e);
      if (!dual || *dual == 0.0) continue;
      const ComplexVector phi = e * (0.5 / *dual);
      add_function("geometric_phi[" + std::to_string(t) + "]", geometric_phi(space, phi, 0.5));
      add_function("composite_z2[" + std::to_string(t) + "]", composite(monomial(2), space, e * (0.9 / *dual), 0.9));
    }
  }
  return dict;
}

DeltaIsometryReport delta_isometry_check(const OpSpaceMatrix& x, std::int64_t budget, RngSeed seed) {
  DeltaIsometryReport report;
  report.norm = matrix_norm(x);
  if (!(report.norm < 1.0)) throw DomainError("delta_isometry_check: point must lie in the open unit ball");
  const GcbElement u = delta_element(x);
  report.upper = gcb_upper_bound(u, budget, seed).value;
  report.lower = gcb_lower_bound(u, standard_dictionary(x)).value;
  return report;
}

}  // namespace cblab
