#include "cblab/cbnorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

#include "cblab/errors.hpp"

namespace cblab {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kFdStep = 1e-5;
constexpr double kProbeLimit = 1.0 - 1e-7;
constexpr int kMaxAscentSteps = 200;
constexpr int kWienerTruncation = 256;

/// Singular-value clipping of the realization, mapped back onto M_m(V) by
/// the Frobenius-orthogonal projection, then rescaled if still outside.
/// Exact clipping for C and M_k.
OpSpaceMatrix project(const OpSpaceMatrix& x) {
  if (x.space()->is_scalar()) return OpSpaceMatrix::from_scalar(project_ball(x.as_scalar(), kBallCap));
  const double n = matrix_norm(x);
  if (n <= kBallCap) return x;
  const auto& space = *x.space();
  const int d = space.dim();
  const int big_n = space.ambient();
  const int m = x.level();
  const ComplexMatrix clipped = project_ball(realize(x), kBallCap);
  ComplexMatrix gram(d, d);
  for (int l = 0; l < d; ++l)
    for (int k = 0; k < d; ++k) gram(l, k) = space.basis(l).cwiseProduct(space.basis(k).conjugate()).sum();
  const Eigen::LDLT<ComplexMatrix> solver(gram.conjugate());
  std::vector<ComplexMatrix> planes(static_cast<std::size_t>(d), ComplexMatrix::Zero(m, m));
  ComplexVector rhs(d);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const ComplexMatrix block = clipped.block(i * big_n, j * big_n, big_n, big_n);
      for (int l = 0; l < d; ++l) rhs(l) = block.cwiseProduct(space.basis(l).conjugate()).sum();
      const ComplexVector c = solver.solve(rhs);
      for (int k = 0; k < d; ++k) planes[static_cast<std::size_t>(k)](i, j) = c(k);
    }
  }
  OpSpaceMatrix y(x.space(), std::move(planes));
  const double yn = matrix_norm(y);
  return yn > kBallCap ? y.scaled(kBallCap / yn) : y;
}

std::vector<double> flatten(const OpSpaceMatrix& x) {
  std::vector<double> out;
  for (const auto& p : x.planes()) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      for (Eigen::Index j = 0; j < p.cols(); ++j) {
        out.push_back(p(i, j).real());
        out.push_back(p(i, j).imag());
      }
    }
  }
  return out;
}

/// Merge rule for candidate witnesses: larger value wins, exact ties go to
/// the lexicographically smaller matrix.
bool better(double value, const OpSpaceMatrix& x, const Witness& best) {
  if (value != best.value) return value > best.value;
  return flatten(x) < flatten(best.matrix);
}

/// x + t * direction, where direction has the same shape as x.
OpSpaceMatrix axpy(const OpSpaceMatrix& x, double t, const std::vector<ComplexMatrix>& direction) {
  std::vector<ComplexMatrix> planes;
  planes.reserve(direction.size());
  for (std::size_t k = 0; k < direction.size(); ++k) planes.emplace_back(x.planes()[k] + t * direction[k]);
  return {x.space(), std::move(planes)};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

struct Rule {
  std::optional<double> value;
  std::string why;
};

void take_min(Rule& acc, const Rule& candidate) {
  if (!candidate.value) return;
  if (!acc.value || *candidate.value < *acc.value) acc = candidate;
}

/// Sum of |a_n| plus a certified tail, for functions with absolutely
/// summable Taylor series we can control.
Rule wiener_rule(const HoloFunction& f) {
  if (!f.scalar_domain()) return {};
  if (const auto* p = std::get_if<holo::PowerSeries>(&f.node().payload)) {
    double total = 0.0;
    for (const auto& a : p->coeffs) total += std::abs(a);
    return {total, "wiener(polynomial)"};
  }
  if (!(analytic_radius(f) > 1.0)) return {};
  const TaylorCoeffs tc = taylor_coefficients(f, kWienerTruncation);
  if (!tc.tail_bound) return {};
  double total = 0.0;
  for (const auto& a : tc.coeffs) total += std::abs(a);
  // Round-off allowance for the Fourier-extracted coefficients.
  total += *tc.tail_bound + 1e-10 * (1.0 + total);
  return {total, "wiener(K=" + std::to_string(kWienerTruncation) + ",cauchy tail)"};
}

Rule upper_rule(const HoloFunction& f) {
  Rule best = std::visit(
      Overloaded{
          [&](const holo::PowerSeries&) { return Rule{}; },
          [&](const holo::Blaschke& b) {
            // c z^m prod (z - a_j) is a polynomial; each 1/(1 - conj(a_j) z)
            // factor costs 1/(1 - |a_j|).
            std::vector<Complex> poly(static_cast<std::size_t>(b.m) + 1, Complex(0.0));
            poly.back() = b.c;
            for (const auto& a : b.zeros) {
              std::vector<Complex> next(poly.size() + 1, Complex(0.0));
              for (std::size_t n = 0; n < poly.size(); ++n) {
                next[n + 1] += poly[n];
                next[n] -= a * poly[n];
              }
              poly = std::move(next);
            }
            double total = 0.0;
            for (const auto& c : poly) total += std::abs(c);
            for (const auto& a : b.zeros) total /= 1.0 - std::abs(a);
            return Rule{total, "blaschke(polynomial/prod(1-|a_j|))"};
          },
          [&](const holo::MoebiusQuotient& q) {
            Rule inner = upper_rule(q.inner);
            if (!inner.value) return Rule{};
            return Rule{*inner.value / (1.0 - std::abs(q.a)), "quotient(" + inner.why + ")/(1-|a|)"};
          },
          [&](const holo::GeometricPhi& g) {
            const double r = g.functional.certified_norm;
            return Rule{r / (1.0 - r), "geometric(r/(1-r), r=" + fmt(r) + ")"};
          },
          [&](const holo::Product& p) {
            Rule l = upper_rule(p.left);
            Rule r = upper_rule(p.right);
            if (!l.value || !r.value) return Rule{};
            return Rule{*l.value * *r.value, "product(" + l.why + "," + r.why + ")"};
          },
          [&](const holo::Sum& s) {
            Rule l = upper_rule(s.left);
            Rule r = upper_rule(s.right);
            if (!l.value || !r.value) return Rule{};
            return Rule{*l.value + *r.value, "sum(" + l.why + "," + r.why + ")"};
          },
          [&](const holo::Scale& s) {
            Rule inner = upper_rule(s.inner);
            if (!inner.value) return Rule{};
            return Rule{std::abs(s.c) * *inner.value, "scale(" + inner.why + ")"};
          },
          [&](const holo::Composite& c) {
            // ||(phi(x_ij))|| <= r ||x||, so f = g(r * (phi/r)(x)) with phi/r
            // completely contractive.
            Rule rule = upper_rule(c.scalar);
            if (rule.value) rule.why = "composite(" + rule.why + ")";
            if (const auto* p = std::get_if<holo::PowerSeries>(&c.scalar.node().payload)) {
              const double r = c.functional.certified_norm;
              double total = 0.0;
              double power = r;
              for (const auto& a : p->coeffs) {
                total += std::abs(a) * power;
                power *= r;
              }
              take_min(rule, Rule{total, "composite(wiener(polynomial) at radius r=" + fmt(r) + ")"});
            }
            return rule;
          },
      },
      f.node().payload);
  if (std::holds_alternative<holo::Scale>(f.node().payload)) return best;
  take_min(best, wiener_rule(f));
  return best;
}

}  // namespace

std::vector<int> default_levels() { return {1, 2, 4, 8}; }

double witness_value(const HoloFunction& f, const OpSpaceMatrix& x) { return operator_norm(amplify(f, x)); }

Witness level_sup(const HoloFunction& f, int level, std::int64_t budget, RngSeed seed) {
  if (level < 1) throw InvalidInput("level_sup: level must be >= 1");
  if (budget < 1) throw InvalidInput("level_sup: budget must be >= 1");
  const SpacePtr& space = f.domain();

  std::int64_t used = 0;
  auto eval = [&](const OpSpaceMatrix& x) {
    ++used;
    return witness_value(f, x);
  };

  std::optional<Witness> best;
  auto offer = [&](const OpSpaceMatrix& x, double v) {
    if (!best || better(v, x, *best)) best = Witness{level, x, v};
  };

  const std::int64_t params = 2LL * space->dim() * level * level;
  double basis_norm = 0.0;
  for (const auto& b : space->basis()) basis_norm = std::max(basis_norm, operator_norm(b));
  // Probes x + h e must stay strictly inside the unit ball unprojected:
  // clipping them would put a kink into the difference quotient exactly
  // where the supremum lives.
  const double base_limit = kProbeLimit - kFdStep * basis_norm;
  for (std::uint64_t restart = 0; used < budget; ++restart) {
    Rng rng = make_rng(seed.derive(restart));
    // Restart 0 on a scalar-domain function starts from cap * I, whose
    // amplification is f(cap) I; the rest are Gaussian.
    OpSpaceMatrix x = restart == 0 && space->is_scalar()
                          ? OpSpaceMatrix::from_scalar(ComplexMatrix::Identity(level, level) * kBallCap)
                          : project(sample_space_ball(space, level, kBallCap, rng));
    double v = eval(x);
    offer(x, v);

    double step = 0.1;
    for (int it = 0; it < kMaxAscentSteps && used + params + 1 < budget; ++it) {
      const double xn = matrix_norm(x);
      const bool shrink = xn > base_limit;
      const OpSpaceMatrix base = shrink ? x.scaled(base_limit / xn) : x;
      const double vb = shrink ? eval(base) : v;
      std::vector<ComplexMatrix> grad;
      double gnorm2 = 0.0;
      for (int k = 0; k < space->dim(); ++k) {
        ComplexMatrix g = ComplexMatrix::Zero(level, level);
        for (int i = 0; i < level; ++i) {
          for (int j = 0; j < level; ++j) {
            for (const Complex dir : {Complex(1.0, 0.0), Complex(0.0, 1.0)}) {
              std::vector<ComplexMatrix> probe_planes = base.planes();
              probe_planes[static_cast<std::size_t>(k)](i, j) += kFdStep * dir;
              const double vp = eval(OpSpaceMatrix(space, std::move(probe_planes)));
              g(i, j) += ((vp - vb) / kFdStep) * dir;
            }
          }
        }
        gnorm2 += g.squaredNorm();
        grad.push_back(std::move(g));
      }
      const double gnorm = std::sqrt(gnorm2);
      if (!(gnorm > 0.0)) break;
      for (auto& g : grad) g /= gnorm;

      bool improved = false;
      for (double t = step; t > 1e-10 && used < budget; t *= 0.5) {
        OpSpaceMatrix trial = project(axpy(x, t, grad));
        const double vt = eval(trial);
        if (vt > v + 1e-14) {
          x = std::move(trial);
          v = vt;
          step = std::min(2.0 * t, 1.0);
          improved = true;
          break;
        }
      }
      if (!improved) break;
      offer(x, v);
    }
  }
  return *best;
}

Witness lift_witness(const HoloFunction& f, const Witness& w) {
  OpSpaceMatrix lifted = direct_sum(w.matrix, OpSpaceMatrix::zero(w.matrix.space(), 1));
  // f_{m+1}(X + 0) = f_m(X) + 0 exactly, so the value carries over; the
  // recomputation only guards against a broken amplification.
  const double recomputed = witness_value(f, lifted);
  if (std::abs(recomputed - w.value) > 1e-12 * std::max(1.0, std::abs(w.value)))
    throw InternalConsistencyError("lift_witness: value changed under direct sum with 0");
  return Witness{w.level + 1, std::move(lifted), w.value};
}

CbEstimate cb_lower_bound(const HoloFunction& f, int max_level, std::int64_t budget, RngSeed seed,
                          const std::vector<int>& schedule) {
  if (max_level < 1) throw InvalidInput("cb_lower_bound: max_level must be >= 1");
  if (budget < 1) throw InvalidInput("cb_lower_bound: budget must be >= 1");
  // Each searched level gets the full budget and its own derived seed, so
  // raising max_level or budget only ever adds evaluations.
  std::set<int> searched{1};
  for (int m : schedule) {
    if (m >= 1 && m <= max_level) searched.insert(m);
  }
  const std::int64_t per_level = budget;

  CbEstimate est;
  est.seed = seed;
  est.budget = budget;
  for (int m = 1; m <= max_level; ++m) {
    std::optional<LevelEntry> entry;
    if (m > 1) {
      const LevelEntry& prev = est.level_table.back();
      Witness lifted = lift_witness(f, prev.witness);
      const double value = lifted.value;
      entry = LevelEntry{m, value, std::move(lifted), 0, true};
    }
    if (searched.contains(m)) {
      Witness found = level_sup(f, m, per_level, seed.derive(static_cast<std::uint64_t>(m)));
      if (!entry || found.value > entry->value) {
        const double value = found.value;
        entry = LevelEntry{m, value, std::move(found), per_level, false};
      } else {
        entry->samples = per_level;
      }
    }
    est.level_table.push_back(std::move(*entry));
  }
  est.lower = est.level_table.back().value;
  std::string levels;
  for (int m : searched) levels += (levels.empty() ? "" : ",") + std::to_string(m);
  est.provenance = "lower: level_sup at levels {" + levels + "}, direct-sum lifting";
  return est;
}

UpperBound cb_upper_bound(const HoloFunction& f) {
  Rule r = upper_rule(f);
  return {r.value, r.value ? r.why : "no certified rule applies"};
}

CbEstimate sandwich(const HoloFunction& f, int max_level, std::int64_t budget, RngSeed seed,
                    const std::vector<int>& schedule) {
  CbEstimate est = cb_lower_bound(f, max_level, budget, seed, schedule);
  const UpperBound ub = cb_upper_bound(f);
  est.upper = ub.value;
  est.provenance += "; upper: " + ub.provenance;
  if (est.upper && est.lower > *est.upper + 1e-6) {
    throw InternalConsistencyError("sandwich violated for " + describe(f) + ": lower " + fmt(est.lower) +
                                   " > upper " + fmt(*est.upper));
  }
  return est;
}

SchwarzReport schwarz_check(const HoloFunction& f, const CbEstimate& estimate, int trials, RngSeed seed,
                            int max_level) {
  if (!estimate.upper) throw InvalidInput("schwarz_check: estimate has no finite upper bound");
  if (trials < 1 || max_level < 1) throw InvalidInput("schwarz_check: trials and max_level must be >= 1");
  SchwarzReport report;
  report.upper = *estimate.upper;
  report.trials = trials;
  report.worst_slack = std::numeric_limits<double>::infinity();
  report.max_slack = -std::numeric_limits<double>::infinity();
  Rng rng = make_rng(seed);
  std::uniform_int_distribution<int> level_dist(1, max_level);
  std::uniform_real_distribution<double> radius_dist(1e-3, kBallCap);
  for (int t = 0; t < trials; ++t) {
    const int m = level_dist(rng);
    const double r = radius_dist(rng);
    const OpSpaceMatrix x = sample_space_ball(f.domain(), m, r, rng);
    const double slack = report.upper * matrix_norm(x) - witness_value(f, x);
    report.worst_slack = std::min(report.worst_slack, slack);
    report.max_slack = std::max(report.max_slack, slack);
    if (slack < -1e-8) ++report.violations;
  }
  return report;
}

AlgebraReport algebra_check(const HoloFunction& f, const HoloFunction& g, int max_level, std::int64_t budget,
                            RngSeed seed) {
  AlgebraReport report;
  report.product_lower = cb_lower_bound(product(f, g), max_level, budget, seed).lower;
  report.upper_f = cb_upper_bound(f).value;
  report.upper_g = cb_upper_bound(g).value;
  if (report.upper_f && report.upper_g) {
    report.checked = true;
    report.passed = report.product_lower <= *report.upper_f * *report.upper_g + 1e-6;
  }
  return report;
}

std::string to_string(GrowthVerdict v) {
  switch (v) {
    case GrowthVerdict::kBounded: return "bounded";
    case GrowthVerdict::kGrowing: return "growing";
    case GrowthVerdict::kInconclusive: return "inconclusive";
  }
  return "inconclusive";
}

ProbeReport question_probe(const HoloFunction& f, const std::vector<int>& schedule, std::int64_t budget,
                           RngSeed seed) {
  if (!f.scalar_domain()) throw ConfigurationError("question_probe: function must be defined on the disk");
  std::set<int> levels;
  for (int m : schedule) {
    if (m < 1) throw InvalidInput("question_probe: levels must be >= 1");
    levels.insert(m);
  }
  if (levels.empty()) throw InvalidInput("question_probe: empty schedule");
  const std::int64_t per_level = budget;

  ProbeReport report;
  report.upper = cb_upper_bound(f).value;
  double running = 0.0;
  for (int m : levels) {
    const Witness w = level_sup(f, m, per_level, seed.derive(static_cast<std::uint64_t>(m)));
    running = std::max(running, w.value);
    report.rows.push_back({m, w.value, running});
  }
  if (report.rows.size() < 2) return report;

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const auto n = static_cast<double>(report.rows.size());
  for (const auto& row : report.rows) {
    const double x = std::log(static_cast<double>(row.level));
    sx += x;
    sy += row.lifted;
    sxx += x * x;
    sxy += x * row.lifted;
  }
  report.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double span = std::log(static_cast<double>(report.rows.back().level) / report.rows.front().level);
  const double scale = std::max(running, 1e-12);
  const double relative_growth = report.slope * span / scale;
  if (relative_growth < 0.01) {
    report.verdict = GrowthVerdict::kBounded;
  } else if (relative_growth > 0.05) {
    report.verdict = GrowthVerdict::kGrowing;
  }
  return report;
}

}  // namespace cblab
