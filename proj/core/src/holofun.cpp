#include "cblab/holofun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
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

constexpr double kImageGuard = 1e-9;

const SpacePtr& scalar_space_singleton() {
  static const SpacePtr space = space_scalar();
  return space;
}

HoloFunction make(HoloNode::Payload payload, SpacePtr domain) {
  return HoloFunction(std::make_shared<const HoloNode>(HoloNode{std::move(payload), std::move(domain)}));
}

void require_finite(Complex z, const char* what) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw InvalidInput(std::string(what) + ": non-finite parameter");
  }
}

Complex eval_scalar(const HoloNode& node, Complex z);

Complex eval_power_series(const holo::PowerSeries& p, Complex z) {
  const auto& a = p.coeffs;
  std::size_t nonzero = 0;
  for (const auto& c : a) nonzero += (c != Complex(0.0)) ? 1 : 0;
  if (nonzero * 8 < a.size()) {
    // Sparse (e.g. lacunary) series: sum the nonzero terms directly.
    Complex acc = 0.0;
    Complex power = z;
    std::size_t exponent = 1;
    for (std::size_t n = 0; n < a.size(); ++n) {
      if (a[n] == Complex(0.0)) continue;
      while (exponent < n + 1) {
        power *= z;
        ++exponent;
      }
      acc += a[n] * power;
    }
    return acc;
  }
  Complex acc = 0.0;
  for (std::size_t n = a.size(); n-- > 0;) acc = acc * z + a[n];
  return acc * z;
}

Complex eval_scalar(const HoloNode& node, Complex z) {
  return std::visit(
      Overloaded{
          [&](const holo::PowerSeries& p) { return eval_power_series(p, z); },
          [&](const holo::Blaschke& b) {
            Complex acc = b.c * std::pow(z, b.m);
            for (const auto& a : b.zeros) acc *= (z - a) / (1.0 - std::conj(a) * z);
            return acc;
          },
          [&](const holo::MoebiusQuotient& q) { return eval_scalar(q.inner.node(), z) / (1.0 - q.a * z); },
          [&](const holo::Product& p) { return eval_scalar(p.left.node(), z) * eval_scalar(p.right.node(), z); },
          [&](const holo::Sum& s) { return eval_scalar(s.left.node(), z) + eval_scalar(s.right.node(), z); },
          [&](const holo::Scale& s) { return s.c * eval_scalar(s.inner.node(), z); },
          [&](const holo::GeometricPhi&) -> Complex {
            throw ConfigurationError("functional-based function evaluated on the disk");
          },
          [&](const holo::Composite&) -> Complex {
            throw ConfigurationError("functional-based function evaluated on the disk");
          },
      },
      node.payload);
}

Complex eval_point(const HoloNode& node, const ComplexVector& coords) {
  if (node.domain->is_scalar()) return eval_scalar(node, coords(0));
  auto guarded = [](Complex w) {
    if (std::abs(w) >= 1.0) throw DomainError("functional value outside the open unit disk");
    return w;
  };
  return std::visit(
      Overloaded{
          [&](const holo::GeometricPhi& g) {
            const Complex w = guarded(g.functional.apply(coords));
            return w / (1.0 - w);
          },
          [&](const holo::Composite& c) {
            return eval_scalar(c.scalar.node(), guarded(c.functional.apply(coords)));
          },
          [&](const holo::Product& p) { return eval_point(p.left.node(), coords) * eval_point(p.right.node(), coords); },
          [&](const holo::Sum& s) { return eval_point(s.left.node(), coords) + eval_point(s.right.node(), coords); },
          [&](const holo::Scale& s) { return s.c * eval_point(s.inner.node(), coords); },
          [&](const auto&) -> Complex { throw ConfigurationError("scalar-domain node under a non-scalar domain"); },
      },
      node.payload);
}

ComplexMatrix entrywise(const HoloNode& node, const ComplexMatrix& s) {
  ComplexMatrix out(s.rows(), s.cols());
  for (Eigen::Index j = 0; j < s.cols(); ++j) {
    for (Eigen::Index i = 0; i < s.rows(); ++i) out(i, j) = eval_scalar(node, s(i, j));
  }
  return out;
}

ComplexMatrix guarded_image(const CertifiedFunctional& functional, const OpSpaceMatrix& x) {
  ComplexMatrix s = functional.apply(x);
  if (operator_norm(s) >= 1.0 - kImageGuard) {
    throw DomainError("functional image (phi(x_ij)) has norm >= 1 - 1e-9; certification is inconsistent");
  }
  return s;
}

ComplexMatrix amplify_node(const HoloNode& node, const OpSpaceMatrix& x) {
  if (node.domain->is_scalar()) return entrywise(node, x.as_scalar());
  return std::visit(
      Overloaded{
          [&](const holo::GeometricPhi& g) -> ComplexMatrix {
            const ComplexMatrix s = guarded_image(g.functional, x);
            ComplexMatrix out(s.rows(), s.cols());
            for (Eigen::Index j = 0; j < s.cols(); ++j) {
              for (Eigen::Index i = 0; i < s.rows(); ++i) out(i, j) = s(i, j) / (1.0 - s(i, j));
            }
            return out;
          },
          [&](const holo::Composite& c) -> ComplexMatrix {
            return entrywise(c.scalar.node(), guarded_image(c.functional, x));
          },
          [&](const holo::Product& p) -> ComplexMatrix {
            return schur_product(amplify_node(p.left.node(), x), amplify_node(p.right.node(), x));
          },
          [&](const holo::Sum& s) -> ComplexMatrix {
            return amplify_node(s.left.node(), x) + amplify_node(s.right.node(), x);
          },
          [&](const holo::Scale& s) -> ComplexMatrix { return s.c * amplify_node(s.inner.node(), x); },
          [&](const auto&) -> ComplexMatrix {
            throw ConfigurationError("scalar-domain node under a non-scalar domain");
          },
      },
      node.payload);
}

SpacePtr joint_domain(const HoloFunction& a, const HoloFunction& b) {
  if (!same_space(a.domain(), b.domain())) {
    throw ConfigurationError("combining functions defined on different operator spaces");
  }
  return a.domain();
}

std::string fmt(Complex z) {
  std::ostringstream os;
  os.precision(6);
  if (z.imag() == 0.0) {
    os << z.real();
  } else {
    os << "(" << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i)";
  }
  return os.str();
}

std::string fmt(const ComplexVector& v) {
  std::string out = "[";
  for (Eigen::Index k = 0; k < v.size(); ++k) out += (k ? "," : "") + fmt(v(k));
  return out + "]";
}

}  // namespace

HoloFunction::HoloFunction(std::shared_ptr<const HoloNode> node) : node_(std::move(node)) {
  if (!node_) throw InvalidInput("HoloFunction: null node");
}

const SpacePtr& HoloFunction::domain() const { return node_->domain; }

bool HoloFunction::scalar_domain() const { return node_->domain->is_scalar(); }

ComplexMatrix CertifiedFunctional::apply(const OpSpaceMatrix& x) const {
  const int m = x.level();
  ComplexMatrix s = ComplexMatrix::Zero(m, m);
  for (Eigen::Index k = 0; k < phi.size(); ++k) s += phi(k) * x.plane(static_cast<int>(k));
  return s;
}

CertifiedFunctional certify_functional(SpacePtr space, ComplexVector phi, double certified_norm) {
  if (!space) throw ConfigurationError("functional: missing space");
  if (phi.size() != space->dim()) {
    throw ConfigurationError("functional: expected " + std::to_string(space->dim()) + " coefficients, got " +
                             std::to_string(phi.size()));
  }
  for (Eigen::Index k = 0; k < phi.size(); ++k) require_finite(phi(k), "functional");
  if (!(certified_norm >= 0.0 && certified_norm < 1.0)) {
    throw ConfigurationError("functional: certified_norm must lie in [0,1), got " + std::to_string(certified_norm));
  }
  const auto exact = exact_dual_norm(space, phi);
  const double known = exact ? *exact : dual_functional_norm(space, phi, 400, RngSeed{0});
  if (known > certified_norm + 1e-12) {
    throw ConfigurationError("functional: norm " + std::to_string(known) + " exceeds certified_norm " +
                             std::to_string(certified_norm));
  }
  return CertifiedFunctional{std::move(space), std::move(phi), certified_norm};
}

HoloFunction power_series(std::vector<Complex> coeffs, double analytic_radius) {
  if (coeffs.empty()) throw InvalidInput("power_series: need at least one coefficient");
  for (const auto& c : coeffs) require_finite(c, "power_series");
  if (!(analytic_radius >= 1.0)) throw InvalidInput("power_series: analytic_radius must be >= 1");
  return make(holo::PowerSeries{std::move(coeffs), analytic_radius}, scalar_space_singleton());
}

HoloFunction identity_function() { return power_series({Complex(1.0)}); }

HoloFunction monomial(int n, Complex coeff) {
  if (n < 1) throw InvalidInput("monomial: degree must be >= 1");
  std::vector<Complex> coeffs(static_cast<std::size_t>(n), Complex(0.0));
  coeffs.back() = coeff;
  return power_series(std::move(coeffs));
}

HoloFunction blaschke(Complex c, int m, std::vector<Complex> zeros) {
  require_finite(c, "blaschke");
  if (std::abs(std::abs(c) - 1.0) > 1e-12) throw InvalidInput("blaschke: |c| must be 1");
  if (m < 1) throw InvalidInput("blaschke: m must be >= 1 so that f(0) = 0");
  for (const auto& a : zeros) {
    require_finite(a, "blaschke");
    if (!(std::abs(a) < 1.0)) throw InvalidInput("blaschke: zeros must lie in the open unit disk");
  }
  return make(holo::Blaschke{c, m, std::move(zeros)}, scalar_space_singleton());
}

HoloFunction moebius_quotient(HoloFunction inner, Complex a) {
  require_finite(a, "moebius_quotient");
  if (!(std::abs(a) < 1.0)) throw InvalidInput("moebius_quotient: |a| must be < 1");
  if (!inner.scalar_domain()) throw ConfigurationError("moebius_quotient: inner function must live on the disk");
  return make(holo::MoebiusQuotient{std::move(inner), a}, scalar_space_singleton());
}

HoloFunction geometric_phi(SpacePtr space, ComplexVector phi, double certified_norm) {
  auto functional = certify_functional(std::move(space), std::move(phi), certified_norm);
  SpacePtr domain = functional.space;
  return make(holo::GeometricPhi{std::move(functional)}, std::move(domain));
}

HoloFunction product(HoloFunction left, HoloFunction right) {
  SpacePtr domain = joint_domain(left, right);
  return make(holo::Product{std::move(left), std::move(right)}, std::move(domain));
}

HoloFunction sum(HoloFunction left, HoloFunction right) {
  SpacePtr domain = joint_domain(left, right);
  return make(holo::Sum{std::move(left), std::move(right)}, std::move(domain));
}

HoloFunction scale(Complex c, HoloFunction inner) {
  require_finite(c, "scale");
  if (const auto* nested = std::get_if<holo::Scale>(&inner.node().payload)) {
    return scale(c * nested->c, nested->inner);
  }
  if (c == Complex(1.0)) return inner;
  SpacePtr domain = inner.domain();
  return make(holo::Scale{c, std::move(inner)}, std::move(domain));
}

HoloFunction composite(HoloFunction scalar, SpacePtr space, ComplexVector phi, double certified_norm) {
  if (!scalar.scalar_domain()) throw ConfigurationError("composite: scalar part must live on the disk");
  auto functional = certify_functional(std::move(space), std::move(phi), certified_norm);
  SpacePtr domain = functional.space;
  return make(holo::Composite{std::move(scalar), std::move(functional)}, std::move(domain));
}

Complex evaluate(const HoloFunction& f, Complex z) {
  if (!f.scalar_domain()) throw ConfigurationError("evaluate: function is not defined on the disk");
  if (!(std::abs(z) < 1.0)) throw DomainError("evaluate: |z| must be < 1");
  return eval_scalar(f.node(), z);
}

Complex evaluate(const HoloFunction& f, const OpSpaceElement& x) {
  if (!same_space(f.domain(), x.space)) throw InvalidInput("evaluate: point lives in a different space");
  if (!(element_norm(x) < 1.0)) throw DomainError("evaluate: point outside the open unit ball");
  return eval_point(f.node(), x.coeffs);
}

ComplexMatrix amplify(const HoloFunction& f, const OpSpaceMatrix& x) {
  if (!same_space(f.domain(), x.space())) throw InvalidInput("amplify: matrix lives in a different space");
  if (!(matrix_norm(x) < 1.0)) throw DomainError("amplify: matrix norm must be < 1");
  return amplify_node(f.node(), x);
}

ComplexMatrix amplify(const HoloFunction& f, const ComplexMatrix& x) {
  if (!f.scalar_domain()) throw ConfigurationError("amplify: scalar matrix given to a function on an operator space");
  if (x.rows() != x.cols()) throw InvalidInput("amplify: matrix must be square");
  if (!(operator_norm(x) < 1.0)) throw DomainError("amplify: matrix norm must be < 1");
  return entrywise(f.node(), x);
}

double analytic_radius(const HoloFunction& f) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  auto pole = [](Complex a) { return std::abs(a) == 0.0 ? kInf : 1.0 / std::abs(a); };
  return std::visit(
      Overloaded{
          [&](const holo::PowerSeries& p) { return p.analytic_radius; },
          [&](const holo::Blaschke& b) {
            double r = kInf;
            for (const auto& a : b.zeros) r = std::min(r, pole(std::conj(a)));
            return r;
          },
          [&](const holo::MoebiusQuotient& q) { return std::min(analytic_radius(q.inner), pole(q.a)); },
          [&](const holo::Product& p) { return std::min(analytic_radius(p.left), analytic_radius(p.right)); },
          [&](const holo::Sum& s) { return std::min(analytic_radius(s.left), analytic_radius(s.right)); },
          [&](const holo::Scale& s) { return analytic_radius(s.inner); },
          [&](const holo::GeometricPhi&) -> double {
            throw ConfigurationError("analytic_radius: function is not defined on the disk");
          },
          [&](const holo::Composite&) -> double {
            throw ConfigurationError("analytic_radius: function is not defined on the disk");
          },
      },
      f.node().payload);
}

TaylorCoeffs taylor_coefficients(const HoloFunction& f, int truncation) {
  if (truncation < 1) throw InvalidInput("taylor_coefficients: truncation must be >= 1");
  if (!f.scalar_domain()) throw ConfigurationError("taylor_coefficients: function is not defined on the disk");
  const auto k_max = static_cast<std::size_t>(truncation);

  if (const auto* p = std::get_if<holo::PowerSeries>(&f.node().payload)) {
    TaylorCoeffs out;
    out.coeffs.assign(k_max, Complex(0.0));
    double tail = 0.0;
    for (std::size_t n = 0; n < p->coeffs.size(); ++n) {
      if (n < k_max) {
        out.coeffs[n] = p->coeffs[n];
      } else {
        tail += std::abs(p->coeffs[n]);
      }
    }
    out.tail_bound = tail;
    return out;
  }

  const double radius = analytic_radius(f);
  const bool extends = radius > 1.0;
  const double rho = extends ? 1.0 : 0.9;
  std::size_t samples = 4096;
  while (samples < 4 * k_max) samples *= 2;

  std::vector<Complex> values(samples);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    values[j] = eval_scalar(f.node(), std::polar(rho, step * static_cast<double>(j)));
  }
  std::vector<Complex> twiddle(samples);
  for (std::size_t j = 0; j < samples; ++j) twiddle[j] = std::polar(1.0, -step * static_cast<double>(j));
  TaylorCoeffs out;
  out.coeffs.resize(k_max);
  for (std::size_t n = 1; n <= k_max; ++n) {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < samples; ++j) acc += values[j] * twiddle[(j * n) % samples];
    out.coeffs[n - 1] = acc / (static_cast<double>(samples) * std::pow(rho, static_cast<double>(n)));
  }
  if (extends) {
    // Cauchy: |a_n| <= M R'^{-n} with M the max of |f| on |z| = R'.
    const double outer = std::min((1.0 + radius) / 2.0, 2.0);
    double peak = 0.0;
    for (std::size_t j = 0; j < samples; ++j) {
      peak = std::max(peak, std::abs(eval_scalar(f.node(), std::polar(outer, step * static_cast<double>(j)))));
    }
    peak *= 1.01;  // margin for the sampled maximum
    out.tail_bound = peak * std::pow(outer, -static_cast<double>(truncation)) / (outer - 1.0);
  }
  return out;
}

std::string describe(const HoloFunction& f) {
  return std::visit(
      Overloaded{
          [&](const holo::PowerSeries& p) {
            std::string out = "series[";
            for (std::size_t n = 0; n < p.coeffs.size(); ++n) {
              if (p.coeffs.size() > 16 && p.coeffs[n] == Complex(0.0)) continue;
              if (out.back() != '[') out += ",";
              out += (p.coeffs.size() > 16 ? "z^" + std::to_string(n + 1) + ":" : "") + fmt(p.coeffs[n]);
            }
            return out + "]";
          },
          [&](const holo::Blaschke& b) {
            std::string out = "blaschke(c=" + fmt(b.c) + ",m=" + std::to_string(b.m) + ",zeros=[";
            for (std::size_t j = 0; j < b.zeros.size(); ++j) out += (j ? "," : "") + fmt(b.zeros[j]);
            return out + "])";
          },
          [&](const holo::MoebiusQuotient& q) { return describe(q.inner) + "/(1-" + fmt(q.a) + "z)"; },
          [&](const holo::GeometricPhi& g) {
            return "geometric_phi(" + g.functional.space->label() + "," + fmt(g.functional.phi) + ")";
          },
          [&](const holo::Product& p) { return "(" + describe(p.left) + ")*(" + describe(p.right) + ")"; },
          [&](const holo::Sum& s) { return "(" + describe(s.left) + ")+(" + describe(s.right) + ")"; },
          [&](const holo::Scale& s) { return fmt(s.c) + "*(" + describe(s.inner) + ")"; },
          [&](const holo::Composite& c) {
            return "composite(" + describe(c.scalar) + "," + c.functional.space->label() + "," +
                   fmt(c.functional.phi) + ")";
          },
      },
      f.node().payload);
}

}  // namespace cblab
