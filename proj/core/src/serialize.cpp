#include "cblab/serialize.hpp"

#include <cmath>
#include <limits>

namespace cblab::json_io {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

const Json& field(const Json& j, const char* key, const std::string& at) {
  if (!j.is_object()) throw SchemaError(at, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(at + "/" + key, "missing required field");
  return *it;
}

double number(const Json& j, const std::string& at) {
  if (!j.is_number()) throw SchemaError(at, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(at, "expected a finite number");
  return v;
}

int integer(const Json& j, const std::string& at) {
  if (!j.is_number_integer()) throw SchemaError(at, "expected an integer");
  return j.get<int>();
}

const Json& array(const Json& j, const std::string& at) {
  if (!j.is_array()) throw SchemaError(at, "expected an array");
  return j;
}

std::string text(const Json& j, const std::string& at) {
  if (!j.is_string()) throw SchemaError(at, "expected a string");
  return j.get<std::string>();
}

/// Rethrows construction errors from the core as schema errors at `at`.
template <class F>
auto guarded(const std::string& at, F&& build) {
  try {
    return build();
  } catch (const SchemaError&) {
    throw;
  } catch (const std::exception& e) {
    throw SchemaError(at, e.what());
  }
}

}  // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json vector_to_json(const ComplexVector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(complex_to_json(v(k)));
  return out;
}

Json matrix_to_json(const ComplexMatrix& a) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(complex_to_json(a(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

Complex complex_from_json(const Json& j, const std::string& at) {
  if (j.is_number()) return {number(j, at), 0.0};
  if (!j.is_array() || j.size() != 2) throw SchemaError(at, "expected [re, im]");
  return {number(j[0], at + "/0"), number(j[1], at + "/1")};
}

ComplexVector vector_from_json(const Json& j, const std::string& at) {
  array(j, at);
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = complex_from_json(j[k], at + "/" + std::to_string(k));
  return v;
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& at) {
  array(j, at);
  if (j.empty()) throw SchemaError(at, "matrix must have at least one row");
  const std::size_t cols = array(j[0], at + "/0").size();
  if (cols == 0) throw SchemaError(at + "/0", "matrix rows must be nonempty");
  ComplexMatrix a(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string row_at = at + "/" + std::to_string(i);
    if (array(j[i], row_at).size() != cols) throw SchemaError(row_at, "ragged matrix row");
    for (std::size_t c = 0; c < cols; ++c) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = complex_from_json(j[i][c], row_at + "/" + std::to_string(c));
    }
  }
  return a;
}

Json space_to_json(const SpacePtr& space) {
  if (space->kind() == SpaceKind::kCustom) {
    Json basis = Json::array();
    for (const auto& b : space->basis()) basis.push_back(matrix_to_json(b));
    return {{"kind", "custom"}, {"ambient", space->ambient()}, {"basis", std::move(basis)}};
  }
  return {{"kind", to_string(space->kind())}, {"param", space->param()}};
}

SpacePtr space_from_json(const Json& j, const std::string& at) {
  const std::string kind = text(field(j, "kind", at), at + "/kind");
  if (kind == "scalar") return space_scalar();
  if (kind == "custom") {
    const int ambient = integer(field(j, "ambient", at), at + "/ambient");
    const Json& basis = array(field(j, "basis", at), at + "/basis");
    std::vector<ComplexMatrix> mats;
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const std::string b_at = at + "/basis/" + std::to_string(k);
      ComplexMatrix b = matrix_from_json(basis[k], b_at);
      if (b.rows() != ambient || b.cols() != ambient) throw SchemaError(b_at, "basis matrix must be ambient x ambient");
      mats.push_back(std::move(b));
    }
    return guarded(at + "/basis", [&] { return space_custom(std::move(mats)); });
  }
  const int param = integer(field(j, "param", at), at + "/param");
  if (param < 1) throw SchemaError(at + "/param", "must be >= 1");
  if (kind == "matrix") return space_Mk(param);
  if (kind == "row") return space_row(param);
  if (kind == "column") return space_column(param);
  if (kind == "min_linf") return space_min_linf(param);
  throw SchemaError(at + "/kind", "unknown space kind '" + kind + "'");
}

Json opmatrix_to_json(const OpSpaceMatrix& x) {
  Json entries = Json::array();
  for (int i = 0; i < x.level(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < x.level(); ++j) row.push_back(vector_to_json(x.entry(i, j)));
    entries.push_back(std::move(row));
  }
  return {{"level", x.level()}, {"entries", std::move(entries)}};
}

OpSpaceMatrix opmatrix_from_json(const Json& j, const SpacePtr& space, const std::string& at) {
  if (j.is_object() && j.contains("matrix")) {
    if (!space->is_scalar()) throw SchemaError(at + "/matrix", "plain matrices are only accepted for the scalar space");
    ComplexMatrix a = matrix_from_json(j["matrix"], at + "/matrix");
    if (a.rows() != a.cols()) throw SchemaError(at + "/matrix", "matrix must be square");
    return OpSpaceMatrix::from_scalar(a);
  }
  const int m = integer(field(j, "level", at), at + "/level");
  if (m < 1) throw SchemaError(at + "/level", "must be >= 1");
  const Json& entries = array(field(j, "entries", at), at + "/entries");
  if (static_cast<int>(entries.size()) != m) throw SchemaError(at + "/entries", "expected level rows");
  std::vector<ComplexMatrix> planes(static_cast<std::size_t>(space->dim()), ComplexMatrix::Zero(m, m));
  for (int i = 0; i < m; ++i) {
    const std::string row_at = at + "/entries/" + std::to_string(i);
    if (static_cast<int>(array(entries[i], row_at).size()) != m) throw SchemaError(row_at, "expected level columns");
    for (int c = 0; c < m; ++c) {
      const std::string e_at = row_at + "/" + std::to_string(c);
      const ComplexVector v = vector_from_json(entries[i][c], e_at);
      if (v.size() != space->dim()) {
        throw SchemaError(e_at, "expected " + std::to_string(space->dim()) + " coefficients");
      }
      for (int k = 0; k < space->dim(); ++k) planes[static_cast<std::size_t>(k)](i, c) = v(k);
    }
  }
  return guarded(at, [&] { return OpSpaceMatrix(space, std::move(planes)); });
}

Json function_to_json(const HoloFunction& f) {
  auto functional = [](Json out, const CertifiedFunctional& fn) {
    out["space"] = space_to_json(fn.space);
    out["phi"] = vector_to_json(fn.phi);
    out["certified_norm"] = fn.certified_norm;
    return out;
  };
  return std::visit(
      Overloaded{
          [&](const holo::PowerSeries& p) {
            Json coeffs = Json::array();
            for (const auto& c : p.coeffs) coeffs.push_back(complex_to_json(c));
            Json out{{"kind", "power_series"}, {"coeffs", std::move(coeffs)}};
            if (std::isfinite(p.analytic_radius)) out["analytic_radius"] = p.analytic_radius;
            return out;
          },
          [&](const holo::Blaschke& b) {
            Json zeros = Json::array();
            for (const auto& a : b.zeros) zeros.push_back(complex_to_json(a));
            return Json{{"kind", "blaschke"}, {"c", complex_to_json(b.c)}, {"m", b.m}, {"zeros", std::move(zeros)}};
          },
          [&](const holo::MoebiusQuotient& q) {
            return Json{{"kind", "moebius_quotient"}, {"inner", function_to_json(q.inner)}, {"a", complex_to_json(q.a)}};
          },
          [&](const holo::GeometricPhi& g) { return functional(Json{{"kind", "geometric_phi"}}, g.functional); },
          [&](const holo::Product& p) {
            return Json{{"kind", "product"}, {"left", function_to_json(p.left)}, {"right", function_to_json(p.right)}};
          },
          [&](const holo::Sum& s) {
            return Json{{"kind", "sum"}, {"left", function_to_json(s.left)}, {"right", function_to_json(s.right)}};
          },
          [&](const holo::Scale& s) {
            return Json{{"kind", "scale"}, {"c", complex_to_json(s.c)}, {"inner", function_to_json(s.inner)}};
          },
          [&](const holo::Composite& c) {
            return functional(Json{{"kind", "composite"}, {"scalar", function_to_json(c.scalar)}}, c.functional);
          },
      },
      f.node().payload);
}

HoloFunction function_from_json(const Json& j, const std::string& at) {
  const std::string kind = text(field(j, "kind", at), at + "/kind");
  auto functional_parts = [&](auto&& build) {
    SpacePtr space = space_from_json(field(j, "space", at), at + "/space");
    ComplexVector phi = vector_from_json(field(j, "phi", at), at + "/phi");
    const double r = number(field(j, "certified_norm", at), at + "/certified_norm");
    return guarded(at, [&] { return build(std::move(space), std::move(phi), r); });
  };
  if (kind == "power_series") {
    const Json& coeffs = array(field(j, "coeffs", at), at + "/coeffs");
    std::vector<Complex> a;
    for (std::size_t n = 0; n < coeffs.size(); ++n) a.push_back(complex_from_json(coeffs[n], at + "/coeffs/" + std::to_string(n)));
    double radius = std::numeric_limits<double>::infinity();
    if (j.contains("analytic_radius")) radius = number(j["analytic_radius"], at + "/analytic_radius");
    return guarded(at, [&] { return power_series(std::move(a), radius); });
  }
  if (kind == "blaschke") {
    const Complex c = complex_from_json(field(j, "c", at), at + "/c");
    const int m = integer(field(j, "m", at), at + "/m");
    std::vector<Complex> zeros;
    if (j.contains("zeros")) {
      const Json& z = array(j["zeros"], at + "/zeros");
      for (std::size_t n = 0; n < z.size(); ++n) zeros.push_back(complex_from_json(z[n], at + "/zeros/" + std::to_string(n)));
    }
    return guarded(at, [&] { return blaschke(c, m, std::move(zeros)); });
  }
  if (kind == "moebius_quotient") {
    HoloFunction inner = function_from_json(field(j, "inner", at), at + "/inner");
    const Complex a = complex_from_json(field(j, "a", at), at + "/a");
    return guarded(at, [&] { return moebius_quotient(std::move(inner), a); });
  }
  if (kind == "geometric_phi") {
    return functional_parts([](SpacePtr s, ComplexVector phi, double r) { return geometric_phi(std::move(s), std::move(phi), r); });
  }
  if (kind == "product" || kind == "sum") {
    HoloFunction left = function_from_json(field(j, "left", at), at + "/left");
    HoloFunction right = function_from_json(field(j, "right", at), at + "/right");
    return guarded(at, [&] { return kind == "product" ? product(left, right) : sum(left, right); });
  }
  if (kind == "scale") {
    const Complex c = complex_from_json(field(j, "c", at), at + "/c");
    HoloFunction inner = function_from_json(field(j, "inner", at), at + "/inner");
    return guarded(at, [&] { return scale(c, std::move(inner)); });
  }
  if (kind == "composite") {
    HoloFunction scalar = function_from_json(field(j, "scalar", at), at + "/scalar");
    return functional_parts([&](SpacePtr s, ComplexVector phi, double r) {
      return composite(scalar, std::move(s), std::move(phi), r);
    });
  }
  throw SchemaError(at + "/kind", "unknown function kind '" + kind + "'");
}

Json matrix_set_to_json(const MatrixSet& set) {
  Json gens = Json::array();
  for (const auto& g : set.generators()) gens.push_back(opmatrix_to_json(g));
  return {{"space", space_to_json(set.space())}, {"generators", std::move(gens)}};
}

MatrixSet matrix_set_from_json(const Json& j, const std::string& at) {
  SpacePtr space = space_from_json(field(j, "space", at), at + "/space");
  const Json& gens = array(field(j, "generators", at), at + "/generators");
  std::vector<OpSpaceMatrix> out;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    out.push_back(opmatrix_from_json(gens[i], space, at + "/generators/" + std::to_string(i)));
  }
  return guarded(at + "/generators", [&] { return MatrixSet(space, std::move(out)); });
}

Json certificate_to_json(const SeparationCertificate& f) {
  const int n = f.level();
  Json grid = Json::array();
  for (int i = 0; i < n; ++i) {
    Json row = Json::array();
    for (int j = 0; j < n; ++j) {
      ComplexVector v(static_cast<Eigen::Index>(f.planes.size()));
      for (std::size_t t = 0; t < f.planes.size(); ++t) v(static_cast<Eigen::Index>(t)) = f.planes[t](i, j);
      row.push_back(vector_to_json(v));
    }
    grid.push_back(std::move(row));
  }
  return {{"level", n}, {"functionals", std::move(grid)}};
}

SeparationCertificate certificate_from_json(const Json& j, const SpacePtr& space, const std::string& at) {
  Json as_matrix{{"level", field(j, "level", at)}, {"entries", field(j, "functionals", at)}};
  try {
    OpSpaceMatrix grid = opmatrix_from_json(as_matrix, space, at);
    return SeparationCertificate{space, grid.planes()};
  } catch (const SchemaError& e) {
    std::string pointer = e.pointer();
    const std::string from = at + "/entries";
    if (pointer.rfind(from, 0) == 0) pointer = at + "/functionals" + pointer.substr(from.size());
    throw SchemaError(pointer, std::string(e.what()).substr(e.pointer().size() + 2));
  }
}

Json gcb_to_json(const GcbElement& u) {
  Json terms = Json::array();
  for (const auto& t : u.terms) {
    terms.push_back({{"c", complex_to_json(t.c)},
                     {"alpha", matrix_to_json(t.alpha)},
                     {"point", opmatrix_to_json(t.point)},
                     {"beta", matrix_to_json(t.beta)}});
  }
  return {{"space", space_to_json(u.space)}, {"target_level", u.target_level}, {"terms", std::move(terms)}};
}

GcbElement gcb_from_json(const Json& j, const std::string& at) {
  GcbElement u;
  u.space = space_from_json(field(j, "space", at), at + "/space");
  u.target_level = integer(field(j, "target_level", at), at + "/target_level");
  const Json& terms = array(field(j, "terms", at), at + "/terms");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string t_at = at + "/terms/" + std::to_string(i);
    const Json& t = terms[i];
    Complex c{1.0, 0.0};
    if (t.is_object() && t.contains("c")) c = complex_from_json(t["c"], t_at + "/c");
    OpSpaceMatrix point = opmatrix_from_json(field(t, "point", t_at), u.space, t_at + "/point");
    const int k = point.level();
    ComplexMatrix alpha = t.contains("alpha") ? matrix_from_json(t["alpha"], t_at + "/alpha")
                                              : ComplexMatrix::Identity(u.target_level, k);
    ComplexMatrix beta = t.contains("beta") ? matrix_from_json(t["beta"], t_at + "/beta")
                                            : ComplexMatrix::Identity(k, u.target_level);
    u.terms.push_back(GcbTerm{c, std::move(alpha), std::move(point), std::move(beta)});
  }
  guarded(at, [&] {
    validate_gcb(u);
    return 0;
  });
  return u;
}

FunctionDictionary dictionary_from_json(const Json& j, const SpacePtr& space, const std::string& at) {
  array(j, at);
  FunctionDictionary dict;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string e_at = at + "/" + std::to_string(i);
    const std::string kind = text(field(j[i], "kind", e_at), e_at + "/kind");
    if (kind == "embedding") {
      dict.push_back(embedding_entry(space));
    } else if (kind == "linear") {
      const Json& maps = array(field(j[i], "maps", e_at), e_at + "/maps");
      if (static_cast<int>(maps.size()) != space->dim()) throw SchemaError(e_at + "/maps", "expected one map per basis element");
      std::vector<ComplexMatrix> mats;
      for (std::size_t t = 0; t < maps.size(); ++t) mats.push_back(matrix_from_json(maps[t], e_at + "/maps/" + std::to_string(t)));
      for (const auto& m : mats) {
        if (m.rows() != mats.front().rows() || m.rows() != m.cols()) throw SchemaError(e_at + "/maps", "maps must be square and equal-sized");
      }
      const double bound = number(field(j[i], "bound", e_at), e_at + "/bound");
      if (!(bound > 0.0)) throw SchemaError(e_at + "/bound", "must be positive");
      dict.push_back(DictionaryEntry{"linear[" + std::to_string(i) + "]", LinearEntry{std::move(mats), bound}});
    } else if (kind == "function") {
      HoloFunction f = function_from_json(field(j[i], "function", e_at), e_at + "/function");
      if (!same_space(f.domain(), space)) throw SchemaError(e_at + "/function", "domain differs from the element's space");
      const auto ub = cb_upper_bound(f);
      if (!ub.value) throw SchemaError(e_at + "/function", "no certified cb upper bound");
      dict.push_back(DictionaryEntry{describe(f), ScalarEntry{f, *ub.value}});
    } else {
      throw SchemaError(e_at + "/kind", "unknown dictionary entry kind '" + kind + "'");
    }
  }
  return dict;
}

Json witness_to_json(const Witness& w) {
  return {{"level", w.level}, {"value", w.value}, {"matrix", opmatrix_to_json(w.matrix)}};
}

Json estimate_to_json(const CbEstimate& e) {
  Json table = Json::array();
  for (const auto& row : e.level_table) {
    table.push_back({{"level", row.level},
                     {"value", row.value},
                     {"samples", row.samples},
                     {"lifted", row.lifted},
                     {"witness", witness_to_json(row.witness)}});
  }
  Json out{{"lower", e.lower},
           {"upper", e.upper ? Json(*e.upper) : Json("unknown")},
           {"seed", e.seed.value},
           {"budget", e.budget},
           {"provenance", e.provenance},
           {"level_table", std::move(table)}};
  return out;
}

}  // namespace cblab::json_io
