#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "cblab/cbnorm.hpp"
#include "cblab/errors.hpp"
#include "cblab/gcb.hpp"
#include "cblab/holofun.hpp"
#include "cblab/mconvex.hpp"
#include "cblab/opspace.hpp"

namespace cblab {

using Json = nlohmann::json;

/// Descriptor validation failure, carrying the JSON pointer of the
/// offending value (e.g. "/function/coeffs/2").
class SchemaError : public InvalidInput {
 public:
  SchemaError(std::string pointer, const std::string& message)
      : InvalidInput(pointer + ": " + message), pointer_(std::move(pointer)) {}
  [[nodiscard]] const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

namespace json_io {

// Complex numbers are [re, im]; matrices are arrays of rows.
[[nodiscard]] Json complex_to_json(Complex z);
[[nodiscard]] Json vector_to_json(const ComplexVector& v);
[[nodiscard]] Json matrix_to_json(const ComplexMatrix& a);
[[nodiscard]] Complex complex_from_json(const Json& j, const std::string& at);
[[nodiscard]] ComplexVector vector_from_json(const Json& j, const std::string& at);
[[nodiscard]] ComplexMatrix matrix_from_json(const Json& j, const std::string& at);

/// {"kind":"scalar"|"matrix"|"row"|"column"|"min_linf","param":n} or
/// {"kind":"custom","ambient":N,"basis":[matrix,...]}.
[[nodiscard]] Json space_to_json(const SpacePtr& space);
[[nodiscard]] SpacePtr space_from_json(const Json& j, const std::string& at);

/// {"level":m,"entries":[[coeff-vector,...],...]}; scalar-space matrices may
/// instead be given as {"matrix":[[...]]}.
[[nodiscard]] Json opmatrix_to_json(const OpSpaceMatrix& x);
[[nodiscard]] OpSpaceMatrix opmatrix_from_json(const Json& j, const SpacePtr& space, const std::string& at);

[[nodiscard]] Json function_to_json(const HoloFunction& f);
[[nodiscard]] HoloFunction function_from_json(const Json& j, const std::string& at);

/// {"space":{...},"generators":[opmatrix,...]}
[[nodiscard]] Json matrix_set_to_json(const MatrixSet& set);
[[nodiscard]] MatrixSet matrix_set_from_json(const Json& j, const std::string& at);

/// {"level":n,"functionals":[[coeff-vector,...],...]} (space implied).
[[nodiscard]] Json certificate_to_json(const SeparationCertificate& f);
[[nodiscard]] SeparationCertificate certificate_from_json(const Json& j, const SpacePtr& space,
                                                          const std::string& at);

/// {"space":{...},"target_level":n,"terms":[{"c":z,"alpha":A,"point":X,"beta":B},...]}
[[nodiscard]] Json gcb_to_json(const GcbElement& u);
[[nodiscard]] GcbElement gcb_from_json(const Json& j, const std::string& at);

/// [{"kind":"function","function":{...}} | {"kind":"embedding"} |
///  {"kind":"linear","maps":[matrix,...],"bound":b}, ...]
[[nodiscard]] FunctionDictionary dictionary_from_json(const Json& j, const SpacePtr& space, const std::string& at);

[[nodiscard]] Json witness_to_json(const Witness& w);
[[nodiscard]] Json estimate_to_json(const CbEstimate& e);

}  // namespace json_io

}  // namespace cblab
