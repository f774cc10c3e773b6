#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "cblab/holofun.hpp"
#include "cblab/matcore.hpp"
#include "cblab/opspace.hpp"

namespace cblab {

/// One summand c * alpha * delta_k(x) * beta of a predual element.
struct GcbTerm {
  Complex c{1.0, 0.0};
  ComplexMatrix alpha;  // n x k
  OpSpaceMatrix point;  // level k, strictly inside the unit ball
  ComplexMatrix beta;   // k x n
};

/// A finite representation of u in M_n(G_cb(B_V)).
struct GcbElement {
  SpacePtr space;
  int target_level = 1;
  std::vector<GcbTerm> terms;
};

/// Throws InvalidInput on shape mismatches or points with norm > 1 - 1e-9.
void validate_gcb(const GcbElement& u);

/// delta_n(x) with the trivial representation (c = 1, alpha = beta = I).
[[nodiscard]] GcbElement delta_element(const OpSpaceMatrix& x);

/// Group index per term; groups need not be contiguous.
using Grouping = std::vector<int>;

/// sum over groups j of ||sum alpha alpha^*||^{1/2} ||sum beta^* beta||^{1/2}
/// max |c| ||x||. An upper bound for the norm of u.
[[nodiscard]] double representation_cost(const GcbElement& u, const Grouping& grouping);

struct GcbUpperResult {
  double value = 0.0;
  Grouping grouping;
  std::int64_t evaluations = 0;
};

/// Minimum representation cost over groupings into <= 3 groups and per-term
/// scalar transfers (c, alpha, beta) -> (c/(s r), s alpha, r beta) with s, r
/// on the geometric grid 2^{-8..8} (33 points).
[[nodiscard]] GcbUpperResult gcb_upper_bound(const GcbElement& u, std::int64_t budget, RngSeed seed);

/// Dictionary entry: a scalar cb-holomorphic function.
struct ScalarEntry {
  HoloFunction function;
  double bound = 1.0;  // certified cb upper bound
};

/// Dictionary entry: a linear map V -> M_p, x |-> sum_t x_t F_t, with a
/// certified cb-norm.
struct LinearEntry {
  std::vector<ComplexMatrix> maps;
  double bound = 1.0;
  [[nodiscard]] int size() const { return static_cast<int>(maps.front().rows()); }
};

struct DictionaryEntry {
  std::string name;
  std::variant<ScalarEntry, LinearEntry> test;
};

using FunctionDictionary = std::vector<DictionaryEntry>;

/// sum_i c_i (alpha_i (x) I_p) f_{k_i}(x_i) (beta_i (x) I_p).
[[nodiscard]] ComplexMatrix gcb_pairing(const GcbElement& u, const DictionaryEntry& entry);

struct GcbLowerResult {
  double value = 0.0;
  int best_entry = -1;
};

/// max over entries of ||<u, f>|| / bound(f). Throws InvalidInput on an
/// empty dictionary.
[[nodiscard]] GcbLowerResult gcb_lower_bound(const GcbElement& u, const FunctionDictionary& dict);

/// The defining embedding V -> M_N (cb-norm exactly 1).
[[nodiscard]] DictionaryEntry embedding_entry(const SpacePtr& space);

/// Coordinate functionals normalized by their dual norm (built-in spaces).
[[nodiscard]] FunctionDictionary coordinate_entries(const SpacePtr& space);

/// phi(y) = u^* (sum y_t B_t) v from the top singular pair of a level-1
/// point; |phi| <= 1 on the unit ball and phi(x) = ||x||.
[[nodiscard]] DictionaryEntry norming_functional_entry(const OpSpaceElement& x);

/// Norming entries for x plus coordinate functionals and nonlinear
/// geometric / quotient families rescaled by their certified bounds.
[[nodiscard]] FunctionDictionary standard_dictionary(const OpSpaceMatrix& x);

struct DeltaIsometryReport {
  double norm = 0.0;
  double upper = 0.0;
  double lower = 0.0;
  [[nodiscard]] double upper_gap() const { return upper - norm; }
  [[nodiscard]] double lower_gap() const { return norm - lower; }
  [[nodiscard]] bool passed() const { return upper_gap() <= 1e-9 && lower_gap() <= 1e-6; }
};

[[nodiscard]] DeltaIsometryReport delta_isometry_check(const OpSpaceMatrix& x, std::int64_t budget, RngSeed seed);

}  // namespace cblab
