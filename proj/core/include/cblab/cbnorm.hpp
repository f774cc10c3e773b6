#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cblab/holofun.hpp"
#include "cblab/matcore.hpp"
#include "cblab/opspace.hpp"

namespace cblab {

/// Radius of the closed ball the optimizer works in; keeps every iterate
/// inside the open unit ball.
inline constexpr double kBallCap = 1.0 - 1e-6;

/// A point of the level-m unit ball together with the amplified norm it
/// achieves, i.e. a certificate for a lower bound on the cb-norm.
struct Witness {
  int level = 0;
  OpSpaceMatrix matrix;
  double value = 0.0;
};

struct LevelEntry {
  int level = 0;
  double value = 0.0;
  Witness witness;
  std::int64_t samples = 0;  // evaluations spent at this level (0 if only lifted)
  bool lifted = false;       // true when the lifted lower-level witness won
};

struct CbEstimate {
  double lower = 0.0;
  std::optional<double> upper;
  std::vector<LevelEntry> level_table;
  RngSeed seed;
  std::int64_t budget = 0;
  std::string provenance;
};

struct UpperBound {
  std::optional<double> value;
  std::string provenance;
};

/// Default level schedule for lower-bound searches.
[[nodiscard]] std::vector<int> default_levels();

/// Best ||f_m(X)|| found over ||X|| <= 1 - 1e-6 by seeded random restarts
/// and projected finite-difference ascent. `budget` counts evaluations of
/// the amplified norm; the result is always a valid lower bound.
[[nodiscard]] Witness level_sup(const HoloFunction& f, int level, std::int64_t budget, RngSeed seed);

/// The amplified norm at a witness matrix, recomputed from scratch.
[[nodiscard]] double witness_value(const HoloFunction& f, const OpSpaceMatrix& x);

/// X -> X (+) 0. Since f(0) = 0 the amplified norm is unchanged.
[[nodiscard]] Witness lift_witness(const HoloFunction& f, const Witness& w);

/// Lower bound: level_sup on level 1 and each scheduled level <= max_level,
/// `budget` evaluations apiece, lifted upward so the table is nondecreasing.
[[nodiscard]] CbEstimate cb_lower_bound(const HoloFunction& f, int max_level, std::int64_t budget, RngSeed seed,
                                        const std::vector<int>& schedule = default_levels());

/// Certified upper bound from the composition rules (Wiener sums with
/// Cauchy tails, 1/(1-|a|) quotients, r/(1-r) geometric functionals, the
/// Schur product rule, triangle inequality, |c| scaling). Empty when no
/// rule certifies.
[[nodiscard]] UpperBound cb_upper_bound(const HoloFunction& f);

/// Both bounds. Throws InternalConsistencyError if lower > upper + 1e-6.
[[nodiscard]] CbEstimate sandwich(const HoloFunction& f, int max_level, std::int64_t budget, RngSeed seed,
                                  const std::vector<int>& schedule = default_levels());

struct SchwarzReport {
  int trials = 0;
  int violations = 0;
  double upper = 0.0;
  double worst_slack = 0.0;  // min over trials of upper*||X|| - ||f_m(X)||
  double max_slack = 0.0;
  [[nodiscard]] bool passed() const { return violations == 0; }
};

/// Checks ||f_m(X)|| <= upper * ||X|| + 1e-8 on random (m, X) with m in
/// 1..max_level. Throws InvalidInput if the estimate has no upper bound.
[[nodiscard]] SchwarzReport schwarz_check(const HoloFunction& f, const CbEstimate& estimate, int trials, RngSeed seed,
                                          int max_level = 6);

struct AlgebraReport {
  double product_lower = 0.0;
  std::optional<double> upper_f;
  std::optional<double> upper_g;
  bool checked = false;  // false when either upper bound is unknown
  bool passed = true;
};

[[nodiscard]] AlgebraReport algebra_check(const HoloFunction& f, const HoloFunction& g, int max_level,
                                          std::int64_t budget, RngSeed seed);

enum class GrowthVerdict { kBounded, kGrowing, kInconclusive };

[[nodiscard]] std::string to_string(GrowthVerdict v);

struct ProbeRow {
  int level = 0;
  double raw = 0.0;     // level_sup at this level
  double lifted = 0.0;  // running maximum including lifted lower levels
};

/// Evidence only: level sups along a schedule and a least-squares slope of
/// the lifted values against log(level).
struct ProbeReport {
  std::vector<ProbeRow> rows;
  double slope = 0.0;
  GrowthVerdict verdict = GrowthVerdict::kInconclusive;
  std::optional<double> upper;
  std::string label = "HEURISTIC EVIDENCE";
};

[[nodiscard]] ProbeReport question_probe(const HoloFunction& f, const std::vector<int>& schedule,
                                         std::int64_t budget, RngSeed seed);

}  // namespace cblab
