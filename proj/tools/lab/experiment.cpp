#include "lab/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cblab/cbnorm.hpp"
#include "cblab/errors.hpp"
#include "cblab/gcb.hpp"
#include "cblab/mconvex.hpp"
#include "cblab/serialize.hpp"

namespace cblab::lab {

namespace {

using namespace cblab::json_io;

struct Outcome {
  Json results;
  bool property_failed = false;
};

const Json& require(const Json& config, const char* key) {
  auto it = config.find(key);
  if (it == config.end()) throw SchemaError(std::string("/") + key, "missing required field");
  return *it;
}

std::int64_t get_int(const Json& config, const char* key, std::int64_t fallback, std::int64_t min_value) {
  auto it = config.find(key);
  if (it == config.end()) return fallback;
  if (!it->is_number_integer()) throw SchemaError(std::string("/") + key, "expected an integer");
  const auto v = it->get<std::int64_t>();
  if (v < min_value) throw SchemaError(std::string("/") + key, "must be >= " + std::to_string(min_value));
  return v;
}

RngSeed get_seed(const Json& config) {
  const Json& s = require(config, "seed");
  if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
    throw SchemaError("/seed", "expected a non-negative integer");
  }
  return RngSeed{s.get<std::uint64_t>()};
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json("unknown"); }

std::string level_summary(const CbEstimate& e) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < e.level_table.size(); ++i) {
    os << (i ? ";" : "") << e.level_table[i].level << ":" << e.level_table[i].value;
  }
  return os.str();
}

Json summary(const std::string& id, const Json& lower, const Json& upper, const std::string& levels) {
  return {{"function", id}, {"lower", lower}, {"upper", upper}, {"levels", levels}};
}

Outcome run_estimate(const Json& config, bool with_upper) {
  const HoloFunction f = function_from_json(require(config, "function"), "/function");
  const int max_level = static_cast<int>(get_int(config, "max_level", 4, 1));
  const std::int64_t budget = get_int(config, "budget", 10000, 1);
  const RngSeed seed = get_seed(config);
  std::vector<int> schedule = default_levels();
  if (config.contains("schedule")) {
    schedule.clear();
    const Json& s = config["schedule"];
    if (!s.is_array()) throw SchemaError("/schedule", "expected an array of levels");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s[i].is_number_integer() || s[i].get<int>() < 1) {
        throw SchemaError("/schedule/" + std::to_string(i), "expected a positive integer");
      }
      schedule.push_back(s[i].get<int>());
    }
  }

  Outcome out;
  CbEstimate est;
  if (with_upper) {
    try {
      est = sandwich(f, max_level, budget, seed, schedule);
    } catch (const InternalConsistencyError& e) {
      out.property_failed = true;
      out.results["error"] = e.what();
      est = cb_lower_bound(f, max_level, budget, seed, schedule);
      est.upper = cb_upper_bound(f).value;
    }
  } else {
    est = cb_lower_bound(f, max_level, budget, seed, schedule);
  }
  out.results["function_id"] = describe(f);
  out.results["estimate"] = estimate_to_json(est);
  Json upper = optional_number(est.upper);
  Json gap = est.upper ? Json(*est.upper - est.lower) : Json("unknown");
  out.results["gap"] = gap;
  out.results["summary"] = summary(describe(f), est.lower, upper, level_summary(est));
  return out;
}

Outcome run_schwarz(const Json& config) {
  const HoloFunction f = function_from_json(require(config, "function"), "/function");
  const int trials = static_cast<int>(get_int(config, "trials", 1000, 1));
  const int max_level = static_cast<int>(get_int(config, "max_level", 6, 1));
  const RngSeed seed = get_seed(config);
  CbEstimate est;
  est.seed = seed;
  UpperBound ub = cb_upper_bound(f);
  // A claimed bound replaces the certified one: the check then tests the claim.
  if (config.contains("claimed_upper")) {
    const Json& c = config["claimed_upper"];
    if (!c.is_number() || !(c.get<double>() >= 0.0)) throw SchemaError("/claimed_upper", "expected a nonnegative number");
    ub = {c.get<double>(), "claimed"};
  }
  if (!ub.value) throw SchemaError("/function", "no certified cb upper bound; the Schwarz check needs one");
  est.upper = ub.value;
  const SchwarzReport report = schwarz_check(f, est, trials, seed, max_level);
  Outcome out;
  out.property_failed = !report.passed();
  out.results = {{"function_id", describe(f)},
                 {"upper", *ub.value},
                 {"upper_provenance", ub.provenance},
                 {"trials", report.trials},
                 {"violations", report.violations},
                 {"worst_slack", report.worst_slack},
                 {"max_slack", report.max_slack},
                 {"verdict", report.passed() ? "pass" : "fail"}};
  out.results["summary"] = summary(describe(f), Json("n/a"), *ub.value, "");
  return out;
}

Outcome run_algebra(const Json& config) {
  const HoloFunction f = function_from_json(require(config, "f"), "/f");
  const HoloFunction g = function_from_json(require(config, "g"), "/g");
  if (!same_space(f.domain(), g.domain())) throw SchemaError("/g", "f and g live on different spaces");
  const int max_level = static_cast<int>(get_int(config, "max_level", 4, 1));
  const std::int64_t budget = get_int(config, "budget", 10000, 1);
  const AlgebraReport report = algebra_check(f, g, max_level, budget, get_seed(config));
  Outcome out;
  out.property_failed = report.checked && !report.passed;
  const std::optional<double> bound =
      report.checked ? std::optional<double>(*report.upper_f * *report.upper_g) : std::nullopt;
  out.results = {{"f_id", describe(f)},
                 {"g_id", describe(g)},
                 {"product_lower", report.product_lower},
                 {"upper_f", optional_number(report.upper_f)},
                 {"upper_g", optional_number(report.upper_g)},
                 {"product_of_uppers", optional_number(bound)},
                 {"checked", report.checked},
                 {"verdict", !report.checked ? "unchecked" : (report.passed ? "pass" : "fail")}};
  out.results["summary"] =
      summary("(" + describe(f) + ")*(" + describe(g) + ")", report.product_lower, optional_number(bound), "");
  return out;
}

Outcome run_probe(const Json& config) {
  const HoloFunction f = function_from_json(require(config, "function"), "/function");
  std::vector<int> schedule = default_levels();
  if (config.contains("schedule")) {
    schedule.clear();
    const Json& s = config["schedule"];
    if (!s.is_array() || s.empty()) throw SchemaError("/schedule", "expected a nonempty array of levels");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s[i].is_number_integer() || s[i].get<int>() < 1) {
        throw SchemaError("/schedule/" + std::to_string(i), "expected a positive integer");
      }
      schedule.push_back(s[i].get<int>());
    }
  }
  const std::int64_t budget = get_int(config, "budget", 10000, 1);
  const ProbeReport report = question_probe(f, schedule, budget, get_seed(config));
  Json rows = Json::array();
  std::string levels;
  for (const auto& r : report.rows) {
    rows.push_back({{"level", r.level}, {"level_sup", r.raw}, {"lifted", r.lifted}});
    std::ostringstream os;
    os.precision(17);
    os << (levels.empty() ? "" : ";") << r.level << ":" << r.lifted;
    levels += os.str();
  }
  Outcome out;
  out.results = {{"function_id", describe(f)},
                 {"label", report.label},
                 {"rows", std::move(rows)},
                 {"slope_vs_log_level", report.slope},
                 {"verdict", to_string(report.verdict)},
                 {"upper", optional_number(report.upper)}};
  const double lower = report.rows.empty() ? 0.0 : report.rows.back().lifted;
  out.results["summary"] = summary(describe(f), lower, optional_number(report.upper), levels);
  return out;
}

Outcome run_hull(const Json& config) {
  const MatrixSet set = matrix_set_from_json(require(config, "set"), "/set");
  const int trials = static_cast<int>(get_int(config, "trials", 1000, 1));
  const int max_level = static_cast<int>(get_int(config, "max_level", 4, 1));
  const HullNormReport report = hull_norm_check(set, trials, get_seed(config), max_level);
  Outcome out;
  out.property_failed = !report.passed();
  out.results = {{"set_norm", report.set_norm},
                 {"max_hull_norm", report.max_hull_norm},
                 {"identity_max", report.identity_max},
                 {"trials", report.trials},
                 {"violations", report.violations},
                 {"verdict", report.passed() ? "pass" : "fail"}};
  out.results["summary"] = summary("hull(" + set.space()->label() + ")", report.max_hull_norm, report.set_norm, "");
  return out;
}

Outcome run_separate(const Json& config) {
  const MatrixSet set = matrix_set_from_json(require(config, "set"), "/set");
  const OpSpaceMatrix x0 = opmatrix_from_json(require(config, "x0"), set.space(), "/x0");
  const std::int64_t budget = get_int(config, "budget", 1000, 1);
  Outcome out;
  if (config.contains("certificate")) {
    const SeparationCertificate given = certificate_from_json(config["certificate"], set.space(), "/certificate");
    const CertificateVerdict v = check_certificate(given, set, x0);
    out.results["given_certificate"] = {{"valid", v.valid},
                                        {"max_generator_pairing", v.max_generator_pairing},
                                        {"target_pairing", v.target_pairing}};
  }
  const auto found = find_certificate(set, x0, budget, get_seed(config));
  if (found) {
    const CertificateVerdict v = check_certificate(*found, set, x0);
    out.property_failed = !v.valid;
    out.results["found"] = true;
    out.results["certificate"] = certificate_to_json(*found);
    out.results["verdict"] = {{"valid", v.valid},
                              {"max_generator_pairing", v.max_generator_pairing},
                              {"target_pairing", v.target_pairing}};
  } else {
    out.results["found"] = false;
    out.results["note"] = "search failed within budget; this is not evidence of hull membership";
  }
  out.results["summary"] = summary("separate(" + set.space()->label() + ")", Json("n/a"), Json("n/a"), "");
  return out;
}

Outcome run_gcb(const Json& config) {
  const GcbElement u = gcb_from_json(require(config, "element"), "/element");
  const std::int64_t budget = get_int(config, "budget", 100000, 1);
  FunctionDictionary dict;
  bool standard = true;
  if (config.contains("standard_dictionary")) {
    if (!config["standard_dictionary"].is_boolean()) throw SchemaError("/standard_dictionary", "expected a boolean");
    standard = config["standard_dictionary"].get<bool>();
  }
  if (standard) {
    const OpSpaceMatrix probe = u.terms.empty() ? OpSpaceMatrix::zero(u.space, 1) : u.terms.front().point;
    dict = standard_dictionary(probe);
  }
  if (config.contains("dictionary")) {
    for (auto& e : dictionary_from_json(config["dictionary"], u.space, "/dictionary")) dict.push_back(std::move(e));
  }
  if (dict.empty()) throw SchemaError("/dictionary", "dictionary is empty");
  const GcbUpperResult upper = gcb_upper_bound(u, budget, get_seed(config));
  const GcbLowerResult lower = gcb_lower_bound(u, dict);
  Outcome out;
  out.property_failed = lower.value > upper.value + 1e-6;
  out.results = {{"upper", upper.value},
                 {"upper_grouping", upper.grouping},
                 {"upper_evaluations", upper.evaluations},
                 {"lower", lower.value},
                 {"lower_entry", lower.best_entry >= 0 ? Json(dict[static_cast<std::size_t>(lower.best_entry)].name)
                                                       : Json(nullptr)},
                 {"gap", upper.value - lower.value},
                 {"dictionary_size", dict.size()},
                 {"verdict", out.property_failed ? "fail" : "pass"}};
  out.results["summary"] = summary("gcb(" + u.space->label() + ",n=" + std::to_string(u.target_level) + ")",
                                   lower.value, upper.value, "");
  return out;
}

Outcome run_delta(const Json& config) {
  const std::int64_t budget = get_int(config, "budget", 10000, 1);
  const RngSeed seed = get_seed(config);
  std::vector<OpSpaceMatrix> points;
  if (config.contains("points")) {
    const Json& list = config["points"];
    if (!list.is_array()) throw SchemaError("/points", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string at = "/points/" + std::to_string(i);
      SpacePtr space = space_from_json(list[i].contains("space") ? list[i]["space"] : Json(), at + "/space");
      points.push_back(opmatrix_from_json(list[i].contains("point") ? list[i]["point"] : Json(), space, at + "/point"));
    }
  }
  if (config.contains("random")) {
    const Json& r = config["random"];
    if (!r.is_object()) throw SchemaError("/random", "expected an object");
    const int count = static_cast<int>(get_int(r, "count", 20, 1));
    const int max_level = static_cast<int>(get_int(r, "max_level", 3, 1));
    const Json& spaces = require(r, "spaces");
    if (!spaces.is_array() || spaces.empty()) throw SchemaError("/random/spaces", "expected a nonempty array");
    std::vector<SpacePtr> parsed;
    for (std::size_t i = 0; i < spaces.size(); ++i) parsed.push_back(space_from_json(spaces[i], "/random/spaces/" + std::to_string(i)));
    Rng rng = make_rng(seed.derive(0xde17a));
    std::uniform_int_distribution<int> level(1, max_level);
    std::uniform_real_distribution<double> radius(0.05, 0.95);
    for (int i = 0; i < count; ++i) {
      const SpacePtr& space = parsed[static_cast<std::size_t>(i) % parsed.size()];
      const int m = level(rng);
      const double rad = radius(rng);
      points.push_back(sample_space_ball(space, m, rad, rng));
    }
  }
  if (points.empty()) throw SchemaError("/points", "no points given (use \"points\" or \"random\")");

  Outcome out;
  Json rows = Json::array();
  double worst_upper = -1.0, worst_lower = -1.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& x = points[i];
    if (!(matrix_norm(x) < 1.0)) throw SchemaError("/points/" + std::to_string(i), "point must lie in the open unit ball");
    const DeltaIsometryReport r = delta_isometry_check(x, budget, seed.derive(i));
    worst_upper = std::max(worst_upper, r.upper_gap());
    worst_lower = std::max(worst_lower, r.lower_gap());
    if (!r.passed()) out.property_failed = true;
    rows.push_back({{"space", space_to_json(x.space())},
                    {"level", x.level()},
                    {"norm", r.norm},
                    {"upper", r.upper},
                    {"lower", r.lower},
                    {"upper_gap", r.upper_gap()},
                    {"lower_gap", r.lower_gap()},
                    {"passed", r.passed()}});
  }
  out.results = {{"points", std::move(rows)},
                 {"worst_upper_gap", worst_upper},
                 {"worst_lower_gap", worst_lower},
                 {"verdict", out.property_failed ? "fail" : "pass"}};
  std::ostringstream gaps;
  gaps.precision(17);
  gaps << "worst_upper_gap=" << worst_upper << ";worst_lower_gap=" << worst_lower;
  out.results["summary"] = summary("delta_isometry(" + std::to_string(points.size()) + " points)", Json("n/a"),
                                   Json("n/a"), gaps.str());
  return out;
}

Outcome dispatch(const std::string& command, const Json& config) {
  if (command == "estimate") return run_estimate(config, false);
  if (command == "sandwich") return run_estimate(config, true);
  if (command == "schwarz") return run_schwarz(config);
  if (command == "algebra") return run_algebra(config);
  if (command == "probe") return run_probe(config);
  if (command == "hull") return run_hull(config);
  if (command == "separate") return run_separate(config);
  if (command == "gcb") return run_gcb(config);
  if (command == "delta-isometry") return run_delta(config);
  throw InvalidInput("unknown command '" + command + "'");
}

std::string csv_field(const Json& v) {
  if (v.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char c : s) quoted += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return quoted + "\"";
  }
  return s;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"estimate", "sandwich", "schwarz",  "algebra",       "probe",
                                              "hull",     "separate", "gcb",      "delta-isometry"};
  return names;
}

RunOutcome run(const std::string& command, Json config, std::optional<std::uint64_t> seed_override) {
  if (!config.is_object()) throw SchemaError("", "config must be a JSON object");
  if (config.contains("command")) {
    if (!config["command"].is_string() || config["command"].get<std::string>() != command) {
      throw SchemaError("/command", "does not match the requested command '" + command + "'");
    }
  }
  if (seed_override) config["seed"] = *seed_override;
  config["command"] = command;

  const auto start = std::chrono::steady_clock::now();
  Outcome outcome = dispatch(command, config);
  const auto stop = std::chrono::steady_clock::now();

  RunOutcome result;
  result.exit_code = outcome.property_failed ? kPropertyFailure : kOk;
  result.record = {{"schema_version", kSchemaVersion},
                   {"artifact_version", kArtifactVersion},
                   {"command", command},
                   {"config", std::move(config)},
                   {"status", outcome.property_failed ? "property_failure" : "ok"},
                   {"results", std::move(outcome.results)},
                   {"runtime_ms", std::chrono::duration_cast<std::chrono::milliseconds>(stop - start).count()}};
  return result;
}

std::string dump_record(const Json& record) { return record.dump(2) + "\n"; }

std::string report_csv(const std::vector<std::string>& record_paths, std::ostream& warnings) {
  std::string csv = "record,command,function,lower,upper,gap,levels\n";
  for (const auto& path : record_paths) {
    try {
      std::ifstream in(path);
      if (!in) throw std::runtime_error("cannot open file");
      const Json record = Json::parse(in);
      if (!record.is_object() || record.value("schema_version", 0) != kSchemaVersion) {
        throw std::runtime_error("not a schema_version 1 result record");
      }
      const Json& s = record.at("results").at("summary");
      const Json& lower = s.at("lower");
      const Json& upper = s.at("upper");
      const Json gap = (lower.is_number() && upper.is_number()) ? Json(upper.get<double>() - lower.get<double>())
                                                                : Json("");
      csv += csv_field(path) + "," + csv_field(record.at("command")) + "," + csv_field(s.at("function")) + "," +
             csv_field(lower) + "," + csv_field(upper) + "," + csv_field(gap) + "," + csv_field(s.at("levels")) + "\n";
    } catch (const std::exception& e) {
      warnings << "warning: skipping " << path << ": " << e.what() << "\n";
    }
  }
  return csv;
}

}  // namespace cblab::lab
