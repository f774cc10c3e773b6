#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace cblab::lab {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kArtifactVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kInputError = 1, kPropertyFailure = 2 };

[[nodiscard]] const std::vector<std::string>& commands();

struct RunOutcome {
  Json record;
  int exit_code = kOk;
};

/// Validates `config` for `command`, runs it and builds the result record.
/// A seed given in `seed_override` replaces the config's seed. Throws
/// cblab::InvalidInput (usually a SchemaError with a JSON pointer) for bad
/// input.
[[nodiscard]] RunOutcome run(const std::string& command, Json config, std::optional<std::uint64_t> seed_override);

/// The record serialized the way the CLI writes it.
[[nodiscard]] std::string dump_record(const Json& record);

/// CSV summary, one row per readable record. Unreadable or malformed
/// records are skipped with a warning on `warnings`.
[[nodiscard]] std::string report_csv(const std::vector<std::string>& record_paths, std::ostream& warnings);

}  // namespace cblab::lab
