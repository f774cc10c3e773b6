// cbnorm-lab: reproducible runner for cb-norm experiments.
//
//   cbnorm-lab <command> --config path.json [--out path.json] [--seed N]
//   cbnorm-lab report record.json ... [--out summary.csv]

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cblab/errors.hpp"
#include "cblab/serialize.hpp"
#include "lab/experiment.hpp"

namespace {

int write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return cblab::lab::kOk;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << path << "\n";
    return cblab::lab::kInputError;
  }
  out << text;
  return cblab::lab::kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cbnorm-lab: bounds and stress tests for completely bounded norms"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  for (const auto& name : cblab::lab::commands()) {
    auto* sub = app.add_subcommand(name, "Run the '" + name + "' experiment");
    sub->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "Write the result record here instead of stdout");
    sub->add_option("--seed", seed, "Override the config's seed");
  }
  std::vector<std::string> records;
  auto* report = app.add_subcommand("report", "Summarize result records as CSV");
  report->add_option("records", records, "Result record files");
  report->add_option("--out", out_path, "Write the CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : cblab::lab::kInputError;
  }

  if (report->parsed()) return write_output(cblab::lab::report_csv(records, std::cerr), out_path);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    std::ifstream in(config_path);
    nlohmann::json config;
    try {
      config = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      std::cerr << "error: " << config_path << " is not valid JSON: " << e.what() << "\n";
      return cblab::lab::kInputError;
    }
    const auto outcome = cblab::lab::run(command, std::move(config), seed);
    if (const int rc = write_output(cblab::lab::dump_record(outcome.record), out_path); rc != 0) return rc;
    if (outcome.exit_code == cblab::lab::kPropertyFailure) {
      std::cerr << command << ": property failure reported (see record)\n";
    }
    return outcome.exit_code;
  } catch (const cblab::SchemaError& e) {
    std::cerr << "error: config " << e.what() << "\n";
    return cblab::lab::kInputError;
  } catch (const cblab::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cblab::lab::kInputError;
  } catch (const cblab::ConfigurationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cblab::lab::kInputError;
  } catch (const cblab::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cblab::lab::kInputError;
  }
}
