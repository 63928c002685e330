#pragma once

// The command layer behind the `tfq` executable. Every command returns its
// report instead of printing, so it can be exercised from tests.

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace tfq::cli {

enum class Format { Json, Csv };

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kInputError = 2 };

struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  std::uint64_t seed = 42;
  std::size_t trials = 100;
  double tol = 1e-9;
  std::optional<std::string> out;
  Format format = Format::Json;

  // verify
  std::vector<std::size_t> dims{2, 3};
  bool inject_fault = false;
  // teleport
  bool random_circuit = false;
  std::size_t dim = 2;
  std::string encoding = "spin";
  // nmr
  std::optional<std::string> init;
  std::optional<std::string> spectrum_out;
};

struct CommandResult {
  int exit_code = kOk;
  nlohmann::json report;
  std::string csv;    // set when the command has a tabular form
  std::string error;  // message for kInputError
};

CommandResult cmd_verify(const RunConfig& config);
CommandResult cmd_teleport(const RunConfig& config);
CommandResult cmd_acausal(const RunConfig& config);
CommandResult cmd_nmr(const RunConfig& config);

/// Parses argv, runs the command and writes the report to --out or `out`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tfq::cli
