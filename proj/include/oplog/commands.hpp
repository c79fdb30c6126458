#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "oplog/report.hpp"

namespace oplog {

enum class OutputFormat { Json, Csv };

struct RunConfig {
  std::string command;
  std::optional<std::string> family_spec;
  std::optional<std::filesystem::path> matrix_path;
  double t = 1.0;
  double s = 0.0;
  std::optional<Complex> eta;
  std::optional<Complex> nu;
  OutputFormat output_format = OutputFormat::Json;
  std::optional<std::filesystem::path> output_path;
  std::uint64_t seed = 7;
  /// Replaces the nominal upper-bound tolerance of every check.
  std::optional<double> tolerance;

  // cole-hopf
  double mu = 0.1;
  int grid_points = 128;
  double length = 1.0;
  std::optional<std::filesystem::path> grid_path;
};

/// Command names accepted by run_command.
const std::vector<std::string>& command_names();

/// Executes one command. Malformed input throws Error(InvalidInput); every
/// other library error is recorded in the report as a failed check.
Report run_command(const RunConfig& config);

std::string render(const Report& report, OutputFormat format);

/// 0 when every check passes, 1 otherwise.
int exit_code(const Report& report);

}  // namespace oplog
