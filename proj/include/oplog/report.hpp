#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oplog/io.hpp"

namespace oplog {

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Plain rows appended to the CSV form after the check table.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// Machine-readable outcome of one command:
/// { "command", "params", "checks": [{name, value, tolerance, pass}], ...payload }.
struct Report {
  std::string command;
  Json params = Json::object();
  std::vector<Check> checks;
  Json payload = Json::object();
  std::optional<CsvTable> table;

  /// pass iff value ≤ tolerance and value is finite.
  Check& expect_at_most(const std::string& name, double value, double tolerance);
  /// pass iff value ≥ threshold and value is finite.
  Check& expect_at_least(const std::string& name, double value, double threshold);
  /// Records a yes/no requirement as value 1 (held) or 0, tolerance 1.
  Check& require(const std::string& name, bool held);

  bool passed() const;
  std::vector<std::string> failures() const;

  Json to_json() const;
  /// name,value,tolerance,pass rows; the table, when present, follows a blank line.
  std::string to_csv() const;
};

/// Shortest round-trip decimal form, identical across runs.
std::string format_double(double v);

}  // namespace oplog
