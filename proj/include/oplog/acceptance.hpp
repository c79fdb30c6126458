#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oplog/report.hpp"

namespace oplog {

struct SuiteOptions {
  std::uint64_t seed = 7;
  /// Replaces every upper-bound tolerance (negative controls keep theirs).
  std::optional<double> tolerance;
  /// Runs criteria 1 to 11 a second time and compares the serialized reports.
  bool check_determinism = true;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  Json details = Json::object();
  double seconds = 0.0;  ///< wall clock, kept out of the serialized report

  bool pass() const;
};

struct SuiteResult {
  std::vector<CriterionResult> criteria;
  double seconds = 0.0;

  bool passed() const;
  /// Timing-free report: identical bytes for identical seeds.
  Report report(const SuiteOptions& opts) const;
};

SuiteResult run_acceptance(const SuiteOptions& opts = {});

/// Principal log through an eigendecomposition; independent of the contour code.
OperatorMatrix eigen_log(const OperatorMatrix& a);

}  // namespace oplog
