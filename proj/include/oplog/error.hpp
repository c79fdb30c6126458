#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oplog {

/// Failure categories raised across the library. The names are part of the
/// report format: the CLI prints them verbatim.
enum class ErrorKind {
  InvalidInput,
  SingularMatrix,
  Overflow,
  SpectrumHitsBranchCut,
  OriginEnclosed,
  ResolventBlowup,
  InvalidContour,
  NoConvergence,
  EvaluationFailed,
  StepUnderflow,
  EtaInSpectrum,
  NoEtaFound,
  EtaEqualsOne,
  NoNuFound,
  ContourInvalid,
  DirectLogUnavailable,
  NotInvertible,
  SingularResolventGap,
  NuMismatch,
  SingularCollapse,
  SingularCombination,
  SingularPrefactor,
  VanishingDenominator,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace oplog
