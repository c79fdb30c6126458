#include "oplog/error.hpp"

namespace oplog {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::SpectrumHitsBranchCut: return "SpectrumHitsBranchCut";
    case ErrorKind::OriginEnclosed: return "OriginEnclosed";
    case ErrorKind::ResolventBlowup: return "ResolventBlowup";
    case ErrorKind::InvalidContour: return "InvalidContour";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::EvaluationFailed: return "EvaluationFailed";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::EtaInSpectrum: return "EtaInSpectrum";
    case ErrorKind::NoEtaFound: return "NoEtaFound";
    case ErrorKind::EtaEqualsOne: return "EtaEqualsOne";
    case ErrorKind::NoNuFound: return "NoNuFound";
    case ErrorKind::ContourInvalid: return "ContourInvalid";
    case ErrorKind::DirectLogUnavailable: return "DirectLogUnavailable";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::SingularResolventGap: return "SingularResolventGap";
    case ErrorKind::NuMismatch: return "NuMismatch";
    case ErrorKind::SingularCollapse: return "SingularCollapse";
    case ErrorKind::SingularCombination: return "SingularCombination";
    case ErrorKind::SingularPrefactor: return "SingularPrefactor";
    case ErrorKind::VanishingDenominator: return "VanishingDenominator";
  }
  return "Unknown";
}

}  // namespace oplog
