#include "dtph/error.hpp"

namespace dtph {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IrregularPencil: return "IrregularPencil";
    case ErrorCode::IndexTooHigh: return "IndexTooHigh";
    case ErrorCode::InsufficientInput: return "InsufficientInput";
    case ErrorCode::InconsistentInitialState: return "InconsistentInitialState";
    case ErrorCode::InvalidWeight: return "InvalidWeight";
    case ErrorCode::SingularFeedthrough: return "SingularFeedthrough";
    case ErrorCode::ResolventViolation: return "ResolventViolation";
    case ErrorCode::PoleProximity: return "PoleProximity";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::KernelInclusion: return "KernelInclusion";
    case ErrorCode::Parse: return "Parse";
  }
  return "Unknown";
}

}  // namespace dtph
