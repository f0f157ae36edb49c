#include "fuas/core/error.hpp"

namespace fuas {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedPayload: return "TruncatedPayload";
    case ErrorCode::NonPositiveDim: return "NonPositiveDim";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::MalformedDocument: return "MalformedDocument";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::EllipsoidOutOfBounds: return "EllipsoidOutOfBounds";
    case ErrorCode::PromptOutOfBounds: return "PromptOutOfBounds";
    case ErrorCode::NoPositiveSeed: return "NoPositiveSeed";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::NoValidPairs: return "NoValidPairs";
    case ErrorCode::TooFewReplicates: return "TooFewReplicates";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::ProviderFailure: return "ProviderFailure";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::EmptyIndex: return "EmptyIndex";
    case ErrorCode::TokenBudgetExceeded: return "TokenBudgetExceeded";
    case ErrorCode::MissingBlock: return "MissingBlock";
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::BadValue: return "BadValue";
    case ErrorCode::UnknownPlanField: return "UnknownPlanField";
    case ErrorCode::EmptyViolations: return "EmptyViolations";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::InvalidTransition: return "InvalidTransition";
    case ErrorCode::UnknownCase: return "UnknownCase";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

}  // namespace fuas
