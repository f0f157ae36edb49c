#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fuas {

enum class ErrorCode {
  BadMagic,
  TruncatedPayload,
  NonPositiveDim,
  InvalidValue,
  MissingField,
  MalformedDocument,
  DimMismatch,
  EllipsoidOutOfBounds,
  PromptOutOfBounds,
  NoPositiveSeed,
  EmptyMask,
  NoValidPairs,
  TooFewReplicates,
  NonFiniteInput,
  EmptyTrainingSet,
  SchemaMismatch,
  SingleClass,
  EmptyText,
  ProviderFailure,
  ZeroVector,
  EmptyIndex,
  TokenBudgetExceeded,
  MissingBlock,
  MissingKey,
  BadValue,
  UnknownPlanField,
  EmptyViolations,
  InvalidState,
  InvalidTransition,
  UnknownCase,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-checkable code plus a human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace fuas
