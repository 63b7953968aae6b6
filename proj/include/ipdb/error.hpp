#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ipdb {

enum class ErrorCode {
  InvalidArgument,
  TagMismatch,
  InvalidProbability,
  DivergentMarginals,
  FactOutsideFamily,
  NonconvergentFamily,
  UnsupportedSubfamilyShape,
  BlockOverflow,
  OverlappingBlocks,
  DivergentBlocks,
  DivergentRates,
  AlmostSureFact,
  DivergentComponents,
  PreconditionViolated,
  NotACompletion,
  OverlappingFactSets,
  SyntaxError,
  ArityMismatch,
  UnboundVariable,
  WorldBudgetExceeded,
  ModeMismatch,
  InvalidSpec,
};

// Stable kebab-case name, used in CLI reports.
std::string_view code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ipdb
