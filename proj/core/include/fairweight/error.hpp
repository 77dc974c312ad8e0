#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fairweight {

enum class ErrorCode {
  InvalidArgument,
  NotFound,
  IoError,
  ConfigError,
  MissingColumn,
  UnparsableNumeric,
  EmptyDataset,
  DatasetTooSmall,
  UnknownAttribute,
  FewerThanTwoGroups,
  EmptyGroup,
  UnknownGroup,
  EmptyDenominator,
  MissingModel,
  EmptyIndexSet,
  EmptyTrainingSet,
  SingleClassTrainingSet,
  NonFiniteLoss,
  InfeasibleWithinCap,
};

std::string_view to_string(ErrorCode code);

/// Exception type thrown by every module. The code is stable and is what the
/// CLI prints in its structured diagnostics.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fairweight
