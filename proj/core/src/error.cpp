#include "fairweight/error.hpp"

namespace fairweight {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::UnparsableNumeric: return "UnparsableNumeric";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::DatasetTooSmall: return "DatasetTooSmall";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::FewerThanTwoGroups: return "FewerThanTwoGroups";
    case ErrorCode::EmptyGroup: return "EmptyGroup";
    case ErrorCode::UnknownGroup: return "UnknownGroup";
    case ErrorCode::EmptyDenominator: return "EmptyDenominator";
    case ErrorCode::MissingModel: return "MissingModel";
    case ErrorCode::EmptyIndexSet: return "EmptyIndexSet";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::SingleClassTrainingSet: return "SingleClassTrainingSet";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::InfeasibleWithinCap: return "InfeasibleWithinCap";
  }
  return "Unknown";
}

}  // namespace fairweight
