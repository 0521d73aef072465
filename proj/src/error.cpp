#include "cirest/error.hpp"

namespace cirest {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MomentUndefined: return "MomentUndefined";
    case ErrorCode::EmptyPath: return "EmptyPath";
    case ErrorCode::DegenerateKernel: return "DegenerateKernel";
    case ErrorCode::NonFiniteLikelihood: return "NonFiniteLikelihood";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NonPositiveCorrelation: return "NonPositiveCorrelation";
    case ErrorCode::DegenerateRegressor: return "DegenerateRegressor";
    case ErrorCode::InadmissibleInitial: return "InadmissibleInitial";
    case ErrorCode::InadmissibleEstimate: return "InadmissibleEstimate";
    case ErrorCode::SingularHessian: return "SingularHessian";
    case ErrorCode::AllReplicationsFailed: return "AllReplicationsFailed";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace cirest
