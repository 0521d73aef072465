#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cirest {

enum class ErrorCode {
  InvalidArgument,
  MomentUndefined,
  EmptyPath,
  DegenerateKernel,
  NonFiniteLikelihood,
  NotPositiveDefinite,
  NonPositiveCorrelation,
  DegenerateRegressor,
  InadmissibleInitial,
  InadmissibleEstimate,
  SingularHessian,
  AllReplicationsFailed,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Typed failure raised by every operation in the library. `what()` always
/// starts with the error name so callers that only see the message (CLI,
/// Python) can still dispatch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cirest
