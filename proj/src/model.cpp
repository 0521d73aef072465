#include "cirest/model.hpp"

#include <cmath>
#include <string>

#include "cirest/error.hpp"
#include "cirest/summation.hpp"

namespace cirest {

Path::Path(std::vector<double> values, double h) : values_(std::move(values)) {
  if (values_.empty()) {
    throw Error(ErrorCode::EmptyPath, "a path needs at least the initial observation");
  }
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::InvalidArgument, "step h must be positive and finite");
  }
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!(values_[j] > 0.0) || !std::isfinite(values_[j])) {
      throw Error(ErrorCode::InvalidArgument,
                  "path value at index " + std::to_string(j) + " is not a positive finite number");
    }
  }
  scheme_ = {values_.size() - 1, h};
}

InvariantLaw invariant_law(const CirParams& params) {
  return {2.0 * params.alpha / params.gamma, 2.0 * params.beta / params.gamma};
}

double invariant_moment(const CirParams& params, double q) {
  const InvariantLaw law = invariant_law(params);
  if (!(q > -law.shape)) {
    throw Error(ErrorCode::MomentUndefined,
                "q = " + std::to_string(q) + " <= -2*alpha/gamma = " + std::to_string(-law.shape));
  }
  if (q == 0.0) return 1.0;
  return std::exp(std::lgamma(q + law.shape) - std::lgamma(law.shape) - q * std::log(law.rate));
}

double ergodic_average(const Path& path, const std::function<double(double)>& f) {
  const std::size_t n = path.increments();
  if (n == 0) throw Error(ErrorCode::EmptyPath, "ergodic average needs n >= 1");
  CompensatedSum sum;
  for (std::size_t j = 0; j < n; ++j) sum += f(path[j]);
  return sum.value() / static_cast<double>(n);
}

}  // namespace cirest
