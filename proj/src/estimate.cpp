#include "cirest/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cirest/error.hpp"
#include "cirest/gql.hpp"
#include "cirest/summation.hpp"

namespace cirest {

std::string_view to_string(Estimator e) noexcept {
  switch (e) {
    case Estimator::initial: return "initial";
    case Estimator::newton: return "newton";
    case Estimator::scoring: return "scoring";
    case Estimator::newton_blockdiag: return "newton_blockdiag";
    case Estimator::fixedT_gamma: return "fixedT_gamma";
  }
  return "unknown";
}

std::optional<Estimator> parse_estimator(std::string_view name) noexcept {
  if (name == "initial") return Estimator::initial;
  if (name == "newton") return Estimator::newton;
  if (name == "scoring") return Estimator::scoring;
  if (name == "newton_blockdiag" || name == "newton-blockdiag") return Estimator::newton_blockdiag;
  if (name == "fixedT_gamma" || name == "fixedt-gamma" || name == "fixedt_gamma") {
    return Estimator::fixedT_gamma;
  }
  return std::nullopt;
}

namespace {

EstimationResult make_result(Estimator label, const Vec3& theta) {
  EstimationResult r;
  r.label = label;
  r.theta_hat = theta;
  r.admissible = CirParams{theta[0], theta[1], theta[2]}.admissible_for_estimation();
  return r;
}

void require_admissible_initial(const EstimationResult& initial) {
  if (!initial.admissible) {
    throw Error(ErrorCode::InadmissibleInitial,
                "initial estimate is outside {alpha, beta, gamma > 0, 2 alpha > 5 gamma}");
  }
}

}  // namespace

EstimationResult initial_estimate(const Path& path) {
  const std::size_t n = path.increments();
  if (n == 0) throw Error(ErrorCode::EmptyPath, "initial estimate needs at least two transitions");
  const double h = path.step();
  const auto xs = path.values();
  const auto left = xs.first(n);
  const auto right = xs.subspan(1);

  if (std::all_of(left.begin(), left.end(), [&](double x) { return x == left.front(); })) {
    throw Error(ErrorCode::DegenerateRegressor, "left endpoints of the path are constant");
  }

  CompensatedSum left_sum, right_sum;
  for (std::size_t j = 0; j < n; ++j) {
    left_sum += left[j];
    right_sum += right[j];
  }
  const double left_mean = left_sum.value() / static_cast<double>(n);
  const double right_mean = right_sum.value() / static_cast<double>(n);

  CompensatedSum cross, square;
  for (std::size_t j = 0; j < n; ++j) {
    const double dl = left[j] - left_mean;
    cross += dl * (right[j] - right_mean);
    square += dl * dl;
  }
  const double ratio = cross.value() / square.value();
  if (!(ratio > 0.0)) {
    throw Error(ErrorCode::NonPositiveCorrelation,
                "lag regression slope " + std::to_string(ratio) + " is not positive");
  }

  // exp(-beta h) is the fitted slope itself, so 1 - exp(-beta h) = 1 - ratio.
  const double beta = -std::log(ratio) / h;
  const double decay_ratio = beta == 0.0 ? h : (1.0 - ratio) / beta;
  const double alpha = (right_mean - ratio * left_mean) / decay_ratio;

  const CirParams unit_diffusion{alpha, beta, 1.0};
  CompensatedSum standardized;
  for (std::size_t j = 0; j < n; ++j) {
    const CondMoments m = cond_moments(unit_diffusion, left[j], h);
    const double r = right[j] - m.mu;
    standardized += r * r / m.sigma2;
  }
  const double gamma = standardized.value() / static_cast<double>(n);
  return make_result(Estimator::initial, {alpha, beta, gamma});
}

Vec3 newton_step(const Mat3& hessian, const Vec3& gradient) {
  const Vec3 x = solve3(hessian, gradient);
  return {-x[0], -x[1], -x[2]};
}

Mat3 block_diagonal(const Mat3& m) noexcept {
  Mat3 b = m;
  b[0][2] = b[2][0] = 0.0;
  b[1][2] = b[2][1] = 0.0;
  return b;
}

EstimationResult newton_onestep(const EstimationResult& initial, const Path& path) {
  require_admissible_initial(initial);
  const CirParams start = initial.params();
  const Vec3 step = newton_step(gqlf_hessian(start, path), gqlf_gradient(start, path));
  return make_result(Estimator::newton, initial.theta_hat + step);
}

EstimationResult newton_blockdiag_onestep(const EstimationResult& initial, const Path& path) {
  require_admissible_initial(initial);
  const CirParams start = initial.params();
  const Vec3 step = newton_step(block_diagonal(gqlf_hessian(start, path)), gqlf_gradient(start, path));
  return make_result(Estimator::newton_blockdiag, initial.theta_hat + step);
}

EstimationResult scoring_onestep(const EstimationResult& initial, const Path& path) {
  require_admissible_initial(initial);
  const CirParams start = initial.params();
  const RateMatrix rate = rate_matrix(path.scheme());
  const Vec3 score = rate.apply_inverse(gqlf_gradient(start, path));
  const Vec3 step = rate.apply_inverse(info_matrix_inverse(start) * score);
  return make_result(Estimator::scoring, initial.theta_hat + step);
}

EstimationResult fixedT_gamma_estimate(const Path& path) {
  const std::size_t n = path.increments();
  if (n == 0) throw Error(ErrorCode::EmptyPath, "fixed-horizon estimate needs n >= 1");
  const double h = path.step();
  CompensatedSum sum;
  for (std::size_t j = 1; j <= n; ++j) {
    const double dx = path[j] - path[j - 1];
    sum += dx * dx / (h * path[j - 1]);
  }
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  return make_result(Estimator::fixedT_gamma, {nan, nan, sum.value() / static_cast<double>(n)});
}

EstimationResult studentize(const EstimationResult& result, const CirParams& truth,
                            const SamplingScheme& scheme) {
  if (!result.admissible) {
    throw Error(ErrorCode::InadmissibleEstimate,
                std::string(to_string(result.label)) + " estimate is not admissible");
  }
  EstimationResult out = result;
  const Vec3 error = result.theta_hat - Vec3{truth.alpha, truth.beta, truth.gamma};
  const Vec3 scaled = rate_matrix(scheme).apply(error);
  out.scaled_error = scaled;
  out.studentized = info_sqrt(result.params()) * scaled;
  return out;
}

EstimationResult estimate(Estimator which, const Path& path) {
  switch (which) {
    case Estimator::initial: return initial_estimate(path);
    case Estimator::newton: return newton_onestep(initial_estimate(path), path);
    case Estimator::scoring: return scoring_onestep(initial_estimate(path), path);
    case Estimator::newton_blockdiag: return newton_blockdiag_onestep(initial_estimate(path), path);
    case Estimator::fixedT_gamma: return fixedT_gamma_estimate(path);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown estimator");
}

}  // namespace cirest
