#pragma once

#include <optional>
#include <string_view>

#include "cirest/linalg.hpp"
#include "cirest/model.hpp"

namespace cirest {

enum class Estimator { initial, newton, scoring, newton_blockdiag, fixedT_gamma };

std::string_view to_string(Estimator e) noexcept;
/// Accepts the canonical names and the hyphenated CLI spellings
/// (`newton-blockdiag`, `fixedt-gamma`).
std::optional<Estimator> parse_estimator(std::string_view name) noexcept;

struct EstimationResult {
  Estimator label = Estimator::initial;
  /// (alpha, beta, gamma), reported unclamped. For fixedT_gamma only the
  /// gamma slot is meaningful; the others hold NaN.
  Vec3 theta_hat{};
  /// Positivity and 2*alpha > 5*gamma.
  bool admissible = false;
  /// D_n (theta_hat - theta0), present only after studentize().
  std::optional<Vec3> scaled_error;
  /// I(theta_hat)^{1/2} D_n (theta_hat - theta0).
  std::optional<Vec3> studentized;

  CirParams params() const noexcept { return {theta_hat[0], theta_hat[1], theta_hat[2]}; }
};

/// Closed-form conditional least squares for (alpha, beta) followed by the
/// exact maximizer of the quasi-likelihood in gamma. Needs n >= 2.
/// Throws DegenerateRegressor (constant left endpoints) or
/// NonPositiveCorrelation (lag ratio <= 0).
EstimationResult initial_estimate(const Path& path);

/// theta0 - H(theta0)^{-1} grad(theta0), one linear solve.
EstimationResult newton_onestep(const EstimationResult& initial, const Path& path);

/// theta0 + D^{-1} I(theta0)^{-1} D^{-1} grad(theta0).
EstimationResult scoring_onestep(const EstimationResult& initial, const Path& path);

/// Newton step with the (rho, gamma) cross blocks of the Hessian zeroed.
EstimationResult newton_blockdiag_onestep(const EstimationResult& initial, const Path& path);

/// Drift-free diffusion estimate (1/n) sum (dX)^2 / (h X_{t_{j-1}}), which is
/// consistent for gamma on a fixed horizon.
EstimationResult fixedT_gamma_estimate(const Path& path);

/// Fills scaled_error and studentized against the known truth. Throws
/// InadmissibleEstimate when result is not admissible.
EstimationResult studentize(const EstimationResult& result, const CirParams& truth,
                            const SamplingScheme& scheme);

/// Runs `which` end to end on a path (initial estimate first when needed).
EstimationResult estimate(Estimator which, const Path& path);

// Building blocks of the one-step updates.

/// Solves hessian * step = gradient and returns -step.
Vec3 newton_step(const Mat3& hessian, const Vec3& gradient);
/// Zeroes the entries coupling (alpha, beta) with gamma.
Mat3 block_diagonal(const Mat3& m) noexcept;

}  // namespace cirest
