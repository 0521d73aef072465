#pragma once

#include "cirest/linalg.hpp"
#include "cirest/model.hpp"

namespace cirest {

/// Exact conditional mean and variance of X_{t+h} given X_t = x, with their
/// parameter gradients. grad_mu has no gamma component; grad_sigma2[2] equals
/// sigma2 / gamma since the variance is linear in gamma.
struct CondMoments {
  double mu = 0.0;
  double sigma2 = 0.0;
  std::array<double, 2> grad_mu{};
  Vec3 grad_sigma2{};
};

CondMoments cond_moments(const CirParams& params, double x, double h);

/// Gaussian quasi-log-likelihood: sum over the n transitions of the full
/// normal log-density, including the -log(2 pi)/2 normalizer.
double gqlf(const CirParams& params, const Path& path);

/// Analytic score of gqlf.
Vec3 gqlf_gradient(const CirParams& params, const Path& path);

/// Central differences of gqlf_gradient with step 1e-5 * (1 + |theta_k|),
/// symmetrized.
Mat3 gqlf_hessian(const CirParams& params, const Path& path);

/// D_n = diag(sqrt(T), sqrt(T), sqrt(n)).
struct RateMatrix {
  Vec3 diagonal{};

  Mat3 matrix() const noexcept;
  double determinant() const noexcept { return diagonal[0] * diagonal[1] * diagonal[2]; }
  Vec3 apply(const Vec3& v) const noexcept;
  Vec3 apply_inverse(const Vec3& v) const noexcept;
};

RateMatrix rate_matrix(const SamplingScheme& scheme);

/// Asymptotic information matrix. Block diagonal between (alpha, beta) and
/// gamma; entries in the off blocks are exactly zero.
struct InfoMatrix {
  Mat3 entries{};
};

InfoMatrix info_matrix(const CirParams& params);

/// Closed-form inverse of info_matrix.
Mat3 info_matrix_inverse(const CirParams& params);

/// Symmetric positive-definite square root of info_matrix, built blockwise.
/// Throws NotPositiveDefinite if the drift block is not SPD.
Mat3 info_sqrt(const CirParams& params);

}  // namespace cirest
