#include "cirest/gql.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cirest/error.hpp"
#include "cirest/summation.hpp"

namespace cirest {
namespace {

// Quantities shared by every transition of an equidistant grid.
struct StepConstants {
  double decay;        // exp(-beta h)
  double ratio;        // (1 - exp(-beta h)) / beta
  double ratio_dbeta;  // d ratio / d beta

  StepConstants(double beta, double h) {
    const double bh = beta * h;
    decay = std::exp(-bh);
    ratio = beta == 0.0 ? h : -std::expm1(-bh) / beta;
    if (std::fabs(bh) < 1e-3) {
      ratio_dbeta = h * h * (-0.5 + bh * (1.0 / 3.0 + bh * (-1.0 / 8.0 + bh / 30.0)));
    } else {
      ratio_dbeta = (h * decay * beta + std::expm1(-bh)) / (beta * beta);
    }
  }
};

CondMoments moments_at(const CirParams& p, const StepConstants& k, double x, double h) {
  CondMoments m;
  const double carried = k.decay * x;
  const double level = carried + 0.5 * p.alpha * k.ratio;
  const double c = k.ratio * level;  // sigma2 / gamma
  m.mu = carried + p.alpha * k.ratio;
  m.sigma2 = p.gamma * c;
  m.grad_mu = {k.ratio, -h * carried + p.alpha * k.ratio_dbeta};
  const double dc_dalpha = 0.5 * k.ratio * k.ratio;
  const double dc_dbeta = k.ratio_dbeta * level + k.ratio * (-h * carried + 0.5 * p.alpha * k.ratio_dbeta);
  m.grad_sigma2 = {p.gamma * dc_dalpha, p.gamma * dc_dbeta, c};
  return m;
}

void require_transitions(const Path& path) {
  if (path.increments() == 0) throw Error(ErrorCode::EmptyPath, "quasi-likelihood needs n >= 1");
}

void require_variance(double sigma2, std::size_t j) {
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw Error(ErrorCode::NonFiniteLikelihood,
                "conditional variance at step " + std::to_string(j) + " is not positive and finite");
  }
}

}  // namespace

CondMoments cond_moments(const CirParams& params, double x, double h) {
  return moments_at(params, StepConstants(params.beta, h), x, h);
}

double gqlf(const CirParams& params, const Path& path) {
  require_transitions(path);
  const double h = path.step();
  const StepConstants k(params.beta, h);
  const double log_two_pi = std::log(2.0 * std::numbers::pi);
  CompensatedSum sum;
  for (std::size_t j = 1; j <= path.increments(); ++j) {
    const double prev = path[j - 1];
    const double carried = k.decay * prev;
    const double mu = carried + params.alpha * k.ratio;
    const double sigma2 = params.gamma * k.ratio * (carried + 0.5 * params.alpha * k.ratio);
    require_variance(sigma2, j);
    const double r = path[j] - mu;
    sum += -0.5 * (log_two_pi + std::log(sigma2) + r * r / sigma2);
  }
  return sum.value();
}

Vec3 gqlf_gradient(const CirParams& params, const Path& path) {
  require_transitions(path);
  const double h = path.step();
  const StepConstants k(params.beta, h);
  std::array<CompensatedSum, 3> sums;
  for (std::size_t j = 1; j <= path.increments(); ++j) {
    const CondMoments m = moments_at(params, k, path[j - 1], h);
    require_variance(m.sigma2, j);
    const double inv_var = 1.0 / m.sigma2;
    const double r = path[j] - m.mu;
    const double mean_weight = r * inv_var;
    const double var_weight = 0.5 * (r * r * inv_var - 1.0) * inv_var;
    sums[0] += m.grad_mu[0] * mean_weight + m.grad_sigma2[0] * var_weight;
    sums[1] += m.grad_mu[1] * mean_weight + m.grad_sigma2[1] * var_weight;
    sums[2] += m.grad_sigma2[2] * var_weight;
  }
  return {sums[0].value(), sums[1].value(), sums[2].value()};
}

Mat3 gqlf_hessian(const CirParams& params, const Path& path) {
  const Vec3 theta{params.alpha, params.beta, params.gamma};
  Mat3 h{};
  for (int col = 0; col < 3; ++col) {
    const double step = 1e-5 * (1.0 + std::fabs(theta[col]));
    Vec3 up = theta;
    Vec3 down = theta;
    up[col] += step;
    down[col] -= step;
    const Vec3 g_up = gqlf_gradient({up[0], up[1], up[2]}, path);
    const Vec3 g_down = gqlf_gradient({down[0], down[1], down[2]}, path);
    for (int row = 0; row < 3; ++row) h[row][col] = (g_up[row] - g_down[row]) / (2.0 * step);
  }
  Mat3 sym{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) sym[i][j] = 0.5 * (h[i][j] + h[j][i]);
  return sym;
}

Mat3 RateMatrix::matrix() const noexcept {
  Mat3 m{};
  for (int i = 0; i < 3; ++i) m[i][i] = diagonal[i];
  return m;
}

Vec3 RateMatrix::apply(const Vec3& v) const noexcept {
  return {diagonal[0] * v[0], diagonal[1] * v[1], diagonal[2] * v[2]};
}

Vec3 RateMatrix::apply_inverse(const Vec3& v) const noexcept {
  return {v[0] / diagonal[0], v[1] / diagonal[1], v[2] / diagonal[2]};
}

RateMatrix rate_matrix(const SamplingScheme& scheme) {
  if (scheme.n == 0 || !(scheme.h > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "rate matrix needs n >= 1 and h > 0");
  }
  const double root_t = std::sqrt(scheme.horizon());
  return {{root_t, root_t, std::sqrt(static_cast<double>(scheme.n))}};
}

InfoMatrix info_matrix(const CirParams& p) {
  const double inv_gamma = 1.0 / p.gamma;
  InfoMatrix info;
  info.entries = {{{inv_gamma * 2.0 * p.beta / (2.0 * p.alpha - p.gamma), -inv_gamma, 0.0},
                   {-inv_gamma, inv_gamma * p.alpha / p.beta, 0.0},
                   {0.0, 0.0, 0.5 * inv_gamma * inv_gamma}}};
  return info;
}

Mat3 info_matrix_inverse(const CirParams& p) {
  const double spread = 2.0 * p.alpha - p.gamma;
  return {{{p.alpha * spread / p.beta, spread, 0.0},
           {spread, 2.0 * p.beta, 0.0},
           {0.0, 0.0, 2.0 * p.gamma * p.gamma}}};
}

Mat3 info_sqrt(const CirParams& params) {
  const Mat3 info = info_matrix(params).entries;
  const double a = info[0][0];
  const double b = info[0][1];
  const double d = info[1][1];
  const double det = a * d - b * b;
  if (!(a > 0.0) || !(det > 0.0) || !(info[2][2] > 0.0) || !std::isfinite(a + d + det)) {
    throw Error(ErrorCode::NotPositiveDefinite, "information matrix is not positive definite");
  }
  // For SPD 2x2 A: sqrt(A) = (A + sqrt(det A) I) / sqrt(tr A + 2 sqrt(det A)).
  const double s = std::sqrt(det);
  const double t = std::sqrt(a + d + 2.0 * s);
  return {{{(a + s) / t, b / t, 0.0}, {b / t, (d + s) / t, 0.0}, {0.0, 0.0, std::sqrt(info[2][2])}}};
}

}  // namespace cirest
