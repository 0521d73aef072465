#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace cirest {

/// Parameters of dX = (alpha - beta X) dt + sqrt(gamma X) dW.
///
/// Positivity and the two boundary conditions are predicates rather than
/// constructor guards: simulation needs only 2*alpha > gamma, while the
/// estimation asymptotics require 2*alpha > 5*gamma. One-step estimates are
/// stored in this type unconstrained.
struct CirParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  bool positive() const noexcept { return alpha > 0.0 && beta > 0.0 && gamma > 0.0; }
  /// 2*alpha > gamma: zero is not attracting and paths stay in (0, inf).
  bool boundary_non_attracting() const noexcept { return positive() && 2.0 * alpha > gamma; }
  bool admissible_for_estimation() const noexcept { return positive() && 2.0 * alpha > 5.0 * gamma; }

  friend bool operator==(const CirParams&, const CirParams&) = default;
};

/// Equidistant grid t_j = j*h, j = 0..n.
struct SamplingScheme {
  std::size_t n = 0;
  double h = 0.0;

  double horizon() const noexcept { return static_cast<double>(n) * h; }
};

/// Observations X_{t_0}, ..., X_{t_n}. Values are strictly positive and
/// finite; the scheme's n always equals values().size() - 1.
class Path {
 public:
  Path(std::vector<double> values, double h);

  const SamplingScheme& scheme() const noexcept { return scheme_; }
  std::size_t increments() const noexcept { return scheme_.n; }
  double step() const noexcept { return scheme_.h; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }

 private:
  SamplingScheme scheme_;
  std::vector<double> values_;
};

/// Gamma(shape, rate) stationary law of the process.
struct InvariantLaw {
  double shape = 0.0;
  double rate = 0.0;

  double mean() const noexcept { return shape / rate; }
  double variance() const noexcept { return shape / (rate * rate); }
};

InvariantLaw invariant_law(const CirParams& params);

/// q-th moment of the invariant law, finite iff q > -2*alpha/gamma.
/// Evaluated in log space. Throws MomentUndefined otherwise.
double invariant_moment(const CirParams& params, double q);

/// (1/n) * sum_{j=1..n} f(X_{t_{j-1}}), i.e. left endpoints only.
double ergodic_average(const Path& path, const std::function<double(double)>& f);

}  // namespace cirest
