#pragma once

#include <iosfwd>
#include <vector>

#include "cirest/model.hpp"
#include "cirest/random.hpp"

namespace cirest {

/// X_{t+h} | X_t = x  ~  c * chi'^2_d(lambda),  lambda = x * exp(-beta h) / c.
struct TransitionConstants {
  double c = 0.0;
  double d = 0.0;
};

TransitionConstants transition_constants(const CirParams& params, double h);

/// Noncentrality x * exp(-beta h) / c of the transition from state x.
double noncentrality(const CirParams& params, double x, double h);

// Exact samplers. All consume randomness only from the stream passed in.

/// Gamma(shape, scale=1) by Marsaglia-Tsang squeeze rejection, with the
/// U^(1/shape) boost for shape < 1.
double sample_gamma(RandomStream& rng, double shape);

/// Poisson(mean): inversion for mean < 10, Hormann's PTRS otherwise.
std::uint64_t sample_poisson(RandomStream& rng, double mean);

/// Noncentral chi-square with `dof` degrees of freedom. For dof > 1 uses
/// (Z + sqrt(lambda))^2 + chi^2_{dof-1}; otherwise the Poisson mixture
/// chi^2_{dof + 2K}, K ~ Poisson(lambda / 2). Throws DegenerateKernel for
/// dof <= 0.
double sample_noncentral_chisq(RandomStream& rng, double dof, double noncentrality);

double sample_transition(const CirParams& params, double x, double h, RandomStream& rng);

/// One draw from the invariant Gamma(2 alpha/gamma, rate 2 beta/gamma) law.
double sample_stationary(const CirParams& params, RandomStream& rng);

/// Stationary start followed by n exact transitions. Requires
/// params.boundary_non_attracting() and h > 0.
Path simulate_path(const CirParams& params, const SamplingScheme& scheme, StreamSeed seed);

/// `t,x` header then one row per grid point, 17 significant digits.
void write_path_csv(std::ostream& out, const Path& path);

/// Reads the x column of a `t,x` CSV. Throws InvalidArgument on malformed input.
std::vector<double> read_path_csv(std::istream& in);

}  // namespace cirest
