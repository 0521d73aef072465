#include "cirest/simulate.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "cirest/error.hpp"
#include "cirest/montecarlo.hpp"

namespace cirest {

TransitionConstants transition_constants(const CirParams& params, double h) {
  const double one_minus_decay = -std::expm1(-params.beta * h);
  return {params.gamma * one_minus_decay / (4.0 * params.beta), 4.0 * params.alpha / params.gamma};
}

double noncentrality(const CirParams& params, double x, double h) {
  return x * std::exp(-params.beta * h) / transition_constants(params, h).c;
}

double sample_gamma(RandomStream& rng, double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw Error(ErrorCode::InvalidArgument, "gamma shape must be positive and finite");
  }
  if (shape < 1.0) {
    const double u = rng.uniform();
    return sample_gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    const double x = rng.normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::uint64_t sample_poisson(RandomStream& rng, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw Error(ErrorCode::InvalidArgument, "Poisson mean must be non-negative and finite");
  }
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = rng.uniform();
    while (prod > limit) {
      ++k;
      prod *= rng.uniform();
    }
    return k;
  }
  // PTRS: W. Hormann, "The transformed rejection method for generating
  // Poisson random variables", Insurance: Math. and Econ. 12 (1993).
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  while (true) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

double sample_noncentral_chisq(RandomStream& rng, double dof, double noncentrality) {
  if (!(dof > 0.0)) {
    throw Error(ErrorCode::DegenerateKernel, "degrees of freedom must be positive");
  }
  if (!(noncentrality >= 0.0) || !std::isfinite(noncentrality)) {
    throw Error(ErrorCode::InvalidArgument, "noncentrality must be non-negative and finite");
  }
  if (dof > 1.0) {
    const double shifted = rng.normal() + std::sqrt(noncentrality);
    return shifted * shifted + 2.0 * sample_gamma(rng, 0.5 * (dof - 1.0));
  }
  const auto k = sample_poisson(rng, 0.5 * noncentrality);
  return 2.0 * sample_gamma(rng, 0.5 * dof + static_cast<double>(k));
}

double sample_transition(const CirParams& params, double x, double h, RandomStream& rng) {
  if (!(x > 0.0) || !(h > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "transition needs x > 0 and h > 0");
  }
  const TransitionConstants k = transition_constants(params, h);
  const double lambda = x * std::exp(-params.beta * h) / k.c;
  return k.c * sample_noncentral_chisq(rng, k.d, lambda);
}

double sample_stationary(const CirParams& params, RandomStream& rng) {
  const InvariantLaw law = invariant_law(params);
  return sample_gamma(rng, law.shape) / law.rate;
}

Path simulate_path(const CirParams& params, const SamplingScheme& scheme, StreamSeed seed) {
  if (!params.boundary_non_attracting()) {
    throw Error(ErrorCode::InvalidArgument, "simulation requires positive parameters with 2*alpha > gamma");
  }
  if (!(scheme.h > 0.0) || !std::isfinite(scheme.h)) {
    throw Error(ErrorCode::InvalidArgument, "step h must be positive and finite");
  }
  RandomStream rng(seed);
  const TransitionConstants k = transition_constants(params, scheme.h);
  const double decay_over_c = std::exp(-params.beta * scheme.h) / k.c;

  std::vector<double> values;
  values.reserve(scheme.n + 1);
  values.push_back(sample_stationary(params, rng));
  for (std::size_t j = 1; j <= scheme.n; ++j) {
    const double lambda = values.back() * decay_over_c;
    values.push_back(k.c * sample_noncentral_chisq(rng, k.d, lambda));
  }
  return Path(std::move(values), scheme.h);
}

void write_path_csv(std::ostream& out, const Path& path) {
  out << "t,x\n";
  const auto values = path.values();
  for (std::size_t j = 0; j < values.size(); ++j) {
    out << format_double(static_cast<double>(j) * path.step()) << ',' << format_double(values[j]) << '\n';
  }
}

namespace {

double parse_number(std::string_view text, std::size_t line) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "line " + std::to_string(line) + ": cannot parse '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::vector<double> read_path_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::InvalidArgument, "empty path file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,x") {
    throw Error(ErrorCode::InvalidArgument, "expected header 't,x', found '" + line + "'");
  }
  std::vector<double> xs;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(lineno) + ": expected two columns");
    }
    parse_number(std::string_view(line).substr(0, comma), lineno);
    xs.push_back(parse_number(std::string_view(line).substr(comma + 1), lineno));
  }
  return xs;
}

}  // namespace cirest
