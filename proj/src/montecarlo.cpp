#include "cirest/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <numbers>
#include <ostream>
#include <thread>

#include "cirest/gql.hpp"
#include "cirest/simulate.hpp"
#include "cirest/summation.hpp"
#include "json.hpp"

namespace cirest {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr Vec3 kNaN3{kNaN, kNaN, kNaN};
constexpr std::array<const char*, 3> kParamNames{"alpha", "beta", "gamma"};

}  // namespace

void McConfig::validate() const {
  if (!truth.boundary_non_attracting()) {
    throw Error(ErrorCode::InvalidArgument, "truth needs positive parameters with 2*alpha > gamma");
  }
  if (scheme.n < 2 || !(scheme.h > 0.0) || !std::isfinite(scheme.h)) {
    throw Error(ErrorCode::InvalidArgument, "scheme needs n >= 2 and a positive finite h");
  }
  if (replications == 0) throw Error(ErrorCode::InvalidArgument, "replications must be >= 1");
  if (workers == 0) throw Error(ErrorCode::InvalidArgument, "workers must be >= 1");
  if (estimators.empty()) throw Error(ErrorCode::InvalidArgument, "estimator set is empty");
  for (std::size_t i = 0; i < estimators.size(); ++i) {
    if (estimators[i] == Estimator::fixedT_gamma) {
      throw Error(ErrorCode::InvalidArgument, "fixedT_gamma is not a Monte Carlo estimator");
    }
    if (std::find(estimators.begin(), estimators.begin() + i, estimators[i]) != estimators.begin() + i) {
      throw Error(ErrorCode::InvalidArgument, "estimator listed twice");
    }
  }
}

bool EstimatorSummary::suspect() const noexcept {
  const std::size_t total = successes + failure_count;
  return total > 0 && static_cast<double>(failure_count) > 0.01 * static_cast<double>(total);
}

const EstimatorSummary& McSummary::at(Estimator e) const {
  for (const auto& s : estimators) {
    if (s.estimator == e) return s;
  }
  throw Error(ErrorCode::InvalidArgument, "estimator not in summary: " + std::string(to_string(e)));
}

std::vector<ReplicationRecord> run_replication(const McConfig& config, std::size_t rep) {
  const Path path = simulate_path(config.truth, config.scheme, {config.master_seed, rep});

  std::optional<EstimationResult> initial;
  std::optional<ErrorCode> initial_error;
  try {
    initial = initial_estimate(path);
  } catch (const Error& e) {
    initial_error = e.code();
  }

  std::vector<ReplicationRecord> out;
  out.reserve(config.estimators.size());
  for (const Estimator which : config.estimators) {
    ReplicationRecord record{rep, which, kNaN3, kNaN3, std::nullopt};
    if (initial_error) {
      record.status = initial_error;
      out.push_back(record);
      continue;
    }
    try {
      EstimationResult result;
      switch (which) {
        case Estimator::initial: result = *initial; break;
        case Estimator::newton: result = newton_onestep(*initial, path); break;
        case Estimator::scoring: result = scoring_onestep(*initial, path); break;
        case Estimator::newton_blockdiag: result = newton_blockdiag_onestep(*initial, path); break;
        case Estimator::fixedT_gamma: result = fixedT_gamma_estimate(path); break;
      }
      record.theta = result.theta_hat;
      record.z = *studentize(result, config.truth, config.scheme).studentized;
    } catch (const Error& e) {
      record.status = e.code();
    }
    out.push_back(record);
  }
  return out;
}

StudyResult run_study(const McConfig& config) {
  config.validate();
  const std::size_t per_rep = config.estimators.size();
  std::vector<ReplicationRecord> records(config.replications * per_rep);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    try {
      for (std::size_t rep = next++; rep < config.replications && !failed; rep = next++) {
        auto block = run_replication(config, rep);
        std::copy(block.begin(), block.end(), records.begin() + static_cast<std::ptrdiff_t>(rep * per_rep));
      }
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };

  const std::size_t workers = std::min(config.workers, config.replications);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  StudyResult result{summarize(records, config.estimators), std::move(records)};
  const bool any_success = std::any_of(result.summary.estimators.begin(), result.summary.estimators.end(),
                                       [](const EstimatorSummary& s) { return s.successes > 0; });
  if (!any_success) {
    throw Error(ErrorCode::AllReplicationsFailed,
                "none of " + std::to_string(config.replications) + " replications produced an estimate");
  }
  return result;
}

McSummary summarize(std::span<const ReplicationRecord> records, std::span<const Estimator> estimators) {
  McSummary summary;
  std::size_t max_rep = 0;
  for (const auto& r : records) max_rep = std::max(max_rep, r.rep + 1);
  summary.replications = records.empty() ? 0 : max_rep;

  for (const Estimator which : estimators) {
    EstimatorSummary s;
    s.estimator = which;
    std::array<std::vector<double>, 3> theta, z;
    for (const auto& r : records) {
      if (r.estimator != which) continue;
      if (!r.ok()) {
        ++s.failure_count;
        continue;
      }
      ++s.successes;
      for (int k = 0; k < 3; ++k) {
        theta[k].push_back(r.theta[k]);
        z[k].push_back(r.z[k]);
      }
    }
    for (int k = 0; k < 3; ++k) {
      ParamSummary& p = s.params[k];
      p.mean = sample_mean(theta[k]);
      p.sd = sample_sd(theta[k]);
      p.studentized_mean = sample_mean(z[k]);
      p.studentized_sd = sample_sd(z[k]);
      p.ks_statistic = ks_statistic(z[k]);
    }
    summary.estimators.push_back(s);
  }
  return summary;
}

Vec3 asymptotic_prediction(const CirParams& truth, const SamplingScheme& scheme) {
  const Mat3 inverse = info_matrix_inverse(truth);
  const RateMatrix rate = rate_matrix(scheme);
  Vec3 out{};
  for (int k = 0; k < 3; ++k) out[k] = std::sqrt(inverse[k][k]) / rate.diagonal[k];
  return out;
}

double sample_mean(std::span<const double> xs) noexcept {
  if (xs.empty()) return kNaN;
  CompensatedSum sum;
  for (double x : xs) sum += x;
  return sum.value() / static_cast<double>(xs.size());
}

double sample_sd(std::span<const double> xs) noexcept {
  if (xs.size() < 2) return kNaN;
  const double mean = sample_mean(xs);
  CompensatedSum sum;
  for (double x : xs) sum += (x - mean) * (x - mean);
  return std::sqrt(sum.value() / static_cast<double>(xs.size() - 1));
}

double standard_normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double standard_normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) * 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
}

double ks_statistic(std::span<const double> xs) {
  if (xs.empty()) return kNaN;
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = standard_normal_cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

std::vector<HistogramBin> histogram(std::span<const double> xs, std::size_t bins, double lo, double hi) {
  if (bins == 0 || !(hi > lo)) throw Error(ErrorCode::InvalidArgument, "histogram needs bins >= 1 and hi > lo");
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<HistogramBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].lo = lo + static_cast<double>(b) * width;
    out[b].hi = lo + static_cast<double>(b + 1) * width;
    out[b].normal_pdf = standard_normal_pdf(out[b].center());
  }
  for (double x : xs) {
    if (!(x >= lo) || !(x < hi)) continue;
    const auto b = std::min(bins - 1, static_cast<std::size_t>((x - lo) / width));
    ++out[b].count;
  }
  const double total = static_cast<double>(xs.size());
  for (auto& bin : out) bin.density = total > 0 ? static_cast<double>(bin.count) / (total * width) : 0.0;
  return out;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_records_csv(std::ostream& out, std::span<const ReplicationRecord> records) {
  out << "rep,estimator,alpha,beta,gamma,z_alpha,z_beta,z_gamma,status\n";
  for (const auto& r : records) {
    out << r.rep << ',' << to_string(r.estimator);
    for (double v : r.theta) out << ',' << format_double(v);
    for (double v : r.z) out << ',' << format_double(v);
    out << ',' << (r.ok() ? std::string_view("ok") : to_string(*r.status)) << '\n';
  }
}

std::string summary_json(const McSummary& summary, int indent) {
  nlohmann::ordered_json doc;
  doc["replications"] = summary.replications;
  auto& estimators = doc["estimators"];
  estimators = nlohmann::ordered_json::object();
  for (const auto& s : summary.estimators) {
    nlohmann::ordered_json e;
    e["successes"] = s.successes;
    e["failure_count"] = s.failure_count;
    e["suspect"] = s.suspect();
    for (int k = 0; k < 3; ++k) {
      const ParamSummary& p = s.params[k];
      e[kParamNames[k]] = {{"mean", p.mean},
                           {"sd", p.sd},
                           {"studentized_mean", p.studentized_mean},
                           {"studentized_sd", p.studentized_sd},
                           {"ks_statistic", p.ks_statistic}};
    }
    estimators[std::string(to_string(s.estimator))] = std::move(e);
  }
  return doc.dump(indent);
}

}  // namespace cirest
