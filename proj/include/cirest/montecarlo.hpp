#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cirest/error.hpp"
#include "cirest/estimate.hpp"
#include "cirest/linalg.hpp"
#include "cirest/model.hpp"

namespace cirest {

struct McConfig {
  CirParams truth{3.0, 1.0, 1.0};
  SamplingScheme scheme{5000, 0.1};
  std::size_t replications = 1000;
  std::uint64_t master_seed = 0;
  std::vector<Estimator> estimators{Estimator::initial, Estimator::newton, Estimator::scoring};
  std::size_t workers = 1;

  /// Throws InvalidArgument describing the first violated constraint.
  void validate() const;
};

/// Outcome of one estimator on one replication.
struct ReplicationRecord {
  std::size_t rep = 0;
  Estimator estimator = Estimator::initial;
  /// NaN when the estimator itself failed.
  Vec3 theta{};
  /// Studentized error; NaN unless status is empty.
  Vec3 z{};
  /// Empty on success, otherwise the typed error that aborted the record.
  std::optional<ErrorCode> status;

  bool ok() const noexcept { return !status.has_value(); }
};

struct ParamSummary {
  double mean = 0.0;
  /// Divisor R - 1; NaN with fewer than two successes.
  double sd = 0.0;
  double studentized_mean = 0.0;
  double studentized_sd = 0.0;
  /// Kolmogorov-Smirnov distance of the studentized values to N(0, 1).
  double ks_statistic = 0.0;
};

struct EstimatorSummary {
  Estimator estimator = Estimator::initial;
  std::size_t successes = 0;
  std::size_t failure_count = 0;
  std::array<ParamSummary, 3> params{};

  /// Failure rate above 1%.
  bool suspect() const noexcept;
};

struct McSummary {
  std::size_t replications = 0;
  std::vector<EstimatorSummary> estimators;

  const EstimatorSummary& at(Estimator e) const;
};

struct StudyResult {
  McSummary summary;
  /// Ordered by (rep, position of estimator in the config).
  std::vector<ReplicationRecord> records;
};

/// Simulates one path and runs every configured estimator on it.
std::vector<ReplicationRecord> run_replication(const McConfig& config, std::size_t rep);

/// Replication r draws from StreamSeed{master_seed, r}; records do not
/// depend on the worker count. Throws AllReplicationsFailed when no
/// estimator produced a single successful record.
StudyResult run_study(const McConfig& config);

/// Per-estimator moments over successful records. Estimators without any
/// success report NaN moments.
McSummary summarize(std::span<const ReplicationRecord> records,
                    std::span<const Estimator> estimators);

/// sqrt(diag(I(theta0)^{-1})) / diag(D_n).
Vec3 asymptotic_prediction(const CirParams& truth, const SamplingScheme& scheme);

double sample_mean(std::span<const double> xs) noexcept;
/// Divisor n - 1; NaN for n < 2.
double sample_sd(std::span<const double> xs) noexcept;
double standard_normal_cdf(double x) noexcept;
double standard_normal_pdf(double x) noexcept;
/// sup_x |F_n(x) - Phi(x)|; NaN for an empty sample.
double ks_statistic(std::span<const double> xs);

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  /// count / (total * width): comparable with the normal density.
  double density = 0.0;
  double normal_pdf = 0.0;

  double center() const noexcept { return 0.5 * (lo + hi); }
};

/// Uniform bins on [lo, hi); values outside are counted in the total only.
std::vector<HistogramBin> histogram(std::span<const double> xs, std::size_t bins = 40,
                                    double lo = -4.0, double hi = 4.0);

/// `rep,estimator,alpha,beta,gamma,z_alpha,z_beta,z_gamma,status`.
void write_records_csv(std::ostream& out, std::span<const ReplicationRecord> records);

/// JSON document estimator -> parameter -> statistics.
std::string summary_json(const McSummary& summary, int indent = 2);

/// printf("%.17g") with `nan` / `inf` spelled consistently.
std::string format_double(double x);

}  // namespace cirest
