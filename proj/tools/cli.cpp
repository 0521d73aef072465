#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "cirest/error.hpp"
#include "cirest/estimate.hpp"
#include "cirest/montecarlo.hpp"
#include "cirest/random.hpp"
#include "cirest/simulate.hpp"
#include "json.hpp"

namespace cirest::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr std::array<const char*, 3> kParamNames{"alpha", "beta", "gamma"};

// Bad flag values: reported with exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json number_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json triple(const Vec3& v) {
  Json j;
  for (int k = 0; k < 3; ++k) j[kParamNames[k]] = number_or_null(v[k]);
  return j;
}

Json params_json(const CirParams& p) { return triple({p.alpha, p.beta, p.gamma}); }

void check_params(const CirParams& p, std::ostream& err) {
  if (!p.positive()) throw UsageError("alpha, beta and gamma must all be positive");
  if (!p.boundary_non_attracting()) {
    err << "warning: 2*alpha <= gamma, the zero boundary is attracting and paths can hit 0\n";
    throw UsageError("parameters violate 2*alpha > gamma");
  }
  if (!p.admissible_for_estimation()) {
    err << "warning: 2*alpha <= 5*gamma, outside the region where the estimators are asymptotically normal\n";
  }
}

void check_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw UsageError("--h must be positive and finite");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

CirParams parse_truth(const std::string& text) {
  const auto items = split_list(text);
  if (items.size() != 3) throw UsageError("--truth expects three comma-separated numbers a,b,g");
  Vec3 v{};
  for (int k = 0; k < 3; ++k) {
    try {
      std::size_t used = 0;
      v[k] = std::stod(items[k], &used);
      if (used != items[k].size()) throw std::invalid_argument(items[k]);
    } catch (const std::exception&) {
      throw UsageError("--truth: cannot parse '" + items[k] + "'");
    }
  }
  const CirParams p{v[0], v[1], v[2]};
  if (!p.positive()) throw UsageError("--truth components must be positive");
  return p;
}

std::vector<Estimator> parse_estimators(const std::string& text) {
  std::vector<Estimator> out;
  for (const auto& name : split_list(text)) {
    const auto e = parse_estimator(name);
    if (!e || *e == Estimator::fixedT_gamma) throw UsageError("unknown Monte Carlo estimator '" + name + "'");
    if (std::find(out.begin(), out.end(), *e) != out.end()) throw UsageError("estimator '" + name + "' listed twice");
    out.push_back(*e);
  }
  if (out.empty()) throw UsageError("--estimators is empty");
  return out;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream f(file, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + file.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("failed writing " + file.string());
}

void write_manifest(const fs::path& dir, const std::string& subcommand, const Json& config,
                    std::uint64_t seed, Clock::time_point start, const std::vector<fs::path>& outputs) {
  Json m;
  m["subcommand"] = subcommand;
  m["config"] = config;
  m["tool_version"] = kToolVersion;
  m["master_seed"] = seed;
  m["duration_seconds"] = std::chrono::duration<double>(Clock::now() - start).count();
  Json files = Json::array();
  for (const auto& p : outputs) files.push_back(p.string());
  m["outputs"] = files;
  write_text(dir / "manifest.json", m.dump(2) + "\n");
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p = dir.empty() ? fs::path(".") : fs::path(dir);
  fs::create_directories(p);
  return p;
}

std::size_t default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  CirParams params;
  std::size_t n = 0;
  double h = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

void cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  check_params(o.params, err);
  check_step(o.h);
  const auto start = Clock::now();
  const Path path = simulate_path(o.params, {o.n, o.h}, {o.seed, 0});

  const fs::path file(o.out);
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ostringstream csv;
  write_path_csv(csv, path);
  write_text(file, csv.str());

  Json config{{"truth", params_json(o.params)}, {"n", o.n}, {"h", o.h}, {"seed", o.seed}, {"out", o.out}};
  const fs::path dir = file.has_parent_path() ? file.parent_path() : fs::path(".");
  write_manifest(dir, "simulate", config, o.seed, start, {file});
  out << Json{{"rows", path.values().size()}, {"out", o.out}}.dump() << '\n';
}

// ---------------------------------------------------------------- estimate

struct EstimateOptions {
  std::string in;
  double h = 0.0;
  std::string estimator = "initial";
  std::string truth;
};

void cmd_estimate(const EstimateOptions& o, std::ostream& out) {
  check_step(o.h);
  const auto which = parse_estimator(o.estimator);
  if (!which) throw UsageError("unknown estimator '" + o.estimator + "'");
  std::optional<CirParams> truth;
  if (!o.truth.empty()) truth = parse_truth(o.truth);

  std::ifstream f(o.in);
  if (!f) throw std::runtime_error("cannot open " + o.in);
  const Path path(read_path_csv(f), o.h);

  EstimationResult result = estimate(*which, path);
  if (truth) result = studentize(result, *truth, path.scheme());

  Json doc;
  doc["estimator"] = to_string(result.label);
  doc["n"] = path.increments();
  doc["h"] = path.step();
  doc["theta_hat"] = triple(result.theta_hat);
  doc["admissible"] = result.admissible;
  if (truth) {
    doc["truth"] = params_json(*truth);
    doc["scaled_error"] = triple(*result.scaled_error);
    doc["studentized"] = triple(*result.studentized);
  }
  out << doc.dump(2) << '\n';
}

// ---------------------------------------------------------------- mc

struct McOptions {
  CirParams params;
  std::size_t n = 5000;
  double h = 0.1;
  std::size_t reps = 1000;
  std::uint64_t seed = 0;
  std::string estimators = "initial,newton,scoring";
  std::size_t workers = 0;
  std::string outdir = ".";
  bool emit_hist = false;
};

void write_histograms(const fs::path& file, const StudyResult& study, const std::vector<Estimator>& estimators) {
  std::ostringstream csv;
  csv << "estimator,parameter,bin_lo,bin_hi,center,count,density,normal_pdf\n";
  for (const Estimator e : estimators) {
    for (int k = 0; k < 3; ++k) {
      std::vector<double> z;
      for (const auto& r : study.records) {
        if (r.estimator == e && r.ok()) z.push_back(r.z[k]);
      }
      for (const auto& bin : histogram(z)) {
        csv << to_string(e) << ',' << kParamNames[k] << ',' << format_double(bin.lo) << ','
            << format_double(bin.hi) << ',' << format_double(bin.center()) << ',' << bin.count << ','
            << format_double(bin.density) << ',' << format_double(bin.normal_pdf) << '\n';
      }
    }
  }
  write_text(file, csv.str());
}

void cmd_mc(const McOptions& o, std::ostream& out, std::ostream& err) {
  check_params(o.params, err);
  check_step(o.h);
  if (o.reps == 0) throw UsageError("--reps must be >= 1");
  if (o.n < 2) throw UsageError("--n must be >= 2");
  McConfig config;
  config.truth = o.params;
  config.scheme = {o.n, o.h};
  config.replications = o.reps;
  config.master_seed = o.seed;
  config.estimators = parse_estimators(o.estimators);
  config.workers = o.workers == 0 ? default_workers() : o.workers;

  const auto start = Clock::now();
  const fs::path dir = prepare_dir(o.outdir);
  const StudyResult study = run_study(config);

  std::vector<fs::path> outputs{dir / "records.csv", dir / "summary.json"};
  std::ostringstream csv;
  write_records_csv(csv, study.records);
  write_text(outputs[0], csv.str());
  write_text(outputs[1], summary_json(study.summary) + "\n");
  if (o.emit_hist) {
    outputs.push_back(dir / "hist.csv");
    write_histograms(outputs.back(), study, config.estimators);
  }
  for (const auto& s : study.summary.estimators) {
    if (s.suspect()) {
      err << "warning: " << to_string(s.estimator) << " failed in " << s.failure_count << " of "
          << config.replications << " replications\n";
    }
  }

  Json est = Json::array();
  for (const Estimator e : config.estimators) est.push_back(to_string(e));
  Json cfg{{"truth", params_json(o.params)}, {"n", o.n},          {"h", o.h},
           {"reps", o.reps},                 {"seed", o.seed},    {"estimators", est},
           {"workers", config.workers},      {"emit_hist", o.emit_hist}};
  write_manifest(dir, "mc", cfg, o.seed, start, outputs);
  out << summary_json(study.summary) << '\n';
}

// ---------------------------------------------------------------- table1

struct Table1Options {
  std::uint64_t seed = 0;
  std::size_t reps = 1000;
  std::string outdir = ".";
  double scale = 1.0;
  std::size_t workers = 0;
};

void cmd_table1(const Table1Options& o, std::ostream& out, std::ostream& err) {
  if (!(o.scale > 0.0) || o.scale > 1.0) throw UsageError("--scale must lie in (0, 1]");
  if (o.reps == 0) throw UsageError("--reps must be >= 1");
  const auto reps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(o.reps * o.scale)));
  const auto start = Clock::now();
  const fs::path dir = prepare_dir(o.outdir);

  constexpr std::array<std::size_t, 3> kSizes{5000, 10000, 20000};
  constexpr std::array<double, 3> kHorizons{500.0, 1000.0, 2000.0};
  const CirParams truth{3.0, 1.0, 1.0};

  Json cells = Json::array();
  std::vector<fs::path> outputs;
  std::size_t cell_index = 0;
  for (const std::size_t n : kSizes) {
    for (const double horizon : kHorizons) {
      McConfig config;
      config.truth = truth;
      config.scheme = {n, horizon / static_cast<double>(n)};
      config.replications = reps;
      config.master_seed = derive_seed(o.seed, cell_index++);
      config.workers = o.workers == 0 ? default_workers() : o.workers;
      err << "table1: n=" << n << " T=" << horizon << " (" << reps << " replications)\n";
      const StudyResult study = run_study(config);

      std::ostringstream name;
      name << "records_n" << n << "_T" << static_cast<long long>(horizon) << ".csv";
      outputs.push_back(dir / name.str());
      std::ostringstream csv;
      write_records_csv(csv, study.records);
      write_text(outputs.back(), csv.str());

      Json estimators;
      for (const auto& s : study.summary.estimators) {
        Json e;
        for (int k = 0; k < 3; ++k) {
          e[kParamNames[k]] = {{"mean", number_or_null(s.params[k].mean)}, {"sd", number_or_null(s.params[k].sd)}};
        }
        e["failure_count"] = s.failure_count;
        estimators[std::string(to_string(s.estimator))] = e;
      }
      cells.push_back({{"n", n},
                       {"T", horizon},
                       {"h", config.scheme.h},
                       {"master_seed", config.master_seed},
                       {"replications", reps},
                       {"estimators", estimators}});
    }
  }

  Json doc{{"truth", params_json(truth)}, {"replications_per_cell", reps}, {"cells", cells}};
  outputs.insert(outputs.begin(), dir / "table1.json");
  write_text(outputs.front(), doc.dump(2) + "\n");
  write_manifest(dir, "table1",
                 Json{{"seed", o.seed}, {"reps", o.reps}, {"scale", o.scale}, {"replications_per_cell", reps}},
                 o.seed, start, outputs);
  out << doc.dump(2) << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact simulation and quasi-likelihood estimation of the square-root diffusion", "cirest"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a stationary path and write it as CSV");
  simulate->add_option("--alpha", sim.params.alpha, "Drift level alpha")->required();
  simulate->add_option("--beta", sim.params.beta, "Mean-reversion rate beta")->required();
  simulate->add_option("--gamma", sim.params.gamma, "Diffusion scale gamma")->required();
  simulate->add_option("--n", sim.n, "Number of increments")->required();
  simulate->add_option("--h", sim.h, "Sampling step")->required();
  simulate->add_option("--seed", sim.seed, "Master seed");
  simulate->add_option("--out", sim.out, "Output CSV file")->required();

  EstimateOptions est;
  auto* estimate_cmd = app.add_subcommand("estimate", "Estimate (alpha, beta, gamma) from a path CSV");
  estimate_cmd->add_option("--in", est.in, "Path CSV with header t,x")->required();
  estimate_cmd->add_option("--h", est.h, "Sampling step")->required();
  estimate_cmd->add_option("--estimator", est.estimator,
                           "initial | newton | scoring | newton-blockdiag | fixedt-gamma");
  estimate_cmd->add_option("--truth", est.truth, "True parameters a,b,g for studentization");

  McOptions mc;
  mc.params = {3.0, 1.0, 1.0};
  auto* mc_cmd = app.add_subcommand("mc", "Run a Monte Carlo replication study");
  mc_cmd->add_option("--alpha", mc.params.alpha, "Drift level alpha")->capture_default_str();
  mc_cmd->add_option("--beta", mc.params.beta, "Mean-reversion rate beta")->capture_default_str();
  mc_cmd->add_option("--gamma", mc.params.gamma, "Diffusion scale gamma")->capture_default_str();
  mc_cmd->add_option("--n", mc.n, "Number of increments")->capture_default_str();
  mc_cmd->add_option("--h", mc.h, "Sampling step")->capture_default_str();
  mc_cmd->add_option("--reps", mc.reps, "Replications")->capture_default_str();
  mc_cmd->add_option("--seed", mc.seed, "Master seed")->capture_default_str();
  mc_cmd->add_option("--estimators", mc.estimators, "Comma-separated estimator list")->capture_default_str();
  mc_cmd->add_option("--workers", mc.workers, "Worker threads (0 = all cores)")->capture_default_str();
  mc_cmd->add_option("--outdir", mc.outdir, "Output directory")->capture_default_str();
  mc_cmd->add_flag("--emit-hist", mc.emit_hist, "Also write 40-bin histograms of studentized values");

  Table1Options t1;
  auto* table1 = app.add_subcommand("table1", "Run the 3x3 (n, T) grid at theta0 = (3, 1, 1)");
  table1->add_option("--seed", t1.seed, "Master seed")->capture_default_str();
  table1->add_option("--reps", t1.reps, "Replications per cell before scaling")->capture_default_str();
  table1->add_option("--outdir", t1.outdir, "Output directory")->capture_default_str();
  table1->add_option("--scale", t1.scale, "Fraction of --reps to run per cell")->capture_default_str();
  table1->add_option("--workers", t1.workers, "Worker threads (0 = all cores)")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) cmd_simulate(sim, out, err);
    else if (estimate_cmd->parsed()) cmd_estimate(est, out);
    else if (mc_cmd->parsed()) cmd_mc(mc, out, err);
    else if (table1->parsed()) cmd_table1(t1, out, err);
    return 0;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace cirest::cli
