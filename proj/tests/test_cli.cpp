#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cirest::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("cirest_cli_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("simulate writes n + 1 rows, a manifest, and identical bytes on repeat") {
  TempDir dir;
  const std::vector<std::string> args{"simulate", "--alpha", "3", "--beta", "1", "--gamma", "1", "--n", "5000",
                                      "--h", "0.1", "--seed", "7", "--out", dir / "p.csv"};
  const Outcome first = run_cli(args);
  REQUIRE(first.code == 0);
  const std::string bytes = slurp(dir / "p.csv");
  CHECK(count_lines(bytes) == 5002);
  CHECK(bytes.rfind("t,x\n0,", 0) == 0);
  CHECK(json::parse(first.out)["rows"] == 5001);

  const json manifest = json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["subcommand"] == "simulate");
  CHECK(manifest["master_seed"] == 7);
  CHECK(manifest["config"]["n"] == 5000);
  CHECK(manifest["outputs"].size() == 1);
  CHECK(manifest.contains("tool_version"));
  CHECK(manifest.contains("duration_seconds"));

  REQUIRE(run_cli(args).code == 0);
  CHECK(slurp(dir / "p.csv") == bytes);
}

TEST_CASE("simulate rejects bad parameters with exit 2") {
  TempDir dir;
  const Outcome attracting = run_cli({"simulate", "--alpha", "3", "--beta", "1", "--gamma", "7", "--n", "10", "--h",
                                      "0.1", "--out", dir / "p.csv"});
  CHECK(attracting.code == 2);
  CHECK(attracting.err.find("warning") != std::string::npos);
  CHECK(attracting.out.empty());
  CHECK_FALSE(fs::exists(dir / "p.csv"));

  CHECK(run_cli({"simulate", "--alpha", "-3", "--beta", "1", "--gamma", "1", "--n", "10", "--h", "0.1", "--out",
                 dir / "p.csv"})
            .code == 2);
  CHECK(run_cli({"simulate", "--alpha", "3"}).code == 2);
  CHECK(run_cli({"bogus"}).code == 2);
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("estimate on hand-computed paths") {
  TempDir dir;
  write_file(dir / "good.csv", "t,x\n0,2\n1,1.5\n2,1.25\n");
  const Outcome ok = run_cli({"estimate", "--in", dir / "good.csv", "--h", "1", "--estimator", "initial"});
  REQUIRE(ok.code == 0);
  const json doc = json::parse(ok.out);
  CHECK(doc["estimator"] == "initial");
  CHECK(doc["n"] == 2);
  CHECK(doc["theta_hat"]["alpha"].get<double>() == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK(doc["theta_hat"]["beta"].get<double>() == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK(std::fabs(doc["theta_hat"]["gamma"].get<double>()) < 1e-12);
  CHECK(doc["admissible"] == false);

  write_file(dir / "neg.csv", "t,x\n0,1\n1,2\n2,1.5\n");
  const Outcome neg = run_cli({"estimate", "--in", dir / "neg.csv", "--h", "1"});
  CHECK(neg.code == 1);
  CHECK(neg.err.find("NonPositiveCorrelation") != std::string::npos);

  const Outcome newton = run_cli({"estimate", "--in", dir / "good.csv", "--h", "1", "--estimator", "newton"});
  CHECK(newton.code == 1);
  CHECK(newton.err.find("InadmissibleInitial") != std::string::npos);

  CHECK(run_cli({"estimate", "--in", dir / "good.csv", "--h", "1", "--estimator", "magic"}).code == 2);
  CHECK(run_cli({"estimate", "--in", dir / "missing.csv", "--h", "1"}).code == 1);
}

TEST_CASE("estimate with truth reports studentized errors") {
  TempDir dir;
  REQUIRE(run_cli({"simulate", "--alpha", "3", "--beta", "1", "--gamma", "1", "--n", "5000", "--h", "0.1",
                   "--seed", "3", "--out", dir / "p.csv"})
              .code == 0);
  for (const char* name : {"initial", "newton", "scoring", "newton-blockdiag"}) {
    CAPTURE(name);
    const Outcome r =
        run_cli({"estimate", "--in", dir / "p.csv", "--h", "0.1", "--estimator", name, "--truth", "3,1,1"});
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["admissible"] == true);
    CHECK(std::fabs(doc["theta_hat"]["alpha"].get<double>() - 3.0) < 1.0);
    CHECK(doc.contains("studentized"));
    CHECK(doc["scaled_error"].size() == 3);
  }
  const Outcome fixed = run_cli({"estimate", "--in", dir / "p.csv", "--h", "0.1", "--estimator", "fixedt-gamma"});
  REQUIRE(fixed.code == 0);
  const json doc = json::parse(fixed.out);
  CHECK(doc["theta_hat"]["alpha"].is_null());
  CHECK(std::fabs(doc["theta_hat"]["gamma"].get<double>() - 1.0) < 0.3);
}

TEST_CASE("mc smoke run accounts for every replication") {
  TempDir dir;
  const Outcome r = run_cli({"mc", "--n", "1000", "--h", "0.1", "--reps", "10", "--seed", "1", "--workers", "2",
                             "--outdir", dir / "mc", "--emit-hist"});
  REQUIRE(r.code == 0);
  const json summary = json::parse(r.out);
  CHECK(summary == json::parse(slurp(dir / "mc/summary.json")));
  CHECK(summary["replications"] == 10);
  for (const char* e : {"initial", "newton", "scoring"}) {
    const auto& s = summary["estimators"][e];
    CHECK(s["successes"].get<int>() + s["failure_count"].get<int>() == 10);
  }

  const std::string records = slurp(dir / "mc/records.csv");
  CHECK(records.rfind("rep,estimator,alpha,beta,gamma,z_alpha,z_beta,z_gamma,status\n", 0) == 0);
  CHECK(count_lines(records) == 31);

  const std::string hist = slurp(dir / "mc/hist.csv");
  CHECK(hist.rfind("estimator,parameter,bin_lo,bin_hi,center,count,density,normal_pdf\n", 0) == 0);
  CHECK(count_lines(hist) == 1 + 3 * 3 * 40);

  const json manifest = json::parse(slurp(dir / "mc/manifest.json"));
  CHECK(manifest["subcommand"] == "mc");
  CHECK(manifest["outputs"].size() == 3);
  CHECK(manifest["config"]["reps"] == 10);
}

TEST_CASE("mc records do not depend on the worker count") {
  TempDir dir;
  auto go = [&](const std::string& workers) {
    const std::string out = dir / ("w" + workers);
    REQUIRE(run_cli({"mc", "--n", "500", "--reps", "30", "--seed", "11", "--workers", workers, "--estimators",
                     "initial,newton,scoring,newton-blockdiag", "--outdir", out})
                .code == 0);
    return slurp(fs::path(out) / "records.csv");
  };
  CHECK(go("1") == go("8"));
}

TEST_CASE("mc rejects bad flags") {
  TempDir dir;
  CHECK(run_cli({"mc", "--reps", "0", "--outdir", dir / "x"}).code == 2);
  CHECK(run_cli({"mc", "--estimators", "initial,bogus", "--outdir", dir / "x"}).code == 2);
  CHECK(run_cli({"mc", "--gamma", "7", "--outdir", dir / "x"}).code == 2);
  CHECK(run_cli({"mc", "--n", "2", "--reps", "5", "--outdir", dir / "x"}).code == 1);
}

TEST_CASE("table1 at a tiny scale emits the full grid") {
  TempDir dir;
  const Outcome r = run_cli({"table1", "--seed", "5", "--reps", "20", "--scale", "0.1", "--outdir", dir / "t1"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(slurp(dir / "t1/table1.json"));
  CHECK(doc == json::parse(r.out));
  CHECK(doc["replications_per_cell"] == 2);
  REQUIRE(doc["cells"].size() == 9);

  const std::vector<double> hs{0.1, 0.2, 0.4, 0.05, 0.1, 0.2, 0.025, 0.05, 0.1};
  std::size_t entries = 0;
  for (std::size_t i = 0; i < 9; ++i) {
    const auto& cell = doc["cells"][i];
    CHECK(cell["h"].get<double>() == doctest::Approx(hs[i]));
    for (const char* e : {"initial", "newton", "scoring"})
      for (const char* p : {"alpha", "beta", "gamma"}) {
        CHECK(cell["estimators"][e][p].contains("mean"));
        CHECK(cell["estimators"][e][p].contains("sd"));
        ++entries;
      }
    CHECK(fs::exists(dir.path / "t1" /
                     ("records_n" + std::to_string(cell["n"].get<int>()) + "_T" +
                      std::to_string(static_cast<int>(cell["T"].get<double>())) + ".csv")));
  }
  CHECK(entries == 81);
  CHECK(json::parse(slurp(dir / "t1/manifest.json"))["outputs"].size() == 10);

  CHECK(run_cli({"table1", "--scale", "1.5", "--outdir", dir / "t1"}).code == 2);
}
