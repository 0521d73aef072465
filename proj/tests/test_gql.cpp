#include <algorithm>
#include <cmath>
#include <random>

#include "cirest/error.hpp"
#include "cirest/gql.hpp"
#include "cirest/simulate.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace cirest;
using testing::rel_err;

namespace {

// Worst entrywise deviation scaled by the largest entry of `want`.
double matrix_rel_err(const Mat3& got, const Mat3& want) {
  double scale = 0.0, worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      scale = std::max(scale, std::fabs(want[i][j]));
      worst = std::max(worst, std::fabs(got[i][j] - want[i][j]));
    }
  return worst / scale;
}

double max_abs_diff(const Mat3& a, const Mat3& b) {
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) worst = std::max(worst, std::fabs(a[i][j] - b[i][j]));
  return worst;
}

// Second differences of gqlf itself: independent of the analytic gradient.
Mat3 double_fd_hessian(const CirParams& p, const Path& path) {
  const Vec3 theta{p.alpha, p.beta, p.gamma};
  auto f = [&](Vec3 t) { return gqlf({t[0], t[1], t[2]}, path); };
  Mat3 h{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double si = 1e-4 * (1 + std::fabs(theta[i]));
      const double sj = 1e-4 * (1 + std::fabs(theta[j]));
      auto shifted = [&](double a, double b) {
        Vec3 t = theta;
        t[i] += a;
        t[j] += b;
        return f(t);
      };
      h[i][j] = (shifted(si, sj) - shifted(si, -sj) - shifted(-si, sj) + shifted(-si, -sj)) / (4 * si * sj);
    }
  }
  return h;
}

}  // namespace

TEST_CASE("cond_moments examples") {
  const CirParams p{3, 1, 1};
  for (double h : {0.01, 0.1, 1.0, 7.0}) CHECK(cond_moments(p, 3.0, h).mu == doctest::Approx(3.0).epsilon(1e-14));

  const CondMoments m = cond_moments(p, 2.0, 0.1);
  CHECK(m.mu == doctest::Approx(2.0951625819640404).epsilon(1e-14));
  CHECK(m.sigma2 == doctest::Approx(0.18579720542504950).epsilon(1e-14));

  const CondMoments tiny = cond_moments(p, 2.0, 1e-12);
  CHECK(std::fabs(tiny.mu - 2.0) < 1e-10);
  CHECK(tiny.sigma2 < 1e-10);
  CHECK(tiny.sigma2 > 0.0);
}

TEST_CASE("cond_moments gradients match finite differences of the reference formulas") {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> xdist(0.1, 8.0), hdist(1e-5, 1.5);
  for (int i = 0; i < 100; ++i) {
    const CirParams p = testing::random_admissible(gen);
    const double x = xdist(gen), h = hdist(gen);
    const CondMoments m = cond_moments(p, x, h);
    CHECK(m.grad_sigma2[2] == doctest::Approx(m.sigma2 / p.gamma).epsilon(1e-15));
    const Vec3 dmu = testing::fd_gradient([&](const CirParams& q) { return testing::reference_mean(q, x, h); }, p);
    const Vec3 dvar =
        testing::fd_gradient([&](const CirParams& q) { return testing::reference_variance(q, x, h); }, p);
    const double mu_scale = std::max(std::fabs(dmu[0]), std::fabs(dmu[1]));
    const double var_scale = std::max({std::fabs(dvar[0]), std::fabs(dvar[1]), std::fabs(dvar[2])});
    CHECK(std::fabs(m.grad_mu[0] - dmu[0]) / mu_scale < 1e-6);
    CHECK(std::fabs(m.grad_mu[1] - dmu[1]) / mu_scale < 1e-6);
    for (int k = 0; k < 3; ++k) CHECK(std::fabs(m.grad_sigma2[k] - dvar[k]) / var_scale < 1e-6);
  }
}

TEST_CASE("gqlf frozen values") {
  const CirParams p{3, 1, 1};
  // Values from tests/oracles/hand_values.py (40-digit mpmath).
  CHECK(gqlf(p, Path({2.0, 2.0951625819640404}, 0.1)) == doctest::Approx(-0.077388786462227345).epsilon(1e-12));
  CHECK(gqlf(p, Path({2.0, 2.1}, 0.1)) == doctest::Approx(-0.077451759996197066).epsilon(1e-12));

  const Path fixed({2.3, 2.7, 2.45, 3.1}, 0.25);
  const CirParams q{2.8, 1.3, 0.9};
  CHECK(gqlf(q, fixed) == doctest::Approx(-2.3310113646706754).epsilon(1e-13));
  const Vec3 g = gqlf_gradient(q, fixed);
  CHECK(g[0] == doctest::Approx(0.56685234586886048).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(-1.1919369175368425).epsilon(1e-12));
  CHECK(g[2] == doctest::Approx(-0.61857837305653049).epsilon(1e-12));
}

TEST_CASE("gqlf agrees with the naive reference and sums exactly n terms") {
  std::mt19937_64 gen(5);
  for (int i = 0; i < 30; ++i) {
    const CirParams p = testing::random_admissible(gen);
    const auto xs = testing::random_positive_path(gen, 1 + i, p.alpha / p.beta);
    const Path path(xs, 0.05 + 0.01 * i);
    CHECK(rel_err(gqlf(p, path), testing::reference_gqlf(p, xs, path.step())) < 1e-11);

    double pairwise = 0.0;
    for (std::size_t j = 1; j < xs.size(); ++j) pairwise += gqlf(p, Path({xs[j - 1], xs[j]}, path.step()));
    CHECK(rel_err(gqlf(p, path), pairwise) < 1e-12);
  }
  CHECK_THROWS_AS(gqlf({3, 1, 1}, Path({2.0}, 0.1)), Error);
}

TEST_CASE("gqlf reports an underflowed variance") {
  try {
    gqlf({3, 1, 1}, Path({1e-300, 1e-300}, 5e-324));
    FAIL("expected NonFiniteLikelihood");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteLikelihood);
  }
}

TEST_CASE("gqlf_gradient at zero residual is the variance term alone") {
  const CirParams p{3, 1, 1};
  const CondMoments m = cond_moments(p, 2.0, 0.1);
  const Vec3 g = gqlf_gradient(p, Path({2.0, m.mu}, 0.1));
  for (int k = 0; k < 3; ++k) CHECK(g[k] == doctest::Approx(-0.5 * m.grad_sigma2[k] / m.sigma2).epsilon(1e-12));
}

TEST_CASE("gqlf_gradient matches central finite differences on 50 random instances") {
  std::mt19937_64 gen(8);
  std::uniform_int_distribution<std::size_t> ndist(2, 50);
  std::uniform_real_distribution<double> hdist(0.01, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const CirParams p = testing::random_admissible(gen);
    const std::size_t n = ndist(gen);
    const Path path = i % 2 == 0 ? Path(testing::random_positive_path(gen, n, p.alpha / p.beta), hdist(gen))
                                 : simulate_path(p, {n, hdist(gen)}, {8, static_cast<std::uint64_t>(i)});
    const Vec3 g = gqlf_gradient(p, path);
    const Vec3 fd = testing::fd_gradient([&](const CirParams& q) { return gqlf(q, path); }, p);
    for (int k = 0; k < 3; ++k) worst = std::max(worst, std::fabs(g[k] - fd[k]) / std::max(1.0, std::fabs(fd[k])));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("gamma score identity") {
  std::mt19937_64 gen(13);
  for (int i = 0; i < 30; ++i) {
    const CirParams p = testing::random_admissible(gen);
    const Path path = simulate_path(p, {200, 0.1}, {13, static_cast<std::uint64_t>(i)});
    double identity = 0.0;
    for (std::size_t j = 1; j <= path.increments(); ++j) {
      const CondMoments m = cond_moments(p, path[j - 1], path.step());
      const double r = path[j] - m.mu;
      identity += r * r / m.sigma2 - 1.0;
    }
    identity /= 2.0 * p.gamma;
    CHECK(std::fabs(gqlf_gradient(p, path)[2] - identity) < 1e-10 * std::max(1.0, std::fabs(identity)));
  }
}

TEST_CASE("gqlf_hessian is symmetric and agrees with second differences of gqlf") {
  std::mt19937_64 gen(34);
  for (int i = 0; i < 20; ++i) {
    const CirParams p = testing::random_admissible(gen);
    const Path path = simulate_path(p, {20 + 5 * static_cast<std::size_t>(i), 0.2}, {34, static_cast<std::uint64_t>(i)});
    const Mat3 h = gqlf_hessian(p, path);
    CHECK(max_abs_diff(h, transpose(h)) == 0.0);
    CHECK(matrix_rel_err(h, double_fd_hessian(p, path)) < 1e-4);
  }
}

TEST_CASE("scaled Hessian approaches the information matrix on a long path") {
  const CirParams p{3, 1, 1};
  const Path path = simulate_path(p, {1000000, 0.01}, {555, 0});
  const Mat3 h = gqlf_hessian(p, path);
  const double horizon = path.scheme().horizon();
  const double n = static_cast<double>(path.increments());
  CHECK(-h[0][0] / horizon == doctest::Approx(0.4).epsilon(0.05));
  CHECK(-h[0][1] / horizon == doctest::Approx(-1.0).epsilon(0.05));
  CHECK(-h[1][1] / horizon == doctest::Approx(3.0).epsilon(0.05));
  CHECK(-h[2][2] / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("rate_matrix") {
  const RateMatrix d = rate_matrix({5000, 0.1});
  CHECK(d.diagonal[0] == doctest::Approx(std::sqrt(500.0)));
  CHECK(d.diagonal[1] == doctest::Approx(std::sqrt(500.0)));
  CHECK(d.diagonal[2] == doctest::Approx(std::sqrt(5000.0)));
  CHECK(d.determinant() == doctest::Approx(500.0 * std::sqrt(5000.0)));
  CHECK(rate_matrix({1, 1.0}).matrix() == identity3());
  CHECK_THROWS_AS(rate_matrix({0, 1.0}), Error);
}

TEST_CASE("info_matrix and closed-form inverse at (3, 1, 1)") {
  const CirParams p{3, 1, 1};
  const Mat3 info = info_matrix(p).entries;
  const Mat3 want{{{0.4, -1, 0}, {-1, 3, 0}, {0, 0, 0.5}}};
  CHECK(max_abs_diff(info, want) < 1e-15);
  CHECK(info[0][0] > 0.0);
  CHECK(info[0][0] * info[1][1] - info[0][1] * info[1][0] == doctest::Approx(0.2));

  const Mat3 inv = info_matrix_inverse(p);
  CHECK(max_abs_diff(inv, Mat3{{{15, 5, 0}, {5, 2, 0}, {0, 0, 2}}}) < 1e-15);
  CHECK(max_abs_diff(info * inv, identity3()) < 1e-12);
}

TEST_CASE("information matrix algebra on 100 random admissible points") {
  std::mt19937_64 gen(99);
  for (int i = 0; i < 100; ++i) {
    const CirParams p = testing::random_admissible(gen);
    const Mat3 info = info_matrix(p).entries;
    const Mat3 inv = info_matrix_inverse(p);
    CHECK(info[0][2] == 0.0);
    CHECK(info[1][2] == 0.0);
    CHECK(inv[0][2] == 0.0);
    CHECK(max_abs_diff(info * inv, identity3()) < 1e-12);

    // Numerical inversion column by column.
    Mat3 numeric{};
    for (int c = 0; c < 3; ++c) {
      Vec3 e{};
      e[c] = 1.0;
      const Vec3 col = solve3(info, e);
      for (int r = 0; r < 3; ++r) numeric[r][c] = col[r];
    }
    CHECK(matrix_rel_err(numeric, inv) < 1e-10);

    const Mat3 root = info_sqrt(p);
    CHECK(max_abs_diff(root, transpose(root)) == 0.0);
    CHECK(max_abs_diff(root * root, info) < 1e-12 * std::max(1.0, norm_inf(info)));
    const double tr = root[0][0] + root[1][1];
    const double det = root[0][0] * root[1][1] - root[0][1] * root[1][0];
    CHECK(tr > 0.0);
    CHECK(det > 0.0);
    CHECK(root[2][2] > 0.0);

    // Drift block from moments of the invariant law.
    CHECK(rel_err(info[0][0], invariant_moment(p, -1.0) / p.gamma) < 1e-12);
    CHECK(rel_err(info[1][1], invariant_moment(p, 1.0) / p.gamma) < 1e-12);
  }
}

TEST_CASE("info_sqrt at (3, 1, 1)") {
  const Mat3 root = info_sqrt({3, 1, 1});
  CHECK(root[2][2] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(max_abs_diff(root * root, info_matrix({3, 1, 1}).entries) < 1e-12);
  CHECK_THROWS_AS(info_sqrt({0.5, 1, 1}), Error);
  CHECK_THROWS_AS(info_sqrt({0.4, 1, 1}), Error);
}
