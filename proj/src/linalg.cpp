#include "cirest/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "cirest/error.hpp"

namespace cirest {

Mat3 identity3() noexcept {
  Mat3 m{};
  for (int i = 0; i < 3; ++i) m[i][i] = 1.0;
  return m;
}

Mat3 transpose(const Mat3& m) noexcept {
  Mat3 t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[i][j] = m[j][i];
  return t;
}

Mat3 operator*(const Mat3& a, const Mat3& b) noexcept {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 3; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

Vec3 operator*(const Mat3& a, const Vec3& v) noexcept {
  Vec3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i] += a[i][j] * v[j];
  return r;
}

Vec3 operator+(const Vec3& a, const Vec3& b) noexcept { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 operator-(const Vec3& a, const Vec3& b) noexcept { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 operator*(double s, const Vec3& v) noexcept { return {s * v[0], s * v[1], s * v[2]}; }

double norm_inf(const Mat3& m) noexcept {
  double best = 0.0;
  for (const auto& row : m) {
    best = std::max(best, std::fabs(row[0]) + std::fabs(row[1]) + std::fabs(row[2]));
  }
  return best;
}

double norm_inf(const Vec3& v) noexcept {
  return std::max({std::fabs(v[0]), std::fabs(v[1]), std::fabs(v[2])});
}

double norm2(const Vec3& v) noexcept { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

Vec3 solve3(const Mat3& a, const Vec3& b) {
  const double scale = norm_inf(a);
  const double threshold = 1e-12 * scale;
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::SingularHessian, "matrix is zero or non-finite");
  }
  Mat3 m = a;
  Vec3 rhs = b;
  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int row = col + 1; row < 3; ++row) {
      if (std::fabs(m[row][col]) > std::fabs(m[pivot][col])) pivot = row;
    }
    if (std::fabs(m[pivot][col]) <= threshold) {
      throw Error(ErrorCode::SingularHessian, "pivot below 1e-12 * ||H||_inf");
    }
    std::swap(m[col], m[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (int row = col + 1; row < 3; ++row) {
      const double factor = m[row][col] / m[col][col];
      for (int k = col; k < 3; ++k) m[row][k] -= factor * m[col][k];
      rhs[row] -= factor * rhs[col];
    }
  }
  Vec3 x{};
  for (int row = 2; row >= 0; --row) {
    double acc = rhs[row];
    for (int k = row + 1; k < 3; ++k) acc -= m[row][k] * x[k];
    x[row] = acc / m[row][row];
  }
  return x;
}

}  // namespace cirest
