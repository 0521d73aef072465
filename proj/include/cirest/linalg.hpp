#pragma once

#include <array>

namespace cirest {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

Mat3 identity3() noexcept;
Mat3 transpose(const Mat3& m) noexcept;
Mat3 operator*(const Mat3& a, const Mat3& b) noexcept;
Vec3 operator*(const Mat3& a, const Vec3& v) noexcept;
Vec3 operator+(const Vec3& a, const Vec3& b) noexcept;
Vec3 operator-(const Vec3& a, const Vec3& b) noexcept;
Vec3 operator*(double s, const Vec3& v) noexcept;

/// Max absolute row sum.
double norm_inf(const Mat3& m) noexcept;
double norm_inf(const Vec3& v) noexcept;
double norm2(const Vec3& v) noexcept;

/// Solves a*x = b by Gaussian elimination with partial pivoting. Throws
/// SingularHessian when a pivot falls below 1e-12 * norm_inf(a).
Vec3 solve3(const Mat3& a, const Vec3& b);

}  // namespace cirest
