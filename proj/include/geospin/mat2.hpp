#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace geospin {

using cplx = std::complex<double>;

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
constexpr Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }

// Complex 2x2 matrix, row major. The whole state space here is two levels,
// so closed forms replace a linear-algebra dependency.
struct Mat2 {
  std::array<cplx, 4> a{};

  cplx& operator()(int i, int j) { return a[2 * i + j]; }
  const cplx& operator()(int i, int j) const { return a[2 * i + j]; }

  static Mat2 zero() { return {}; }
  static Mat2 identity() { return {{cplx(1), cplx(0), cplx(0), cplx(1)}}; }
};

inline Mat2 operator+(const Mat2& u, const Mat2& v) {
  return {{u.a[0] + v.a[0], u.a[1] + v.a[1], u.a[2] + v.a[2], u.a[3] + v.a[3]}};
}
inline Mat2 operator-(const Mat2& u, const Mat2& v) {
  return {{u.a[0] - v.a[0], u.a[1] - v.a[1], u.a[2] - v.a[2], u.a[3] - v.a[3]}};
}
inline Mat2 operator*(cplx s, const Mat2& u) {
  return {{s * u.a[0], s * u.a[1], s * u.a[2], s * u.a[3]}};
}
inline Mat2 operator*(const Mat2& u, const Mat2& v) {
  return {{u.a[0] * v.a[0] + u.a[1] * v.a[2], u.a[0] * v.a[1] + u.a[1] * v.a[3],
           u.a[2] * v.a[0] + u.a[3] * v.a[2], u.a[2] * v.a[1] + u.a[3] * v.a[3]}};
}

inline Mat2 adjoint(const Mat2& u) {
  return {{std::conj(u.a[0]), std::conj(u.a[2]), std::conj(u.a[1]), std::conj(u.a[3])}};
}

inline cplx trace(const Mat2& u) { return u.a[0] + u.a[3]; }
inline cplx det(const Mat2& u) { return u.a[0] * u.a[3] - u.a[1] * u.a[2]; }

inline double max_abs_diff(const Mat2& u, const Mat2& v) {
  double m = 0.0;
  for (int k = 0; k < 4; ++k) m = std::max(m, std::abs(u.a[k] - v.a[k]));
  return m;
}

inline bool is_hermitian(const Mat2& u, double tol) {
  return max_abs_diff(u, adjoint(u)) <= tol;
}

inline bool is_unitary(const Mat2& u, double tol) {
  return max_abs_diff(adjoint(u) * u, Mat2::identity()) <= tol;
}

// Snap a near-SU(2) matrix back onto the group. Long products of exact
// rotation steps drift off unitarity by ~steps * epsilon; symmetrizing the
// quaternion components and rescaling removes the drift without touching
// the physics. Input must be within roundoff of SU(2) form.
inline Mat2 reunitarize_su2(const Mat2& m) {
  const cplx a = 0.5 * (m(0, 0) + std::conj(m(1, 1)));
  const cplx b = 0.5 * (m(0, 1) - std::conj(m(1, 0)));
  const double s = 1.0 / std::sqrt(std::norm(a) + std::norm(b));
  return Mat2{{s * a, s * b, -s * std::conj(b), s * std::conj(a)}};
}

}  // namespace geospin
