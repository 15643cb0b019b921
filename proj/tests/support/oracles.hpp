// Independent oracles for the test suite.
//
// Nothing in this header includes or reuses library code. Expected values
// are produced with plain std::complex arithmetic and textbook closed forms
// so that agreement with the implementation is a physics statement, not a
// shared-code tautology.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

namespace oracle {

using cd = std::complex<double>;
using mat = std::array<std::array<cd, 2>, 2>;  // row-major 2x2
using vec3 = std::array<double, 3>;

inline constexpr double pi = std::numbers::pi;
// Bohr magneton in meV/T and hbar in meV*ps, same values the library pins.
inline constexpr double mu_B = 5.7883818060e-2;
inline constexpr double hbar = 0.6582119569;

inline mat mul(const mat& a, const mat& b) {
  mat r{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

inline mat scale(cd s, const mat& a) {
  return {{{s * a[0][0], s * a[0][1]}, {s * a[1][0], s * a[1][1]}}};
}

inline mat add(const mat& a, const mat& b) {
  return {{{a[0][0] + b[0][0], a[0][1] + b[0][1]},
           {a[1][0] + b[1][0], a[1][1] + b[1][1]}}};
}

inline cd trace(const mat& a) { return a[0][0] + a[1][1]; }

inline mat adjoint(const mat& a) {
  return {{{std::conj(a[0][0]), std::conj(a[1][0])},
           {std::conj(a[0][1]), std::conj(a[1][1])}}};
}

inline double max_abs_diff(const mat& a, const mat& b) {
  double m = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
  return m;
}

inline mat identity() { return {{{1.0, 0.0}, {0.0, 1.0}}}; }

// Pauli vector in the ordered basis (|1>, |0>) = (spin up, spin down).
inline mat sigma_dot(const vec3& n) {
  const cd i(0.0, 1.0);
  return {{{cd(n[2], 0.0), cd(n[0], 0.0) - i * n[1]},
           {cd(n[0], 0.0) + i * n[1], cd(-n[2], 0.0)}}};
}

// exp(-i phi sigma.n / 2) by the axis-angle closed form.
inline mat axis_angle(const vec3& n, double phi) {
  const cd i(0.0, 1.0);
  return add(scale(std::cos(phi / 2.0), identity()),
             scale(-i * std::sin(phi / 2.0), sigma_dot(n)));
}

// Composite of two pi rotations about unit axes n1 then n2:
// (-i sigma.n2)(-i sigma.n1) = -(n2.n1 I + i sigma.(n2 x n1)).
// Evaluated from the dot/cross products directly, not from matrix products.
inline mat two_pi_rotation_product(const vec3& n2, const vec3& n1) {
  const double dot = n2[0] * n1[0] + n2[1] * n1[1] + n2[2] * n1[2];
  const vec3 cross{n2[1] * n1[2] - n2[2] * n1[1],
                   n2[2] * n1[0] - n2[0] * n1[2],
                   n2[0] * n1[1] - n2[1] * n1[0]};
  const cd i(0.0, 1.0);
  return scale(-1.0, add(scale(dot, identity()), scale(i, sigma_dot(cross))));
}

// Expected Aharonov-Anandan phase of |+> for mirrored-axis pi pulses with
// tilt t = arctan(bx/bz): the product above is -exp(i 2t sigma_y), whose
// sigma_y = +1 eigenvalue is -e^{i2t} = e^{i(pi+2t)}.
inline double aa_phase_plus(double bx, double bz) {
  const double t = std::atan2(bx, bz);
  double g = pi + 2.0 * t;
  while (g > pi) g -= 2.0 * pi;
  while (g <= -pi) g += 2.0 * pi;
  return g;
}

// Exact lab-frame propagator for one full turn of a cone loop traversed at
// uniform azimuthal rate: direction(s) = (sin tc cos 2pi s, sin tc sin 2pi s,
// cos tc), Larmor rate w = g mu_B B / hbar, duration tau. In the frame
// rotating with the field the generator is static,
//   H_eff/hbar = ((w cos tc - nu) sigma_z + w sin tc sigma_x) / 2,
// nu = 2pi/tau, and U_lab(tau) = exp(-i pi sigma_z) exp(-i H_eff tau / hbar)
// = -exp(-i H_eff tau / hbar).
inline mat cone_loop_exact(double w, double theta_c, double tau) {
  const double nu = 2.0 * pi / tau;
  const double az = w * std::cos(theta_c) - nu;
  const double ax = w * std::sin(theta_c);
  const double weff = std::hypot(az, ax);
  if (weff == 0.0) return scale(-1.0, identity());
  const vec3 axis{ax / weff, 0.0, az / weff};
  return scale(-1.0, axis_angle(axis, weff * tau));
}

// Oriented solid angle of the cone at polar angle theta_c, traversed with
// increasing azimuth.
inline double cone_solid_angle(double theta_c) {
  return 2.0 * pi * (1.0 - std::cos(theta_c));
}

// Faraday trace oracle: build rho_f entrywise from the published matrix and
// take Tr[(cos a sigma_z - sin a sigma_x) rho_f] with explicit arithmetic.
inline double mk_trace(double w0, double w1, double gamma, double alpha) {
  const double c = std::cos(gamma), s = std::sin(gamma);
  const double r11 = w1 * c * c + w0 * s * s;
  const double r12 = (w0 - w1) * c * s;
  const double r22 = w1 * s * s + w0 * c * c;
  // Tr(sigma_z rho) = r11 - r22, Tr(sigma_x rho) = 2 r12 (real here).
  return std::cos(alpha) * (r11 - r22) - std::sin(alpha) * (2.0 * r12);
}

inline double reduce_phase(double g) {
  g = std::remainder(g, 2.0 * pi);  // (-pi, pi] up to the -pi edge
  if (g <= -pi) g += 2.0 * pi;
  return g;
}

// Deterministic random state/unitary/density helpers for property tests.
inline vec3 random_unit(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> az(0.0, 2.0 * pi);
  const double z = u(rng), p = az(rng), r = std::sqrt(1.0 - z * z);
  return {r * std::cos(p), r * std::sin(p), z};
}

inline mat random_unitary(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(0.0, 2.0 * pi);
  return axis_angle(random_unit(rng), ang(rng));
}

// Random single-qubit density matrix (I + r.sigma)/2 with |r| <= 1.
inline mat random_density(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const vec3 n = random_unit(rng);
  const double r = std::cbrt(u(rng));
  return add(scale(0.5, identity()),
             scale(0.5, sigma_dot({r * n[0], r * n[1], r * n[2]})));
}

}  // namespace oracle
