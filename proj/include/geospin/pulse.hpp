#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geospin/constants.hpp"
#include "geospin/errors.hpp"
#include "geospin/mat2.hpp"
#include "geospin/qstate.hpp"

// Field pulses and propagation. Conventions, fixed project wide:
//   H(B) = +(g mu_B / 2) sigma . B            [meV]
//   U(t) = exp(-i H t / hbar)
// so a constant field rotates the Bloch vector right handedly about B by
// phi = g mu_B |B| t / hbar. Every propagator here is an exact axis-angle
// exponential; time dependence enters only through piecewise-constant steps.

namespace geospin {

inline Mat2 hamiltonian_matrix(Vec3 field_T, double g_factor) {
  return cplx(0.5 * g_factor * mu_B_meV_per_T) * sigma_dot(field_T);
}

inline SpinOperator hamiltonian(Vec3 field_T, double g_factor) {
  return SpinOperator(hamiltonian_matrix(field_T, g_factor));
}

// Signed rotation angle accumulated in duration_ps.
inline double rotation_angle(Vec3 field_T, double g_factor, double duration_ps) {
  return g_factor * mu_B_meV_per_T * norm(field_T) * duration_ps / hbar_meV_ps;
}

// exp(-i phi sigma.n / 2) for unit n.
inline Mat2 axis_angle_matrix(Vec3 n, double phi) {
  const double c = std::cos(0.5 * phi), s = std::sin(0.5 * phi);
  return cplx(c) * Mat2::identity() + cplx(0.0, -s) * sigma_dot(n);
}

// Exact propagator of a constant field. Zero field gives the identity for
// any duration.
inline Unitary2 propagator_const(Vec3 field_T, double g_factor,
                                 double duration_ps) {
  if (duration_ps < 0.0) throw domain_error("negative pulse duration");
  const double b = norm(field_T);
  if (b == 0.0) return Unitary2(Mat2::identity());
  const Vec3 n = (1.0 / b) * field_T;
  return Unitary2(axis_angle_matrix(n, rotation_angle(field_T, g_factor, duration_ps)));
}

// Closed loop of field directions, |direction(s)| = 1, direction(0) ==
// direction(1). Traversed in total_time_ps at magnitude_T, integrated with
// `steps` piecewise-constant midpoint samples.
struct ParametricLoop {
  std::function<Vec3(double)> direction;
  double magnitude_T = 1.0;
  double total_time_ps = 1.0;
  int steps = default_loop_steps;

  void validate() const {
    if (!direction) throw domain_error("loop has no direction function");
    if (steps < 2) throw domain_error("loop needs at least 2 steps");
    if (magnitude_T <= 0.0) throw domain_error("loop magnitude must be positive");
    if (total_time_ps <= 0.0) throw domain_error("loop duration must be positive");
    if (norm(direction(0.0) - direction(1.0)) > 1e-12)
      throw invariant_error("loop is not closed: direction(0) != direction(1)");
  }
};

inline ParametricLoop cone_loop(double theta_c, double magnitude_T,
                                double total_time_ps,
                                int steps = default_loop_steps) {
  ParametricLoop loop;
  loop.direction = [theta_c](double s) -> Vec3 {
    const double az = 2.0 * pi * s;
    return {std::sin(theta_c) * std::cos(az), std::sin(theta_c) * std::sin(az),
            std::cos(theta_c)};
  };
  loop.magnitude_T = magnitude_T;
  loop.total_time_ps = total_time_ps;
  loop.steps = steps;
  return loop;
}

inline ParametricLoop equatorial_loop(double magnitude_T, double total_time_ps,
                                      int steps = default_loop_steps) {
  return cone_loop(0.5 * pi, magnitude_T, total_time_ps, steps);
}

// Out-and-back meridian sweep: encloses zero solid angle. Smooth turning
// point so adiabatic transport is not spoiled by a velocity kink.
inline ParametricLoop degenerate_loop(double theta_max, double magnitude_T,
                                      double total_time_ps,
                                      int steps = default_loop_steps) {
  ParametricLoop loop;
  loop.direction = [theta_max](double s) -> Vec3 {
    const double th = theta_max * std::sin(pi * s) * std::sin(pi * s);
    return {std::sin(th), 0.0, std::cos(th)};
  };
  loop.magnitude_T = magnitude_T;
  loop.total_time_ps = total_time_ps;
  loop.steps = steps;
  return loop;
}

// Reversed traversal of the same closed path.
inline ParametricLoop reversed(const ParametricLoop& loop) {
  ParametricLoop r = loop;
  auto fwd = loop.direction;
  r.direction = [fwd](double s) { return fwd(1.0 - s); };
  return r;
}

struct FieldPulse {
  Vec3 field_T{};
  double duration_ps = 0.0;
  std::optional<ParametricLoop> path;  // engaged: field follows the loop

  static FieldPulse constant(Vec3 field_T, double duration_ps) {
    if (duration_ps < 0.0) throw domain_error("negative pulse duration");
    return {field_T, duration_ps, std::nullopt};
  }
  static FieldPulse parametric(ParametricLoop loop) {
    loop.validate();
    FieldPulse p;
    p.duration_ps = loop.total_time_ps;
    p.path = std::move(loop);
    return p;
  }
  bool is_constant() const { return !path.has_value(); }
};

struct PulseSequence {
  std::vector<FieldPulse> pulses;

  double total_duration_ps() const {
    double t = 0.0;
    for (const auto& p : pulses) t += p.duration_ps;
    return t;
  }
};

// Resonant pi rotation about the in-plane axis (bx, 0, bz). The duration is
// pi hbar / (|g| mu_B |B|); with g < 0 the rotation angle is -pi, which
// flips a perpendicular state all the same.
inline FieldPulse pi_pulse(double bx_T, double bz_T, double g_factor) {
  const double b = std::hypot(bx_T, bz_T);
  if (b == 0.0) throw domain_error("pi pulse needs a nonzero field");
  if (g_factor == 0.0) throw domain_error("pi pulse needs a nonzero g factor");
  const double duration = pi * hbar_meV_ps / (std::abs(g_factor) * mu_B_meV_per_T * b);
  return FieldPulse::constant({bx_T, 0.0, bz_T}, duration);
}

// Two mirrored pi pulses: (bx,0,bz) then (-bx,0,bz). Returns the state that
// started in a sigma_y eigenstate to itself up to phase.
inline PulseSequence aa_protocol(double bx_T, double bz_T, double g_factor) {
  return {{pi_pulse(bx_T, bz_T, g_factor), pi_pulse(-bx_T, bz_T, g_factor)}};
}

// Sampled history of one propagation. hamiltonians[k] is the generator on
// the interval [times[k], times[k+1]); the final entry repeats the last
// interval so the arrays stay parallel. segment_breaks lists sample indices
// where the generator switches discontinuously (pulse boundaries); phase
// integrals never straddle a break.
struct Trajectory {
  std::vector<double> times;
  std::vector<PureState> states;
  std::vector<SpinOperator> hamiltonians;
  std::vector<std::size_t> segment_breaks;

  void validate() const {
    if (times.size() != states.size() || times.size() != hamiltonians.size())
      throw invariant_error("trajectory arrays disagree in length");
    for (std::size_t k = 1; k < times.size(); ++k)
      if (times[k] <= times[k - 1])
        throw invariant_error("trajectory times not strictly increasing");
    for (const auto& s : states) s.require_normalized(1e-10);
  }
};

namespace detail {

// Append `steps` exact slices of a constant field to a trajectory.
inline PureState sample_constant_pulse(const FieldPulse& p, double g_factor,
                                       PureState psi, double t0, int steps,
                                       Trajectory& traj) {
  const SpinOperator h = hamiltonian(p.field_T, g_factor);
  const double dt = p.duration_ps / steps;
  const Unitary2 u_slice = propagator_const(p.field_T, g_factor, dt);
  for (int k = 0; k < steps; ++k) {
    traj.times.push_back(t0 + k * dt);
    traj.states.push_back(psi);
    traj.hamiltonians.push_back(h);
    psi = apply(u_slice.m, psi);
    const double r = 1.0 / std::sqrt(psi.norm2());
    psi.amp1 *= r;
    psi.amp0 *= r;
  }
  return psi;
}

}  // namespace detail

struct PropagationResult {
  Unitary2 composite;
  Trajectory trajectory;
};

// Piecewise-constant propagation of a parametric loop: step k covers
// s in [k/N, (k+1)/N] with the field frozen at the midpoint sample. Exact
// axis-angle exponential per step; the composite converges to the continuum
// propagator at O(1/N^2). Optional dwell_weights reshape the time spent per
// step (they are normalized to keep the loop duration fixed).
inline PropagationResult propagate_parametric(
    const ParametricLoop& loop, double g_factor, const PureState& initial,
    const std::vector<double>& dwell_weights = {}) {
  loop.validate();
  initial.require_normalized();
  const int n = loop.steps;
  if (!dwell_weights.empty() && static_cast<int>(dwell_weights.size()) != n)
    throw domain_error("dwell weight count must equal loop step count");

  std::vector<double> dt(n, loop.total_time_ps / n);
  if (!dwell_weights.empty()) {
    double sum = 0.0;
    for (double w : dwell_weights) {
      if (w <= 0.0) throw domain_error("dwell weights must be positive");
      sum += w;
    }
    for (int k = 0; k < n; ++k)
      dt[k] = loop.total_time_ps * dwell_weights[k] / sum;
  }

  Trajectory traj;
  traj.times.reserve(n + 1);
  traj.states.reserve(n + 1);
  traj.hamiltonians.reserve(n + 1);

  Mat2 u = Mat2::identity();
  PureState psi = initial;
  double t = 0.0;
  for (int k = 0; k < n; ++k) {
    const double s_mid = (k + 0.5) / n;
    const Vec3 dir = loop.direction(s_mid);
    if (std::abs(norm(dir) - 1.0) > 1e-12)
      throw invariant_error("loop direction not unit length at s=" +
                            std::to_string(s_mid));
    const Vec3 field = loop.magnitude_T * dir;
    traj.times.push_back(t);
    traj.states.push_back(psi);
    traj.hamiltonians.push_back(hamiltonian(field, g_factor));
    const Unitary2 step = propagator_const(field, g_factor, dt[k]);
    psi = apply(step.m, psi);
    // roundoff control: each factor is exactly SU(2), so drift in the
    // running product and the state norm is pure rounding noise
    const double r = 1.0 / std::sqrt(psi.norm2());
    psi.amp1 *= r;
    psi.amp0 *= r;
    u = reunitarize_su2(step.m * u);
    t += dt[k];
  }
  traj.times.push_back(loop.total_time_ps);
  traj.states.push_back(psi);
  traj.hamiltonians.push_back(traj.hamiltonians.back());
  traj.validate();
  return {Unitary2(u, 1e-10), std::move(traj)};
}

// Composite propagator of a pulse sequence, first pulse applied first.
inline Unitary2 composite(const PulseSequence& seq, double g_factor) {
  Mat2 u = Mat2::identity();
  for (const auto& p : seq.pulses) {
    if (p.is_constant()) {
      u = propagator_const(p.field_T, g_factor, p.duration_ps).m * u;
    } else {
      u = propagate_parametric(*p.path, g_factor, ket_one()).composite.m * u;
    }
  }
  return Unitary2(u, 1e-10);
}

// Propagate `initial` through the sequence, sampling each constant pulse in
// steps_per_pulse exact slices (parametric pulses use their own step count).
inline PropagationResult sample_sequence(const PulseSequence& seq,
                                         double g_factor,
                                         const PureState& initial,
                                         int steps_per_pulse = default_steps_per_pulse) {
  if (steps_per_pulse < 1) throw domain_error("steps_per_pulse must be >= 1");
  if (seq.pulses.empty()) throw domain_error("empty pulse sequence");
  initial.require_normalized();

  Trajectory traj;
  Mat2 u = Mat2::identity();
  PureState psi = initial;
  double t0 = 0.0;
  for (std::size_t ip = 0; ip < seq.pulses.size(); ++ip) {
    const auto& p = seq.pulses[ip];
    if (ip > 0) traj.segment_breaks.push_back(traj.times.size());
    if (p.is_constant()) {
      psi = detail::sample_constant_pulse(p, g_factor, psi, t0, steps_per_pulse, traj);
      u = propagator_const(p.field_T, g_factor, p.duration_ps).m * u;
    } else {
      auto res = propagate_parametric(*p.path, g_factor, psi);
      // merge all but the final sample; the next pulse re-emits it
      for (std::size_t k = 0; k + 1 < res.trajectory.times.size(); ++k) {
        traj.times.push_back(t0 + res.trajectory.times[k]);
        traj.states.push_back(res.trajectory.states[k]);
        traj.hamiltonians.push_back(res.trajectory.hamiltonians[k]);
      }
      psi = res.trajectory.states.back();
      u = res.composite.m * u;
    }
    t0 += p.duration_ps;
  }
  traj.times.push_back(t0);
  traj.states.push_back(psi);
  traj.hamiltonians.push_back(traj.hamiltonians.back());
  traj.validate();
  return {Unitary2(u, 1e-10), std::move(traj)};
}

}  // namespace geospin
