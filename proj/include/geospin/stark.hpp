#pragma once

#include <cmath>
#include <string>

#include "geospin/constants.hpp"
#include "geospin/errors.hpp"
#include "geospin/pulse.hpp"

// Off-resonant optical Stark shifts of the trion ladder and their mapping
// onto an effective magnetic pulse. Energies in meV, fields in tesla.

namespace geospin {

enum class Polarization { sigma_plus, sigma_minus };

// Couplings V1, V2 (meV) and red detunings Delta1, Delta2 (meV, positive)
// of the two driven transitions.
struct LevelScheme {
  double v1 = 0.0;
  double v2 = 0.0;
  double delta1 = 1.0;
  double delta2 = 1.0;
  Polarization polarization = Polarization::sigma_plus;

  void validate() const {
    if (delta1 <= 0.0 || delta2 <= 0.0)
      throw domain_error("detunings must be positive: delta1=" +
                         std::to_string(delta1) + " delta2=" +
                         std::to_string(delta2));
  }
};

// Second-order level shifts. Each driven pair repels: the conduction-band
// member moves up by |V|^2/Delta, its valence partner down by the same
// amount. For sigma+ drive V1 addresses (cb -1/2, vb -3/2) and V2 addresses
// (cb +1/2, vb -1/2); sigma- drive mirrors the labels.
struct StarkShifts {
  double cb_minus_half = 0.0;
  double cb_plus_half = 0.0;
  double vb_minus_three_half = 0.0;
  double vb_minus_half = 0.0;
};

inline StarkShifts stark_shifts(const LevelScheme& s) {
  s.validate();
  StarkShifts out;
  const double shift1 = s.v1 * s.v1 / s.delta1;
  const double shift2 = s.v2 * s.v2 / s.delta2;
  out.cb_minus_half = shift1;
  out.vb_minus_three_half = -shift1;
  out.cb_plus_half = shift2;
  out.vb_minus_half = -shift2;
  return out;
}

// Conduction-band splitting produced by the shifts. sign says which spin
// state ends up higher: +1 for cb +1/2, -1 for cb -1/2, 0 for none.
struct CbSplitting {
  double delta_cb_meV = 0.0;  // magnitude
  int sign = 0;
};

inline CbSplitting cb_splitting(const StarkShifts& s) {
  const double diff = s.cb_plus_half - s.cb_minus_half;
  CbSplitting out;
  out.delta_cb_meV = std::abs(diff);
  out.sign = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
  return out;
}

// Magnetic field whose Zeeman splitting g mu_B B equals delta_cb.
inline double effective_field(double delta_cb_meV, double g_factor) {
  if (delta_cb_meV < 0.0) throw domain_error("splitting must be nonnegative");
  if (g_factor == 0.0)
    throw domain_error("effective field undefined for g = 0");
  return delta_cb_meV / (std::abs(g_factor) * mu_B_meV_per_T);
}

// A light-induced tipping pulse: splitting, axis, and how long it is on.
struct TippingPulse {
  double delta_cb_meV = 0.0;
  Vec3 direction{0.0, 0.0, 1.0};
  double duration_ps = 0.0;

  void validate() const {
    if (delta_cb_meV < 0.0) throw domain_error("splitting must be nonnegative");
    if (duration_ps < 0.0) throw domain_error("negative pulse duration");
    if (norm(direction) == 0.0 && delta_cb_meV > 0.0)
      throw domain_error("tipping pulse needs a direction");
  }
};

// Lower the tipping pulse onto the pulse engine. The rotation angle of the
// result, g mu_B B_eff t / hbar = delta_cb t / hbar, is independent of the
// g factor used for the conversion: g cancels between B_eff and the
// propagator. Zero splitting maps to a zero-field (identity) pulse.
inline FieldPulse to_field_pulse(const TippingPulse& tp, double g_factor) {
  tp.validate();
  if (tp.delta_cb_meV == 0.0) return FieldPulse::constant({0, 0, 0}, tp.duration_ps);
  const double b = effective_field(tp.delta_cb_meV, g_factor);
  const Vec3 n = (1.0 / norm(tp.direction)) * tp.direction;
  return FieldPulse::constant(b * n, tp.duration_ps);
}

// delta_cb t / hbar: the g-free rotation angle of a tipping pulse.
inline double tipping_angle(double delta_cb_meV, double duration_ps) {
  return delta_cb_meV * duration_ps / hbar_meV_ps;
}

// Duration for a pi tip at the given splitting.
inline double pi_tip_duration(double delta_cb_meV) {
  if (delta_cb_meV <= 0.0)
    throw domain_error("pi tip needs a positive splitting");
  return pi * hbar_meV_ps / delta_cb_meV;
}

}  // namespace geospin
