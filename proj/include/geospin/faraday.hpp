#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "geospin/constants.hpp"
#include "geospin/errors.hpp"
#include "geospin/geophase.hpp"
#include "geospin/qstate.hpp"

// Faraday rotation readout. The probe propagating at angle alpha from z in
// the x-z plane measures sigma_k = cos(alpha) sigma_z - sin(alpha) sigma_x;
// the rotation angle is theta_F = kappa * Tr(sigma_k rho_f).

namespace geospin {

struct Weights {
  double w0 = 0.0;
  double w1 = 1.0;

  void validate() const {
    if (w0 < 0.0 || w1 < 0.0 || std::abs(w0 + w1 - 1.0) > 1e-12)
      throw domain_error("weights must be nonnegative and sum to 1");
  }
};

struct ProbeGeometry {
  double alpha = 0.0;  // radians, [0, pi]
  double kappa = 1.0;  // detection constant, theta_F per unit magnetization

  void validate() const {
    if (alpha < 0.0 || alpha > pi)
      throw domain_error("probe angle must lie in [0, pi]");
  }
};

inline SpinOperator sigma_k(double alpha) {
  return SpinOperator(cplx(std::cos(alpha)) * sigma_z() -
                      cplx(std::sin(alpha)) * sigma_x());
}

inline double magnetization(const DensityMatrix& rho_f, double alpha) {
  return expectation(sigma_k(alpha), rho_f);
}

// (w1 - w0) cos(alpha - 2 gamma): the closed form the matrix pipeline must
// reproduce.
inline double mk_closed_form(double w0, double w1, double gamma, double alpha) {
  return (w1 - w0) * std::cos(alpha - 2.0 * gamma);
}

inline double theta_f(double mk, double kappa) { return kappa * mk; }

// Matrix-pipeline magnetization: rotate the diagonal mixture by the gate
// and take the probe trace. Kept separate from mk_closed_form so the two
// routes stay independent checks of each other.
inline double mk_pipeline(double w0, double w1, double gamma, double alpha) {
  const DensityMatrix rho_f = evolve(mixed_initial(w0, w1), geometric_gate(gamma));
  return magnetization(rho_f, alpha);
}

struct SweepSample {
  double value = 0.0;                  // the swept coordinate
  double mk = 0.0;                     // closed-form magnetization
  double theta_f = 0.0;                // kappa * mk
  std::optional<double> mk_pulse;      // brute-force pipeline, when simulated
  std::optional<std::string> error;    // set when this point failed
};

enum class SweepAxis { alpha, gamma, field_ratio };

struct InterferencePattern {
  SweepAxis axis = SweepAxis::gamma;
  Weights weights;
  ProbeGeometry geometry;
  std::vector<SweepSample> samples;

  // |M_k| can never exceed the population contrast.
  void validate() const {
    const double bound = std::abs(weights.w1 - weights.w0) + 1e-12;
    for (const auto& s : samples) {
      if (s.error) continue;
      if (std::abs(s.mk) > bound)
        throw invariant_error("magnetization exceeds weight contrast");
      if (s.mk_pulse && std::abs(*s.mk_pulse) > bound)
        throw invariant_error("pipeline magnetization exceeds weight contrast");
    }
  }
};

// Sweep the gate angle at fixed probe geometry.
inline InterferencePattern sweep_gamma(const Weights& w,
                                       const std::vector<double>& gammas,
                                       const ProbeGeometry& geom) {
  w.validate();
  geom.validate();
  InterferencePattern pat{SweepAxis::gamma, w, geom, {}};
  for (double g : gammas) {
    SweepSample s;
    s.value = g;
    s.mk = mk_closed_form(w.w0, w.w1, g, geom.alpha);
    s.theta_f = theta_f(s.mk, geom.kappa);
    pat.samples.push_back(s);
  }
  pat.validate();
  return pat;
}

// Sweep the probe angle at fixed gate angle.
inline InterferencePattern sweep_alpha(const Weights& w, double gamma,
                                       const std::vector<double>& alphas,
                                       double kappa = 1.0) {
  w.validate();
  InterferencePattern pat{SweepAxis::alpha, w, ProbeGeometry{0.0, kappa}, {}};
  for (double a : alphas) {
    if (a < 0.0 || a > pi)
      throw domain_error("alpha grid entry outside [0, pi]");
    SweepSample s;
    s.value = a;
    s.mk = mk_closed_form(w.w0, w.w1, gamma, a);
    s.theta_f = theta_f(s.mk, kappa);
    pat.samples.push_back(s);
  }
  pat.validate();
  return pat;
}

// Sweep the pulse-field ratio bx/bz. Each point runs the full protocol:
// the measured phase feeds the closed form, and the brute-force route
// (composite propagator, density matrix, probe trace) is reported alongside
// it. Failed points are recorded, not dropped.
inline InterferencePattern sweep_field_ratio(
    const Weights& w, const std::vector<double>& ratios, double g_factor,
    const ProbeGeometry& geom, int steps_per_pulse = default_steps_per_pulse) {
  w.validate();
  geom.validate();
  InterferencePattern pat{SweepAxis::field_ratio, w, geom, {}};
  for (double r : ratios) {
    SweepSample s;
    s.value = r;
    try {
      const PhaseDecomposition m =
          aa_phase_measured(r, 1.0, g_factor, steps_per_pulse);
      s.mk = mk_closed_form(w.w0, w.w1, m.geometric, geom.alpha);
      s.theta_f = theta_f(s.mk, geom.kappa);
      const Unitary2 u = composite(aa_protocol(r, 1.0, g_factor), g_factor);
      s.mk_pulse = magnetization(evolve(mixed_initial(w.w0, w.w1), u), geom.alpha);
    } catch (const error& e) {
      s.error = e.what();
    }
    pat.samples.push_back(s);
  }
  pat.validate();
  return pat;
}

}  // namespace geospin
