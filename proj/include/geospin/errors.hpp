#pragma once

#include <stdexcept>
#include <string>

namespace geospin {

// Base for everything thrown by this library.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad physical inputs: weights outside [0,1], nonpositive detunings,
// zero field where a rotation axis is required, zero g factor, bad grids.
struct domain_error : error {
  using error::error;
};

// A value-type invariant failed (non-unitary propagator, non-PSD density
// matrix, unnormalized state, open loop).
struct invariant_error : error {
  using error::error;
};

// Pancharatnam phase is undefined: |<initial|final>| at or below threshold.
struct non_cyclic_error : error {
  using error::error;
};

// Adiabatic transport leaked more population than the caller allowed.
struct adiabaticity_error : error {
  adiabaticity_error(const std::string& msg, double leakage_)
      : error(msg), leakage(leakage_) {}
  double leakage;
};

// Config text failed to parse or validate; carries a 1-based line number
// when the failure is tied to a specific line (0 otherwise).
struct config_error : error {
  explicit config_error(const std::string& msg, int line_ = 0)
      : error(msg), line(line_) {}
  int line;
};

struct io_error : error {
  using error::error;
};

}  // namespace geospin
