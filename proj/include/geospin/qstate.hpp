#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <utility>

#include "geospin/constants.hpp"
#include "geospin/errors.hpp"
#include "geospin/mat2.hpp"

// States and operators of the two-level space, ordered basis (|1>, |0>) with
// |1> = spin up as the first component. All phase bookkeeping downstream
// depends on this ordering and on the sigma_y eigenstate phases pinned in
// sigma_y_eigenstates(), so nothing here may be "fixed up" silently.

namespace geospin {

inline Mat2 sigma_x() { return {{cplx(0), cplx(1), cplx(1), cplx(0)}}; }
inline Mat2 sigma_y() {
  return {{cplx(0), cplx(0, -1), cplx(0, 1), cplx(0)}};
}
inline Mat2 sigma_z() { return {{cplx(1), cplx(0), cplx(0), cplx(-1)}}; }

inline Mat2 sigma_dot(Vec3 n) {
  return {{cplx(n.z), cplx(n.x, -n.y), cplx(n.x, n.y), cplx(-n.z)}};
}

// Normalized two-component state. amp1 multiplies |1>, amp0 multiplies |0>.
struct PureState {
  cplx amp1{1.0};
  cplx amp0{0.0};

  double norm2() const { return std::norm(amp1) + std::norm(amp0); }

  // tol covers accumulated roundoff; freshly constructed states should pass
  // 1e-12, long propagated trajectories 1e-10.
  void require_normalized(double tol = 1e-12) const {
    if (std::abs(norm2() - 1.0) > tol) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "state norm deviates from 1 by %.3e",
                    std::abs(norm2() - 1.0));
      throw invariant_error(buf);
    }
  }
};

inline PureState ket_one() { return {cplx(1), cplx(0)}; }
inline PureState ket_zero() { return {cplx(0), cplx(1)}; }

inline cplx overlap(const PureState& a, const PureState& b) {
  return std::conj(a.amp1) * b.amp1 + std::conj(a.amp0) * b.amp0;
}

inline PureState apply(const Mat2& u, const PureState& s) {
  return {u.a[0] * s.amp1 + u.a[1] * s.amp0, u.a[2] * s.amp1 + u.a[3] * s.amp0};
}

// Hermitian observable wrapper.
struct SpinOperator {
  Mat2 m;

  explicit SpinOperator(const Mat2& mat, double tol = 1e-12) : m(mat) {
    if (!is_hermitian(m, tol)) throw invariant_error("operator not Hermitian");
  }
};

// Unitary wrapper. Products of many exact per-step propagators drift at the
// roundoff level, so composite builders pass a looser tolerance.
struct Unitary2 {
  Mat2 m;

  explicit Unitary2(const Mat2& mat, double tol = 1e-12) : m(mat) {
    if (!is_unitary(m, tol))
      throw invariant_error("matrix not unitary within tolerance");
  }
};

struct BlochVector {
  Vec3 r;
};

// Hermitian, unit trace, positive semidefinite.
struct DensityMatrix {
  Mat2 m;

  explicit DensityMatrix(const Mat2& mat, double tol = 1e-12) : m(mat) {
    if (!is_hermitian(m, tol)) throw invariant_error("density matrix not Hermitian");
    if (std::abs(trace(m) - cplx(1.0)) > tol)
      throw invariant_error("density matrix trace deviates from 1");
    // 2x2 PSD check via the eigenvalue closed form.
    const double tr = trace(m).real();
    const double dt = det(m).real();
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * dt));
    const double lo = 0.5 * (tr - disc);
    if (lo < -tol) throw invariant_error("density matrix has negative eigenvalue");
  }

  double eigenvalue_low() const {
    const double tr = trace(m).real(), dt = det(m).real();
    return 0.5 * (tr - std::sqrt(std::max(0.0, tr * tr - 4.0 * dt)));
  }
  double eigenvalue_high() const {
    const double tr = trace(m).real(), dt = det(m).real();
    return 0.5 * (tr + std::sqrt(std::max(0.0, tr * tr - 4.0 * dt)));
  }
};

inline DensityMatrix projector(const PureState& s) {
  s.require_normalized(1e-10);
  Mat2 m{{std::norm(s.amp1), s.amp1 * std::conj(s.amp0),
          s.amp0 * std::conj(s.amp1), std::norm(s.amp0)}};
  return DensityMatrix(m, 1e-10);
}

// w1 |1><1| + w0 |0><0|. Weights must be a probability pair.
inline DensityMatrix mixed_initial(double w0, double w1) {
  if (w0 < 0.0 || w1 < 0.0)
    throw domain_error("weights must be nonnegative: w0=" + std::to_string(w0) +
                       " w1=" + std::to_string(w1));
  if (std::abs(w0 + w1 - 1.0) > 1e-12)
    throw domain_error("weights must sum to 1 within 1e-12: w0+w1=" +
                       std::to_string(w0 + w1));
  return DensityMatrix(Mat2{{cplx(w1), cplx(0), cplx(0), cplx(w0)}});
}

inline DensityMatrix evolve(const DensityMatrix& rho, const Unitary2& u) {
  return DensityMatrix(u.m * rho.m * adjoint(u.m), 1e-10);
}

inline double expectation(const SpinOperator& op, const DensityMatrix& rho) {
  return trace(op.m * rho.m).real();
}

// sigma_y eigenstates with the phase convention
//   |0> = (-i/sqrt2)(|+> - |->),   |1> = (1/sqrt2)(|+> + |->),
// i.e. |+> = (|1> + i|0>)/sqrt2 and |-> = (|1> - i|0>)/sqrt2.
inline std::pair<PureState, PureState> sigma_y_eigenstates() {
  const double s = 1.0 / std::sqrt(2.0);
  return {PureState{cplx(s), cplx(0, s)}, PureState{cplx(s), cplx(0, -s)}};
}

inline BlochVector to_bloch(const DensityMatrix& rho) {
  return {{trace(sigma_x() * rho.m).real(), trace(sigma_y() * rho.m).real(),
           trace(sigma_z() * rho.m).real()}};
}

inline DensityMatrix from_bloch(const BlochVector& b) {
  const double r = norm(b.r);
  if (r > 1.0 + 1e-9)
    throw domain_error("Bloch vector length " + std::to_string(r) +
                       " exceeds 1");
  Mat2 m = cplx(0.5) * (Mat2::identity() + sigma_dot(b.r));
  return DensityMatrix(m, 1e-9);
}

}  // namespace geospin
