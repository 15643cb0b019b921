#include <catch2/catch_amalgamated.hpp>

#include <geospin/pulse.hpp>
#include <geospin/qstate.hpp>

#include <random>

#include "support/compare.hpp"
#include "support/oracles.hpp"

using namespace geospin;

namespace {
// Larmor rate in rad/ps for |B| in tesla.
double larmor(double g, double b) { return g * mu_B_meV_per_T * b / hbar_meV_ps; }
}  // namespace

TEST_CASE("Hamiltonian matrix elements and Zeeman splitting") {
  const Mat2 h = hamiltonian_matrix({0.0, 0.0, 20.0}, 0.864);
  CHECK(h(0, 0).real() == Catch::Approx(0.864 * mu_B_meV_per_T * 10.0));
  // splitting at 20 T, g = 0.864 is 1.0002323760767999 meV
  const double split = (h(0, 0) - h(1, 1)).real();
  CHECK(split == Catch::Approx(1.0002323760767999).margin(1e-15));
}

TEST_CASE("constant propagator equals the axis-angle exponential") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> mag(0.1, 30.0), dur(0.01, 50.0);
  for (int i = 0; i < 50; ++i) {
    const auto n = oracle::random_unit(rng);
    const double b = mag(rng), t = dur(rng);
    const Vec3 field{b * n[0], b * n[1], b * n[2]};
    const Unitary2 u = propagator_const(field, 0.864, t);
    const double phi = larmor(0.864, b) * t;
    CHECK(diff_mat(u.m, oracle::axis_angle(n, phi)) < 1e-13);
  }
}

TEST_CASE("zero field propagates to the identity") {
  const Unitary2 u = propagator_const({0, 0, 0}, 0.864, 3.0);
  CHECK(max_abs_diff(u.m, Mat2::identity()) == 0.0);
  CHECK_THROWS_AS(propagator_const({0, 0, 1.0}, 0.864, -1.0), domain_error);
}

TEST_CASE("Bloch rotation is right handed about the field") {
  // state along +x, field along +z, quarter turn: +x rotates into +y
  const double b = 5.0, g = 0.864;
  const double t_quarter = (pi / 2.0) / larmor(g, b);
  const Unitary2 u = propagator_const({0, 0, b}, g, t_quarter);
  PureState x_plus{cplx(1.0 / std::sqrt(2.0)), cplx(1.0 / std::sqrt(2.0))};
  const BlochVector r = to_bloch(evolve(projector(x_plus), u));
  CHECK(r.r.x == Catch::Approx(0.0).margin(1e-12));
  CHECK(r.r.y == Catch::Approx(1.0).margin(1e-12));
  CHECK(r.r.z == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("pi pulse duration at 20 T") {
  const FieldPulse p = pi_pulse(0.0, 20.0, 0.864);
  CHECK(p.duration_ps == Catch::Approx(2.0673534448191355).margin(1e-15));
  CHECK(std::abs(rotation_angle(p.field_T, 0.864, p.duration_ps)) ==
        Catch::Approx(pi).margin(1e-14));
  CHECK_THROWS_AS(pi_pulse(0.0, 0.0, 0.864), domain_error);
  CHECK_THROWS_AS(pi_pulse(1.0, 1.0, 0.0), domain_error);
}

TEST_CASE("mirrored pulse pair composite matches the analytic product") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> f(-4.0, 4.0);
  int kept = 0;
  while (kept < 40) {
    const double bx = f(rng), bz = f(rng);
    if (std::hypot(bx, bz) < 0.05) continue;
    ++kept;
    const Unitary2 u = composite(aa_protocol(bx, bz, 0.864), 0.864);
    const double b = std::hypot(bx, bz);
    const oracle::vec3 n1{bx / b, 0.0, bz / b};
    const oracle::vec3 n2{-bx / b, 0.0, bz / b};
    CHECK(diff_mat(u.m, oracle::two_pi_rotation_product(n2, n1)) < 1e-13);
  }
}

TEST_CASE("loop validation rejects open paths and bad step counts") {
  ParametricLoop open_loop;
  open_loop.direction = [](double s) {
    return Vec3{std::sin(0.3 + s), 0.0, std::cos(0.3 + s)};
  };
  open_loop.magnitude_T = 1.0;
  open_loop.total_time_ps = 10.0;
  open_loop.steps = 16;
  CHECK_THROWS_AS(open_loop.validate(), invariant_error);

  ParametricLoop c = cone_loop(pi / 3, 1.0, 10.0, 1);
  CHECK_THROWS_AS(c.validate(), domain_error);
  CHECK_NOTHROW(cone_loop(pi / 3, 1.0, 10.0, 16).validate());
}

TEST_CASE("cone and degenerate loops close; reversal is an involution") {
  const ParametricLoop cone = cone_loop(pi / 4, 2.0, 100.0, 64);
  const ParametricLoop degen = degenerate_loop(pi / 3, 2.0, 100.0, 64);
  CHECK_NOTHROW(cone.validate());
  CHECK_NOTHROW(degen.validate());

  const ParametricLoop twice = reversed(reversed(cone));
  for (double s : {0.0, 0.125, 0.5, 0.875, 1.0}) {
    const Vec3 a = cone.direction(s), b = twice.direction(s);
    CHECK(norm(a - b) < 1e-15);
  }
}

TEST_CASE("parametric propagation converges to the exact rotating frame result") {
  const double g = 0.864, theta_c = pi / 3;
  const double w = larmor(g, 1.0);
  const double tau = 2.0 * pi * 8.0 / w;  // eight revolutions
  const PureState start = ket_one();

  double prev_err = 0.0;
  for (int k = 0; k < 3; ++k) {
    const int n = 256 << k;
    const auto res = propagate_parametric(cone_loop(theta_c, 1.0, tau, n), g, start);
    const double err =
        diff_mat(res.composite.m, oracle::cone_loop_exact(w, theta_c, tau));
    if (k > 0) {
      // second-order midpoint stepping: error falls ~4x per doubling
      const double ratio = prev_err / err;
      CHECK(ratio > 3.5);
      CHECK(ratio < 4.5);
    }
    prev_err = err;
  }
}

TEST_CASE("dwell weights reshape time but keep duration and closure") {
  const double g = 0.864;
  const ParametricLoop loop = cone_loop(pi / 4, 1.0, 200.0, 128);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> jit(0.8, 1.2);
  std::vector<double> w(128);
  for (double& v : w) v = jit(rng);

  const auto res = propagate_parametric(loop, g, ket_one(), w);
  CHECK(res.trajectory.times.back() == Catch::Approx(200.0).margin(1e-9));
  CHECK(is_unitary(res.composite.m, 1e-12));

  std::vector<double> bad = w;
  bad[5] = -0.1;
  CHECK_THROWS_AS(propagate_parametric(loop, g, ket_one(), bad), domain_error);
  CHECK_THROWS_AS(propagate_parametric(loop, g, ket_one(), {1.0, 2.0}),
                  domain_error);
}

TEST_CASE("sequence sampling produces a well formed trajectory") {
  const PulseSequence seq = aa_protocol(1.0, 1.0, 0.864);
  const auto res = sample_sequence(seq, 0.864, sigma_y_eigenstates().first, 512);
  const Trajectory& tr = res.trajectory;
  CHECK_NOTHROW(tr.validate());
  CHECK(tr.times.size() == tr.states.size());
  CHECK(tr.times.size() == tr.hamiltonians.size());
  CHECK(tr.times.front() == 0.0);
  CHECK(tr.times.back() ==
        Catch::Approx(seq.total_duration_ps()).margin(1e-12));
  REQUIRE(tr.segment_breaks.size() == 1);
  // the generator changes discontinuously exactly at the recorded break:
  // the x component flips, a jump of g mu_B bx = 0.05 meV in the matrix
  const std::size_t b = tr.segment_breaks[0];
  CHECK(max_abs_diff(tr.hamiltonians[b - 1].m, tr.hamiltonians[b].m) > 0.01);
  CHECK(max_abs_diff(tr.hamiltonians[b - 2].m, tr.hamiltonians[b - 1].m) == 0.0);
}

TEST_CASE("long products stay unitary and normalized") {
  const double g = 0.864;
  const double w = larmor(g, 1.0);
  const double tau = 2.0 * pi * 50.0 / w;
  const auto res =
      propagate_parametric(cone_loop(pi / 3, 1.0, tau, 1 << 18), g, ket_one());
  CHECK(is_unitary(res.composite.m, 1e-13));
  CHECK(std::abs(res.trajectory.states.back().norm2() - 1.0) < 1e-13);
}
