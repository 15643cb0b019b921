#include <catch2/catch_amalgamated.hpp>

#include <geospin/faraday.hpp>
#include <geospin/geophase.hpp>

#include <random>

#include "support/oracles.hpp"

using namespace geospin;

TEST_CASE("closed form magnetization matches the independent trace arithmetic") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> uw(0.0, 1.0), ug(0.0, 2.0 * pi),
      ua(0.0, pi);
  for (int i = 0; i < 200; ++i) {
    const double w1 = uw(rng), g = ug(rng), a = ua(rng);
    CHECK(mk_closed_form(1.0 - w1, w1, g, a) ==
          Catch::Approx(oracle::mk_trace(1.0 - w1, w1, g, a)).margin(1e-12));
  }
}

TEST_CASE("matrix pipeline and closed form stay separate routes that agree") {
  for (double w1 : {0.0, 0.25, 0.5, 0.9, 1.0})
    for (double g : {0.0, 0.4, 1.7, 3.1, 5.9})
      for (double a : {0.0, 0.6, 1.4, 2.3, pi}) {
        const double cf = mk_closed_form(1.0 - w1, w1, g, a);
        const double mp = mk_pipeline(1.0 - w1, w1, g, a);
        CHECK(cf == Catch::Approx(mp).margin(1e-12));
      }
}

TEST_CASE("pure states give opposite interference profiles") {
  for (double g : {0.0, 0.7, 2.9})
    for (double a : {0.0, 1.0, 2.5}) {
      CHECK(mk_closed_form(0.0, 1.0, g, a) ==
            Catch::Approx(std::cos(a - 2.0 * g)).margin(1e-15));
      CHECK(mk_closed_form(1.0, 0.0, g, a) ==
            Catch::Approx(-std::cos(a - 2.0 * g)).margin(1e-15));
      // mixtures are the weighted average of the pure profiles
      const double w1 = 0.3;
      CHECK(mk_closed_form(1.0 - w1, w1, g, a) ==
            Catch::Approx((2.0 * w1 - 1.0) * std::cos(a - 2.0 * g))
                .margin(1e-15));
    }
}

TEST_CASE("gamma = 0 reduces to the plain magnetization profile") {
  for (double w1 : {0.0, 0.4, 1.0})
    for (double a : {0.0, 0.9, 1.9, pi})
      CHECK(mk_closed_form(1.0 - w1, w1, 0.0, a) ==
            Catch::Approx((2.0 * w1 - 1.0) * std::cos(a)).margin(1e-15));
}

TEST_CASE("probe operator interpolates between sigma_z and -sigma_x") {
  CHECK(max_abs_diff(sigma_k(0.0).m, sigma_z()) < 1e-15);
  CHECK(max_abs_diff(sigma_k(pi / 2).m, cplx(-1.0) * sigma_x()) < 1e-15);
  CHECK_THROWS_AS((ProbeGeometry{-0.1, 1.0}.validate()), domain_error);
  CHECK_THROWS_AS((ProbeGeometry{3.5, 1.0}.validate()), domain_error);
}

TEST_CASE("rotation signal is the calibrated magnetization") {
  CHECK(theta_f(0.4, 2.5) == Catch::Approx(1.0).margin(1e-15));
  CHECK(theta_f(-0.4, 0.0) == 0.0);
}

TEST_CASE("weights are validated") {
  CHECK_THROWS_AS((Weights{-0.1, 1.1}.validate()), domain_error);
  CHECK_THROWS_AS((Weights{0.4, 0.4}.validate()), domain_error);
  CHECK_NOTHROW((Weights{0.25, 0.75}.validate()));
}

TEST_CASE("gamma sweep reproduces cos(2 gamma) for a pure up state") {
  std::vector<double> gammas;
  for (int k = 0; k < 32; ++k) gammas.push_back(2.0 * pi * k / 32);
  const InterferencePattern pat =
      sweep_gamma(Weights{0.0, 1.0}, gammas, ProbeGeometry{0.0, 1.0});
  REQUIRE(pat.samples.size() == 32);
  for (std::size_t k = 0; k < pat.samples.size(); ++k) {
    CHECK(pat.samples[k].mk ==
          Catch::Approx(std::cos(2.0 * gammas[k])).margin(1e-12));
    CHECK(!pat.samples[k].error);
  }
}

TEST_CASE("alpha sweep obeys the contrast bound") {
  std::vector<double> alphas;
  for (int k = 0; k < 16; ++k) alphas.push_back(pi * k / 15);
  const InterferencePattern pat = sweep_alpha(Weights{0.3, 0.7}, 0.8, alphas, 2.0);
  for (const auto& s : pat.samples) {
    CHECK(std::abs(s.mk) <= 0.4 + 1e-12);
    CHECK(s.theta_f == Catch::Approx(2.0 * s.mk).margin(1e-15));
  }
  CHECK_NOTHROW(pat.validate());
}

TEST_CASE("field ratio sweep carries the pulse-level cross check") {
  const InterferencePattern pat = sweep_field_ratio(
      Weights{0.0, 1.0}, {0.5, 1.0, 2.0}, 0.864, ProbeGeometry{0.3, 1.0}, 512);
  REQUIRE(pat.samples.size() == 3);
  for (const auto& s : pat.samples) {
    REQUIRE(!s.error);
    REQUIRE(s.mk_pulse.has_value());
    // closed form at the measured angle vs full matrix evolution
    CHECK(s.mk == Catch::Approx(*s.mk_pulse).margin(1e-9));
  }
}

TEST_CASE("failed sweep points are recorded, not dropped") {
  // ratio grids hand bx = ratio * bz to the pulse builder; a huge negative
  // ratio is legal, but zero total field is not and must surface per point
  const InterferencePattern pat = sweep_field_ratio(
      Weights{0.0, 1.0}, {1.0, 0.0, 2.0}, 0.0, ProbeGeometry{0.0, 1.0}, 64);
  REQUIRE(pat.samples.size() == 3);
  int failed = 0;
  for (const auto& s : pat.samples)
    if (s.error) ++failed;
  CHECK(failed == 3);  // zero g factor fails every point
}
