#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "heraldsim/calibration.hpp"
#include "heraldsim/constants.hpp"

using namespace heraldsim;
using calib::PumpSpec;

namespace {

constexpr double kC = constants::speed_of_light;

// 30 mW laser focused to 5 um, LiNbO3 nonlinearity, signal at 3.55e14 Hz.
PumpSpec reference_pump() {
  PumpSpec pump;
  pump.radiant_flux = 0.03;
  pump.beam_radius = 5.0e-6;
  pump.chi2_tilde = 25.2e-12;
  pump.refr_index = 1.0;
  pump.omega_s = 2.0 * constants::pi * 3.55e14;
  return pump;
}

}  // namespace

TEST_CASE("pump_amplitude") {
  SUBCASE("reference laser gives 5.36e5 V/m") {
    CHECK(calib::pump_amplitude(reference_pump()) ==
          doctest::Approx(5.36e5).epsilon(0.005));
  }

  SUBCASE("dark laser") {
    PumpSpec pump = reference_pump();
    pump.radiant_flux = 0.0;
    CHECK(calib::pump_amplitude(pump) == 0.0);
  }

  SUBCASE("scaling laws") {
    const PumpSpec base = reference_pump();
    const double a0 = calib::pump_amplitude(base);

    PumpSpec quad = base;
    quad.radiant_flux *= 4.0;
    CHECK(calib::pump_amplitude(quad) == doctest::Approx(2.0 * a0).epsilon(1e-12));

    PumpSpec wide = base;
    wide.beam_radius *= 2.0;
    CHECK(calib::pump_amplitude(wide) == doctest::Approx(0.5 * a0).epsilon(1e-12));

    PumpSpec dense = base;
    dense.refr_index = 4.0;
    CHECK(calib::pump_amplitude(dense) == doctest::Approx(0.5 * a0).epsilon(1e-12));
  }
}

TEST_CASE("gain_coefficient") {
  SUBCASE("zero amplitude means zero gain") {
    PumpSpec pump = reference_pump();
    pump.radiant_flux = 0.0;
    CHECK(calib::gain_coefficient(pump, 0.01 * kC) == 0.0);
  }

  SUBCASE("inverse proportionality to the group velocity") {
    const PumpSpec pump = reference_pump();
    const double b1 = calib::gain_coefficient(pump, 0.02 * kC);
    const double b2 = calib::gain_coefficient(pump, 0.01 * kC);
    CHECK(b2 == doctest::Approx(2.0 * b1).epsilon(1e-12));
  }

  SUBCASE("slow-light floor") {
    CHECK_THROWS_AS(calib::gain_coefficient(reference_pump(), 1e-6 * kC), BandEdgeError);
  }
}

TEST_CASE("required_group_velocity") {
  const PumpSpec pump = reference_pump();
  const double length = 5.0e-5;

  SUBCASE("reference value 5.01e-3 c for zeta = 1") {
    CHECK(calib::required_group_velocity(pump, 1.0, length) / kC ==
          doctest::Approx(5.01e-3).epsilon(0.01));
  }

  SUBCASE("scaling in zeta and length") {
    const double v0 = calib::required_group_velocity(pump, 1.0, length);
    CHECK(calib::required_group_velocity(pump, 2.0, length) ==
          doctest::Approx(0.5 * v0).epsilon(1e-12));
    CHECK(calib::required_group_velocity(pump, 1.0, 2.0 * length) ==
          doctest::Approx(2.0 * v0).epsilon(1e-12));
  }

  SUBCASE("round trip through the gain coefficient") {
    const double zeta = 0.75;
    const double vg = calib::required_group_velocity(pump, zeta, length);
    CHECK(calib::gain_coefficient(pump, vg) * length ==
          doctest::Approx(zeta).epsilon(1e-12));
  }
}

TEST_CASE("effective_length") {
  SUBCASE("reference ratio 1:1.32 stretches 50 um to 87.9 um") {
    CHECK(calib::effective_length(5.0e-5, {1.0, 1.32}) ==
          doctest::Approx(8.79e-5).epsilon(0.005));
  }

  SUBCASE("all energy in the nonlinear layer leaves the length unchanged") {
    CHECK(calib::effective_length(5.0e-5, {0.0, 1.0}) ==
          doctest::Approx(5.0e-5).epsilon(1e-12));
  }

  SUBCASE("even split doubles the length") {
    CHECK(calib::effective_length(5.0e-5, {0.5, 0.5}) ==
          doctest::Approx(1.0e-4).epsilon(1e-12));
  }

  SUBCASE("never shorter than the physical crystal") {
    for (double pb : {0.05, 0.3, 0.9})
      CHECK(calib::effective_length(5.0e-5, {1.0 - pb, pb}) >= 5.0e-5);
  }

  SUBCASE("no energy in the nonlinear layer is degenerate") {
    CHECK_THROWS_AS(calib::effective_length(5.0e-5, {1.0, 0.0}), DegenerateError);
  }
}

TEST_CASE("squeeze_db") {
  CHECK(calib::squeeze_db(1.0) == doctest::Approx(8.69).epsilon(0.0012));
  CHECK(calib::squeeze_db(0.0) == 0.0);
  CHECK(calib::squeeze_db(0.5) == doctest::Approx(4.343).epsilon(1e-3));
  CHECK(calib::squeeze_db(2.0) == doctest::Approx(2.0 * calib::squeeze_db(1.0)).epsilon(1e-12));
}

TEST_CASE("calibrate report") {
  const auto report = calib::calibrate(reference_pump(), 1.0, 5.0e-5, {1.0 / 2.32, 1.32 / 2.32});
  CHECK(report.zeta_roundtrip == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.pump_amplitude == doctest::Approx(5.36e5).epsilon(0.005));
  CHECK(report.required_vg / kC == doctest::Approx(5.01e-3).epsilon(0.01));
  CHECK(report.effective_length == doctest::Approx(8.79e-5).epsilon(0.005));
  CHECK(report.squeeze_db == doctest::Approx(8.69).epsilon(0.0012));
}
