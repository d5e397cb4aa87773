#ifndef HERALDSIM_CALIBRATION_HPP
#define HERALDSIM_CALIBRATION_HPP

#include "heraldsim/crystal_bands.hpp"
#include "heraldsim/errors.hpp"

namespace heraldsim::calib {

// Pump laser and material inputs of the squeezing budget.
struct PumpSpec {
  double radiant_flux = 0.0;   // W
  double beam_radius = 0.0;    // m
  double chi2_tilde = 0.0;     // m/V  (chi2 / eps0)
  double refr_index = 1.0;     // refractive index entering the intensity relation
  double omega_s = 0.0;        // rad/s, signal angular frequency
  double pump_phase = 0.0;     // rad
};

void validate(const PumpSpec& pump);

struct SqueezeBudget {
  double gain_beta = 0.0;         // 1/m
  double zeta = 0.0;              // dimensionless
  double v_g = 0.0;               // m/s
  double effective_length = 0.0;  // m
};

// Default refusal floor for the slow-light gain divergence.
inline constexpr double default_vg_floor_fraction = 1e-5;  // of c

// A = sqrt(2 W / (pi d^2 eps0 c n)) from I = W/(pi d^2) = eps0 c n A^2 / 2.
double pump_amplitude(const PumpSpec& pump);

// beta = omega_s A chi2_tilde / v_g.  Refuses v_g below the floor, where
// the undepleted-pump gain model stops being meaningful.
double gain_coefficient(const PumpSpec& pump, double v_g,
                        double vg_floor_fraction = default_vg_floor_fraction);

// v_g needed so that beta * length == zeta_target.
double required_group_velocity(const PumpSpec& pump, double zeta_target, double length);

// length * (p_a + p_b) / p_b: rescales the crystal so the time spent in
// the nonlinear layers matches the naive l / v_g estimate.
double effective_length(double length, const bands::EnergyRatio& ratio);

// 20 r log10(e): squeezing magnitude in decibels.
double squeeze_db(double r);

struct CalibrationReport {
  double pump_amplitude = 0.0;    // V/m
  double required_vg = 0.0;       // m/s
  double gain_beta = 0.0;         // 1/m at required_vg
  double zeta_roundtrip = 0.0;    // gain_beta * length, should equal zeta_target
  double energy_p_a = 0.0;
  double energy_p_b = 0.0;
  double effective_length = 0.0;  // m
  double squeeze_db = 0.0;        // dB at r = zeta_target
};

CalibrationReport calibrate(const PumpSpec& pump, double zeta_target, double length,
                            const bands::EnergyRatio& ratio);

}  // namespace heraldsim::calib

#endif
