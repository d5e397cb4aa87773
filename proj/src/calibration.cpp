#include "heraldsim/calibration.hpp"

#include <cmath>
#include <sstream>

#include "heraldsim/constants.hpp"

namespace heraldsim::calib {

using constants::pi;
using constants::speed_of_light;
using constants::vacuum_permittivity;

void validate(const PumpSpec& pump) {
  if (pump.radiant_flux < 0.0) throw std::invalid_argument("PumpSpec: radiant_flux must be >= 0");
  if (!(pump.beam_radius > 0.0)) throw std::invalid_argument("PumpSpec: beam_radius must be > 0");
  if (!(pump.chi2_tilde > 0.0)) throw std::invalid_argument("PumpSpec: chi2_tilde must be > 0");
  if (pump.refr_index < 1.0) throw std::invalid_argument("PumpSpec: refr_index must be >= 1");
  if (!(pump.omega_s > 0.0)) throw std::invalid_argument("PumpSpec: omega_s must be > 0");
}

double pump_amplitude(const PumpSpec& pump) {
  validate(pump);
  const double intensity = pump.radiant_flux / (pi * pump.beam_radius * pump.beam_radius);
  return std::sqrt(2.0 * intensity /
                   (vacuum_permittivity * speed_of_light * pump.refr_index));
}

double gain_coefficient(const PumpSpec& pump, double v_g, double vg_floor_fraction) {
  validate(pump);
  const double floor = vg_floor_fraction * speed_of_light;
  if (v_g < floor) {
    std::ostringstream msg;
    msg << "gain_coefficient: v_g = " << v_g << " m/s below the slow-light floor " << floor
        << " m/s";
    throw BandEdgeError(msg.str());
  }
  return pump.omega_s * pump_amplitude(pump) * pump.chi2_tilde / v_g;
}

double required_group_velocity(const PumpSpec& pump, double zeta_target, double length) {
  validate(pump);
  if (!(zeta_target > 0.0))
    throw std::invalid_argument("required_group_velocity: zeta_target must be > 0");
  if (!(length > 0.0)) throw std::invalid_argument("required_group_velocity: length must be > 0");
  return pump.omega_s * pump_amplitude(pump) * pump.chi2_tilde * length / zeta_target;
}

double effective_length(double length, const bands::EnergyRatio& ratio) {
  if (!(length > 0.0)) throw std::invalid_argument("effective_length: length must be > 0");
  if (ratio.p_a < 0.0 || ratio.p_b < 0.0)
    throw std::invalid_argument("effective_length: ratio components must be >= 0");
  if (ratio.p_b == 0.0)
    throw DegenerateError("effective_length: no field energy in the nonlinear layer");
  return length * (ratio.p_a + ratio.p_b) / ratio.p_b;
}

double squeeze_db(double r) {
  if (r < 0.0) throw std::invalid_argument("squeeze_db: r must be >= 0");
  return 20.0 * r * std::log10(std::exp(1.0));
}

CalibrationReport calibrate(const PumpSpec& pump, double zeta_target, double length,
                            const bands::EnergyRatio& ratio) {
  CalibrationReport report;
  report.pump_amplitude = pump_amplitude(pump);
  report.required_vg = required_group_velocity(pump, zeta_target, length);
  report.gain_beta = gain_coefficient(pump, report.required_vg);
  report.zeta_roundtrip = report.gain_beta * length;
  report.energy_p_a = ratio.p_a;
  report.energy_p_b = ratio.p_b;
  report.effective_length = effective_length(length, ratio);
  report.squeeze_db = squeeze_db(zeta_target);
  return report;
}

}  // namespace heraldsim::calib
