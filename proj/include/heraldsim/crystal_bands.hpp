#ifndef HERALDSIM_CRYSTAL_BANDS_HPP
#define HERALDSIM_CRYSTAL_BANDS_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "heraldsim/errors.hpp"

namespace heraldsim::bands {

// Two-layer unit cell of the one-dimensional crystal.
struct CrystalSpec {
  double l_a = 0.0;        // m
  double l_b = 0.0;        // m
  double eps_rel_a = 1.0;  // eps_A / eps0
  double eps_rel_b = 1.0;  // eps_B / eps0
  double total_length = 0.0;  // m

  double period() const { return l_a + l_b; }
};

void validate(const CrystalSpec& spec);

struct BandPoint {
  double k = 0.0;      // 1/m, in [0, pi/period]
  double omega = 0.0;  // rad/s
  int band_index = 0;  // 1 = lowest
};

// Plane-wave coefficients of a Bloch mode: layer A spans [0, l_a] and the
// B coefficients are anchored at x = 0 with the B layer on [-l_b, 0].
struct BlochMode {
  double k_a = 0.0;  // layer wavenumber omega/c * sqrt(eps_rel_a), 1/m
  double k_b = 0.0;
  std::complex<double> c_a_plus, c_a_minus, c_b_plus, c_b_minus;
};

struct EnergyRatio {
  double p_a = 0.0;
  double p_b = 0.0;  // normalized: p_a + p_b = 1
};

struct SolveOptions {
  double omega_ceiling_u = 3.0;  // scan ceiling in units of 2 pi c / period
  int scan_points = 2000;
};

// F(k, omega) = cos(period k) - cos(l_a K_a) cos(l_b K_b)
//             + (K_a^2 + K_b^2) / (2 K_a K_b) sin(l_a K_a) sin(l_b K_b);
// zero exactly on the bands.  The omega = 0 limit is cos(period k) - 1.
double dispersion_residual(double k, double omega, const CrystalSpec& spec);
double dispersion_residual_domega(double k, double omega, const CrystalSpec& spec);
double dispersion_residual_dk(double k, double omega, const CrystalSpec& spec);

// Ascending roots of F(k, .) below the scan ceiling; throws RootCountError
// if fewer than n_bands are found.
std::vector<double> band_roots_at(const CrystalSpec& spec, double k, int n_bands,
                                  const SolveOptions& options = {});

// bands[b][i]: band b+1 sampled on a uniform k grid over [0, pi/period].
std::vector<std::vector<BandPoint>> solve_bands(const CrystalSpec& spec, int k_samples,
                                                int n_bands, const SolveOptions& options = {});

// |d omega / d k| by implicit differentiation of F.
double group_velocity(const CrystalSpec& spec, const BandPoint& point);

// Boundary-condition matrix of the Bloch mode; rows expressing derivative
// continuity are scaled by the period so all entries are O(1).
Eigen::Matrix4cd bloch_matrix(const CrystalSpec& spec, double k, double omega);

// Unit-norm null vector of the boundary matrix, global phase fixed by
// making c_a_plus real and nonnegative.
BlochMode bloch_coefficients(const CrystalSpec& spec, const BandPoint& point);

// Time-averaged field energy per layer, normalized to p_a + p_b = 1.
// Fixed 64-point Gauss-Legendre per layer, checked against 128 points.
EnergyRatio energy_ratio(const CrystalSpec& spec, const BlochMode& mode, double omega);

struct FrequencyWindow {
  double k_lo = 0.0;        // 1/m (always 0)
  double k_hi = 0.0;        // 1/m
  double delta_omega = 0.0; // rad/s
  double delta_nu = 0.0;    // Hz
};

// Maximal interval [0, k_hi] on the given band where the group velocity
// stays at or below vg_ceiling, and the omega span across it.  The far
// zone edge (where v_g drops to zero again) is not considered.
FrequencyWindow frequency_window(const CrystalSpec& spec, int band_index, double vg_ceiling,
                                 const SolveOptions& options = {});

}  // namespace heraldsim::bands

#endif
