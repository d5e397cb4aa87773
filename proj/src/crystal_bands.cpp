#include "heraldsim/crystal_bands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "heraldsim/constants.hpp"

namespace heraldsim::bands {

namespace {

using constants::pi;
using constants::speed_of_light;

struct LayerWavenumbers {
  double k_a, k_b;
};

LayerWavenumbers layer_wavenumbers(double omega, const CrystalSpec& spec) {
  const double c = speed_of_light;
  return {omega / c * std::sqrt(spec.eps_rel_a), omega / c * std::sqrt(spec.eps_rel_b)};
}

}  // namespace

void validate(const CrystalSpec& spec) {
  if (!(spec.l_a > 0.0) || !(spec.l_b > 0.0))
    throw std::invalid_argument("CrystalSpec: layer widths must be > 0");
  if (!(spec.eps_rel_a > 0.0) || !(spec.eps_rel_b > 0.0))
    throw std::invalid_argument("CrystalSpec: relative permittivities must be > 0");
  if (!(spec.total_length > 0.0))
    throw std::invalid_argument("CrystalSpec: total_length must be > 0");
}

double dispersion_residual(double k, double omega, const CrystalSpec& spec) {
  if (k < 0.0 || omega < 0.0)
    throw std::invalid_argument("dispersion_residual: k and omega must be >= 0");
  const double period = spec.period();
  if (omega == 0.0) return std::cos(period * k) - 1.0;  // continuity limit

  const auto [ka, kb] = layer_wavenumbers(omega, spec);
  const double g = (ka * ka + kb * kb) / (2.0 * ka * kb);
  return std::cos(period * k) - std::cos(spec.l_a * ka) * std::cos(spec.l_b * kb) +
         g * std::sin(spec.l_a * ka) * std::sin(spec.l_b * kb);
}

double dispersion_residual_domega(double k, double omega, const CrystalSpec& spec) {
  (void)k;
  const double c = speed_of_light;
  const double aa = std::sqrt(spec.eps_rel_a) / c;  // dK_a/domega
  const double ab = std::sqrt(spec.eps_rel_b) / c;
  const double ka = omega * aa, kb = omega * ab;
  const double sa = std::sin(spec.l_a * ka), ca = std::cos(spec.l_a * ka);
  const double sb = std::sin(spec.l_b * kb), cb = std::cos(spec.l_b * kb);
  // g = (K_a^2 + K_b^2)/(2 K_a K_b) is omega-independent.
  const double g = (aa * aa + ab * ab) / (2.0 * aa * ab);
  return spec.l_a * aa * sa * cb + spec.l_b * ab * ca * sb +
         g * (spec.l_a * aa * ca * sb + spec.l_b * ab * sa * cb);
}

double dispersion_residual_dk(double k, double omega, const CrystalSpec& spec) {
  (void)omega;
  const double period = spec.period();
  return -period * std::sin(period * k);
}

namespace {

// Bisection + Newton polish of a bracketed root of F(k, .).
double polish_root(const CrystalSpec& spec, double k, double lo, double hi) {
  double flo = dispersion_residual(k, lo, spec);
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = dispersion_residual(k, mid, spec);
    if ((flo <= 0.0) == (fmid <= 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-9 * std::max(1.0, std::abs(hi))) break;
  }
  double w = 0.5 * (lo + hi);
  for (int it = 0; it < 12; ++it) {
    const double f = dispersion_residual(k, w, spec);
    const double df = dispersion_residual_domega(k, w, spec);
    if (df == 0.0) break;
    const double next = w - f / df;
    if (next < lo || next > hi) break;  // keep the bisection bracket
    if (next == w) break;
    w = next;
  }
  return w;
}

}  // namespace

std::vector<double> band_roots_at(const CrystalSpec& spec, double k, int n_bands,
                                  const SolveOptions& options) {
  validate(spec);
  if (n_bands < 1) throw std::invalid_argument("band_roots_at: n_bands must be >= 1");
  if (options.scan_points < 16)
    throw std::invalid_argument("band_roots_at: scan_points too small");
  const double period = spec.period();
  if (k < 0.0 || k > pi / period + 1e-12)
    throw std::invalid_argument("band_roots_at: k outside the first Brillouin zone");

  const double omega_max = options.omega_ceiling_u * 2.0 * pi * speed_of_light / period;
  std::vector<double> roots;

  // At k = 0 the acoustic band starts exactly at omega = 0 as a tangent
  // root that a sign scan cannot bracket.
  if (k == 0.0) roots.push_back(0.0);

  const int n = options.scan_points;
  double prev_omega = 0.0;
  double prev_f = dispersion_residual(k, 0.0, spec);
  for (int i = 1; i <= n; ++i) {
    const double omega = omega_max * i / n;
    const double f = dispersion_residual(k, omega, spec);
    if (f == 0.0) {
      roots.push_back(omega);
    } else if ((prev_f < 0.0 && f > 0.0) || (prev_f > 0.0 && f < 0.0)) {
      const double w = polish_root(spec, k, prev_omega, omega);
      if (std::abs(dispersion_residual(k, w, spec)) > 1e-10) {
        std::ostringstream msg;
        msg << "band_roots_at: polished root residual "
            << std::abs(dispersion_residual(k, w, spec)) << " at k*period = " << k * period;
        throw ConvergenceError(msg.str());
      }
      roots.push_back(w);
    }
    prev_omega = omega;
    prev_f = f;
  }

  if (static_cast<int>(roots.size()) < n_bands) {
    std::ostringstream msg;
    msg << "band_roots_at: found " << roots.size() << " bands below the scan ceiling, need "
        << n_bands;
    throw RootCountError(msg.str());
  }
  roots.resize(n_bands);
  return roots;
}

std::vector<std::vector<BandPoint>> solve_bands(const CrystalSpec& spec, int k_samples,
                                                int n_bands, const SolveOptions& options) {
  validate(spec);
  if (k_samples < 2) throw std::invalid_argument("solve_bands: k_samples must be >= 2");
  if (n_bands < 1) throw std::invalid_argument("solve_bands: n_bands must be >= 1");

  const double k_edge = pi / spec.period();
  std::vector<std::vector<BandPoint>> bands(n_bands);
  for (auto& b : bands) b.reserve(k_samples);

  for (int i = 0; i < k_samples; ++i) {
    const double k = k_edge * i / (k_samples - 1);
    const std::vector<double> roots = band_roots_at(spec, k, n_bands, options);
    for (int b = 0; b < n_bands; ++b) bands[b].push_back(BandPoint{k, roots[b], b + 1});
  }
  return bands;
}

double group_velocity(const CrystalSpec& spec, const BandPoint& point) {
  validate(spec);
  const double f_omega = dispersion_residual_domega(point.k, point.omega, spec);
  // Express the derivative in the dimensionless residual-per-u scale to
  // judge degeneracy independent of units.
  const double scale = 2.0 * pi * speed_of_light / spec.period();
  if (std::abs(f_omega * scale) < 1e-10)
    throw BandEdgeError("group_velocity: dF/domega vanishes (flat-band point)");
  const double f_k = dispersion_residual_dk(point.k, point.omega, spec);
  return std::abs(f_k / f_omega);
}

Eigen::Matrix4cd bloch_matrix(const CrystalSpec& spec, double k, double omega) {
  using C = std::complex<double>;
  const auto [ka, kb] = layer_wavenumbers(omega, spec);
  const double period = spec.period();
  const C p = std::polar(1.0, ka * spec.l_a);
  const C q = std::polar(1.0, k * period);
  const C r = std::polar(1.0, kb * spec.l_b);
  // Derivative rows multiplied by the period to keep all entries O(1).
  const double sa = ka * period, sb = kb * period;

  Eigen::Matrix4cd m;
  m << C(1), C(1), C(-1), C(-1),
       C(sa), C(-sa), C(-sb), C(sb),
       p, 1.0 / p, -q / r, -q * r,
       sa * p, -sa / p, -sb * q / r, sb * q * r;
  return m;
}

BlochMode bloch_coefficients(const CrystalSpec& spec, const BandPoint& point) {
  validate(spec);
  const Eigen::Matrix4cd m = bloch_matrix(spec, point.k, point.omega);
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double norm = sv[0];

  if (sv[3] > 1e-8 * norm) {
    std::ostringstream msg;
    msg << "bloch_coefficients: point is not on a band (sigma_min/|M| = " << sv[3] / norm << ")";
    throw ConvergenceError(msg.str());
  }
  if (sv[2] <= 1e-8 * norm)
    throw DegenerateNullspaceError(
        "bloch_coefficients: two-dimensional null space (band crossing); perturb k");

  Eigen::Vector4cd v = svd.matrixV().col(3);
  // Global phase: make c_a_plus real and nonnegative (fall back to the
  // largest entry if c_a_plus happens to vanish).
  std::complex<double> anchor = v[0];
  if (std::abs(anchor) < 1e-12) {
    int imax = 0;
    for (int i = 1; i < 4; ++i)
      if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
    anchor = v[imax];
  }
  v *= std::polar(1.0, -std::arg(anchor));
  v.normalize();

  const double residual = (m * v).norm();
  if (residual > 1e-8) {
    std::ostringstream msg;
    msg << "bloch_coefficients: null-vector residual " << residual << " exceeds 1e-8";
    throw ConvergenceError(msg.str());
  }

  const auto [ka, kb] = layer_wavenumbers(point.omega, spec);
  BlochMode mode;
  mode.k_a = ka;
  mode.k_b = kb;
  mode.c_a_plus = v[0];
  mode.c_a_minus = v[1];
  mode.c_b_plus = v[2];
  mode.c_b_minus = v[3];
  return mode;
}

namespace {

// Nodes/weights of n-point Gauss-Legendre on [-1, 1] by Newton iteration
// on the Legendre recurrence.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

// Time-averaged electromagnetic energy in one layer.  The density is
// (K^2/omega^2) (|E|^2 + |C+ e^{iKx} - C- e^{-iKx}|^2) / 2 with
// E = C+ e^{iKx} + C- e^{-iKx}.
double layer_energy(std::complex<double> cp, std::complex<double> cm, double kj, double omega,
                    double x0, double x1, int n_points) {
  std::vector<double> x, w;
  gauss_legendre(n_points, x, w);
  const double half = 0.5 * (x1 - x0);
  const double mid = 0.5 * (x1 + x0);
  double acc = 0.0;
  for (int i = 0; i < n_points; ++i) {
    const double xx = mid + half * x[i];
    const std::complex<double> ep = std::polar(1.0, kj * xx);
    const std::complex<double> efield = cp * ep + cm / ep;
    const std::complex<double> bfield = cp * ep - cm / ep;
    acc += w[i] * 0.5 * (std::norm(efield) + std::norm(bfield));
  }
  return acc * half * (kj * kj) / (omega * omega);
}

}  // namespace

EnergyRatio energy_ratio(const CrystalSpec& spec, const BlochMode& mode, double omega) {
  validate(spec);
  if (!(omega > 0.0)) throw std::invalid_argument("energy_ratio: omega must be > 0");

  auto ratio_at = [&](int n_points) {
    const double ea = layer_energy(mode.c_a_plus, mode.c_a_minus, mode.k_a, omega, 0.0,
                                   spec.l_a, n_points);
    // B coefficients are anchored at x = 0; the B layer sits on [-l_b, 0].
    const double eb = layer_energy(mode.c_b_plus, mode.c_b_minus, mode.k_b, omega, -spec.l_b,
                                   0.0, n_points);
    return std::pair<double, double>(ea, eb);
  };

  const auto [ea64, eb64] = ratio_at(64);
  const auto [ea128, eb128] = ratio_at(128);
  const double total64 = ea64 + eb64;
  const double total128 = ea128 + eb128;
  if (!(total64 > 0.0)) throw DegenerateError("energy_ratio: zero total energy");

  const double frac64 = eb64 / total64;
  const double frac128 = eb128 / total128;
  if (std::abs(frac64 - frac128) > 1e-9 * std::max(frac64, 1e-300)) {
    std::ostringstream msg;
    msg << "energy_ratio: quadrature refinement moved the ratio by "
        << std::abs(frac64 - frac128);
    throw QuadratureError(msg.str());
  }

  EnergyRatio ratio;
  ratio.p_a = ea64 / total64;
  ratio.p_b = eb64 / total64;
  return ratio;
}

namespace {

// Track a band through small k steps with Newton in omega, re-scanning on
// failure.
double track_root(const CrystalSpec& spec, double k, double omega_guess, int band_index,
                  const SolveOptions& options) {
  double w = omega_guess;
  for (int it = 0; it < 40; ++it) {
    const double f = dispersion_residual(k, w, spec);
    const double df = dispersion_residual_domega(k, w, spec);
    if (df == 0.0) break;
    const double next = w - f / df;
    if (!(next > 0.0) || std::abs(next - omega_guess) > 0.1 * omega_guess + 1.0) break;
    if (next == w) return w;
    w = next;
  }
  if (std::abs(dispersion_residual(k, w, spec)) <= 1e-10) return w;
  return band_roots_at(spec, k, band_index, options)[band_index - 1];
}

}  // namespace

FrequencyWindow frequency_window(const CrystalSpec& spec, int band_index, double vg_ceiling,
                                 const SolveOptions& options) {
  validate(spec);
  if (band_index < 1) throw std::invalid_argument("frequency_window: band_index must be >= 1");
  if (vg_ceiling < 0.0)
    throw std::invalid_argument("frequency_window: vg_ceiling must be >= 0");

  const double k_edge = pi / spec.period();
  const double omega0 = band_roots_at(spec, 0.0, band_index, options)[band_index - 1];

  const int n_steps = 4096;

  double k_prev = 0.0;
  double omega_prev = omega0;
  double k_hi = k_edge;
  double omega_hi = 0.0;
  bool exceeded = false;

  for (int i = 1; i <= n_steps; ++i) {
    const double k = k_edge * i / n_steps;
    const double omega = track_root(spec, k, omega_prev, band_index, options);
    const double vg = group_velocity(spec, BandPoint{k, omega, band_index});
    if (vg > vg_ceiling) {
      if (i == 1)
        throw EmptyWindowError("frequency_window: ceiling exceeded at the first interior sample");
      // Bisect the crossing between k_prev and k.
      double lo = k_prev, hi = k, omega_lo = omega_prev;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double omega_mid = track_root(spec, mid, omega_lo, band_index, options);
        const double vg_mid = group_velocity(spec, BandPoint{mid, omega_mid, band_index});
        if (vg_mid <= vg_ceiling) {
          lo = mid;
          omega_lo = omega_mid;
        } else {
          hi = mid;
        }
      }
      k_hi = lo;
      omega_hi = track_root(spec, k_hi, omega_lo, band_index, options);
      exceeded = true;
      break;
    }
    k_prev = k;
    omega_prev = omega;
  }

  if (!exceeded) {
    k_hi = k_edge;
    omega_hi = omega_prev;
  }

  FrequencyWindow win;
  win.k_lo = 0.0;
  win.k_hi = k_hi;
  win.delta_omega = std::abs(omega0 - omega_hi);
  win.delta_nu = win.delta_omega / (2.0 * pi);
  return win;
}

}  // namespace heraldsim::bands
