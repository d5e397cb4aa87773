#include "heraldsim/runner.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "heraldsim/constants.hpp"
#include "heraldsim/csv_writer.hpp"
#include "heraldsim/errors.hpp"

namespace heraldsim::cli {

namespace {

using constants::pi;
using constants::speed_of_light;

int resolve_threads(const RunConfig& config) {
  if (config.threads > 0) return config.threads;
  if (const char* env = std::getenv("HERALD_SIM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return 0;  // modules pick hardware concurrency
}

source::SourceParams source_params(const RunConfig& c) {
  source::SourceParams p;
  p.alpha = c.alpha;
  p.r = c.r;
  p.eta = c.eta;
  p.k_max = c.k_max;
  p.cutoff.n_max = c.n_max;
  p.cutoff.tail_tol = c.tail_tol;
  return p;
}

source::GridAxis fixed_axis(double v) { return source::GridAxis{v, v, 1}; }

std::string flag(bool b) { return b ? "1" : "0"; }

void write_metadata(CsvWriter& csv, const RunConfig& c) {
  csv.comment(std::string("heraldsim ") + tool_version + " command=" + c.command +
              (c.figure.empty() ? "" : " figure=" + c.figure) +
              (c.preset_name.empty() ? "" : " preset=" + c.preset_name));
  std::ostringstream p;
  p << "params: r=" << format_sci(c.r) << " alpha=" << format_sci(c.alpha)
    << " eta=" << format_sci(c.eta) << " na=" << c.n_a << " nb=" << c.n_b
    << " click-n=" << c.click_n << " k-max=" << c.k_max << " n-max=" << c.n_max
    << " tail-tol=" << format_sci(c.tail_tol) << " g2=" << flag(c.g2)
    << " l-a=" << format_sci(c.crystal.l_a) << " l-b=" << format_sci(c.crystal.l_b)
    << " eps-a=" << format_sci(c.crystal.eps_rel_a) << " eps-b=" << format_sci(c.crystal.eps_rel_b)
    << " total-length=" << format_sci(c.crystal.total_length) << " band=" << c.band
    << " k=" << format_sci(c.k_period) << " k-samples=" << c.k_samples
    << " n-bands=" << c.n_bands << " omega-ceiling=" << format_sci(c.solve.omega_ceiling_u)
    << " scan-points=" << c.solve.scan_points << " flux=" << format_sci(c.pump.radiant_flux)
    << " beam-radius=" << format_sci(c.pump.beam_radius)
    << " chi2=" << format_sci(c.pump.chi2_tilde)
    << " refr-index=" << format_sci(c.pump.refr_index)
    << " omega-s=" << format_sci(c.pump.omega_s) << " zeta=" << format_sci(c.zeta)
    << " vg-ceiling=" << format_sci(c.vg_ceiling_frac);
  csv.comment(p.str());
}

void write_sweep(CsvWriter& csv, const std::vector<source::SweepCell>& cells,
                 const std::string& second_name, bool with_log10) {
  std::vector<std::string> head = {"r", second_name, "value", "leakage", "error"};
  if (with_log10) head.insert(head.begin() + 3, "log10_value");
  csv.header(head);
  for (const auto& cell : cells) {
    std::vector<std::string> row = {format_sci(cell.r), format_sci(cell.second),
                                    format_sci(cell.value), format_sci(cell.leakage),
                                    cell.error};
    if (with_log10)
      row.insert(row.begin() + 3,
                 format_sci(cell.value > 0.0 ? std::log10(cell.value)
                                             : std::numeric_limits<double>::quiet_NaN()));
    csv.row(row);
  }
}

// ---------------------------------------------------------------------
// photon-statistics commands
// ---------------------------------------------------------------------

void run_herald_prob(const RunConfig& c, const std::string& out) {
  CsvWriter csv(out);
  write_metadata(csv, c);
  if (c.use_r_grid || c.use_alpha_grid) {
    if (c.n_a != 1 || c.n_b != 1)
      throw ConfigError("herald-prob sweeps cover P(1,1); drop --na/--nb or the grids");
    const auto cells = source::sweep_grid(
        source::SweepQuantity::p11, c.use_r_grid ? c.r_grid : fixed_axis(c.r),
        c.use_alpha_grid ? c.alpha_grid : fixed_axis(c.alpha), source_params(c), c.click_n,
        resolve_threads(c));
    write_sweep(csv, cells, "alpha", false);
  } else {
    csv.header({"na", "nb", "r", "alpha", "value"});
    const double v = source::joint_probability(c.n_a, c.n_b, source_params(c));
    csv.row({std::to_string(c.n_a), std::to_string(c.n_b), format_sci(c.r),
             format_sci(c.alpha), format_sci(v)});
  }
  csv.close();
}

void run_herald_g2(const RunConfig& c, const std::string& out) {
  CsvWriter csv(out);
  write_metadata(csv, c);
  if (c.use_r_grid || c.use_alpha_grid || c.use_eta_grid) {
    const bool click = c.use_eta_grid || c.eta < 1.0;
    const auto quantity = click ? source::SweepQuantity::g2_click
                                : source::SweepQuantity::g2_perfect;
    const auto second = click ? (c.use_eta_grid ? c.eta_grid : fixed_axis(c.eta))
                              : (c.use_alpha_grid ? c.alpha_grid : fixed_axis(c.alpha));
    const auto cells =
        source::sweep_grid(quantity, c.use_r_grid ? c.r_grid : fixed_axis(c.r), second,
                           source_params(c), c.click_n, resolve_threads(c));
    write_sweep(csv, cells, click ? "eta" : "alpha", false);
  } else {
    csv.header({"r", "alpha", "eta", "value"});
    const source::SourceParams p = source_params(c);
    const double v = (c.eta == 1.0) ? source::g2_perfect(p) : source::g2_click(p);
    csv.row({format_sci(c.r), format_sci(c.alpha), format_sci(c.eta), format_sci(v)});
  }
  csv.close();
}

void run_click(const RunConfig& c, const std::string& out) {
  CsvWriter csv(out);
  write_metadata(csv, c);
  if (c.use_r_grid || c.use_eta_grid) {
    const auto quantity =
        c.g2 ? source::SweepQuantity::g2_click : source::SweepQuantity::pclick_n;
    const auto cells = source::sweep_grid(
        quantity, c.use_r_grid ? c.r_grid : fixed_axis(c.r),
        c.use_eta_grid ? c.eta_grid : fixed_axis(c.eta), source_params(c), c.click_n,
        resolve_threads(c));
    write_sweep(csv, cells, "eta", false);
  } else if (c.g2) {
    csv.header({"r", "alpha", "eta", "value"});
    csv.row({format_sci(c.r), format_sci(c.alpha), format_sci(c.eta),
             format_sci(source::g2_click(source_params(c)))});
  } else {
    const source::CountDistribution dist = source::click_distribution(source_params(c));
    csv.comment("leakage = " + format_sci(dist.leakage));
    csv.header({"n", "p"});
    for (std::size_t n = 0; n < dist.p.size(); ++n)
      csv.row({std::to_string(n), format_sci(dist.p[n])});
  }
  csv.close();
}

// ---------------------------------------------------------------------
// crystal commands
// ---------------------------------------------------------------------

void band_table_rows(CsvWriter& csv, const RunConfig& c, int first_band, int last_band) {
  const auto bands_tbl = bands::solve_bands(c.crystal, c.k_samples, last_band, c.solve);
  const double period = c.crystal.period();
  const double u_scale = period / (2.0 * pi * speed_of_light);
  csv.header({"band_index", "k_period", "omega_u", "vg_over_c"});
  for (int b = first_band - 1; b < last_band; ++b) {
    for (const auto& point : bands_tbl[b]) {
      // the acoustic band's (0, 0) corner has no implicit-form derivative
      double vg = std::numeric_limits<double>::quiet_NaN();
      try {
        vg = bands::group_velocity(c.crystal, point) / speed_of_light;
      } catch (const BandEdgeError&) {
      }
      csv.row({std::to_string(point.band_index), format_sci(point.k * period),
               format_sci(point.omega * u_scale), format_sci(vg)});
    }
  }
}

bands::BandPoint solve_point(const RunConfig& c) {
  const double k = c.k_period / c.crystal.period();
  const auto roots = bands::band_roots_at(c.crystal, k, c.band, c.solve);
  return bands::BandPoint{k, roots[c.band - 1], c.band};
}

// Mode coefficients at a band point; a crossing at the requested k is
// sidestepped by re-solving a hair into the zone.
bands::BlochMode mode_at(const RunConfig& c, bands::BandPoint& point) {
  try {
    return bands::bloch_coefficients(c.crystal, point);
  } catch (const DegenerateNullspaceError&) {
    RunConfig nudged = c;
    nudged.k_period = std::max(c.k_period, 1e-6 * pi);
    point = solve_point(nudged);
    return bands::bloch_coefficients(nudged.crystal, point);
  }
}

void run_bands(const RunConfig& c, const std::string& out) {
  CsvWriter csv(out);
  write_metadata(csv, c);
  if (c.use_k_point) {
    const auto point = solve_point(c);
    const double u_scale = c.crystal.period() / (2.0 * pi * speed_of_light);
    csv.header({"band_index", "k_period", "omega_u", "vg_over_c"});
    csv.row({std::to_string(point.band_index), format_sci(c.k_period),
             format_sci(point.omega * u_scale),
             format_sci(bands::group_velocity(c.crystal, point) / speed_of_light)});
  } else {
    band_table_rows(csv, c, 1, c.n_bands);
  }
  csv.close();
}

void run_vg(const RunConfig& c, const std::string& out) {
  if (c.use_k_point) {
    run_bands(c, out);  // same single-point row shape
    return;
  }
  CsvWriter csv(out);
  write_metadata(csv, c);
  band_table_rows(csv, c, c.band, c.band);
  csv.close();
}

void run_energy_ratio(const RunConfig& c, const std::string& out) {
  CsvWriter csv(out);
  write_metadata(csv, c);
  bands::BandPoint point = solve_point(c);
  const auto mode = mode_at(c, point);
  const auto ratio = bands::energy_ratio(c.crystal, mode, point.omega);
  const double u_scale = c.crystal.period() / (2.0 * pi * speed_of_light);
  csv.header({"band_index", "k_period", "omega_u", "p_a", "p_b"});
  csv.row({std::to_string(c.band), format_sci(point.k * c.crystal.period()),
           format_sci(point.omega * u_scale), format_sci(ratio.p_a), format_sci(ratio.p_b)});
  csv.close();
}

void run_calibrate(const RunConfig& c, const std::string& out) {
  bands::BandPoint point = solve_point(c);
  const auto mode = mode_at(c, point);
  const auto ratio = bands::energy_ratio(c.crystal, mode, point.omega);
  const auto report =
      calib::calibrate(c.pump, c.zeta, c.crystal.total_length, ratio);

  const double ceiling = c.vg_ceiling_frac > 0.0 ? c.vg_ceiling_frac * speed_of_light
                                                 : report.required_vg;
  const auto window = bands::frequency_window(c.crystal, c.band, ceiling, c.solve);

  CsvWriter csv(out);
  write_metadata(csv, c);
  csv.header({"quantity", "value", "unit"});
  auto put = [&](const std::string& name, double v, const std::string& unit) {
    csv.row({name, format_sci(v), unit});
  };
  put("pump_amplitude", report.pump_amplitude, "V/m");
  put("required_vg", report.required_vg, "m/s");
  put("required_vg_over_c", report.required_vg / speed_of_light, "1");
  put("gain_beta", report.gain_beta, "1/m");
  put("zeta_roundtrip", report.zeta_roundtrip, "1");
  put("energy_p_a", report.energy_p_a, "1");
  put("energy_p_b", report.energy_p_b, "1");
  put("effective_length", report.effective_length, "m");
  put("squeeze_db", report.squeeze_db, "dB");
  put("window_k_period", window.k_hi * c.crystal.period(), "1");
  put("window_delta_omega", window.delta_omega, "rad/s");
  put("window_delta_nu", window.delta_nu, "Hz");
  csv.close();
}

// ---------------------------------------------------------------------
// figure recipes
// ---------------------------------------------------------------------

source::GridAxis grid_or(const RunConfig& c, bool use, const source::GridAxis& given,
                         const source::GridAxis& fallback) {
  (void)c;
  return use ? given : fallback;
}

void run_figure(const RunConfig& c, const std::string& out) {
  const int threads = resolve_threads(c);
  const std::string& id = c.figure;

  if (id == "7a" || id == "7b") {
    CsvWriter csv(out);
    write_metadata(csv, c);
    if (id == "7a") {
      band_table_rows(csv, c, 1, c.n_bands);
    } else {
      band_table_rows(csv, c, 4, 4);
    }
    csv.close();
    return;
  }

  source::SourceParams p = source_params(c);
  const source::GridAxis default_r{0.0, 1.5, 76};
  const source::GridAxis default_alpha{0.0, 1.5, 76};
  const source::GridAxis default_eta{0.1, 1.0, 46};

  CsvWriter csv(out);
  write_metadata(csv, c);

  if (id == "3a" || id == "3b") {
    const auto cells = source::sweep_grid(
        id == "3a" ? source::SweepQuantity::p11 : source::SweepQuantity::g2_perfect,
        grid_or(c, c.use_r_grid, c.r_grid, default_r),
        grid_or(c, c.use_alpha_grid, c.alpha_grid, default_alpha), p, c.click_n, threads);
    write_sweep(csv, cells, "alpha", id == "3b");
  } else if (id == "4a" || id == "4b") {
    const auto cells = source::sweep_grid(
        id == "4a" ? source::SweepQuantity::p11 : source::SweepQuantity::g2_perfect,
        grid_or(c, c.use_r_grid, c.r_grid, source::GridAxis{0.0, 1.5, 301}),
        fixed_axis(c.alpha), p, c.click_n, threads);
    write_sweep(csv, cells, "alpha", false);
  } else if (id == "5a" || id == "5b" || id == "5c" || id == "5d") {
    const int n = id[1] - 'a';  // 5a -> n=0 ... 5d -> n=3
    const auto cells = source::sweep_grid(
        source::SweepQuantity::pclick_n, grid_or(c, c.use_r_grid, c.r_grid, default_r),
        grid_or(c, c.use_eta_grid, c.eta_grid, default_eta), p, n, threads);
    write_sweep(csv, cells, "eta", false);
  } else if (id == "6a") {
    const auto cells = source::sweep_grid(
        source::SweepQuantity::g2_click,
        grid_or(c, c.use_r_grid, c.r_grid, source::GridAxis{0.0, 1.5, 51}),
        grid_or(c, c.use_eta_grid, c.eta_grid, default_eta), p, c.click_n, threads);
    write_sweep(csv, cells, "eta", true);
  } else if (id == "6b") {
    std::vector<source::SweepCell> cells;
    for (double eta : {1.0, 0.85, 0.7}) {
      const auto part = source::sweep_grid(
          source::SweepQuantity::g2_click,
          grid_or(c, c.use_r_grid, c.r_grid, source::GridAxis{0.0, 1.5, 151}),
          fixed_axis(eta), p, c.click_n, threads);
      cells.insert(cells.end(), part.begin(), part.end());
    }
    write_sweep(csv, cells, "eta", true);
  } else {
    throw ConfigError("unknown figure id '" + id + "'");
  }
  csv.close();
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& figure_recipes() {
  static const std::vector<std::pair<std::string, std::string>> recipes = {
      {"3a", "P(1,1) over r in [0,1.5] x alpha in [0,1.5] (perfect herald)"},
      {"3b", "g2(0) over the same r x alpha grid, with log10_value column"},
      {"4a", "P(1,1) vs r at alpha = 0.06"},
      {"4b", "g2(0) vs r at alpha = 0.06"},
      {"5a", "P_click(0) over r x eta at alpha = 0.06"},
      {"5b", "P_click(1) over r x eta at alpha = 0.06"},
      {"5c", "P_click(2) over r x eta at alpha = 0.06"},
      {"5d", "P_click(3) over r x eta at alpha = 0.06"},
      {"6a", "g2(0) with click detector over r x eta at alpha = 0.06, log10 column"},
      {"6b", "g2(0) with click detector vs r at eta = 1.0, 0.85, 0.7, log10 column"},
      {"7a", "band structure: band_index, k*period, omega*period/(2 pi c), v_g/c"},
      {"7b", "group velocity of band 4 across the zone"},
  };
  return recipes;
}

std::string default_output_path(const RunConfig& config) {
  if (!config.output_path.empty()) return config.output_path;
  if (config.command == "reproduce-figure") return "fig" + config.figure + ".csv";
  return config.command + ".csv";
}

void run(const RunConfig& config) {
  validate(config);
  const std::string out = default_output_path(config);

  if (config.command == "herald-prob") run_herald_prob(config, out);
  else if (config.command == "herald-g2") run_herald_g2(config, out);
  else if (config.command == "click") run_click(config, out);
  else if (config.command == "bands") run_bands(config, out);
  else if (config.command == "vg") run_vg(config, out);
  else if (config.command == "energy-ratio") run_energy_ratio(config, out);
  else if (config.command == "calibrate") run_calibrate(config, out);
  else if (config.command == "reproduce-figure") run_figure(config, out);
  else throw ConfigError("unknown command '" + config.command + "'");
}

}  // namespace heraldsim::cli
