// Command-line front end: reproduces the photon statistics, band
// structure, and calibration numbers as CSV artifacts.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "heraldsim/errors.hpp"
#include "heraldsim/runner.hpp"

namespace {

using heraldsim::cli::RunConfig;

struct OptionRefs {
  CLI::Option* r = nullptr;
  CLI::Option* alpha = nullptr;
  CLI::Option* eta = nullptr;
  CLI::Option* n_a = nullptr;
  CLI::Option* n_b = nullptr;
  CLI::Option* click_n = nullptr;
  CLI::Option* k_max = nullptr;
  CLI::Option* n_max = nullptr;
  CLI::Option* tail_tol = nullptr;
  CLI::Option* g2 = nullptr;
  CLI::Option* r_grid = nullptr;
  CLI::Option* alpha_grid = nullptr;
  CLI::Option* eta_grid = nullptr;
  CLI::Option* l_a = nullptr;
  CLI::Option* l_b = nullptr;
  CLI::Option* eps_a = nullptr;
  CLI::Option* eps_b = nullptr;
  CLI::Option* total_length = nullptr;
  CLI::Option* band = nullptr;
  CLI::Option* k = nullptr;
  CLI::Option* k_samples = nullptr;
  CLI::Option* n_bands = nullptr;
  CLI::Option* omega_ceiling = nullptr;
  CLI::Option* scan_points = nullptr;
  CLI::Option* flux = nullptr;
  CLI::Option* beam_radius = nullptr;
  CLI::Option* chi2 = nullptr;
  CLI::Option* refr_index = nullptr;
  CLI::Option* omega_s = nullptr;
  CLI::Option* theta = nullptr;
  CLI::Option* zeta = nullptr;
  CLI::Option* vg_ceiling = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* threads = nullptr;
};

struct RawValues {
  double r = 0, alpha = 0, eta = 1, tail_tol = 1e-8;
  int n_a = 1, n_b = 1, click_n = 1, k_max = 200, n_max = 0;
  bool g2 = false;
  std::string r_grid, alpha_grid, eta_grid;
  double l_a = 0, l_b = 0, eps_a = 1, eps_b = 1, total_length = 0;
  int band = 4, k_samples = 241, n_bands = 8, scan_points = 2000;
  double k = 0, omega_ceiling = 3.0;
  double flux = 0, beam_radius = 0, chi2 = 0, refr_index = 1, omega_s = 0, theta = 0;
  double zeta = 1.0, vg_ceiling = 0;
  std::string out;
  int threads = 0;
};

void add_options(CLI::App* cmd, RawValues& v, OptionRefs& o) {
  o.r = cmd->add_option("--r", v.r, "squeezing magnitude r");
  o.alpha = cmd->add_option("--alpha", v.alpha, "coherent amplitude alpha");
  o.eta = cmd->add_option("--eta", v.eta, "detector efficiency in [0,1]");
  o.n_a = cmd->add_option("--na", v.n_a, "photon count in mode a");
  o.n_b = cmd->add_option("--nb", v.n_b, "photon count in mode b");
  o.click_n = cmd->add_option("--click-n", v.click_n, "heralded photon count for P_click sweeps");
  o.k_max = cmd->add_option("--k-max", v.k_max, "heralding-photon sum cap");
  o.n_max = cmd->add_option("--n-max", v.n_max, "Fock cutoff (0 = automatic)");
  o.tail_tol = cmd->add_option("--tail-tol", v.tail_tol, "truncation-leakage tolerance");
  o.g2 = cmd->add_flag("--g2", v.g2, "report g2(0) instead of the distribution");
  o.r_grid = cmd->add_option("--r-grid", v.r_grid, "r sweep as start:stop:steps");
  o.alpha_grid = cmd->add_option("--alpha-grid", v.alpha_grid, "alpha sweep as start:stop:steps");
  o.eta_grid = cmd->add_option("--eta-grid", v.eta_grid, "eta sweep as start:stop:steps");
  o.l_a = cmd->add_option("--l-a", v.l_a, "layer A width (m)");
  o.l_b = cmd->add_option("--l-b", v.l_b, "layer B width (m)");
  o.eps_a = cmd->add_option("--eps-a", v.eps_a, "relative permittivity of layer A");
  o.eps_b = cmd->add_option("--eps-b", v.eps_b, "relative permittivity of layer B");
  o.total_length = cmd->add_option("--total-length", v.total_length, "crystal length (m)");
  o.band = cmd->add_option("--band", v.band, "band index (1 = lowest)");
  o.k = cmd->add_option("--k", v.k, "Bloch wavenumber as k*period");
  o.k_samples = cmd->add_option("--k-samples", v.k_samples, "k samples across the zone");
  o.n_bands = cmd->add_option("--n-bands", v.n_bands, "number of bands to solve");
  o.omega_ceiling = cmd->add_option("--omega-ceiling", v.omega_ceiling,
                                    "root-scan ceiling in units of 2 pi c / period");
  o.scan_points = cmd->add_option("--scan-points", v.scan_points, "omega scan resolution");
  o.flux = cmd->add_option("--flux", v.flux, "pump radiant flux (W)");
  o.beam_radius = cmd->add_option("--beam-radius", v.beam_radius, "pump beam radius (m)");
  o.chi2 = cmd->add_option("--chi2", v.chi2, "chi2/eps0 nonlinearity (m/V)");
  o.refr_index = cmd->add_option("--refr-index", v.refr_index, "refractive index for the pump intensity");
  o.omega_s = cmd->add_option("--omega-s", v.omega_s, "signal angular frequency (rad/s)");
  o.theta = cmd->add_option("--theta", v.theta, "pump phase (rad)");
  o.zeta = cmd->add_option("--zeta", v.zeta, "target squeezing parameter");
  o.vg_ceiling = cmd->add_option("--vg-ceiling", v.vg_ceiling,
                                 "window ceiling as v_g/c (0 = derive from calibration)");
  o.out = cmd->add_option("--out", v.out, "output CSV path");
  o.threads = cmd->add_option("--threads", v.threads, "worker threads (0 = auto)");
}

void merge(const RawValues& v, const OptionRefs& o, RunConfig& cfg) {
  auto set_d = [](CLI::Option* opt, double src, double& dst) {
    if (opt && opt->count()) dst = src;
  };
  auto set_i = [](CLI::Option* opt, int src, int& dst) {
    if (opt && opt->count()) dst = src;
  };
  set_d(o.r, v.r, cfg.r);
  set_d(o.alpha, v.alpha, cfg.alpha);
  set_d(o.eta, v.eta, cfg.eta);
  set_i(o.n_a, v.n_a, cfg.n_a);
  set_i(o.n_b, v.n_b, cfg.n_b);
  set_i(o.click_n, v.click_n, cfg.click_n);
  set_i(o.k_max, v.k_max, cfg.k_max);
  set_i(o.n_max, v.n_max, cfg.n_max);
  set_d(o.tail_tol, v.tail_tol, cfg.tail_tol);
  if (o.g2 && o.g2->count()) cfg.g2 = v.g2;
  if (o.r_grid && o.r_grid->count()) {
    cfg.r_grid = heraldsim::cli::parse_grid(v.r_grid);
    cfg.use_r_grid = true;
  }
  if (o.alpha_grid && o.alpha_grid->count()) {
    cfg.alpha_grid = heraldsim::cli::parse_grid(v.alpha_grid);
    cfg.use_alpha_grid = true;
  }
  if (o.eta_grid && o.eta_grid->count()) {
    cfg.eta_grid = heraldsim::cli::parse_grid(v.eta_grid);
    cfg.use_eta_grid = true;
  }
  set_d(o.l_a, v.l_a, cfg.crystal.l_a);
  set_d(o.l_b, v.l_b, cfg.crystal.l_b);
  set_d(o.eps_a, v.eps_a, cfg.crystal.eps_rel_a);
  set_d(o.eps_b, v.eps_b, cfg.crystal.eps_rel_b);
  set_d(o.total_length, v.total_length, cfg.crystal.total_length);
  set_i(o.band, v.band, cfg.band);
  if (o.k && o.k->count()) {
    cfg.k_period = v.k;
    cfg.use_k_point = true;
  }
  set_i(o.k_samples, v.k_samples, cfg.k_samples);
  set_i(o.n_bands, v.n_bands, cfg.n_bands);
  set_d(o.omega_ceiling, v.omega_ceiling, cfg.solve.omega_ceiling_u);
  set_i(o.scan_points, v.scan_points, cfg.solve.scan_points);
  set_d(o.flux, v.flux, cfg.pump.radiant_flux);
  set_d(o.beam_radius, v.beam_radius, cfg.pump.beam_radius);
  set_d(o.chi2, v.chi2, cfg.pump.chi2_tilde);
  set_d(o.refr_index, v.refr_index, cfg.pump.refr_index);
  set_d(o.omega_s, v.omega_s, cfg.pump.omega_s);
  set_d(o.theta, v.theta, cfg.pump.pump_phase);
  set_d(o.zeta, v.zeta, cfg.zeta);
  set_d(o.vg_ceiling, v.vg_ceiling, cfg.vg_ceiling_frac);
  if (o.out && o.out->count()) cfg.output_path = v.out;
  set_i(o.threads, v.threads, cfg.threads);
}

std::string recipes_footer() {
  std::string text = "Figure recipes (reproduce-figure <id>, default parameters from --preset paper):\n";
  for (const auto& [id, desc] : heraldsim::cli::figure_recipes())
    text += "  " + id + "  " + desc + "\n";
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heraldsim: photon statistics of a heralded single-photon source and the "
               "photonic-crystal band structure behind it"};
  app.set_version_flag("--version", heraldsim::cli::tool_version);
  app.require_subcommand(1);
  app.footer(recipes_footer());

  std::string config_path, preset_name, figure_id;

  struct Sub {
    CLI::App* cmd;
    RawValues values;
    OptionRefs refs;
    CLI::Option* config = nullptr;
    CLI::Option* preset = nullptr;
  };
  const std::vector<std::pair<std::string, std::string>> names = {
      {"herald-prob", "joint photon-count probabilities P(n_a, n_b)"},
      {"herald-g2", "g2(0) of the heralded mode (perfect or click detector)"},
      {"click", "click-detector photon distribution or g2(0)"},
      {"bands", "photonic-crystal band table or a single band point"},
      {"vg", "group velocity along one band"},
      {"energy-ratio", "field-energy split between the two layers"},
      {"calibrate", "pump amplitude, gain, effective length, frequency window"},
      {"reproduce-figure", "emit one of the predefined CSV recipes"}};
  std::vector<Sub> subs(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    subs[i].cmd = app.add_subcommand(names[i].first, names[i].second);
    add_options(subs[i].cmd, subs[i].values, subs[i].refs);
    subs[i].config = subs[i].cmd->add_option("--config", config_path, "JSON config file");
    subs[i].preset = subs[i].cmd->add_option("--preset", preset_name, "named parameter preset");
    if (names[i].first == "reproduce-figure")
      subs[i].cmd->add_option("figure", figure_id, "figure id, e.g. 4b")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    // --help/--version exit 0; anything else is a configuration problem
    const int code = app.exit(ex);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg;
    for (auto& sub : subs) {
      if (!sub.cmd->parsed()) continue;
      cfg.command = sub.cmd->get_name();
      // figure recipes are defined on the paper parameter set
      if (cfg.command == "reproduce-figure" && !sub.preset->count() && !sub.config->count())
        heraldsim::cli::apply_preset(cfg, "paper");
      if (sub.preset->count()) heraldsim::cli::apply_preset(cfg, preset_name);
      if (sub.config->count()) heraldsim::cli::apply_json_file(cfg, config_path);
      merge(sub.values, sub.refs, cfg);
      if (cfg.command == "reproduce-figure") cfg.figure = figure_id;
    }
    heraldsim::cli::run(cfg);
    return 0;
  } catch (const heraldsim::ConfigError& ex) {
    std::fprintf(stderr, "error type=ConfigError message=\"%s\"\n", ex.what());
    return 2;
  } catch (const heraldsim::SimError& ex) {
    std::fprintf(stderr, "error type=SimError message=\"%s\"\n", ex.what());
    return 3;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error type=Internal message=\"%s\"\n", ex.what());
    return 3;
  }
}
