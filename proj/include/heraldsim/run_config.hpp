#ifndef HERALDSIM_RUN_CONFIG_HPP
#define HERALDSIM_RUN_CONFIG_HPP

#include <string>

#include "heraldsim/calibration.hpp"
#include "heraldsim/crystal_bands.hpp"
#include "heraldsim/heralded_source.hpp"

namespace heraldsim::cli {

// Flat parameter bundle shared by every subcommand.  Values come from, in
// increasing precedence: built-in defaults, a named preset, a JSON config
// file, command-line flags.
struct RunConfig {
  std::string command;
  std::string output_path;  // empty selects a per-command default
  std::string preset_name;
  std::string figure;       // reproduce-figure id

  // photon statistics
  double r = 0.0;
  double alpha = 0.0;
  double eta = 1.0;
  int n_a = 1;
  int n_b = 1;
  int click_n = 1;
  int k_max = 200;
  int n_max = 0;  // 0 = pick from r
  double tail_tol = 1e-8;
  bool g2 = false;  // `click --g2`
  source::GridAxis r_grid;
  source::GridAxis alpha_grid;
  source::GridAxis eta_grid;
  bool use_r_grid = false;
  bool use_alpha_grid = false;
  bool use_eta_grid = false;

  // crystal
  bands::CrystalSpec crystal{0.0, 0.0, 1.0, 1.0, 0.0};
  int band = 4;
  double k_period = 0.0;  // dimensionless k * period
  bool use_k_point = false;  // set when k was given explicitly
  int k_samples = 241;
  int n_bands = 8;
  bands::SolveOptions solve;

  // pump / calibration
  calib::PumpSpec pump;
  double zeta = 1.0;
  double vg_ceiling_frac = 0.0;  // window ceiling as v_g/c; 0 = derive from calibration

  int threads = 0;  // 0 = HERALD_SIM_THREADS or hardware concurrency
};

// The paper-style concrete example used throughout the figure
// reproductions; the only preset currently defined.
void apply_preset(RunConfig& config, const std::string& name);

inline RunConfig make_preset(const std::string& name) {
  RunConfig config;
  apply_preset(config, name);
  return config;
}

// Flat key/value JSON document; keys match the long CLI flags.  Unknown
// keys are rejected.
void apply_json_file(RunConfig& config, const std::string& path);

// "start:stop:steps"
source::GridAxis parse_grid(const std::string& text);

// Throws ConfigError if the fields needed by config.command are missing
// or violate the owning module's invariants.
void validate(const RunConfig& config);

}  // namespace heraldsim::cli

#endif
