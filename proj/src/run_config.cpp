#include "heraldsim/run_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "heraldsim/constants.hpp"
#include "heraldsim/errors.hpp"

namespace heraldsim::cli {

using nlohmann::json;

void apply_preset(RunConfig& config, const std::string& name) {
  if (name != "paper")
    throw UnknownPresetError("unknown preset '" + name + "' (available: paper)");

  config.preset_name = name;
  config.crystal.l_a = 5.0e-7;
  config.crystal.l_b = 5.0e-7;
  config.crystal.eps_rel_a = 1.0;
  config.crystal.eps_rel_b = 2.2 * 2.2;
  config.crystal.total_length = 5.0e-5;

  config.pump.radiant_flux = 0.03;
  config.pump.beam_radius = 5.0e-6;
  config.pump.chi2_tilde = 25.2e-12;
  config.pump.refr_index = 1.0;
  config.pump.omega_s = 2.0 * constants::pi * 3.55e14;
  config.pump.pump_phase = 0.0;

  config.alpha = 0.06;
  config.zeta = 1.0;
  config.band = 4;
}

source::GridAxis parse_grid(const std::string& text) {
  source::GridAxis axis;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> axis.start >> c1 >> axis.stop >> c2 >> axis.steps) || c1 != ':' || c2 != ':' ||
      !(in >> std::ws).eof())
    throw ConfigError("grid must be start:stop:steps, got '" + text + "'");
  if (axis.steps < 1) throw ConfigError("grid steps must be >= 1 in '" + text + "'");
  if (axis.stop < axis.start) throw ConfigError("grid must be increasing in '" + text + "'");
  return axis;
}

namespace {

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer");
  return v.get<int>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
  return v.get<std::string>();
}

void apply_key(RunConfig& c, const std::string& key, const json& v) {
  if (key == "command") c.command = as_string(v, key);
  else if (key == "out") c.output_path = as_string(v, key);
  else if (key == "figure") c.figure = as_string(v, key);
  else if (key == "r") c.r = as_number(v, key);
  else if (key == "alpha") c.alpha = as_number(v, key);
  else if (key == "eta") c.eta = as_number(v, key);
  else if (key == "na") c.n_a = as_int(v, key);
  else if (key == "nb") c.n_b = as_int(v, key);
  else if (key == "click-n") c.click_n = as_int(v, key);
  else if (key == "k-max") c.k_max = as_int(v, key);
  else if (key == "n-max") c.n_max = as_int(v, key);
  else if (key == "tail-tol") c.tail_tol = as_number(v, key);
  else if (key == "g2") {
    if (!v.is_boolean()) throw ConfigError("config key 'g2' must be a boolean");
    c.g2 = v.get<bool>();
  } else if (key == "r-grid") {
    c.r_grid = parse_grid(as_string(v, key));
    c.use_r_grid = true;
  } else if (key == "alpha-grid") {
    c.alpha_grid = parse_grid(as_string(v, key));
    c.use_alpha_grid = true;
  } else if (key == "eta-grid") {
    c.eta_grid = parse_grid(as_string(v, key));
    c.use_eta_grid = true;
  } else if (key == "l-a") c.crystal.l_a = as_number(v, key);
  else if (key == "l-b") c.crystal.l_b = as_number(v, key);
  else if (key == "eps-a") c.crystal.eps_rel_a = as_number(v, key);
  else if (key == "eps-b") c.crystal.eps_rel_b = as_number(v, key);
  else if (key == "total-length") c.crystal.total_length = as_number(v, key);
  else if (key == "band") c.band = as_int(v, key);
  else if (key == "k") {
    c.k_period = as_number(v, key);
    c.use_k_point = true;
  }
  else if (key == "k-samples") c.k_samples = as_int(v, key);
  else if (key == "n-bands") c.n_bands = as_int(v, key);
  else if (key == "omega-ceiling") c.solve.omega_ceiling_u = as_number(v, key);
  else if (key == "scan-points") c.solve.scan_points = as_int(v, key);
  else if (key == "flux") c.pump.radiant_flux = as_number(v, key);
  else if (key == "beam-radius") c.pump.beam_radius = as_number(v, key);
  else if (key == "chi2") c.pump.chi2_tilde = as_number(v, key);
  else if (key == "refr-index") c.pump.refr_index = as_number(v, key);
  else if (key == "omega-s") c.pump.omega_s = as_number(v, key);
  else if (key == "theta") c.pump.pump_phase = as_number(v, key);
  else if (key == "zeta") c.zeta = as_number(v, key);
  else if (key == "vg-ceiling") c.vg_ceiling_frac = as_number(v, key);
  else if (key == "threads") c.threads = as_int(v, key);
  else throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

void apply_json_file(RunConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& ex) {
    throw ConfigError(std::string("config file parse error: ") + ex.what());
  }
  if (!doc.is_object()) throw ConfigError("config file must hold a flat JSON object");

  // Preset first so explicit keys in the same file override it.
  if (doc.contains("preset")) apply_preset(config, as_string(doc["preset"], "preset"));
  for (const auto& [key, value] : doc.items()) {
    if (key == "preset") continue;
    apply_key(config, key, value);
  }
}

namespace {

const std::set<std::string> kCommands = {"herald-prob", "herald-g2", "click",    "bands",
                                         "vg",          "energy-ratio", "calibrate",
                                         "reproduce-figure"};

const std::set<std::string> kFigures = {"3a", "3b", "4a", "4b", "5a", "5b",
                                        "5c", "5d", "6a", "6b", "7a", "7b"};

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

}  // namespace

void validate(const RunConfig& config) {
  require(kCommands.count(config.command) == 1,
          "unknown or missing command '" + config.command + "'");

  const bool needs_source = config.command == "herald-prob" || config.command == "herald-g2" ||
                            config.command == "click" ||
                            (config.command == "reproduce-figure" && config.figure < "7");
  const bool needs_crystal = config.command == "bands" || config.command == "vg" ||
                             config.command == "energy-ratio" || config.command == "calibrate" ||
                             (config.command == "reproduce-figure" && config.figure >= "7");

  if (config.command == "reproduce-figure")
    require(kFigures.count(config.figure) == 1,
            "unknown figure id '" + config.figure + "' (see --help for the recipe list)");

  if (needs_source) {
    source::SourceParams p;
    p.alpha = config.alpha;
    p.r = config.r;
    p.eta = config.eta;
    p.k_max = config.k_max;
    p.cutoff.n_max = config.n_max;
    p.cutoff.tail_tol = config.tail_tol;
    try {
      source::validate(p);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(ex.what());
    }
    require(config.n_a >= 0 && config.n_b >= 0, "photon indices must be >= 0");
    require(config.click_n >= 0, "click-n must be >= 0");
    if (config.use_r_grid || config.use_alpha_grid || config.use_eta_grid) {
      require(!(config.use_alpha_grid && config.use_eta_grid),
              "sweep over either alpha or eta, not both");
      if (config.command == "herald-g2")
        require(!(config.use_alpha_grid && config.eta < 1.0),
                "alpha sweeps assume a perfect detector; sweep r and eta instead");
      if (config.command == "click")
        require(!config.use_alpha_grid, "click sweeps run over r and eta at fixed alpha");
    }
  }

  if (needs_crystal) {
    try {
      bands::validate(config.crystal);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(std::string(ex.what()) +
                        " (pass --preset paper or the crystal dimensions)");
    }
    require(config.band >= 1, "band must be >= 1");
    require(config.k_period >= 0.0 && config.k_period <= constants::pi + 1e-12,
            "k must lie in [0, pi] (units of 1/period)");
    require(config.k_samples >= 2, "k-samples must be >= 2");
    require(config.n_bands >= 1, "n-bands must be >= 1");
    require(config.solve.scan_points >= 16, "scan-points must be >= 16");
    require(config.solve.omega_ceiling_u > 0.0, "omega-ceiling must be > 0");
  }

  if (config.command == "calibrate") {
    try {
      calib::validate(config.pump);
    } catch (const std::invalid_argument& ex) {
      throw ConfigError(std::string(ex.what()) +
                        " (pass --preset paper or the pump parameters)");
    }
    require(config.zeta > 0.0, "zeta must be > 0");
    require(config.vg_ceiling_frac >= 0.0, "vg-ceiling must be >= 0");
  }

  require(config.threads >= 0, "threads must be >= 0");
}

}  // namespace heraldsim::cli
