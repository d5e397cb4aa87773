#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "heraldsim/constants.hpp"
#include "heraldsim/runner.hpp"

using namespace heraldsim;
using cli::RunConfig;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// value cell of the first data row (header + 1) for a given column
std::string cell(const std::string& csv, std::size_t row_index, std::size_t col_index) {
  std::istringstream in(csv);
  std::string line;
  std::size_t data_row = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!seen_header) {
      seen_header = true;
      continue;
    }
    if (data_row++ != row_index) continue;
    std::istringstream cells(line);
    std::string item;
    for (std::size_t i = 0; std::getline(cells, item, ','); ++i)
      if (i == col_index) return item;
    break;
  }
  return {};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("heraldsim_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("preset") {
  SUBCASE("paper preset carries the concrete example") {
    const RunConfig cfg = cli::make_preset("paper");
    CHECK(cfg.crystal.l_a == 5.0e-7);
    CHECK(cfg.crystal.l_b == 5.0e-7);
    CHECK(cfg.crystal.eps_rel_a == 1.0);
    CHECK(cfg.crystal.eps_rel_b == doctest::Approx(4.84).epsilon(1e-15));
    CHECK(cfg.crystal.total_length == 5.0e-5);
    CHECK(cfg.pump.chi2_tilde == 25.2e-12);
    CHECK(cfg.pump.radiant_flux == 0.03);
    CHECK(cfg.pump.beam_radius == 5.0e-6);
    CHECK(cfg.alpha == 0.06);
  }

  SUBCASE("unknown preset") {
    CHECK_THROWS_AS(cli::make_preset("nope"), UnknownPresetError);
  }
}

TEST_CASE("config validation") {
  SUBCASE("unknown command") {
    RunConfig cfg;
    cfg.command = "does-not-exist";
    CHECK_THROWS_AS(cli::validate(cfg), ConfigError);
  }

  SUBCASE("source invariants") {
    RunConfig cfg;
    cfg.command = "herald-g2";
    cfg.eta = 1.5;
    CHECK_THROWS_AS(cli::validate(cfg), ConfigError);
  }

  SUBCASE("missing crystal parameters") {
    RunConfig cfg;
    cfg.command = "bands";
    CHECK_THROWS_AS(cli::validate(cfg), ConfigError);
  }

  SUBCASE("unknown figure id") {
    RunConfig cfg = cli::make_preset("paper");
    cfg.command = "reproduce-figure";
    cfg.figure = "9z";
    CHECK_THROWS_AS(cli::validate(cfg), ConfigError);
  }

  SUBCASE("bad grid strings") {
    CHECK_THROWS_AS(cli::parse_grid("0:1.5:0"), ConfigError);
    CHECK_THROWS_AS(cli::parse_grid("1.5:0:10"), ConfigError);
    CHECK_THROWS_AS(cli::parse_grid("garbage"), ConfigError);
  }

  SUBCASE("unsupported sweep axes") {
    RunConfig cfg;
    cfg.command = "herald-g2";
    cfg.eta = 0.7;
    cfg.use_alpha_grid = true;
    cfg.alpha_grid = {0.0, 1.0, 5};
    CHECK_THROWS_AS(cli::validate(cfg), ConfigError);

    RunConfig click;
    click.command = "click";
    click.use_alpha_grid = true;
    click.alpha_grid = {0.0, 1.0, 5};
    CHECK_THROWS_AS(cli::validate(click), ConfigError);
  }
}

TEST_CASE("config file") {
  TempDir tmp;

  SUBCASE("values load and presets expand") {
    const fs::path cfg_path = tmp.path / "run.json";
    std::ofstream(cfg_path) << R"({"preset": "paper", "r": 1.5, "eta": 0.7})";
    RunConfig cfg;
    cli::apply_json_file(cfg, cfg_path.string());
    CHECK(cfg.r == 1.5);
    CHECK(cfg.eta == 0.7);
    CHECK(cfg.alpha == 0.06);  // from the preset
    CHECK(cfg.crystal.total_length == 5.0e-5);
  }

  SUBCASE("unknown keys are rejected") {
    const fs::path cfg_path = tmp.path / "bad.json";
    std::ofstream(cfg_path) << R"({"r": 1.0, "rr": 2.0})";
    RunConfig cfg;
    CHECK_THROWS_AS(cli::apply_json_file(cfg, cfg_path.string()), ConfigError);
  }

  SUBCASE("malformed json") {
    const fs::path cfg_path = tmp.path / "broken.json";
    std::ofstream(cfg_path) << "{not json";
    RunConfig cfg;
    CHECK_THROWS_AS(cli::apply_json_file(cfg, cfg_path.string()), ConfigError);
  }
}

TEST_CASE("run: herald-g2 single point") {
  TempDir tmp;
  RunConfig cfg;
  cfg.command = "herald-g2";
  cfg.r = 1.5;
  cfg.alpha = 0.06;
  cfg.eta = 1.0;
  cfg.output_path = (tmp.path / "g2.csv").string();
  cli::run(cfg);

  const std::string csv = slurp(cfg.output_path);
  const double value = std::stod(cell(csv, 0, 3));
  CHECK(value == doctest::Approx(8.78e-3).epsilon(0.02));
}

TEST_CASE("run: byte-identical output for identical config") {
  TempDir tmp;
  RunConfig cfg;
  cfg.command = "herald-prob";
  cfg.use_r_grid = true;
  cfg.r_grid = {0.0, 1.2, 7};
  cfg.use_alpha_grid = true;
  cfg.alpha_grid = {0.0, 0.5, 3};
  cfg.threads = 2;

  cfg.output_path = (tmp.path / "a.csv").string();
  cli::run(cfg);
  const std::string first = slurp(cfg.output_path);

  cfg.output_path = (tmp.path / "b.csv").string();
  cli::run(cfg);
  const std::string second = slurp(cfg.output_path);

  CHECK(first == second);
  CHECK(first.find("# heraldsim") == 0);
}

TEST_CASE("run: bands single point matches the module") {
  TempDir tmp;
  RunConfig cfg = cli::make_preset("paper");
  cfg.command = "bands";
  cfg.band = 4;
  cfg.k_period = 0.0;
  cfg.use_k_point = true;
  cfg.output_path = (tmp.path / "band.csv").string();
  cli::run(cfg);

  const std::string csv = slurp(cfg.output_path);
  CHECK(std::stod(cell(csv, 0, 2)) == doctest::Approx(1.1908356).epsilon(1e-6));
  CHECK(std::stod(cell(csv, 0, 3)) == 0.0);  // v_g at the zone center edge
}

TEST_CASE("run: band table row order") {
  TempDir tmp;
  RunConfig cfg = cli::make_preset("paper");
  cfg.command = "bands";
  cfg.k_samples = 5;
  cfg.n_bands = 2;
  cfg.output_path = (tmp.path / "table.csv").string();
  cli::run(cfg);

  const std::string csv = slurp(cfg.output_path);
  CHECK(cell(csv, 0, 0) == "1");
  CHECK(cell(csv, 4, 0) == "1");
  CHECK(cell(csv, 5, 0) == "2");
  // CSV keeps 9 significant digits
  CHECK(std::stod(cell(csv, 4, 1)) == doctest::Approx(constants::pi).epsilon(1e-8));
}

TEST_CASE("run: calibrate emits the full chain") {
  TempDir tmp;
  RunConfig cfg = cli::make_preset("paper");
  cfg.command = "calibrate";
  cfg.output_path = (tmp.path / "cal.csv").string();
  cli::run(cfg);

  const std::string csv = slurp(cfg.output_path);
  CHECK(csv.find("pump_amplitude") != std::string::npos);
  CHECK(csv.find("required_vg_over_c") != std::string::npos);
  CHECK(csv.find("effective_length") != std::string::npos);
  CHECK(csv.find("window_delta_nu") != std::string::npos);
  CHECK(std::stod(cell(csv, 0, 1)) == doctest::Approx(5.36e5).epsilon(0.005));
}

TEST_CASE("run: figure recipes exist for every listed id") {
  const auto& recipes = cli::figure_recipes();
  REQUIRE(recipes.size() == 12);
  const std::vector<std::string> expect = {"3a", "3b", "4a", "4b", "5a", "5b",
                                           "6a", "6b", "7a", "7b"};
  for (const auto& id : expect) {
    bool found = false;
    for (const auto& [rid, desc] : recipes) found = found || rid == id;
    CHECK(found);
  }
}

TEST_CASE("run: small figure reproduction with grid override") {
  TempDir tmp;
  RunConfig cfg = cli::make_preset("paper");
  cfg.command = "reproduce-figure";
  cfg.figure = "4b";
  cfg.use_r_grid = true;
  cfg.r_grid = {0.8, 1.0, 3};
  cfg.output_path = (tmp.path / "fig4b.csv").string();
  cli::run(cfg);

  const std::string csv = slurp(cfg.output_path);
  CHECK(std::stod(cell(csv, 0, 0)) == 0.8);
  CHECK(std::stod(cell(csv, 2, 0)) == 1.0);
  // column 2 is the g2 value at alpha = 0.06
  CHECK(std::stod(cell(csv, 1, 2)) ==
        doctest::Approx(0.0144).epsilon(0.03));  // r = 0.9 sits near the 0.883 value
}

TEST_CASE("binary: flags override config-file values") {
  TempDir tmp;
  const fs::path cfg_path = tmp.path / "run.json";
  std::ofstream(cfg_path) << R"({"r": 0.5, "alpha": 0.06, "eta": 1.0})";
  const fs::path out = tmp.path / "g2.csv";

  const std::string cmd = std::string(HERALD_SIM_BIN) + " herald-g2 --config " +
                          cfg_path.string() + " --r 1.5 --out " + out.string();
  REQUIRE(std::system(cmd.c_str()) == 0);
  const std::string csv = slurp(out);
  CHECK(std::stod(cell(csv, 0, 0)) == 1.5);  // flag wins over the file
  CHECK(std::stod(cell(csv, 0, 3)) == doctest::Approx(8.78e-3).epsilon(0.02));
}

TEST_CASE("binary: figure recipes default to the paper preset") {
  TempDir tmp;
  const fs::path out = tmp.path / "fig.csv";
  const std::string cmd = std::string(HERALD_SIM_BIN) +
                          " reproduce-figure 4b --r-grid 0.9:0.9:1 --out " + out.string();
  REQUIRE(std::system(cmd.c_str()) == 0);
  const std::string csv = slurp(out);
  CHECK(std::stod(cell(csv, 0, 1)) == 0.06);  // alpha column carries the preset value
}

TEST_CASE("binary: exit codes") {
  TempDir tmp;
  const std::string bin(HERALD_SIM_BIN);
  const std::string quiet = " >/dev/null 2>&1";

  auto status_of = [&](const std::string& args) {
    const int raw = std::system((bin + " " + args + quiet).c_str());
    return WEXITSTATUS(raw);
  };

  CHECK(status_of("--help") == 0);
  CHECK(status_of("reproduce-figure 9z --preset paper") == 2);
  CHECK(status_of("--no-such-flag") == 2);
  CHECK(status_of("bands") == 2);  // missing crystal parameters
  const std::string out = (tmp.path / "x.csv").string();
  CHECK(status_of("click --r 0 --alpha 0 --g2 --out " + out) == 3);
  CHECK(status_of("herald-g2 --r 0.5 --alpha 0 --out " + out) == 0);
}

TEST_CASE("run: default output names") {
  RunConfig cfg;
  cfg.command = "herald-g2";
  CHECK(cli::default_output_path(cfg) == "herald-g2.csv");
  cfg.command = "reproduce-figure";
  cfg.figure = "7a";
  CHECK(cli::default_output_path(cfg) == "fig7a.csv");
  cfg.output_path = "custom.csv";
  CHECK(cli::default_output_path(cfg) == "custom.csv");
}
