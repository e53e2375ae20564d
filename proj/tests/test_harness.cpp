#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lindcd/presets.hpp"
#include "lindcd/runner.hpp"

using namespace lindcd;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir =
      fs::temp_directory_path() / ("lindcd_test_" + tag + "_" +
                                   std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("an empty document parses to the default config") {
  const auto cfg = harness::config_from_json("{}");
  CHECK(cfg.scenario == "qubit");
  CHECK_FALSE(cfg.bath.has_value());
  CHECK(cfg.initial_state == "auto");
  CHECK(cfg.tau_ns == std::vector<double>{1.0});
  REQUIRE(cfg.cd.size() == 1);
  CHECK(cfg.cd[0].name == "none");
  CHECK(cfg.cd[0].mode == "none");
  CHECK(cfg.integrator.rel_tol == 1e-9);
  CHECK(cfg.output.dir == "out");
  CHECK(cfg.sweep.empty());
}

TEST_CASE("unknown keys are rejected at every nesting level") {
  CHECK_THROWS_AS(harness::config_from_json(R"({"scenari": "qubit"})"),
                  harness::ConfigError);
  CHECK_THROWS_AS(
      harness::config_from_json(R"({"model": {"omega_x": 1, "bogus": 2}})"),
      harness::ConfigError);
  CHECK_THROWS_AS(
      harness::config_from_json(R"({"bath": {"eta": 1e-4}})"),
      harness::ConfigError);
  CHECK_THROWS_AS(
      harness::config_from_json(
          R"({"cd": [{"name": "a", "mode": "none", "extra": 1}]})"),
      harness::ConfigError);
  CHECK_THROWS_AS(
      harness::config_from_json(R"({"integrator": {"reltol": 1e-9}})"),
      harness::ConfigError);
}

TEST_CASE("values are type- and range-checked") {
  CHECK_THROWS_AS(harness::config_from_json(R"({"scenario": "spin-glass"})"),
                  harness::ConfigError);
  CHECK_THROWS_AS(
      harness::config_from_json(R"({"model": {"omega_x": -1.0}})"),
      harness::ConfigError);
  CHECK_THROWS_AS(
      harness::config_from_json(
          R"({"scenario": "pspin", "model": {"n": 0}})"),
      harness::ConfigError);
  CHECK_THROWS_AS(harness::config_from_json(R"({"tau_ns": []})"),
                  harness::ConfigError);
  CHECK_THROWS_AS(harness::config_from_json(R"({"tau_ns": [1.0, -2.0]})"),
                  harness::ConfigError);
  CHECK_THROWS_AS(harness::config_from_json(R"({"tau_ns": "fast"})"),
                  harness::ConfigError);
  CHECK_THROWS_AS(harness::config_from_json(R"({"initial_state": "thermal"})"),
                  harness::ConfigError);
  CHECK_THROWS_AS(
      harness::config_from_json(
          R"({"cd": [{"name": "a"}, {"name": "a"}]})"),
      harness::ConfigError);
  CHECK_THROWS_AS(
      harness::config_from_json(
          R"({"cd": [{"name": "v", "mode": "variational", "ansatz": "nope"}]})"),
      harness::ConfigError);
  CHECK_THROWS_AS(
      harness::config_from_json(
          R"({"cd": [{"name": "n", "mode": "none", "kms_report": true}]})"),
      harness::ConfigError);
  CHECK_THROWS_AS(harness::config_from_json(R"({"output": {"label": ""}})"),
                  harness::ConfigError);
  CHECK_THROWS_AS(harness::config_from_json("not json"),
                  harness::ConfigError);
}

TEST_CASE("strong coupling parses with a warning") {
  std::vector<std::string> warnings;
  const auto cfg = harness::config_from_json(
      R"({"bath": {"eta_g2": 0.5}})", &warnings);
  CHECK(cfg.bath->eta_g2 == 0.5);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("eta_g2") != std::string::npos);
}

TEST_CASE("serialization round-trips every preset exactly") {
  for (const auto& name : harness::preset_names()) {
    const auto cfg = harness::preset(name);
    const std::string text = harness::config_to_json(cfg);
    const auto back = harness::config_from_json(text);
    CHECK(harness::config_to_json(back) == text);
    CHECK(harness::config_hash(back) == harness::config_hash(cfg));
  }
}

TEST_CASE("checked-in preset files match the built-in definitions") {
  const fs::path presets = fs::path(LINDCD_SOURCE_DIR) / "presets";
  for (const auto& name : harness::preset_names()) {
    const fs::path file = presets / (name + ".json");
    INFO("preset file ", file.string());
    CHECK(slurp(file) == harness::preset_json(name));
  }
  CHECK_THROWS_AS(harness::preset("fig99"), harness::ConfigError);
}

TEST_CASE("config hash is stable and sensitive") {
  const auto a = harness::preset("fig1");
  auto b = a;
  CHECK(harness::config_hash(a) == harness::config_hash(b));
  CHECK(harness::config_hash(a).size() == 16);
  b.tau_ns.push_back(42.0);
  CHECK(harness::config_hash(a) != harness::config_hash(b));
}

TEST_CASE("initial state resolution") {
  harness::RunConfig cfg;
  cfg.scenario = "qubit";
  CHECK(harness::resolve_initial_state(cfg) == evo::InitialState::Ground);
  cfg.bath = models::BathSpec{};
  // A dissipative qubit run still starts from the pure ground state.
  CHECK(harness::resolve_initial_state(cfg) == evo::InitialState::Ground);
  cfg.scenario = "pspin";
  CHECK(harness::resolve_initial_state(cfg) == evo::InitialState::Thermal);
  cfg.initial_state = "ground";
  CHECK(harness::resolve_initial_state(cfg) == evo::InitialState::Ground);
  cfg.initial_state = "thermal";
  cfg.scenario = "qubit";
  CHECK(harness::resolve_initial_state(cfg) == evo::InitialState::Thermal);
}

TEST_CASE("scenario and gauge construction follow the config") {
  auto cfg = harness::config_from_json(
      R"({"scenario": "pspin", "model": {"n": 3, "p": 3},
          "bath": {"eta_g2": 1e-4}})");
  const auto sc = harness::build_scenario(cfg);
  CHECK(sc.dim() == 4);
  REQUIRE(sc.bath.has_value());

  harness::CdSpec none;
  CHECK(harness::build_gauge(cfg, none, sc).mode() ==
        cd::GaugeProvider::Mode::None);
  harness::CdSpec var;
  var.mode = "variational";
  var.ansatz = "Sy";
  var.grid_points = 11;
  const auto provider = harness::build_gauge(cfg, var, sc);
  CHECK(provider.mode() == cd::GaugeProvider::Mode::Variational);
  CHECK(provider.grid().size() == 11);
}

TEST_CASE("override paths update the config or refuse loudly") {
  auto cfg = harness::preset("fig3");
  harness::apply_override(cfg, "bath.eta_g2", 1e-2);
  CHECK(cfg.bath->eta_g2 == 1e-2);
  harness::apply_override(cfg, "tau_ns", 7.0);
  CHECK(cfg.tau_ns == std::vector<double>{7.0});
  harness::apply_override(cfg, "model.gamma", 2.0);
  CHECK(cfg.pspin.gamma == 2.0);
  CHECK_THROWS_AS(harness::apply_override(cfg, "bath.eta_g2", -1.0),
                  harness::ConfigError);
  CHECK_THROWS_AS(harness::apply_override(cfg, "nonsense.path", 1.0),
                  harness::ConfigError);
  auto closed = harness::config_from_json("{}");
  CHECK_THROWS_AS(harness::apply_override(closed, "bath.beta", 1.0),
                  harness::ConfigError);
}

TEST_CASE("cmd_run writes config, summary and one csv per cell") {
  const fs::path dir = fresh_dir("run");
  auto cfg = harness::config_from_json(R"({
    "tau_ns": [1.0],
    "cd": [{"name": "none", "mode": "none"},
           {"name": "Sy", "mode": "variational", "ansatz": "Sy",
            "grid_points": 21}],
    "integrator": {"samples": 21},
    "output": {"label": "tiny"}
  })");
  cfg.output.dir = dir.string();

  const auto result = harness::cmd_run(cfg, 1);
  CHECK(result.ok());
  CHECK(result.config_hash == harness::config_hash(cfg));
  REQUIRE(result.cells.size() == 2);
  REQUIRE(result.protocols.size() == 2);
  CHECK(result.protocols[1].grid.size() == 21);
  CHECK(result.protocols[1].max_residual < 1e-6);
  for (const auto& cell : result.cells) {
    CHECK_FALSE(cell.failed);
    CHECK(cell.final_p_minus > 0.0);
    CHECK(fs::exists(dir / cell.csv_path));
  }
  CHECK(fs::exists(dir / "tiny_config.json"));
  CHECK(fs::exists(result.summary_path));
  CHECK(slurp(dir / "tiny_config.json") == harness::config_to_json(cfg));

  const std::string summary = slurp(result.summary_path);
  CHECK(summary.find("\"config_hash\"") != std::string::npos);
  CHECK(summary.find("\"cells\"") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cmd_sweep expands the cartesian product") {
  const fs::path dir = fresh_dir("sweep");
  auto cfg = harness::config_from_json(R"({
    "tau_ns": [1.0],
    "integrator": {"samples": 11},
    "output": {"label": "grid"},
    "sweep": {"model.omega_x": [1.0, 2.0], "model.omega_z": [1.0, 1.5, 2.0]}
  })");
  cfg.output.dir = dir.string();

  const auto results = harness::cmd_sweep(cfg, 1);
  REQUIRE(results.size() == 6);
  for (const auto& r : results) {
    CHECK(r.ok());
    CHECK(r.label.rfind("grid_", 0) == 0);
    CHECK(fs::exists(r.summary_path));
  }
  CHECK(fs::exists(dir / "grid_sweep_summary.json"));
  fs::remove_all(dir);
}

TEST_CASE("an empty sweep degenerates to a single run") {
  const fs::path dir = fresh_dir("nosweep");
  auto cfg = harness::config_from_json(
      R"({"integrator": {"samples": 11}, "output": {"label": "solo"}})");
  cfg.output.dir = dir.string();
  const auto results = harness::cmd_sweep(cfg, 1);
  REQUIRE(results.size() == 1);
  CHECK(results[0].label == "solo");
  CHECK(results[0].ok());
  fs::remove_all(dir);
}
