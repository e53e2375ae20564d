#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lindcd/counterdiabatic.hpp"
#include "lindcd/evolution.hpp"
#include "lindcd/models.hpp"

namespace lindcd::harness {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One driving protocol to be propagated for every annealing time.
struct CdSpec {
  std::string name = "none";
  std::string mode = "none";    // "none" | "exact" | "variational"
  std::string ansatz = "Sy";    // named ansatz, variational mode only
  int grid_points = 201;
  double fd_step = 1e-5;
  bool kms_report = false;      // add the thermal-invariance diagnostic
};

struct OutputSpec {
  std::string dir = "out";
  std::string label = "run";
};

struct RunConfig {
  std::string scenario = "qubit";  // "qubit" | "pspin"
  models::QubitModel qubit;
  models::PSpinModel pspin;
  std::optional<models::BathSpec> bath;
  std::string initial_state = "auto";  // "auto" | "ground" | "thermal"
  std::vector<double> tau_ns = {1.0};
  std::vector<CdSpec> cd = {CdSpec{}};
  evo::IntegratorConfig integrator;
  OutputSpec output;
  std::uint64_t seed = 0;
  // Parameter-path -> values table; non-empty turns a run into a sweep.
  std::vector<std::pair<std::string, std::vector<double>>> sweep;
};

// Strict parse: every key must be known, values type- and range-checked.
// Non-fatal observations (for example an unusually strong coupling) are
// appended to `warnings` when provided.
RunConfig config_from_json(const std::string& text,
                           std::vector<std::string>* warnings = nullptr);
RunConfig load_config(const std::string& path,
                      std::vector<std::string>* warnings = nullptr);

// Canonical serialization: alphabetical keys, two-space indent, every
// default spelled out. Parsing the output reproduces the config exactly.
std::string config_to_json(const RunConfig& cfg);

// FNV-1a over the canonical serialization, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

models::AnnealingScenario build_scenario(const RunConfig& cfg);
evo::InitialState resolve_initial_state(const RunConfig& cfg);
cd::GaugeProvider build_gauge(const RunConfig& cfg, const CdSpec& spec,
                              const models::AnnealingScenario& sc);

// Applies one swept parameter; throws ConfigError for unknown paths.
// "tau_ns" replaces the whole annealing-time list with the single value.
void apply_override(RunConfig& cfg, const std::string& path, double value);

}  // namespace lindcd::harness
