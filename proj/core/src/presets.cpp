#include "lindcd/presets.hpp"

namespace lindcd::harness {

namespace {

CdSpec protocol(std::string name, std::string mode, std::string ansatz = "Sy",
                bool kms_report = false) {
  CdSpec spec;
  spec.name = std::move(name);
  spec.mode = std::move(mode);
  spec.ansatz = std::move(ansatz);
  spec.kms_report = kms_report;
  return spec;
}

// Single qubit in the Ohmic bath at weak coupling; block-overlap and
// ground-state-probability curves for three ramp times, with and without
// exact and single-term variational driving.
RunConfig qubit_open() {
  RunConfig cfg;
  cfg.scenario = "qubit";
  cfg.bath = models::BathSpec{};
  cfg.tau_ns = {1.0, 10.0, 100.0};
  cfg.cd = {protocol("none", "none"), protocol("exact", "exact"),
            protocol("Sy", "variational", "Sy")};
  cfg.output.label = "fig1";
  return cfg;
}

// Closed-system counterpart of the open qubit runs; overlaying the two CSV
// sets shows where dissipation starts to matter.
RunConfig qubit_closed() {
  RunConfig cfg = qubit_open();
  cfg.bath.reset();
  cfg.output.label = "fig2";
  return cfg;
}

// Collective-spin model, thermal start, four protocols per ramp time.
RunConfig pspin_protocols(double eta_g2, const std::string& label,
                          bool kms_report) {
  RunConfig cfg;
  cfg.scenario = "pspin";
  models::BathSpec bath;
  bath.eta_g2 = eta_g2;
  cfg.bath = bath;
  cfg.tau_ns = {1.0, 10.0};
  cfg.cd = {protocol("none", "none"),
            protocol("Bath", "variational", "basis_dissipators", kms_report),
            protocol("Sy", "variational", "Sy", kms_report),
            protocol("Cyclic", "variational", "SxSySz_cyclic", kms_report)};
  cfg.output.label = label;
  return cfg;
}

// Success-probability comparison: ground start, one ramp time, coupling
// strength swept across the weak and moderate regimes.
RunConfig pspin_success() {
  RunConfig cfg = pspin_protocols(1e-4, "fig5", false);
  cfg.initial_state = "ground";
  cfg.tau_ns = {10.0};
  cfg.sweep = {{"bath.eta_g2", {1e-4, 1e-2}}};
  return cfg;
}

}  // namespace

RunConfig preset(const std::string& name) {
  if (name == "fig1")
    return qubit_open();
  if (name == "fig2")
    return qubit_closed();
  if (name == "fig3")
    return pspin_protocols(1e-4, "fig3", false);
  if (name == "fig4")
    return pspin_protocols(1e-2, "fig4", true);
  if (name == "fig5")
    return pspin_success();
  throw ConfigError("preset: unknown name '" + name +
                    "' (expected fig1..fig5)");
}

std::vector<std::string> preset_names() {
  return {"fig1", "fig2", "fig3", "fig4", "fig5"};
}

std::string preset_json(const std::string& name) {
  return config_to_json(preset(name));
}

}  // namespace lindcd::harness
