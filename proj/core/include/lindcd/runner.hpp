#pragma once

#include <limits>
#include <string>
#include <vector>

#include "lindcd/config.hpp"

namespace lindcd::harness {

inline constexpr double kUnsetMetric = std::numeric_limits<double>::quiet_NaN();

// Outcome of one (protocol, tau) cell. Failures are recorded instead of
// thrown so a bad cell does not sink the remaining cells of a run. Metrics
// stay NaN (serialized as null) when the cell failed.
struct CellSummary {
  std::string cd_name;
  double tau = 0.0;
  std::string csv_path;  // relative to the output directory
  bool failed = false;
  std::string error;
  double final_p_minus = kUnsetMetric;
  double final_fidelity = kUnsetMetric;
  double min_fidelity = kUnsetMetric;
  double max_leakage = kUnsetMetric;  // peak overlap of blocks starting empty
  double max_trace_error = kUnsetMetric;
  double min_eig = kUnsetMetric;  // lowest state eigenvalue along the path
  int ground_multiplicity = 1;
  int tracking_warnings = 0;
  long steps_accepted = 0;
  long rhs_evaluations = 0;
};

// Diagnostics shared by every tau cell of one CD protocol.
struct ProtocolSummary {
  CdSpec spec;
  bool failed = false;
  std::string error;
  std::vector<double> grid;              // variational collocation grid
  std::vector<double> residual;          // per grid point, at the optimum
  std::vector<double> residual_at_zero;  // per grid point, no-CD baseline
  double max_residual = 0.0;
  // Thermal-invariance diagnostic; negative when no report was requested.
  // The ratio only matters where the channel norm is non-negligible.
  double kms_max_residual = -1.0;
  double kms_max_channel_norm = -1.0;
};

struct RunResult {
  std::string config_hash;
  std::string out_dir;
  std::string label;
  std::string summary_path;
  std::vector<ProtocolSummary> protocols;
  std::vector<CellSummary> cells;
  bool ok() const;
};

// Runs one scenario across its tau list and CD protocols, writing one CSV
// per cell plus a JSON summary and the resolved config. threads <= 0 picks
// the hardware concurrency, clamped to the cell count.
RunResult cmd_run(const RunConfig& cfg, int threads = 0);

// Expands the config's sweep table into its cartesian product, runs each
// combination as an independent cmd_run with a suffixed label, and writes an
// aggregate sweep summary. An empty sweep table degenerates to one run.
std::vector<RunResult> cmd_sweep(const RunConfig& cfg, int threads = 0);

// Serialized form of the per-run summary written next to the CSVs.
std::string run_result_to_json(const RunResult& result);

}  // namespace lindcd::harness
