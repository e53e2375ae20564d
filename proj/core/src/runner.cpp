#include "lindcd/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "lindcd/counterdiabatic.hpp"
#include "lindcd/evolution.hpp"

namespace lindcd::harness {

namespace {

using nlohmann::json;

std::string sanitize(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s)
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '.' ||
                          c == '-' || c == '_'
                      ? c
                      : '-');
  return out;
}

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

json finite_or_null(double v) {
  return std::isfinite(v) ? json(v) : json(nullptr);
}

// Peak overlap, over the whole path, of Jordan blocks whose initial overlap
// is below threshold. Zero when every block starts populated.
double max_leakage(const RealMatrix& overlaps, double threshold = 1e-9) {
  if (overlaps.rows() == 0)
    return 0.0;
  double peak = 0.0;
  for (int j = 0; j < overlaps.cols(); ++j) {
    if (overlaps(0, j) >= threshold)
      continue;
    peak = std::max(peak, overlaps.col(j).maxCoeff());
  }
  return peak;
}

CellSummary run_cell(const RunConfig& cfg, const models::AnnealingScenario& sc,
                     const cd::GaugeProvider& provider, const CdSpec& spec,
                     double tau, const std::filesystem::path& out_dir) {
  CellSummary cell;
  cell.cd_name = spec.name;
  cell.tau = tau;
  cell.csv_path = sanitize(cfg.output.label) + "_" + sanitize(spec.name) +
                  "_tau" + format_g(tau) + ".csv";
  try {
    const evo::InitialState start = resolve_initial_state(cfg);
    const evo::Trajectory traj =
        evo::evolve(sc, provider, tau, cfg.integrator, start);
    const evo::Observables obs = evo::compute_observables(traj);

    std::ofstream out(out_dir / cell.csv_path);
    if (!out)
      throw std::runtime_error("cannot write " +
                               (out_dir / cell.csv_path).string());
    evo::write_csv(out, obs);

    const auto n = obs.s.size();
    cell.final_p_minus = obs.p_minus(n - 1);
    cell.final_fidelity = obs.fidelity(n - 1);
    cell.min_fidelity = obs.fidelity.minCoeff();
    cell.max_leakage = max_leakage(obs.block_overlap);
    cell.max_trace_error = obs.trace_error.maxCoeff();
    cell.min_eig = obs.min_eig.minCoeff();
    cell.ground_multiplicity = obs.ground_multiplicity;
    cell.tracking_warnings = obs.tracking_warnings;
    cell.steps_accepted = traj.steps_accepted;
    cell.rhs_evaluations = traj.rhs_evaluations;
  } catch (const std::exception& e) {
    cell.failed = true;
    cell.error = e.what();
  }
  return cell;
}

json cell_to_json(const CellSummary& c) {
  json j;
  j["cd"] = c.cd_name;
  j["tau_ns"] = c.tau;
  j["csv"] = c.csv_path;
  j["failed"] = c.failed;
  j["error"] = c.error;
  j["final_p_minus"] = finite_or_null(c.final_p_minus);
  j["final_fidelity"] = finite_or_null(c.final_fidelity);
  j["min_fidelity"] = finite_or_null(c.min_fidelity);
  j["max_leakage"] = finite_or_null(c.max_leakage);
  j["max_trace_error"] = finite_or_null(c.max_trace_error);
  j["min_eig"] = finite_or_null(c.min_eig);
  j["ground_multiplicity"] = c.ground_multiplicity;
  j["tracking_warnings"] = c.tracking_warnings;
  j["steps_accepted"] = c.steps_accepted;
  j["rhs_evaluations"] = c.rhs_evaluations;
  return j;
}

json protocol_to_json(const ProtocolSummary& p) {
  json j;
  j["name"] = p.spec.name;
  j["mode"] = p.spec.mode;
  j["ansatz"] = p.spec.ansatz;
  j["failed"] = p.failed;
  j["error"] = p.error;
  j["grid"] = p.grid;
  j["residual"] = p.residual;
  j["residual_at_zero"] = p.residual_at_zero;
  j["max_residual"] = finite_or_null(p.max_residual);
  j["kms_max_residual"] =
      p.kms_max_residual < 0.0 ? json(nullptr) : json(p.kms_max_residual);
  j["kms_max_channel_norm"] = p.kms_max_channel_norm < 0.0
                                  ? json(nullptr)
                                  : json(p.kms_max_channel_norm);
  return j;
}

}  // namespace

bool RunResult::ok() const {
  for (const ProtocolSummary& p : protocols)
    if (p.failed)
      return false;
  for (const CellSummary& c : cells)
    if (c.failed)
      return false;
  return true;
}

std::string run_result_to_json(const RunResult& result) {
  json j;
  j["config_hash"] = result.config_hash;
  j["label"] = result.label;
  j["out_dir"] = result.out_dir;
  j["protocols"] = json::array();
  for (const ProtocolSummary& p : result.protocols)
    j["protocols"].push_back(protocol_to_json(p));
  j["cells"] = json::array();
  for (const CellSummary& c : result.cells)
    j["cells"].push_back(cell_to_json(c));
  return j.dump(2) + "\n";
}

RunResult cmd_run(const RunConfig& cfg, int threads) {
  RunResult result;
  result.config_hash = config_hash(cfg);
  result.out_dir = cfg.output.dir;
  result.label = cfg.output.label;

  const std::filesystem::path out_dir(cfg.output.dir);
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream cfg_out(out_dir / (sanitize(cfg.output.label) + "_config.json"));
    cfg_out << config_to_json(cfg);
  }

  const models::AnnealingScenario sc = build_scenario(cfg);

  // Providers are built once per protocol and shared across tau cells; a
  // build failure poisons every cell of that protocol but nothing else.
  std::vector<cd::GaugeProvider> providers;
  providers.reserve(cfg.cd.size());
  for (const CdSpec& spec : cfg.cd) {
    ProtocolSummary proto;
    proto.spec = spec;
    try {
      providers.push_back(build_gauge(cfg, spec, sc));
      const cd::GaugeProvider& p = providers.back();
      if (p.mode() == cd::GaugeProvider::Mode::Variational) {
        proto.grid = p.grid();
        for (const cd::VariationalSolution& sol : p.solutions()) {
          proto.residual.push_back(sol.residual);
          proto.residual_at_zero.push_back(sol.residual_at_zero);
          proto.max_residual = std::max(proto.max_residual, sol.residual);
        }
        if (spec.kms_report && cfg.bath) {
          const auto kms = cd::thermal_invariance_report(sc, p);
          proto.kms_max_residual = kms.max_residual;
          proto.kms_max_channel_norm = kms.max_channel_norm;
        }
      }
    } catch (const std::exception& e) {
      proto.failed = true;
      proto.error = e.what();
      providers.push_back(cd::GaugeProvider::none());
    }
    result.protocols.push_back(std::move(proto));
  }

  struct Job {
    std::size_t proto;
    double tau;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < cfg.cd.size(); ++i)
    for (double tau : cfg.tau_ns)
      jobs.push_back({i, tau});
  result.cells.resize(jobs.size());

  const auto worker_count = [&] {
    int n = threads > 0 ? threads
                        : static_cast<int>(std::thread::hardware_concurrency());
    n = std::clamp(n, 1, 16);
    return std::min<std::size_t>(n, jobs.size());
  }();

  std::atomic<std::size_t> cursor{0};
  const auto drain = [&] {
    for (std::size_t k = cursor.fetch_add(1); k < jobs.size();
         k = cursor.fetch_add(1)) {
      const Job& job = jobs[k];
      const ProtocolSummary& proto = result.protocols[job.proto];
      if (proto.failed) {
        CellSummary& cell = result.cells[k];
        cell.cd_name = proto.spec.name;
        cell.tau = job.tau;
        cell.failed = true;
        cell.error = "protocol setup failed: " + proto.error;
        continue;
      }
      result.cells[k] = run_cell(cfg, sc, providers[job.proto], proto.spec,
                                 job.tau, out_dir);
    }
  };
  if (worker_count <= 1) {
    drain();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < worker_count; ++i)
      pool.emplace_back(drain);
    for (std::thread& t : pool)
      t.join();
  }

  const std::string summary_name = sanitize(cfg.output.label) + "_summary.json";
  result.summary_path = (out_dir / summary_name).string();
  std::ofstream summary(result.summary_path);
  summary << run_result_to_json(result);
  return result;
}

std::vector<RunResult> cmd_sweep(const RunConfig& cfg, int threads) {
  if (cfg.sweep.empty())
    return {cmd_run(cfg, threads)};

  // Cartesian product in the declared (alphabetical) order; the first table
  // entry is the slowest-varying index.
  std::vector<std::size_t> index(cfg.sweep.size(), 0);
  std::vector<RunResult> results;
  json combos = json::array();
  bool done = false;
  while (!done) {
    RunConfig combo = cfg;
    combo.sweep.clear();
    std::string suffix;
    json overrides;
    for (std::size_t i = 0; i < cfg.sweep.size(); ++i) {
      const auto& [path, values] = cfg.sweep[i];
      const double value = values[index[i]];
      apply_override(combo, path, value);
      const auto dot = path.rfind('.');
      const std::string leaf =
          dot == std::string::npos ? path : path.substr(dot + 1);
      suffix += "_" + leaf + "-" + format_g(value);
      overrides[path] = value;
    }
    combo.output.label = cfg.output.label + suffix;
    results.push_back(cmd_run(combo, threads));

    json entry;
    entry["overrides"] = overrides;
    entry["label"] = combo.output.label;
    entry["summary"] = results.back().summary_path;
    entry["ok"] = results.back().ok();
    combos.push_back(std::move(entry));

    done = true;
    for (std::size_t i = cfg.sweep.size(); i-- > 0;) {
      if (++index[i] < cfg.sweep[i].second.size()) {
        done = false;
        break;
      }
      index[i] = 0;
    }
  }

  json summary;
  summary["config_hash"] = config_hash(cfg);
  summary["combos"] = combos;
  const std::filesystem::path out_dir(cfg.output.dir);
  std::filesystem::create_directories(out_dir);
  std::ofstream out(out_dir /
                    (sanitize(cfg.output.label) + "_sweep_summary.json"));
  out << summary.dump(2) << "\n";
  return results;
}

}  // namespace lindcd::harness
