#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lindcd/config.hpp"
#include "lindcd/presets.hpp"
#include "lindcd/runner.hpp"
#include "lindcd/validation.hpp"

namespace {

using lindcd::harness::RunConfig;
using lindcd::harness::RunResult;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void print_results(const std::vector<RunResult>& results) {
  for (const RunResult& result : results) {
    std::cout << "run " << result.label << " (config " << result.config_hash
              << ")\n";
    for (const auto& proto : result.protocols) {
      if (proto.failed) {
        std::cout << "  protocol " << proto.spec.name
                  << " FAILED: " << proto.error << "\n";
      } else if (proto.spec.mode == "variational") {
        std::cout << "  protocol " << proto.spec.name << " ansatz "
                  << proto.spec.ansatz << ": max residual "
                  << fmt(proto.max_residual);
        if (proto.kms_max_residual >= 0.0)
          std::cout << ", detailed-balance defect "
                    << fmt(proto.kms_max_residual) << " (channel norm "
                    << fmt(proto.kms_max_channel_norm) << ")";
        std::cout << "\n";
      }
    }
    for (const auto& cell : result.cells) {
      std::cout << "  " << cell.cd_name << " tau=" << fmt(cell.tau) << "ns: ";
      if (cell.failed) {
        std::cout << "FAILED: " << cell.error << "\n";
        continue;
      }
      std::cout << "P_minus=" << fmt(cell.final_p_minus)
                << " fidelity=" << fmt(cell.final_fidelity)
                << " leakage=" << fmt(cell.max_leakage) << " -> "
                << cell.csv_path << "\n";
    }
    std::cout << "  summary: " << result.summary_path << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lindblad annealing simulator with counterdiabatic driving"};
  app.require_subcommand(1);

  std::string config_path, preset_name, out_dir, report_path;
  int threads = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;

  const std::string preset_list = [] {
    std::string all;
    for (const std::string& name : lindcd::harness::preset_names())
      all += (all.empty() ? "" : "|") + name;
    return all;
  }();

  const auto add_common = [&](CLI::App* cmd, bool config_opts) {
    if (config_opts) {
      cmd->add_option("--config", config_path, "Run manifest (JSON)")
          ->check(CLI::ExistingFile);
      cmd->add_option("--preset", preset_name,
                      "Built-in manifest (" + preset_list + ")");
      cmd->add_option("--out-dir", out_dir,
                      "Output directory (overrides LINDCD_OUT_DIR and the "
                      "manifest)");
      cmd->add_option("--threads", threads,
                      "Worker threads for independent cells (0 = auto)");
    }
    cmd->add_option_function<std::uint64_t>(
           "--seed", [&](std::uint64_t v) { seed = v; seed_given = true; },
           "Seed recorded in the manifest / used by randomized checks");
  };

  CLI::App* run = app.add_subcommand(
      "run", "Run one scenario across its tau list and CD protocols");
  add_common(run, true);
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Expand the manifest's sweep table and run every combination");
  add_common(sweep, true);
  CLI::App* validate =
      app.add_subcommand("validate", "Run the invariant and oracle suite");
  add_common(validate, false);
  validate->add_option("--report", report_path,
                       "Write the machine-readable report here (JSON)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      const auto report = lindcd::harness::cmd_validate(seed, &std::cout);
      int failures = 0;
      for (const auto& check : report.checks)
        failures += check.passed ? 0 : 1;
      std::cout << report.checks.size() - failures << "/"
                << report.checks.size() << " checks passed\n";
      if (!report_path.empty()) {
        const auto parent = std::filesystem::path(report_path).parent_path();
        if (!parent.empty())
          std::filesystem::create_directories(parent);
        std::ofstream out(report_path);
        if (!out) {
          std::cerr << "error: cannot write " << report_path << "\n";
          return 2;
        }
        out << lindcd::harness::validation_report_to_json(report);
      }
      return report.passed() ? 0 : 1;
    }

    if (!preset_name.empty() && !config_path.empty())
      throw lindcd::harness::ConfigError(
          "config: give either --config or --preset, not both");
    RunConfig cfg;
    std::vector<std::string> warnings;
    if (!preset_name.empty()) {
      cfg = lindcd::harness::preset(preset_name);
    } else if (!config_path.empty()) {
      cfg = lindcd::harness::load_config(config_path, &warnings);
    } else {
      throw lindcd::harness::ConfigError(
          "config: provide --config <file> or --preset <name>");
    }
    for (const std::string& warning : warnings)
      std::cerr << "warning: " << warning << "\n";

    if (!out_dir.empty())
      cfg.output.dir = out_dir;
    else if (const char* env = std::getenv("LINDCD_OUT_DIR"))
      cfg.output.dir = env;
    if (seed_given)
      cfg.seed = seed;

    // `run` on a manifest with a sweep table expands it exactly like `sweep`;
    // an empty table makes both verbs a single run.
    const auto results = lindcd::harness::cmd_sweep(cfg, threads);
    print_results(results);
    for (const RunResult& result : results)
      if (!result.ok())
        return 1;
    return 0;
  } catch (const lindcd::harness::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
