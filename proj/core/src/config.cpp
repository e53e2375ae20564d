#include "lindcd/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace lindcd::harness {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ConfigError("config: " + where + ": " + what);
}

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key))
      fail(where, "unknown key '" + key + "'");
  }
}

double get_num(const json& obj, const std::string& where, const char* key,
               double fallback) {
  if (!obj.contains(key))
    return fallback;
  const json& v = obj.at(key);
  if (!v.is_number())
    fail(where, std::string("'") + key + "' must be a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& where, const char* key,
            int fallback) {
  if (!obj.contains(key))
    return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer())
    fail(where, std::string("'") + key + "' must be an integer");
  return v.get<int>();
}

bool get_bool(const json& obj, const std::string& where, const char* key,
              bool fallback) {
  if (!obj.contains(key))
    return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean())
    fail(where, std::string("'") + key + "' must be a boolean");
  return v.get<bool>();
}

std::string get_str(const json& obj, const std::string& where, const char* key,
                    const std::string& fallback) {
  if (!obj.contains(key))
    return fallback;
  const json& v = obj.at(key);
  if (!v.is_string())
    fail(where, std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

void require_positive(double x, const std::string& where, const char* key) {
  if (!(x > 0.0) || !std::isfinite(x))
    fail(where, std::string("'") + key + "' must be positive and finite");
}

const std::set<std::string> kSweepPaths = {
    "bath.eta_g2", "bath.beta",     "bath.omega_c", "model.omega_x",
    "model.omega_z", "model.gamma", "model.j",      "tau_ns"};

}  // namespace

RunConfig config_from_json(const std::string& text,
                           std::vector<std::string>* warnings) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object())
    throw ConfigError("config: top level must be an object");

  check_keys(root, "top level",
             {"scenario", "model", "bath", "initial_state", "tau_ns", "cd",
              "integrator", "output", "seed", "sweep"});

  RunConfig cfg;
  cfg.scenario = get_str(root, "top level", "scenario", "qubit");
  if (cfg.scenario != "qubit" && cfg.scenario != "pspin")
    fail("top level", "scenario must be 'qubit' or 'pspin'");

  if (root.contains("model")) {
    const json& m = root.at("model");
    if (!m.is_object())
      fail("model", "must be an object");
    if (cfg.scenario == "qubit") {
      check_keys(m, "model", {"omega_x", "omega_z"});
      cfg.qubit.omega_x = get_num(m, "model", "omega_x", cfg.qubit.omega_x);
      cfg.qubit.omega_z = get_num(m, "model", "omega_z", cfg.qubit.omega_z);
      require_positive(cfg.qubit.omega_x, "model", "omega_x");
      require_positive(cfg.qubit.omega_z, "model", "omega_z");
    } else {
      check_keys(m, "model", {"n", "p", "gamma", "j"});
      cfg.pspin.n = get_int(m, "model", "n", cfg.pspin.n);
      cfg.pspin.p = get_int(m, "model", "p", cfg.pspin.p);
      cfg.pspin.gamma = get_num(m, "model", "gamma", cfg.pspin.gamma);
      cfg.pspin.j = get_num(m, "model", "j", cfg.pspin.j);
      if (cfg.pspin.n < 1 || cfg.pspin.n > 12)
        fail("model", "'n' must be between 1 and 12");
      if (cfg.pspin.p < 1)
        fail("model", "'p' must be positive");
      require_positive(cfg.pspin.gamma, "model", "gamma");
      require_positive(cfg.pspin.j, "model", "j");
    }
  }

  if (root.contains("bath") && !root.at("bath").is_null()) {
    const json& b = root.at("bath");
    if (!b.is_object())
      fail("bath", "must be an object or null");
    check_keys(b, "bath", {"eta_g2", "beta", "omega_c", "lamb_shift"});
    models::BathSpec bath;
    bath.eta_g2 = get_num(b, "bath", "eta_g2", bath.eta_g2);
    bath.beta = get_num(b, "bath", "beta", bath.beta);
    bath.omega_c = get_num(b, "bath", "omega_c", bath.omega_c);
    bath.lamb_shift = get_bool(b, "bath", "lamb_shift", bath.lamb_shift);
    if (!(bath.eta_g2 >= 0.0) || !std::isfinite(bath.eta_g2))
      fail("bath", "'eta_g2' must be finite and nonnegative");
    require_positive(bath.beta, "bath", "beta");
    require_positive(bath.omega_c, "bath", "omega_c");
    if (warnings && bath.eta_g2 > 0.1)
      warnings->push_back(
          "bath.eta_g2 > 0.1: outside the weak-coupling regime the generator "
          "stops being a controlled approximation");
    cfg.bath = bath;
  }

  cfg.initial_state = get_str(root, "top level", "initial_state", "auto");
  if (cfg.initial_state != "auto" && cfg.initial_state != "ground" &&
      cfg.initial_state != "thermal")
    fail("top level", "initial_state must be 'auto', 'ground' or 'thermal'");
  if (cfg.initial_state == "thermal" && !cfg.bath)
    fail("top level", "thermal initial state requires a bath");

  if (root.contains("tau_ns")) {
    const json& t = root.at("tau_ns");
    if (!t.is_array() || t.empty())
      fail("tau_ns", "must be a non-empty array");
    cfg.tau_ns.clear();
    for (const json& v : t) {
      if (!v.is_number())
        fail("tau_ns", "entries must be numbers");
      const double tau = v.get<double>();
      require_positive(tau, "tau_ns", "entry");
      cfg.tau_ns.push_back(tau);
    }
  }

  if (root.contains("cd")) {
    const json& list = root.at("cd");
    if (!list.is_array() || list.empty())
      fail("cd", "must be a non-empty array");
    cfg.cd.clear();
    std::set<std::string> names;
    for (const json& e : list) {
      if (!e.is_object())
        fail("cd", "entries must be objects");
      check_keys(e, "cd",
                 {"name", "mode", "ansatz", "grid_points", "fd_step", "kms_report"});
      CdSpec spec;
      spec.mode = get_str(e, "cd", "mode", "none");
      if (spec.mode != "none" && spec.mode != "exact" && spec.mode != "variational")
        fail("cd", "mode must be 'none', 'exact' or 'variational'");
      spec.name = get_str(e, "cd", "name", spec.mode);
      spec.ansatz = get_str(e, "cd", "ansatz", spec.ansatz);
      spec.grid_points = get_int(e, "cd", "grid_points", spec.grid_points);
      spec.fd_step = get_num(e, "cd", "fd_step", spec.fd_step);
      spec.kms_report = get_bool(e, "cd", "kms_report", spec.kms_report);
      if (spec.grid_points < 2)
        fail("cd", "'grid_points' must be at least 2");
      require_positive(spec.fd_step, "cd", "fd_step");
      if (spec.kms_report && spec.mode != "variational")
        fail("cd", "'kms_report' applies to variational mode only");
      if (spec.mode == "variational") {
        const auto& known = cd::ansatz_names();
        if (std::find(known.begin(), known.end(), spec.ansatz) == known.end())
          fail("cd", "unknown ansatz '" + spec.ansatz + "'");
      }
      if (!names.insert(spec.name).second)
        fail("cd", "duplicate protocol name '" + spec.name + "'");
      cfg.cd.push_back(std::move(spec));
    }
  }

  if (root.contains("integrator")) {
    const json& it = root.at("integrator");
    if (!it.is_object())
      fail("integrator", "must be an object");
    check_keys(it, "integrator",
               {"rel_tol", "abs_tol", "max_step", "samples", "generator_eval",
                "generator_grid_points"});
    auto& ic = cfg.integrator;
    ic.rel_tol = get_num(it, "integrator", "rel_tol", ic.rel_tol);
    ic.abs_tol = get_num(it, "integrator", "abs_tol", ic.abs_tol);
    ic.max_step = get_num(it, "integrator", "max_step", ic.max_step);
    ic.samples = get_int(it, "integrator", "samples", ic.samples);
    ic.generator_eval = get_str(it, "integrator", "generator_eval", ic.generator_eval);
    ic.generator_grid_points =
        get_int(it, "integrator", "generator_grid_points", ic.generator_grid_points);
    require_positive(ic.rel_tol, "integrator", "rel_tol");
    require_positive(ic.abs_tol, "integrator", "abs_tol");
    if (ic.max_step < 0.0)
      fail("integrator", "'max_step' must be nonnegative");
    if (ic.samples < 2)
      fail("integrator", "'samples' must be at least 2");
    if (ic.generator_eval != "auto" && ic.generator_eval != "exact" &&
        ic.generator_eval != "grid")
      fail("integrator", "generator_eval must be 'auto', 'exact' or 'grid'");
    if (ic.generator_grid_points < 2)
      fail("integrator", "'generator_grid_points' must be at least 2");
  }

  if (root.contains("output")) {
    const json& o = root.at("output");
    if (!o.is_object())
      fail("output", "must be an object");
    check_keys(o, "output", {"dir", "label"});
    cfg.output.dir = get_str(o, "output", "dir", cfg.output.dir);
    cfg.output.label = get_str(o, "output", "label", cfg.output.label);
    if (cfg.output.label.empty())
      fail("output", "'label' must not be empty");
  }

  if (root.contains("seed")) {
    const json& s = root.at("seed");
    if (!s.is_number_unsigned() && !s.is_number_integer())
      fail("top level", "'seed' must be a nonnegative integer");
    const auto v = s.get<std::int64_t>();
    if (v < 0)
      fail("top level", "'seed' must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(v);
  }

  if (root.contains("sweep")) {
    const json& sw = root.at("sweep");
    if (!sw.is_object())
      fail("sweep", "must be an object");
    for (const auto& [path, values] : sw.items()) {
      if (!kSweepPaths.count(path))
        fail("sweep", "unknown parameter path '" + path + "'");
      if (path.rfind("bath.", 0) == 0 && !cfg.bath)
        fail("sweep", "'" + path + "' requires a bath");
      if (!values.is_array() || values.empty())
        fail("sweep", "'" + path + "' must map to a non-empty array");
      std::vector<double> vals;
      for (const json& v : values) {
        if (!v.is_number())
          fail("sweep", "'" + path + "' entries must be numbers");
        vals.push_back(v.get<double>());
      }
      cfg.sweep.emplace_back(path, std::move(vals));
    }
    // items() follows the storage order, which is already alphabetical for
    // nlohmann's default map; keep it explicit for the canonical hash.
    std::sort(cfg.sweep.begin(), cfg.sweep.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }

  // Range-check swept values by applying each to a copy.
  for (const auto& [path, values] : cfg.sweep) {
    for (double v : values) {
      RunConfig probe = cfg;
      probe.sweep.clear();
      apply_override(probe, path, v);
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str(), warnings);
}

std::string config_to_json(const RunConfig& cfg) {
  json root;
  root["scenario"] = cfg.scenario;
  if (cfg.scenario == "qubit") {
    root["model"] = {{"omega_x", cfg.qubit.omega_x}, {"omega_z", cfg.qubit.omega_z}};
  } else {
    root["model"] = {{"n", cfg.pspin.n},
                     {"p", cfg.pspin.p},
                     {"gamma", cfg.pspin.gamma},
                     {"j", cfg.pspin.j}};
  }
  if (cfg.bath) {
    root["bath"] = {{"eta_g2", cfg.bath->eta_g2},
                    {"beta", cfg.bath->beta},
                    {"omega_c", cfg.bath->omega_c},
                    {"lamb_shift", cfg.bath->lamb_shift}};
  } else {
    root["bath"] = nullptr;
  }
  root["initial_state"] = cfg.initial_state;
  root["tau_ns"] = cfg.tau_ns;
  root["cd"] = json::array();
  for (const CdSpec& spec : cfg.cd) {
    root["cd"].push_back({{"name", spec.name},
                          {"mode", spec.mode},
                          {"ansatz", spec.ansatz},
                          {"grid_points", spec.grid_points},
                          {"fd_step", spec.fd_step},
                          {"kms_report", spec.kms_report}});
  }
  root["integrator"] = {
      {"rel_tol", cfg.integrator.rel_tol},
      {"abs_tol", cfg.integrator.abs_tol},
      {"max_step", cfg.integrator.max_step},
      {"samples", cfg.integrator.samples},
      {"generator_eval", cfg.integrator.generator_eval},
      {"generator_grid_points", cfg.integrator.generator_grid_points}};
  root["output"] = {{"dir", cfg.output.dir}, {"label", cfg.output.label}};
  root["seed"] = cfg.seed;
  json sw = json::object();
  for (const auto& [path, values] : cfg.sweep)
    sw[path] = values;
  root["sweep"] = sw;
  return root.dump(2) + "\n";
}

std::string config_hash(const RunConfig& cfg) {
  const std::string text = config_to_json(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

models::AnnealingScenario build_scenario(const RunConfig& cfg) {
  if (cfg.scenario == "qubit")
    return models::make_qubit_scenario(cfg.qubit, cfg.bath);
  return models::make_pspin_scenario(cfg.pspin, cfg.bath);
}

evo::InitialState resolve_initial_state(const RunConfig& cfg) {
  if (cfg.initial_state == "ground")
    return evo::InitialState::Ground;
  if (cfg.initial_state == "thermal")
    return evo::InitialState::Thermal;
  // Scenario defaults: the qubit launches from the pure ground state of
  // H(0) even when coupled to a bath; the collective-spin model relaxes
  // fast enough that its natural start is the bath-temperature state.
  if (cfg.scenario == "pspin" && cfg.bath)
    return evo::InitialState::Thermal;
  return evo::InitialState::Ground;
}

cd::GaugeProvider build_gauge(const RunConfig& cfg, const CdSpec& spec,
                              const models::AnnealingScenario& sc) {
  (void)cfg;
  if (spec.mode == "none")
    return cd::GaugeProvider::none();
  if (spec.mode == "exact")
    return cd::GaugeProvider::exact(sc, spec.fd_step);
  return cd::GaugeProvider::variational(sc, cd::named_ansatz(spec.ansatz, sc),
                                        spec.grid_points, spec.fd_step);
}

void apply_override(RunConfig& cfg, const std::string& path, double value) {
  const auto positive = [&](const char* what) {
    if (!(value > 0.0) || !std::isfinite(value))
      throw ConfigError("sweep: '" + path + "' value must be positive, got " +
                        std::to_string(value));
    (void)what;
  };
  if (path == "tau_ns") {
    positive("tau");
    cfg.tau_ns = {value};
    return;
  }
  if (path == "bath.eta_g2") {
    if (!cfg.bath)
      throw ConfigError("sweep: 'bath.eta_g2' requires a bath");
    if (!(value >= 0.0) || !std::isfinite(value))
      throw ConfigError("sweep: 'bath.eta_g2' must be finite and nonnegative");
    cfg.bath->eta_g2 = value;
    return;
  }
  if (path == "bath.beta") {
    if (!cfg.bath)
      throw ConfigError("sweep: 'bath.beta' requires a bath");
    positive("beta");
    cfg.bath->beta = value;
    return;
  }
  if (path == "bath.omega_c") {
    if (!cfg.bath)
      throw ConfigError("sweep: 'bath.omega_c' requires a bath");
    positive("omega_c");
    cfg.bath->omega_c = value;
    return;
  }
  if (path == "model.omega_x" || path == "model.omega_z") {
    if (cfg.scenario != "qubit")
      throw ConfigError("sweep: '" + path + "' requires the qubit scenario");
    positive("omega");
    (path == "model.omega_x" ? cfg.qubit.omega_x : cfg.qubit.omega_z) = value;
    return;
  }
  if (path == "model.gamma" || path == "model.j") {
    if (cfg.scenario != "pspin")
      throw ConfigError("sweep: '" + path + "' requires the pspin scenario");
    positive("coupling");
    (path == "model.gamma" ? cfg.pspin.gamma : cfg.pspin.j) = value;
    return;
  }
  throw ConfigError("sweep: unknown parameter path '" + path + "'");
}

}  // namespace lindcd::harness
