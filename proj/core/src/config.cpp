#include "xtalk/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace xtalk {

using nlohmann::json;

namespace {

constexpr const char* kSchema = "xtalk-config/1";

std::string_view method_name(IntegratorMethod m) {
  return m == IntegratorMethod::AdaptiveRK ? "adaptive" : "rk4";
}

IntegratorMethod method_from(std::string_view s) {
  if (s == "rk4") return IntegratorMethod::FixedRK4;
  if (s == "adaptive") return IntegratorMethod::AdaptiveRK;
  throw std::invalid_argument("unknown integrator method '" + std::string(s) + "'");
}

std::string_view selection_name(SeedSelection s) {
  return s == SeedSelection::BestObjective ? "best_objective" : "least_crosstalk";
}

SeedSelection selection_from(std::string_view s) {
  if (s == "best_objective") return SeedSelection::BestObjective;
  if (s == "least_crosstalk") return SeedSelection::LeastCrosstalk;
  throw std::invalid_argument("unknown seed selection '" + std::string(s) + "'");
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

json pulse_json(const PulseParams& p) {
  return {{"delta_amp", p.delta_amp},         {"delta_width", p.delta_width},
          {"delta_center", p.delta_center},   {"delta_offset", p.delta_offset},
          {"duration", p.duration},           {"ramp_fraction", p.ramp_fraction}};
}

PulseParams pulse_from(const json& j, PulseParams p = {}) {
  read_opt(j, "delta_amp", p.delta_amp);
  read_opt(j, "delta_width", p.delta_width);
  read_opt(j, "delta_center", p.delta_center);
  read_opt(j, "delta_offset", p.delta_offset);
  read_opt(j, "duration", p.duration);
  read_opt(j, "ramp_fraction", p.ramp_fraction);
  return p;
}

json calibration_json(const CalibrationResult& r) {
  return {{"target", std::string(r.target.name())},
          {"conditional_phase", r.target.conditional_phase},
          {"v12", r.v12},
          {"pulse", pulse_json(r.pulse)},
          {"single_qubit_phase", r.single_qubit_phase},
          {"gate_infidelity", r.gate_infidelity},
          {"converged", r.converged},
          {"evaluations", r.evaluations},
          {"crosstalk_coeff", r.crosstalk_coeff}};
}

CalibrationResult calibration_from(const json& j) {
  CalibrationResult r;
  r.target.conditional_phase = j.value("conditional_phase", GateTarget::cz().conditional_phase);
  if (j.contains("target") && !j.contains("conditional_phase")) {
    r.target = gate_target_from_string(j.at("target").get<std::string>());
  }
  r.v12 = j.at("v12").get<double>();
  r.pulse = pulse_from(j.at("pulse"));
  read_opt(j, "single_qubit_phase", r.single_qubit_phase);
  read_opt(j, "gate_infidelity", r.gate_infidelity);
  read_opt(j, "converged", r.converged);
  read_opt(j, "evaluations", r.evaluations);
  read_opt(j, "crosstalk_coeff", r.crosstalk_coeff);
  return r;
}

json seeds_json(const std::vector<std::array<double, 3>>& s) {
  json a = json::array();
  for (const auto& x : s) a.push_back({x[0], x[1], x[2]});
  return a;
}

std::vector<std::array<double, 3>> seeds_from(const json& j) {
  std::vector<std::array<double, 3>> out;
  for (const auto& x : j) out.push_back({x.at(0).get<double>(), x.at(1).get<double>(), x.at(2).get<double>()});
  return out;
}

std::vector<double> grid_from(const json& j) {
  if (j.is_array()) return j.get<std::vector<double>>();
  const double lo = j.at("min").get<double>();
  const double hi = j.at("max").get<double>();
  const int n = j.at("points").get<int>();
  if (j.value("spacing", std::string("log")) == "linear") {
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return g;
  }
  return log_grid(lo, hi, n);
}

}  // namespace

std::string_view to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::Epsilon: return "epsilon";
    case SweepVariable::V13V23Pair: return "v13_v23_pair";
    case SweepVariable::VSym: return "v_sym";
  }
  return "?";
}

SweepVariable sweep_variable_from_string(std::string_view name) {
  if (name == "epsilon") return SweepVariable::Epsilon;
  if (name == "v13_v23_pair") return SweepVariable::V13V23Pair;
  if (name == "v_sym") return SweepVariable::VSym;
  throw std::invalid_argument("unknown sweep variable '" + std::string(name) + "'");
}

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0 && hi >= lo) || n < 1) throw std::invalid_argument("log_grid: bad range");
  std::vector<double> g(static_cast<std::size_t>(n));
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < n; ++i) {
    g[static_cast<std::size_t>(i)] = n == 1 ? lo : std::pow(10.0, a + (b - a) * i / (n - 1));
  }
  g.front() = lo;
  if (n > 1) g.back() = hi;
  return g;
}

void SweepAxis::validate() const {
  auto monotone = [](const std::vector<double>& g, const char* what) {
    if (g.empty()) throw std::invalid_argument(std::string("sweep: ") + what + " grid is empty");
    for (std::size_t i = 1; i < g.size(); ++i) {
      if (!(g[i] > g[i - 1])) {
        throw std::invalid_argument(std::string("sweep: ") + what + " grid must be strictly increasing");
      }
    }
  };
  monotone(grid, "primary");
  if (variable == SweepVariable::V13V23Pair) monotone(grid_v23, "v23");
  if (variable == SweepVariable::Epsilon) {
    for (double e : grid) {
      if (!(e >= 0.0 && e <= 1.0)) throw std::invalid_argument("sweep: epsilon outside [0, 1]");
    }
  } else if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("sweep: epsilon outside [0, 1]");
  }
}

void set_formats(OutputSpec& out, std::string_view list) {
  out.csv = out.json = out.svg = false;
  if (list.empty()) {
    out.csv = true;
    return;
  }
  std::size_t pos = 0;
  while (pos <= list.size()) {
    const std::size_t comma = std::min(list.find(',', pos), list.size());
    const std::string_view item = list.substr(pos, comma - pos);
    if (item == "csv") out.csv = true;
    else if (item == "json") out.json = true;
    else if (item == "svg") out.svg = true;
    else if (!item.empty()) throw std::invalid_argument("unknown output format '" + std::string(item) + "'");
    pos = comma + 1;
  }
  if (!out.csv && !out.json && !out.svg) out.csv = true;
}

void ExperimentConfig::validate() const {
  system.validate();
  conventions.validate();
  integrator.validate();
  sweep.validate();
  if (initial_states.empty()) throw std::invalid_argument("config: no initial states");
  if (protocols.empty()) throw std::invalid_argument("config: no protocols");
  if (!(fit_window[0] > 0.0 && fit_window[1] > fit_window[0])) {
    throw std::invalid_argument("config: fit window must satisfy 0 < lo < hi");
  }
  if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
  if (cz) cz->pulse.validate();
  if (half_pi) half_pi->pulse.validate();
}

ExperimentConfig default_config() {
  ExperimentConfig cfg;
  cfg.sweep.grid = log_grid(1e-4, 1e-1, 25);
  return cfg;
}

ExperimentConfig parse_config(const std::string& text) {
  const json j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  ExperimentConfig cfg = default_config();
  if (j.contains("schema") && j.at("schema").get<std::string>() != kSchema) {
    throw std::invalid_argument("config: unsupported schema '" + j.at("schema").get<std::string>() + "'");
  }
  if (j.contains("system")) {
    const json& s = j.at("system");
    read_opt(s, "omega0", cfg.system.omega0);
    read_opt(s, "v12", cfg.system.v12);
    read_opt(s, "v13", cfg.system.v13);
    read_opt(s, "v23", cfg.system.v23);
    read_opt(s, "epsilon", cfg.system.epsilon);
  }
  if (j.contains("conventions")) cfg.conventions = pulse_from(j.at("conventions"), cfg.conventions);
  if (j.contains("integrator")) {
    const json& s = j.at("integrator");
    read_opt(s, "step", cfg.integrator.step);
    read_opt(s, "tolerance", cfg.integrator.tolerance);
    read_opt(s, "samples_per_pulse", cfg.integrator.samples_per_pulse);
    read_opt(s, "norm_tolerance", cfg.integrator.norm_tolerance);
    if (s.contains("method")) cfg.integrator.method = method_from(s.at("method").get<std::string>());
  }
  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    if (s.contains("variable")) cfg.sweep.variable = sweep_variable_from_string(s.at("variable").get<std::string>());
    if (s.contains("grid")) cfg.sweep.grid = grid_from(s.at("grid"));
    if (s.contains("grid_v23")) cfg.sweep.grid_v23 = grid_from(s.at("grid_v23"));
    read_opt(s, "epsilon", cfg.sweep.epsilon);
  }
  if (j.contains("initial_states")) {
    cfg.initial_states.clear();
    for (const auto& s : j.at("initial_states")) cfg.initial_states.push_back(initial_state_from_string(s.get<std::string>()));
  }
  if (j.contains("protocols")) {
    cfg.protocols.clear();
    for (const auto& s : j.at("protocols")) cfg.protocols.push_back(protocol_kind_from_string(s.get<std::string>()));
  }
  if (j.contains("corrections")) {
    cfg.phase_correction = false;
    for (const auto& s : j.at("corrections")) {
      const auto name = s.get<std::string>();
      if (name == "phase_circuit") cfg.phase_correction = true;
      else if (name != "none") throw std::invalid_argument("unknown correction '" + name + "'");
    }
  }
  if (j.contains("fit_window")) {
    const auto w = j.at("fit_window").get<std::vector<double>>();
    if (w.size() != 2) throw std::invalid_argument("config: fit_window needs two values");
    cfg.fit_window = {w[0], w[1]};
  }
  if (j.contains("pulses")) {
    const json& p = j.at("pulses");
    if (p.contains("cz") && !p.at("cz").is_null()) cfg.cz = calibration_from(p.at("cz"));
    if (p.contains("half_pi") && !p.at("half_pi").is_null()) cfg.half_pi = calibration_from(p.at("half_pi"));
  }
  if (j.contains("calibration")) {
    const json& c = j.at("calibration");
    if (c.contains("cz_seeds")) cfg.calibration.cz_seeds = seeds_from(c.at("cz_seeds"));
    if (c.contains("half_seeds")) cfg.calibration.half_seeds = seeds_from(c.at("half_seeds"));
    read_opt(c, "threshold", cfg.calibration.threshold);
    read_opt(c, "max_evaluations", cfg.calibration.max_evaluations);
    if (c.contains("selection")) cfg.calibration.selection = selection_from(c.at("selection").get<std::string>());
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    if (o.contains("directory")) cfg.output.directory = o.at("directory").get<std::string>();
    if (o.contains("formats")) {
      std::string list;
      for (const auto& f : o.at("formats")) list += (list.empty() ? "" : ",") + f.get<std::string>();
      set_formats(cfg.output, list);
    }
  }
  read_opt(j, "threads", cfg.threads);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const json::exception& e) {
    throw std::runtime_error("config '" + path.string() + "': " + e.what());
  }
}

std::string dump_config(const ExperimentConfig& cfg) {
  json j;
  j["schema"] = kSchema;
  j["system"] = {{"omega0", cfg.system.omega0}, {"v12", cfg.system.v12}, {"v13", cfg.system.v13},
                 {"v23", cfg.system.v23}, {"epsilon", cfg.system.epsilon}};
  j["conventions"] = pulse_json(cfg.conventions);
  j["integrator"] = {{"step", cfg.integrator.step},
                     {"tolerance", cfg.integrator.tolerance},
                     {"method", std::string(method_name(cfg.integrator.method))},
                     {"samples_per_pulse", cfg.integrator.samples_per_pulse},
                     {"norm_tolerance", cfg.integrator.norm_tolerance}};
  j["sweep"] = {{"variable", std::string(to_string(cfg.sweep.variable))},
                {"grid", cfg.sweep.grid},
                {"epsilon", cfg.sweep.epsilon}};
  if (!cfg.sweep.grid_v23.empty()) j["sweep"]["grid_v23"] = cfg.sweep.grid_v23;
  j["initial_states"] = json::array();
  for (auto s : cfg.initial_states) j["initial_states"].push_back(std::string(to_string(s)));
  j["protocols"] = json::array();
  for (auto p : cfg.protocols) j["protocols"].push_back(std::string(to_string(p)));
  j["corrections"] = cfg.phase_correction ? json::array({"phase_circuit"}) : json::array({"none"});
  j["fit_window"] = {cfg.fit_window[0], cfg.fit_window[1]};
  j["pulses"] = {{"cz", cfg.cz ? calibration_json(*cfg.cz) : json(nullptr)},
                 {"half_pi", cfg.half_pi ? calibration_json(*cfg.half_pi) : json(nullptr)}};
  j["calibration"] = {{"cz_seeds", seeds_json(cfg.calibration.cz_seeds)},
                      {"half_seeds", seeds_json(cfg.calibration.half_seeds)},
                      {"threshold", cfg.calibration.threshold},
                      {"selection", std::string(selection_name(cfg.calibration.selection))},
                      {"max_evaluations", cfg.calibration.max_evaluations}};
  json formats = json::array();
  if (cfg.output.csv) formats.push_back("csv");
  if (cfg.output.json) formats.push_back("json");
  if (cfg.output.svg) formats.push_back("svg");
  j["output"] = {{"directory", cfg.output.directory.string()}, {"formats", formats}};
  j["threads"] = cfg.threads;
  return j.dump(2) + "\n";
}

void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file '" + path.string() + "'");
  out << dump_config(cfg);
}

std::string calibration_to_json(const CalibrationResult& r) { return calibration_json(r).dump(2) + "\n"; }

CalibrationResult calibration_from_json(const std::string& text) {
  return calibration_from(json::parse(text, nullptr, true, true));
}

}  // namespace xtalk
