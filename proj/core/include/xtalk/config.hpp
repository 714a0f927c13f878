#pragma once

// Experiment configuration. On disk it is JSON; `//` and `/* */` comments are
// accepted so unit annotations can live next to the values. All physical
// quantities use Omega_0 = 1, hbar = 1.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "xtalk/calibrate.hpp"
#include "xtalk/dynamics.hpp"
#include "xtalk/hilbert.hpp"
#include "xtalk/metrics.hpp"
#include "xtalk/pulses.hpp"

namespace xtalk {

enum class SweepVariable { Epsilon, V13V23Pair, VSym };

std::string_view to_string(SweepVariable v);
SweepVariable sweep_variable_from_string(std::string_view name);

struct SweepAxis {
  SweepVariable variable = SweepVariable::Epsilon;
  std::vector<double> grid;       // epsilon values, or V13 (= V23 for VSym)
  std::vector<double> grid_v23;   // second axis for V13V23Pair
  double epsilon = 0.008;         // fixed epsilon for interaction sweeps

  void validate() const;
};

/// n log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int n);

struct CalibrationSettings {
  std::vector<std::array<double, 3>> cz_seeds;    // empty -> SeedGrid::defaults
  std::vector<std::array<double, 3>> half_seeds;
  double threshold = 1e-5;
  SeedSelection selection = SeedSelection::LeastCrosstalk;
  int max_evaluations = 1500;
};

struct OutputSpec {
  std::filesystem::path directory = "xtalk-out";
  bool csv = true;
  bool json = false;
  bool svg = false;
};

/// Parses "csv,json,svg" (any subset). Empty string means CSV only.
void set_formats(OutputSpec& out, std::string_view list);

struct ExperimentConfig {
  SystemParams system;
  PulseParams conventions;  // duration, ramp fraction, centre for calibration
  IntegratorConfig integrator;
  SweepAxis sweep;
  std::vector<InitialState> initial_states{kAllInitialStates.begin(), kAllInitialStates.end()};
  std::vector<ProtocolKind> protocols{ProtocolKind::SinglePulse, ProtocolKind::DoublePulse};
  bool phase_correction = false;
  std::array<double, 2> fit_window{3e-3, 3e-2};
  std::optional<CalibrationResult> cz;       // cached calibrations
  std::optional<CalibrationResult> half_pi;
  CalibrationSettings calibration;
  OutputSpec output;
  int threads = 1;

  void validate() const;
};

/// Defaults: symmetric setup at V = 21.1, 25-point epsilon grid on [1e-4, 1e-1].
ExperimentConfig default_config();

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string dump_config(const ExperimentConfig& cfg);
void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path);

std::string calibration_to_json(const CalibrationResult& r);
CalibrationResult calibration_from_json(const std::string& text);

}  // namespace xtalk
