#pragma once

// Calibration of the Gaussian detuning so that one pulse on the gate pair
// realizes the mapping
//
//   |01> -> |01> e^{i phi},  |10> -> |10> e^{i phi},  |11> -> |11> e^{i(2 phi - chi)}
//
// with chi = pi (CZ) or chi = pi/2 (controlled-pi/2, half of the double protocol).
//
// Free parameters: (delta_amp, delta_width, delta_offset). Duration, ramp
// fraction and the Gaussian centre are conventions taken from a template pulse.

#include <array>
#include <complex>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "xtalk/dynamics.hpp"
#include "xtalk/nelder_mead.hpp"
#include "xtalk/pulses.hpp"

namespace xtalk {

struct GateTarget {
  double conditional_phase = 3.141592653589793;  // chi, in (0, 2 pi)

  static GateTarget cz();
  static GateTarget controlled_half_pi();
  void validate() const;
  std::string_view name() const;  // "cz", "half_pi" or "custom"
  friend bool operator==(const GateTarget&, const GateTarget&) = default;
};

GateTarget gate_target_from_string(std::string_view name);

struct GateOverlaps {
  std::complex<double> c01;  // <01|U|01>
  std::complex<double> c11;  // <11|U|11>
};

/// Propagates |01> and |11> on the gate pair alone.
GateOverlaps gate_overlaps(const ProtocolSpec& spec, double v12, const IntegratorConfig& cfg);

struct GaugeFit {
  double phi = 0.0;         // single-qubit phase maximizing the overlap, (-pi, pi]
  double infidelity = 1.0;  // 1 - |1 + 2 c01 e^{-i phi} + c11 e^{-i(2 phi - chi)}|^2 / 16
};

GaugeFit fit_gauge(const GateOverlaps& c, double chi);

/// Integrator used inside the optimizer loop; coarser than the default.
IntegratorConfig calibration_search_integrator();

double gate_fidelity_objective(const PulseParams& pulse, const GateTarget& target, double v12,
                               const IntegratorConfig& cfg = {});

/// Two copies of `pulse` with no phase jump, scored against CZ.
GaugeFit composed_gate_fit(const PulseParams& pulse, double v12, const IntegratorConfig& cfg = {});

/// Starting points (delta_amp, delta_width, delta_offset).
struct SeedGrid {
  std::vector<std::array<double, 3>> seeds;

  /// Deterministic default grid for a target at the given pulse duration.
  static SeedGrid defaults(const GateTarget& target, double duration);
};

enum class SeedSelection {
  BestObjective,  // lowest gate objective wins
  LeastCrosstalk, // among converged starts, smallest spectator error coefficient
};

struct CalibrationOptions {
  IntegratorConfig search = calibration_search_integrator();
  IntegratorConfig verify{};
  NelderMeadOptions optimizer{.max_evaluations = 1500, .f_tolerance = 1e-13, .x_tolerance = 1e-7,
                              .initial_step = {}};
  double convergence_threshold = 1e-5;
  SeedSelection selection = SeedSelection::LeastCrosstalk;
  int threads = 1;
};

struct CalibrationResult {
  PulseParams pulse;
  GateTarget target;
  double v12 = 0.0;
  double single_qubit_phase = 0.0;
  double gate_infidelity = 1.0;
  bool converged = false;
  int evaluations = 0;
  double crosstalk_coeff = 0.0;  // alpha/2 for CZ, beta^2/4 of the echo for half pulses
};

/// Thrown when no start reaches the convergence threshold; carries the best attempt.
class CalibrationError : public std::runtime_error {
 public:
  CalibrationError(const std::string& what, CalibrationResult best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const CalibrationResult& best() const { return best_; }

 private:
  CalibrationResult best_;
};

/// Multi-start Nelder-Mead over the seed grid. `conventions` supplies the
/// duration, ramp fraction and centre.
CalibrationResult calibrate_pulse(const GateTarget& target, double v12, const SeedGrid& seeds,
                                  const PulseParams& conventions,
                                  const CalibrationOptions& options = {});

/// Re-evaluates an existing pulse (objective, phase, crosstalk) with `cfg`.
CalibrationResult evaluate_pulse(const PulseParams& pulse, const GateTarget& target, double v12,
                                 const IntegratorConfig& cfg, double convergence_threshold = 1e-5);

/// Double-pulse protocol for a calibrated half pulse, with the selected phase jump.
ProtocolSpec echo_protocol(const PulseParams& half_pulse);

}  // namespace xtalk
