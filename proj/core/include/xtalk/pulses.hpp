#pragma once

// Pulse ansatz and single/double-pulse protocols.
//
// One pulse of duration T has a Rabi envelope with sin^2 ramps of length
// ramp_fraction * T at both ends and a flat top at Omega_0, and a detuning
//
//   Delta(t) = delta_offset + delta_amp * exp(-(t - T/2 - delta_center)^2 / (2 delta_width^2)).
//
// The double-pulse protocol plays the same pulse twice back to back; the
// second copy has its Rabi amplitude multiplied by exp(i theta).

#include <complex>
#include <string_view>
#include <vector>

namespace xtalk {

struct PulseParams {
  double delta_amp = 0.0;     // units of Omega_0
  double delta_width = 1.0;   // units of 1/Omega_0
  double delta_center = 0.0;  // offset of the Gaussian peak from T/2
  double delta_offset = 0.0;  // constant detuning baseline, units of Omega_0
  double duration = 11.0;     // T, units of 1/Omega_0
  double ramp_fraction = 0.15;

  void validate() const;
  friend bool operator==(const PulseParams&, const PulseParams&) = default;
};

enum class ProtocolKind { SinglePulse, DoublePulse };

std::string_view to_string(ProtocolKind kind);
ProtocolKind protocol_kind_from_string(std::string_view name);

struct ProtocolSpec {
  ProtocolKind kind = ProtocolKind::SinglePulse;
  PulseParams pulse;
  double theta = 0.0;  // phase jump of the second pulse, [0, 2 pi)

  double total_duration() const;
  int pulse_count() const { return kind == ProtocolKind::DoublePulse ? 2 : 1; }
  void validate() const;
};

ProtocolSpec single_pulse(const PulseParams& pulse);
ProtocolSpec double_pulse(const PulseParams& pulse, double theta);

/// Envelope in units of Omega_0 (so in [0, 1]). Throws std::out_of_range outside [0, T].
double rabi_envelope(const PulseParams& p, double t);

/// Detuning in units of Omega_0. Throws std::out_of_range outside [0, T].
double detuning(const PulseParams& p, double t);

struct Drive {
  std::complex<double> omega;  // units of Omega_0
  double delta;
};

/// Drive at protocol time t in [0, total_duration()].
Drive protocol_drive(const ProtocolSpec& spec, double t);

/// Times where the drive or its derivatives are not smooth (ramp edges, pulse
/// boundaries) plus Gaussian centres; used to align quadrature panels.
std::vector<double> drive_breakpoints(const ProtocolSpec& spec);

/// Largest quadrature panel that still resolves the pulse features.
double resolving_panel_length(const PulseParams& p);

/// phi(t, t0) = integral of Delta over [t0, t]. Throws std::invalid_argument
/// when t < t0 and std::out_of_range outside the protocol domain.
double accumulated_phase(const ProtocolSpec& spec, double t, double t0);

/// Reduces an angle to [0, 2 pi).
double wrap_two_pi(double angle);

/// Reduces an angle to (-pi, pi].
double wrap_pi(double angle);

struct PhaseJump {
  double theta = 0.0;           // selected jump, [0, 2 pi)
  double analytic = 0.0;        // accumulated phase over the first pulse, mod 2 pi
  bool pi_offset = false;       // true when analytic + pi cancels better
  double residual_analytic = 0.0;  // |first-order spectator amplitude| with `analytic`
  double residual_shifted = 0.0;   // same with `analytic + pi`
};

/// Phase jump for the double-pulse protocol. The analytic value is the
/// detuning integral over the first pulse; both it and its pi-shifted partner
/// are checked against the first-order Rydberg amplitude of the spectator and
/// the better one is selected.
PhaseJump phase_jump_theta(const PulseParams& p);

}  // namespace xtalk
