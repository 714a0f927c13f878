#include "xtalk/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "xtalk/perturb.hpp"
#include "xtalk/quadrature.hpp"

namespace xtalk {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kPhaseOrder = 20;

// Endpoint slack for integrator stages that land on the boundary.
double domain_slack(double duration) { return 1e-12 * duration; }

double clamp_to_domain(double t, double duration, const char* who) {
  const double slack = domain_slack(duration);
  if (!(t >= -slack && t <= duration + slack)) {
    throw std::out_of_range(std::string(who) + ": time " + std::to_string(t) +
                            " outside [0, " + std::to_string(duration) + "]");
  }
  return std::clamp(t, 0.0, duration);
}

}  // namespace

void PulseParams::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw std::invalid_argument("PulseParams: duration must be positive");
  }
  if (!(delta_width > 0.0) || !std::isfinite(delta_width)) {
    throw std::invalid_argument("PulseParams: delta_width must be positive");
  }
  if (!(ramp_fraction > 0.0 && ramp_fraction < 0.5)) {
    throw std::invalid_argument("PulseParams: ramp_fraction must lie in (0, 0.5)");
  }
  if (!std::isfinite(delta_amp) || !std::isfinite(delta_center) || !std::isfinite(delta_offset)) {
    throw std::invalid_argument("PulseParams: detuning parameters must be finite");
  }
}

std::string_view to_string(ProtocolKind kind) {
  return kind == ProtocolKind::DoublePulse ? "double" : "single";
}

ProtocolKind protocol_kind_from_string(std::string_view name) {
  if (name == "single") return ProtocolKind::SinglePulse;
  if (name == "double") return ProtocolKind::DoublePulse;
  throw std::invalid_argument("unknown protocol kind '" + std::string(name) + "'");
}

double ProtocolSpec::total_duration() const { return pulse_count() * pulse.duration; }

void ProtocolSpec::validate() const {
  pulse.validate();
  if (kind == ProtocolKind::DoublePulse && !(theta >= 0.0 && theta < 2.0 * kPi)) {
    throw std::invalid_argument("ProtocolSpec: theta must lie in [0, 2 pi)");
  }
}

ProtocolSpec single_pulse(const PulseParams& pulse) {
  return {ProtocolKind::SinglePulse, pulse, 0.0};
}

ProtocolSpec double_pulse(const PulseParams& pulse, double theta) {
  return {ProtocolKind::DoublePulse, pulse, wrap_two_pi(theta)};
}

double rabi_envelope(const PulseParams& p, double t) {
  t = clamp_to_domain(t, p.duration, "rabi_envelope");
  const double ramp = p.ramp_fraction * p.duration;
  if (t < ramp) {
    const double s = std::sin(0.5 * kPi * t / ramp);
    return s * s;
  }
  if (t > p.duration - ramp) {
    const double s = std::sin(0.5 * kPi * (p.duration - t) / ramp);
    return s * s;
  }
  return 1.0;
}

double detuning(const PulseParams& p, double t) {
  t = clamp_to_domain(t, p.duration, "detuning");
  const double x = t - 0.5 * p.duration - p.delta_center;
  return p.delta_offset + p.delta_amp * std::exp(-x * x / (2.0 * p.delta_width * p.delta_width));
}

Drive protocol_drive(const ProtocolSpec& spec, double t) {
  const double total = spec.total_duration();
  t = clamp_to_domain(t, total, "protocol_drive");
  const double T = spec.pulse.duration;
  if (spec.kind == ProtocolKind::DoublePulse && t > T) {
    const double s = t - T;
    return {std::polar(rabi_envelope(spec.pulse, s), spec.theta), detuning(spec.pulse, s)};
  }
  return {rabi_envelope(spec.pulse, t), detuning(spec.pulse, t)};
}

std::vector<double> drive_breakpoints(const ProtocolSpec& spec) {
  const PulseParams& p = spec.pulse;
  const double T = p.duration;
  const double ramp = p.ramp_fraction * T;
  std::vector<double> out;
  for (int k = 0; k < spec.pulse_count(); ++k) {
    const double t0 = k * T;
    for (double x : {0.0, ramp, T - ramp, T, 0.5 * T + p.delta_center}) out.push_back(t0 + x);
  }
  return out;
}

double resolving_panel_length(const PulseParams& p) {
  return std::min({p.delta_width, p.ramp_fraction * p.duration, p.duration}) / 2.0;
}

double accumulated_phase(const ProtocolSpec& spec, double t, double t0) {
  if (t < t0) throw std::invalid_argument("accumulated_phase: reversed limits");
  const double total = spec.total_duration();
  t = clamp_to_domain(t, total, "accumulated_phase");
  t0 = clamp_to_domain(t0, total, "accumulated_phase");
  if (t == t0) return 0.0;
  const auto breaks = drive_breakpoints(spec);
  const auto panels = quad::make_panels(t0, t, breaks, resolving_panel_length(spec.pulse));
  return quad::integrate([&](double s) { return protocol_drive(spec, s).delta; }, panels,
                         kPhaseOrder);
}

double wrap_two_pi(double angle) {
  double r = std::fmod(angle, 2.0 * kPi);
  if (r < 0.0) r += 2.0 * kPi;
  if (r >= 2.0 * kPi) r = 0.0;
  return r;
}

double wrap_pi(double angle) {
  double r = wrap_two_pi(angle);
  if (r > kPi) r -= 2.0 * kPi;
  return r;
}

PhaseJump phase_jump_theta(const PulseParams& p) {
  p.validate();
  PhaseJump out;
  out.analytic = wrap_two_pi(accumulated_phase(single_pulse(p), p.duration, 0.0));
  out.residual_analytic = std::abs(first_order_amplitude(double_pulse(p, out.analytic)));
  out.residual_shifted = std::abs(first_order_amplitude(double_pulse(p, out.analytic + kPi)));
  out.pi_offset = out.residual_shifted < out.residual_analytic;
  out.theta = out.pi_offset ? wrap_two_pi(out.analytic + kPi) : out.analytic;
  return out;
}

}  // namespace xtalk
