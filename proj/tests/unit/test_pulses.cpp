#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "reference_pulses.hpp"
#include "xtalk/perturb.hpp"
#include "xtalk/pulses.hpp"

using namespace xtalk;

namespace {

PulseParams gaussian(double amp, double width, double center = 0.0) {
  PulseParams p;
  p.delta_amp = amp;
  p.delta_width = width;
  p.delta_center = center;
  p.duration = 10.0;
  return p;
}

}  // namespace

TEST_CASE("rabi envelope") {
  PulseParams p;
  CHECK(rabi_envelope(p, 0.0) == 0.0);
  CHECK(rabi_envelope(p, p.duration) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(rabi_envelope(p, p.duration / 2) == 1.0);
  CHECK(rabi_envelope(p, p.ramp_fraction * p.duration / 2) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(rabi_envelope(p, -0.1), std::out_of_range);
  CHECK_THROWS_AS(rabi_envelope(p, p.duration + 0.1), std::out_of_range);
  for (double t = 0.0; t <= p.duration; t += 0.0137) {
    CHECK(rabi_envelope(p, t) == doctest::Approx(oracle::envelope(t, p.duration, p.ramp_fraction)).epsilon(1e-12));
  }
}

TEST_CASE("rabi envelope is Lipschitz across ramp edges") {
  PulseParams p;
  const double ramp = p.ramp_fraction * p.duration;
  const double C = std::numbers::pi / (2 * ramp);  // max slope of the sin^2 ramp
  for (double edge : {0.0, ramp, p.duration - ramp, p.duration}) {
    for (double h : {1e-3, 1e-5, 1e-7}) {
      const double t0 = std::clamp(edge - h / 2, 0.0, p.duration - h);
      CHECK(std::abs(rabi_envelope(p, t0 + h) - rabi_envelope(p, t0)) <= C * h * (1 + 1e-9));
    }
  }
}

TEST_CASE("gaussian detuning") {
  const PulseParams p = gaussian(2.5, 1.3, 0.7);
  const double peak = p.duration / 2 + p.delta_center;
  CHECK(detuning(p, peak) == doctest::Approx(2.5));
  CHECK(detuning(p, peak + p.delta_width) == doctest::Approx(2.5 * std::exp(-0.5)));
  CHECK(detuning(gaussian(0.0, 1.0), 3.3) == 0.0);
  PulseParams q = p;
  q.delta_offset = -0.4;
  CHECK(detuning(q, peak) == doctest::Approx(2.1));
  CHECK_THROWS_AS(detuning(p, 10.5), std::out_of_range);
}

TEST_CASE("protocol drive") {
  const PulseParams p = gaussian(1.7, 1.1, -0.3);
  SUBCASE("double pulse with zero jump repeats itself") {
    const ProtocolSpec s = double_pulse(p, 0.0);
    for (double t : {0.3, 2.0, 5.1, 8.8}) {
      const Drive a = protocol_drive(s, t);
      const Drive b = protocol_drive(s, t + p.duration);
      CHECK(std::abs(a.omega - b.omega) < 1e-12);
      CHECK(a.delta == doctest::Approx(b.delta).epsilon(1e-12));
    }
  }
  SUBCASE("second half carries the jump on the Rabi amplitude only") {
    const double theta = 2.1;
    const ProtocolSpec s = double_pulse(p, theta);
    for (double t : {0.4, 3.0, 5.0, 9.2}) {
      const Drive a = protocol_drive(s, t);
      const Drive b = protocol_drive(s, t + p.duration);
      CHECK(std::abs(b.omega - a.omega * std::polar(1.0, theta)) < 1e-15);
      CHECK(std::abs(b.omega) == doctest::Approx(std::abs(a.omega)));
      CHECK(std::arg(b.omega) == doctest::Approx(theta));
      CHECK(a.delta == doctest::Approx(b.delta).epsilon(1e-12));
    }
  }
  SUBCASE("single pulse ends switched off") {
    CHECK(std::abs(protocol_drive(single_pulse(p), p.duration).omega) < 1e-15);
    CHECK_THROWS_AS(protocol_drive(single_pulse(p), p.duration * 1.5), std::out_of_range);
  }
  SUBCASE("durations and validation") {
    CHECK(double_pulse(p, 1.0).total_duration() == 2 * p.duration);
    CHECK(single_pulse(p).total_duration() == p.duration);
    ProtocolSpec bad = double_pulse(p, 0.0);
    bad.theta = 7.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    CHECK(double_pulse(p, -1.0).theta == doctest::Approx(2 * std::numbers::pi - 1.0));
  }
}

TEST_CASE("pulse parameter validation") {
  PulseParams p;
  CHECK_NOTHROW(p.validate());
  p.ramp_fraction = 0.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.ramp_fraction = 0.15;
  p.delta_width = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.delta_width = 1.0;
  p.duration = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK(protocol_kind_from_string("double") == ProtocolKind::DoublePulse);
  CHECK(to_string(ProtocolKind::SinglePulse) == "single");
  CHECK_THROWS_AS(protocol_kind_from_string("triple"), std::invalid_argument);
}

TEST_CASE("accumulated phase") {
  const PulseParams p = gaussian(2.0, 0.8, 0.25);
  const ProtocolSpec s = single_pulse(p);
  CHECK(accumulated_phase(s, 3.0, 3.0) == 0.0);
  CHECK(accumulated_phase(single_pulse(gaussian(0.0, 1.0)), 7.0, 1.0) == 0.0);
  CHECK_THROWS_AS(accumulated_phase(s, 1.0, 2.0), std::invalid_argument);

  SUBCASE("full-pulse integral of a narrow Gaussian") {
    const double expect = p.delta_amp * p.delta_width * std::sqrt(2 * std::numbers::pi);
    CHECK(accumulated_phase(s, p.duration, 0.0) == doctest::Approx(expect).epsilon(1e-6));
  }
  SUBCASE("partial intervals against erf") {
    for (auto [a, b] : {std::pair{0.0, 4.9}, {4.1, 6.3}, {5.2, 10.0}, {1.234, 8.765}}) {
      const double ref = oracle::gaussian_integral(p.delta_amp, p.delta_width,
                                                   p.duration / 2 + p.delta_center, a, b);
      CHECK(std::abs(accumulated_phase(s, b, a) - ref) < 1e-10);
    }
  }
  SUBCASE("additivity") {
    for (auto [t0, t1, t2] : {std::tuple{0.0, 3.3, 9.0}, {1.0, 5.25, 5.5}, {2.2, 7.7, 10.0}}) {
      const double whole = accumulated_phase(s, t2, t0);
      const double parts = accumulated_phase(s, t2, t1) + accumulated_phase(s, t1, t0);
      CHECK(std::abs(whole - parts) < 1e-9);
    }
  }
  SUBCASE("constant offset adds linearly") {
    PulseParams q = p;
    q.delta_offset = 0.3;
    CHECK(accumulated_phase(single_pulse(q), 8.0, 2.0) - accumulated_phase(s, 8.0, 2.0) ==
          doctest::Approx(1.8).epsilon(1e-12));
  }
  SUBCASE("double protocol second half repeats the first") {
    const ProtocolSpec d = double_pulse(p, 1.0);
    CHECK(accumulated_phase(d, 2 * p.duration, p.duration) ==
          doctest::Approx(accumulated_phase(d, p.duration, 0.0)).epsilon(1e-12));
  }
}

TEST_CASE("wrapping") {
  CHECK(wrap_two_pi(-0.5) == doctest::Approx(2 * std::numbers::pi - 0.5));
  CHECK(wrap_two_pi(7.0) == doctest::Approx(7.0 - 2 * std::numbers::pi));
  CHECK(wrap_pi(std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_pi(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_pi(4.0) == doctest::Approx(4.0 - 2 * std::numbers::pi));
}

TEST_CASE("phase jump") {
  SUBCASE("no detuning gives zero analytic phase") {
    const PhaseJump j = phase_jump_theta(gaussian(0.0, 1.0));
    CHECK(j.analytic == 0.0);
  }
  SUBCASE("doubling the amplitude doubles the analytic phase before reduction") {
    const PulseParams a = gaussian(0.2, 0.9);
    const PulseParams b = gaussian(0.4, 0.9);
    CHECK(phase_jump_theta(b).analytic == doctest::Approx(2 * phase_jump_theta(a).analytic).epsilon(1e-12));
  }
  SUBCASE("calibrated half pulse: theta from the detuning integral, pi offset reported") {
    const PulseParams h = reference::half_pi_pulse();
    const PhaseJump j = phase_jump_theta(h);
    const oracle::Pulse o{h.delta_amp, h.delta_width, h.delta_center, h.delta_offset, h.duration,
                          h.ramp_fraction};
    const double integral =
        oracle::gaussian_integral(o.amp, o.width, o.T / 2 + o.center, 0.0, o.T) + o.offset * o.T;
    CHECK(std::abs(std::remainder(j.analytic - integral, 2 * std::numbers::pi)) < 1e-9);
    CHECK(j.pi_offset);
    CHECK(std::abs(std::remainder(j.theta - j.analytic - std::numbers::pi, 2 * std::numbers::pi)) < 1e-12);
    CHECK(j.residual_shifted < 1e-6 * j.residual_analytic);
  }
}

TEST_CASE("breakpoints cover ramps and pulse boundaries") {
  const PulseParams p = gaussian(1.0, 1.0, 0.5);
  const auto bp = drive_breakpoints(double_pulse(p, 0.0));
  const double ramp = p.ramp_fraction * p.duration;
  for (double t : {0.0, ramp, p.duration - ramp, p.duration, p.duration + ramp, 2 * p.duration}) {
    CHECK(std::any_of(bp.begin(), bp.end(), [&](double b) { return std::abs(b - t) < 1e-12; }));
  }
  CHECK(resolving_panel_length(p) > 0.0);
}
