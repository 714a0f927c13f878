#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "reference_pulses.hpp"
#include "xtalk/dynamics.hpp"
#include "xtalk/metrics.hpp"
#include "xtalk/perturb.hpp"

using namespace xtalk;

namespace {

oracle::Pulse to_oracle(const PulseParams& p) {
  return {p.delta_amp, p.delta_width, p.delta_center, p.delta_offset, p.duration, p.ramp_fraction};
}

double simulated_third_infidelity(const ProtocolSpec& spec, double eps) {
  SystemParams s;
  s.epsilon = eps;
  IntegratorConfig cfg;
  cfg.samples_per_pulse = 0;
  return 1.0 - third_atom_fidelity(propagate_third_alone(plus_state(), spec, s, cfg).final_state());
}

}  // namespace

TEST_CASE("first-order amplitude against brute-force quadrature") {
  for (const PulseParams& p : {reference::cz_pulse(), reference::half_pi_pulse()}) {
    for (double theta : {0.0, 1.1, phase_jump_theta(p).theta}) {
      const auto spec = double_pulse(p, theta);
      const auto d = oracle::brute_force_dyson(to_oracle(p), true, theta, 400000);
      CHECK(std::abs(first_order_amplitude(spec) - d.a1) < 1e-7);
      CHECK(std::abs(second_order_elements(spec).coeff_11 - d.c11) < 1e-6);
    }
    const auto d1 = oracle::brute_force_dyson(to_oracle(p), false, 0.0, 200000);
    CHECK(std::abs(first_order_amplitude(single_pulse(p)) - d1.a1) < 1e-7);
  }
}

TEST_CASE("no detuning: first order is the pulse area") {
  PulseParams p;
  p.delta_amp = 0.0;
  const std::complex<double> a1 = first_order_amplitude(single_pulse(p));
  CHECK(std::abs(a1 - std::complex<double>(0.0, -0.5 * p.duration * (1 - p.ramp_fraction))) < 1e-12);
  // A pi jump on the second pulse undoes the first.
  CHECK(std::abs(first_order_amplitude(double_pulse(p, std::numbers::pi))) < 1e-12);
}

TEST_CASE("report consistency") {
  const PerturbReport single = perturb_report(single_pulse(reference::cz_pulse()));
  CHECK_FALSE(single.first_order_cancelled);
  CHECK(single.alpha == doctest::Approx(std::norm(single.first_order_ryd_amp)));
  CHECK(single.linear_infid_coeff == doctest::Approx(single.alpha / 2));
  // Probability conservation at order eps.
  CHECK(std::abs(2 * single.second_order.coeff_11.real() + single.alpha) < 1e-10);
  CHECK(std::abs(2 * single.second_order.coeff_rr.real() + single.alpha) < 1e-10);
  CHECK(single.beta == doctest::Approx(single.second_order.coeff_11.imag()));

  const auto echo = double_pulse(reference::half_pi_pulse(), phase_jump_theta(reference::half_pi_pulse()).theta);
  const PerturbReport r = perturb_report(echo);
  CHECK(r.first_order_cancelled);
  CHECK(r.alpha < 1e-10);
  CHECK(r.predicted_infid_coeff == doctest::Approx(r.beta * r.beta / 4));
  CHECK(predict_third_infidelity(r, 1e-2) == doctest::Approx(r.predicted_infid_coeff * 1e-4));
  CHECK(predict_third_infidelity(single, 1e-2) == doctest::Approx(single.linear_infid_coeff * 1e-2));
  CHECK(predict_third_infidelity(echo, 0.0) == 0.0);
  CHECK_THROWS_AS(predict_third_infidelity(r, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(predict_third_infidelity(r, -1e-3), std::invalid_argument);
}

TEST_CASE("prediction matches propagation at small epsilon") {
  SUBCASE("single pulse, linear regime") {
    const auto spec = single_pulse(reference::cz_pulse());
    for (double eps : {1e-6, 1e-5}) {
      const double sim = simulated_third_infidelity(spec, eps);
      CHECK(std::abs(sim / predict_third_infidelity(spec, eps) - 1) < 1e-2);
    }
  }
  SUBCASE("echo, quadratic regime") {
    const auto spec =
        double_pulse(reference::half_pi_pulse(), phase_jump_theta(reference::half_pi_pulse()).theta);
    for (double eps : {1e-4, 1e-3}) {
      const double sim = simulated_third_infidelity(spec, eps);
      CHECK(std::abs(sim / predict_third_infidelity(spec, eps) - 1) < 2e-2);
    }
  }
}

TEST_CASE("phase accumulated in |1> is beta * eps at leading order") {
  const auto spec = single_pulse(reference::cz_pulse());
  const PerturbReport r = perturb_report(spec);
  SystemParams s;
  s.epsilon = 1e-5;
  const auto out = propagate_third_alone(basis_state(3, 1), spec, s, {}).final_state();
  CHECK(std::arg(out(1)) / s.epsilon == doctest::Approx(r.beta).epsilon(1e-3));
}
