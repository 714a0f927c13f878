#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "reference_pulses.hpp"
#include "xtalk/dynamics.hpp"

using namespace xtalk;

namespace {

constexpr Level L0 = Level::q0;
constexpr Level L1 = Level::q1;
constexpr Level R = Level::ryd;

// Third-atom Hamiltonian written directly in the {0, 1, r} basis.
Eigen::MatrixXcd third_h(const oracle::Pulse& p, bool dbl, double theta, double eps, double t) {
  const auto [om, de] = oracle::drive(p, dbl, theta, t);
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(3, 3);
  H(2, 1) = std::sqrt(eps) * om / 2.0;
  H(1, 2) = std::conj(H(2, 1));
  H(2, 2) = -de;
  return H;
}

oracle::Pulse to_oracle(const PulseParams& p) {
  return {p.delta_amp, p.delta_width, p.delta_center, p.delta_offset, p.duration, p.ramp_fraction};
}

}  // namespace

TEST_CASE("resonant pi pulse on a lone atom") {
  // Zero detuning: the population follows the pulse area T (1 - rf).
  PulseParams p;
  p.ramp_fraction = 0.15;
  p.duration = std::numbers::pi / (1 - p.ramp_fraction);
  SystemParams s;
  s.epsilon = 1.0;
  const auto traj = propagate_third_alone(basis_state(3, 1), single_pulse(p), s, {});
  CHECK(std::norm(traj.final_state()(2)) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::abs(traj.final_state()(0)) == 0.0);

  SUBCASE("quarter-area intermediate against the two-level formula") {
    p.duration = 0.5 * std::numbers::pi / (1 - p.ramp_fraction);
    const auto half = propagate_third_alone(basis_state(3, 1), single_pulse(p), s, {});
    CHECK(std::norm(half.final_state()(2)) == doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("constant drive Rabi formula on a flat-top segment") {
    // With a very short ramp the pulse is essentially square.
    PulseParams q;
    q.ramp_fraction = 1e-4;
    q.duration = 2.3;
    q.delta_amp = 0.0;
    q.delta_offset = 0.7;
    IntegratorConfig cfg;
    cfg.step = 1e-5;
    const auto out = propagate_third_alone(basis_state(3, 1), single_pulse(q), s, cfg);
    CHECK(std::norm(out.final_state()(2)) ==
          doctest::Approx(oracle::rabi_population(1.0, 0.7, q.duration)).epsilon(1e-3));
  }
}

TEST_CASE("third-atom propagation against matrix exponentials") {
  const PulseParams h = reference::half_pi_pulse();
  const double theta = phase_jump_theta(h).theta;
  const oracle::Pulse o = to_oracle(h);
  for (double eps : {1e-3, 0.05, 0.5}) {
    SystemParams s;
    s.epsilon = eps;
    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(3);
    psi0(0) = psi0(1) = 1 / std::numbers::sqrt2;
    const auto lib = propagate_third_alone(psi0, double_pulse(h, theta), s, {});
    const Eigen::VectorXcd ref = oracle::expm_propagate(
        [&](double t) { return third_h(o, true, theta, eps, t); }, psi0, 2 * o.T, 44000);
    CHECK((lib.final_state() - ref).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("full propagation factorizes when the spectator does not interact") {
  const PulseParams p = reference::cz_pulse();
  SystemParams s;
  s.v13 = s.v23 = 0.0;
  s.epsilon = 0.03;
  const StateVector pair0 = kron(plus_state(), plus_state());
  const StateVector third0 = plus_state();
  const auto spec = double_pulse(p, 1.3);
  const StateVector full = propagate(kron(pair0, third0), spec, s, {}).final_state();
  const StateVector a = propagate_gate_pair(pair0, spec, s, {}).final_state();
  const StateVector b = propagate_third_alone(third0, spec, s, {}).final_state();
  CHECK((full - kron(a, b)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("norm conservation and trajectory sampling") {
  SystemParams s;
  s.epsilon = 0.1;
  const StateVector psi0 = kron(kron(plus_state(), plus_state()), plus_state());
  IntegratorConfig cfg;
  cfg.samples_per_pulse = 50;
  const auto traj = propagate(psi0, double_pulse(reference::cz_pulse(), 0.4), s, cfg);
  CHECK(traj.max_norm_drift < 1e-10);
  CHECK(traj.times.back() == doctest::Approx(22.0));
  CHECK(traj.states.size() == traj.times.size());
  CHECK(traj.times.size() >= 100);
  CHECK(std::is_sorted(traj.times.begin(), traj.times.end()));
  for (const auto& st : traj.states) CHECK(std::abs(st.norm() - 1.0) < 1e-9);
}

TEST_CASE("step halving converges at fourth order") {
  SystemParams s;
  s.epsilon = 0.01;
  const StateVector psi0 = kron(kron(plus_state(), plus_state()), plus_state());
  const auto spec = single_pulse(reference::cz_pulse());
  IntegratorConfig cfg;
  CHECK(step_halving_difference(psi0, spec, s, cfg) < 1e-8);
  cfg.step = 4e-3;
  const double d1 = step_halving_difference(psi0, spec, s, cfg);
  cfg.step = 2e-3;
  const double d2 = step_halving_difference(psi0, spec, s, cfg);
  CHECK(d1 / d2 > 10.0);
}

TEST_CASE("adaptive integrator agrees with fixed RK4") {
  SystemParams s;
  s.epsilon = 0.02;
  s.v13 = 5.0;
  const StateVector psi0 = basis_state(27, qubit_index(1, 1, 1));
  const auto spec = double_pulse(reference::half_pi_pulse(), 2.0);
  IntegratorConfig fixed;
  IntegratorConfig adaptive;
  adaptive.method = IntegratorMethod::AdaptiveRK;
  adaptive.tolerance = 1e-11;
  const auto a = propagate(psi0, spec, s, fixed).final_state();
  const auto b = propagate(psi0, spec, s, adaptive).final_state();
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("block propagation matches column-wise propagation") {
  SystemParams s;
  s.epsilon = 0.05;
  const DriveHamiltonian h(s, Subsystem::Full);
  Eigen::MatrixXcd cols = Eigen::MatrixXcd::Zero(27, 2);
  cols(qubit_index(0, 1, 1), 0) = 1.0;
  cols(qubit_index(1, 1, 0), 1) = 1.0;
  const auto spec = single_pulse(reference::cz_pulse());
  const Eigen::MatrixXcd out = propagate_block(h, s.omega0, cols, spec, {});
  const auto c0 = propagate(basis_state(27, qubit_index(0, 1, 1)), spec, s, {}).final_state();
  CHECK((out.col(0) - c0).cwiseAbs().maxCoeff() < 1e-13);
  CHECK_THROWS_AS(propagate_block(h, 1.0, Eigen::MatrixXcd::Zero(9, 1), spec, {}),
                  std::invalid_argument);
}

TEST_CASE("stiff Hamiltonians get more steps") {
  SystemParams weak, strong;
  weak.v12 = weak.v13 = weak.v23 = 1.0;
  strong.v12 = strong.v13 = strong.v23 = 1000.0;
  const auto spec = single_pulse(reference::cz_pulse());
  const auto nw = rk4_steps_per_pulse(DriveHamiltonian(weak, Subsystem::Full), 1.0, spec, {});
  const auto ns = rk4_steps_per_pulse(DriveHamiltonian(strong, Subsystem::Full), 1.0, spec, {});
  CHECK(nw >= 11000);
  CHECK(ns > 5 * nw);
}

TEST_CASE("propagation input validation") {
  SystemParams s;
  const auto spec = single_pulse(reference::cz_pulse());
  CHECK_THROWS_AS(propagate(basis_state(9, 0), spec, s, {}), std::invalid_argument);
  CHECK_THROWS_AS(propagate(2.0 * basis_state(27, 0), spec, s, {}), std::invalid_argument);
  IntegratorConfig bad;
  bad.step = 0.0;
  CHECK_THROWS_AS(propagate(basis_state(27, 0), spec, s, bad), std::invalid_argument);
  IntegratorConfig strict;
  strict.step = 0.2;
  strict.norm_tolerance = 1e-15;
  CHECK_THROWS_AS(propagate_gate_pair(basis_state(9, pair_index(L1, L1)), spec, s, strict),
                  PropagationError);
}

TEST_CASE("ground state is stationary and |0> never leaves") {
  SystemParams s;
  s.epsilon = 0.5;
  const auto out = propagate(basis_state(27, 0), double_pulse(reference::cz_pulse(), 1.0), s, {});
  CHECK(std::abs(out.final_state()(0) - 1.0) == 0.0);
  const auto one = propagate(basis_state(27, basis_index(L0, L1, L0)),
                             single_pulse(reference::cz_pulse()), s, {}).final_state();
  for (int i = 0; i < 27; ++i) {
    if (level_of(i, 1) != L0 || level_of(i, 3) != L0) CHECK(one(i) == Complex(0.0));
  }
  CHECK(std::norm(one(basis_index(L0, R, L0))) < 1e-6);
}

TEST_CASE("trajectory csv") {
  SystemParams s;
  IntegratorConfig cfg;
  cfg.samples_per_pulse = 4;
  const auto traj =
      propagate_gate_pair(basis_state(9, pair_index(L1, L1)), single_pulse(reference::cz_pulse()), s, cfg);
  std::ostringstream os;
  const std::vector<int> idx{pair_index(L1, L1), pair_index(R, R)};
  const std::vector<std::string> labels{"11", "rr"};
  write_trajectory_csv(os, traj, idx, labels);
  const std::string text = os.str();
  CHECK(text.rfind("t,re_11,im_11,re_rr,im_rr\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(traj.times.size() + 1));
  const std::vector<std::string> one{"x"};
  CHECK_THROWS_AS(write_trajectory_csv(os, traj, idx, one), std::invalid_argument);
}
