#pragma once

// Schroedinger propagation i d|psi>/dt = H(t)|psi> for a protocol.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "xtalk/hilbert.hpp"
#include "xtalk/pulses.hpp"

namespace xtalk {

enum class IntegratorMethod { FixedRK4, AdaptiveRK };

struct IntegratorConfig {
  double step = 1e-3;         // base step, units of 1/Omega_0
  double tolerance = 1e-10;   // local error target (adaptive mode)
  IntegratorMethod method = IntegratorMethod::FixedRK4;
  int samples_per_pulse = 200;
  double norm_tolerance = 1e-9;

  void validate() const;
};

/// Thrown when a propagation cannot meet its configured accuracy.
class PropagationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  double max_norm_drift = 0.0;
  std::size_t steps = 0;

  const StateVector& final_state() const { return states.back(); }
};

/// Full 27-dimensional propagation under the three-atom Hamiltonian.
Trajectory propagate(const StateVector& psi0, const ProtocolSpec& spec,
                     const SystemParams& params, const IntegratorConfig& cfg);

/// Gate atoms only (9 dimensions, spectator absent).
Trajectory propagate_gate_pair(const StateVector& psi0, const ProtocolSpec& spec,
                               const SystemParams& params, const IntegratorConfig& cfg);

/// Spectator only (3 dimensions), driven with sqrt(epsilon) Omega.
Trajectory propagate_third_alone(const StateVector& psi0, const ProtocolSpec& spec,
                                 const SystemParams& params, const IntegratorConfig& cfg);

/// Final states for a block of initial columns, without sampling. Used when
/// many initial states share one propagation.
Eigen::MatrixXcd propagate_block(const DriveHamiltonian& hamiltonian, double omega0,
                                 const Eigen::MatrixXcd& columns, const ProtocolSpec& spec,
                                 const IntegratorConfig& cfg);

/// Fixed-step RK4 step count per pulse for the given configuration.
std::size_t rk4_steps_per_pulse(const DriveHamiltonian& hamiltonian, double omega0,
                                const ProtocolSpec& spec, const IntegratorConfig& cfg);

/// Max |psi_h - psi_{h/2}| over final amplitudes: a step-halving error estimate.
double step_halving_difference(const StateVector& psi0, const ProtocolSpec& spec,
                               const SystemParams& params, const IntegratorConfig& cfg);

/// CSV with header "t,re_<label>,im_<label>,..." for the tracked basis indices.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          std::span<const int> tracked, std::span<const std::string> labels);

}  // namespace xtalk
