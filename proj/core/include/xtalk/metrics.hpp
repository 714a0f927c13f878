#pragma once

// Fidelities of the three-atom evolution and the phase-cancellation circuit.
//
// Qubit columns: the 8 computational states |b1 b2 b3> are numbered
// q = 4 b1 + 2 b2 + b3; a "qubit block" is the 27 x 8 matrix whose column q
// is U |b1 b2 b3>. Any qubit-subspace initial state evolves as block * coeffs.

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

#include "xtalk/dynamics.hpp"
#include "xtalk/hilbert.hpp"
#include "xtalk/pulses.hpp"

namespace xtalk {

inline constexpr int kQubitStates = 8;

enum class InitialState { g00, g01, g10, g11, superposition };

std::string_view to_string(InitialState s);
InitialState initial_state_from_string(std::string_view name);
inline constexpr std::array<InitialState, 5> kAllInitialStates{
    InitialState::g00, InitialState::g01, InitialState::g10, InitialState::g11,
    InitialState::superposition};

/// Full-space index of qubit column q.
constexpr int qubit_column_index(int q) { return qubit_index((q >> 2) & 1, (q >> 1) & 1, q & 1); }

/// 27 x 8 matrix of the computational basis states.
Eigen::MatrixXcd qubit_basis_columns();

/// Evolves all 8 computational basis states through the protocol.
Eigen::MatrixXcd propagate_qubit_block(const ProtocolSpec& spec, const SystemParams& params,
                                       const IntegratorConfig& cfg);

/// Multiplies every amplitude by exp(-i phi * (number of gate atoms in |1>)).
void apply_virtual_z(Eigen::Ref<Eigen::MatrixXcd> states, double phi);

/// Coefficients (length 8) of the input state: |b1 b2> (x) (|0>+|1>)/sqrt2, or
/// all three atoms in (|0>+|1>)/sqrt2.
Eigen::VectorXcd initial_qubit_coeffs(InitialState s);

/// Ideal output for the input above: CZ on the gate atoms, spectator untouched.
StateVector ideal_output(InitialState s);

/// Single-qubit phase of the gate atoms for a protocol (free phase of the CZ
/// mapping), from the gate pair alone.
double protocol_gate_phase(const ProtocolSpec& spec, double v12, const IntegratorConfig& cfg);

/// F3 = |<Psi0|psi>|^2 with Psi0 = (|0>+|1>)/sqrt2 on the spectator. Accepts a
/// 3-dim spectator state or a 27-dim state with the gate atoms in |00>.
double third_atom_fidelity(const StateVector& psi);

/// |<Psi_t|psi_f>|^2 after removing the gate-atom single-qubit phase, with
/// Psi_t = CZ|++> (x) |+>.
double three_qubit_fidelity(const StateVector& psi_f, double gate_phase);

struct FidelityReport {
  double f3 = 1.0;
  double f_three_qubit = 1.0;
  std::map<std::string, double> per_initial_state;  // infidelities keyed "00".."11"
};

/// Infidelity for one input from a propagated qubit block (virtual Z applied here).
double initial_state_infidelity(const Eigen::MatrixXcd& block, InitialState s, double gate_phase);

FidelityReport fidelity_report(const Eigen::MatrixXcd& block, double gate_phase);

/// Phases picked up by the spectator in |1>, and the gate angles of the
/// cancellation circuit: a phase gate on atom 3 (varphi1), controlled phases
/// between atom 3 and atoms 1, 2 (varphi2_13, varphi2_23) and a doubly
/// controlled phase (varphi3). For the symmetric case varphi2_13 = varphi2_23.
struct PhaseSet {
  double phi1 = 0.0;      // |001>
  double phi2 = 0.0;      // |011>
  double phi2_101 = 0.0;  // |101>, equal to phi2 for a symmetric arrangement
  double phi3 = 0.0;      // |111>, ideal CZ sign removed
  double varphi1 = 0.0;
  double varphi2 = 0.0;     // circuit angle on the atom-2/atom-3 pair
  double varphi2_13 = 0.0;  // circuit angle on the atom-1/atom-3 pair
  double varphi3 = 0.0;
};

/// Circuit angles from measured phases; wraps all angles into (-pi, pi].
PhaseSet solve_circuit_phases(double phi1, double phi011, double phi101, double phi111);

/// Phases {001, 011, 101, 111} produced by the circuit angles (inverse of the above, mod 2 pi).
std::array<double, 4> reconstruct_phases(const PhaseSet& p);

/// Thrown when a reference amplitude is too small for its phase to mean anything.
class PhaseExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

PhaseSet phases_from_block(const Eigen::MatrixXcd& block, double gate_phase);

PhaseSet extract_phases(const SystemParams& params, const ProtocolSpec& spec,
                        const IntegratorConfig& cfg);

/// Diagonal of the correction on the qubit subspace, indexed by q = 4 b1 + 2 b2 + b3:
/// exp(-i (varphi1 + varphi2_13 b1 + varphi2 b2 + varphi3 b1 b2)) when b3 = 1, else 1.
Eigen::VectorXcd correction_unitary(const PhaseSet& p);

/// Applies the correction to a 27-dim state (or each column of a 27 x n block);
/// amplitudes outside the qubit subspace are left alone.
void apply_correction(Eigen::Ref<Eigen::MatrixXcd> states, const PhaseSet& p);

}  // namespace xtalk
