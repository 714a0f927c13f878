#pragma once

// State space of two gate atoms and one spectator atom, each a three-level
// system {|0>, |1>, |r>}, plus the time-dependent Hamiltonian acting on it.
//
// Basis ordering (used everywhere in the library):
//   index = 9 * level(atom1) + 3 * level(atom2) + level(atom3)
// with level(|0>) = 0, level(|1>) = 1, level(|r>) = 2.
//
// Units: hbar = 1, Omega_0 = 1. Energies are in units of hbar * Omega_0,
// times in units of 1 / Omega_0.

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>

#include <Eigen/Dense>

namespace xtalk {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using Operator3 = Eigen::Matrix3cd;

enum class Level : std::uint8_t { q0 = 0, q1 = 1, ryd = 2 };

inline constexpr int kLevels = 3;
inline constexpr int kAtoms = 3;
inline constexpr int kFullDim = 27;
inline constexpr int kPairDim = 9;

constexpr int level_value(Level l) { return static_cast<int>(l); }

constexpr int basis_index(Level a1, Level a2, Level a3) {
  return 9 * level_value(a1) + 3 * level_value(a2) + level_value(a3);
}

constexpr int pair_index(Level a1, Level a2) {
  return 3 * level_value(a1) + level_value(a2);
}

/// Level of `atom` (1-based) in full basis state `index`.
constexpr Level level_of(int index, int atom) {
  constexpr std::array<int, 3> stride{9, 3, 1};
  return static_cast<Level>((index / stride[static_cast<std::size_t>(atom - 1)]) % 3);
}

/// Index of the qubit basis state |b1 b2 b3> (bits in {0,1}) in the full space.
constexpr int qubit_index(int b1, int b2, int b3) {
  return 9 * b1 + 3 * b2 + b3;
}

/// Label such as "01r" for a full-space basis index.
std::string basis_label(int index);

struct SystemParams {
  double omega0 = 1.0;   // peak Rabi frequency
  double v12 = 21.1;     // gate-pair interaction, units of hbar * Omega_0
  double v13 = 21.1;
  double v23 = 21.1;
  double epsilon = 0.0;  // intensity fraction leaking to atom 3

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

namespace ops {
Operator3 identity();
Operator3 sigma_plus();        // |r><1|
Operator3 sigma_minus();       // |1><r|
Operator3 rydberg_projector(); // |r><r|
}  // namespace ops

/// Id x ... x op x ... x Id with `op` in slot `atom` (1..3).
/// Throws std::out_of_range for an invalid atom index.
Operator embed_single_atom_op(const Operator3& op, int atom);

/// Tensor product a x b (a is the more significant factor).
StateVector kron(const StateVector& a, const StateVector& b);

StateVector basis_state(int dim, int index);

/// (|0> + |1>) / sqrt(2) on one three-level atom.
StateVector plus_state();

struct HamiltonianSnapshot {
  Operator matrix;
};

/// Full three-atom Hamiltonian at one instant. `omega_t` is the complex Rabi
/// amplitude in absolute units (its phase carries any laser phase jump),
/// `delta_t` the detuning.
HamiltonianSnapshot build_hamiltonian(const SystemParams& params, Complex omega_t,
                                      double delta_t);

/// Which atoms a DriveHamiltonian acts on.
enum class Subsystem { Full, GatePair, ThirdAtom };

/// H(omega, delta) = D - delta * N + (omega / 2) S + (conj(omega) / 2) S^dagger,
/// precomputed once per parameter set so propagation only rescales terms.
/// S carries the sqrt(epsilon) factor on atom 3; omega is the absolute Rabi
/// amplitude (params.omega0 is not applied here).
class DriveHamiltonian {
 public:
  DriveHamiltonian(const SystemParams& params, Subsystem subsystem);

  int dim() const { return static_cast<int>(interaction_.size()); }
  Subsystem subsystem() const { return subsystem_; }

  Operator matrix(Complex omega, double delta) const;

  /// out = H(omega, delta) * in, column-wise.
  void apply(Complex omega, double delta, const Eigen::MatrixXcd& in,
             Eigen::MatrixXcd& out) const;

  /// Bound on the spectral radius of H for the given drive magnitudes.
  double norm_bound(double omega_abs, double delta_abs) const;

 private:
  Subsystem subsystem_;
  Eigen::VectorXd interaction_;  // diagonal
  Eigen::VectorXd rydberg_count_;
  Operator raising_;             // sum of (scaled) sigma_plus terms
};

}  // namespace xtalk
