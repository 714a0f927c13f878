#include "xtalk/metrics.hpp"

#include <cmath>
#include <numbers>

#include "xtalk/calibrate.hpp"

namespace xtalk {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMinReferenceAmplitude = 0.5;

int gate_excitations(int full_index) {
  return (level_of(full_index, 1) == Level::q1 ? 1 : 0) +
         (level_of(full_index, 2) == Level::q1 ? 1 : 0);
}

double checked_arg(Complex a, std::string_view label) {
  if (std::abs(a) < kMinReferenceAmplitude) {
    throw PhaseExtractionError("phase of |" + std::string(label) + "> undefined: amplitude " +
                               std::to_string(std::abs(a)) + " below " +
                               std::to_string(kMinReferenceAmplitude));
  }
  return std::arg(a);
}

}  // namespace

std::string_view to_string(InitialState s) {
  switch (s) {
    case InitialState::g00: return "00";
    case InitialState::g01: return "01";
    case InitialState::g10: return "10";
    case InitialState::g11: return "11";
    case InitialState::superposition: return "superposition";
  }
  return "?";
}

InitialState initial_state_from_string(std::string_view name) {
  for (InitialState s : kAllInitialStates) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown initial state '" + std::string(name) + "'");
}

Eigen::MatrixXcd qubit_basis_columns() {
  Eigen::MatrixXcd cols = Eigen::MatrixXcd::Zero(kFullDim, kQubitStates);
  for (int q = 0; q < kQubitStates; ++q) cols(qubit_column_index(q), q) = 1.0;
  return cols;
}

Eigen::MatrixXcd propagate_qubit_block(const ProtocolSpec& spec, const SystemParams& params,
                                       const IntegratorConfig& cfg) {
  params.validate();
  const DriveHamiltonian h(params, Subsystem::Full);
  return propagate_block(h, params.omega0, qubit_basis_columns(), spec, cfg);
}

void apply_virtual_z(Eigen::Ref<Eigen::MatrixXcd> states, double phi) {
  if (states.rows() != kFullDim) throw std::invalid_argument("apply_virtual_z: expects 27 rows");
  const std::array<Complex, 3> factor{1.0, std::polar(1.0, -phi), std::polar(1.0, -2 * phi)};
  for (int i = 0; i < kFullDim; ++i) states.row(i) *= factor[static_cast<std::size_t>(gate_excitations(i))];
}

Eigen::VectorXcd initial_qubit_coeffs(InitialState s) {
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(kQubitStates);
  if (s == InitialState::superposition) {
    c.setConstant(1.0 / std::sqrt(8.0));
    return c;
  }
  const int g = static_cast<int>(s);  // 2 b1 + b2
  c(2 * g) = std::numbers::sqrt2 / 2;
  c(2 * g + 1) = std::numbers::sqrt2 / 2;
  return c;
}

StateVector ideal_output(InitialState s) {
  const Eigen::VectorXcd c = initial_qubit_coeffs(s);
  StateVector out = StateVector::Zero(kFullDim);
  for (int q = 0; q < kQubitStates; ++q) {
    const bool both = ((q >> 2) & 1) && ((q >> 1) & 1);
    out(qubit_column_index(q)) = both ? -c(q) : c(q);
  }
  return out;
}

double protocol_gate_phase(const ProtocolSpec& spec, double v12, const IntegratorConfig& cfg) {
  return fit_gauge(gate_overlaps(spec, v12, cfg), kPi).phi;
}

double third_atom_fidelity(const StateVector& psi) {
  if (psi.size() != 3 && psi.size() != kFullDim) {
    throw std::invalid_argument("third_atom_fidelity: expects a 3- or 27-dim state");
  }
  // With gate |00>, the spectator amplitudes sit at indices 0..2 in both layouts.
  const Complex overlap = (psi(0) + psi(1)) * (std::numbers::sqrt2 / 2);
  return std::min(1.0, std::norm(overlap));
}

double three_qubit_fidelity(const StateVector& psi_f, double gate_phase) {
  if (psi_f.size() != kFullDim) throw std::invalid_argument("three_qubit_fidelity: expects 27 dims");
  Eigen::MatrixXcd psi = psi_f;
  apply_virtual_z(psi, gate_phase);
  return std::min(1.0, std::norm(ideal_output(InitialState::superposition).dot(psi.col(0))));
}

double initial_state_infidelity(const Eigen::MatrixXcd& block, InitialState s, double gate_phase) {
  if (block.rows() != kFullDim || block.cols() != kQubitStates) {
    throw std::invalid_argument("initial_state_infidelity: expects a 27 x 8 block");
  }
  Eigen::MatrixXcd psi = block * initial_qubit_coeffs(s);
  apply_virtual_z(psi, gate_phase);
  const double f = std::norm(ideal_output(s).dot(psi.col(0)));
  return std::clamp(1.0 - f, 0.0, 1.0);
}

FidelityReport fidelity_report(const Eigen::MatrixXcd& block, double gate_phase) {
  FidelityReport r;
  for (InitialState s : kAllInitialStates) {
    const double inf = initial_state_infidelity(block, s, gate_phase);
    if (s == InitialState::superposition) {
      r.f_three_qubit = 1.0 - inf;
    } else {
      r.per_initial_state[std::string(to_string(s))] = inf;
    }
  }
  const StateVector psi00 = block * initial_qubit_coeffs(InitialState::g00);
  r.f3 = third_atom_fidelity(psi00);
  return r;
}

PhaseSet solve_circuit_phases(double phi1, double phi011, double phi101, double phi111) {
  PhaseSet p;
  p.phi1 = wrap_pi(phi1);
  p.phi2 = wrap_pi(phi011);
  p.phi2_101 = wrap_pi(phi101);
  p.phi3 = wrap_pi(phi111);
  p.varphi1 = wrap_pi(phi1);
  p.varphi2 = wrap_pi(phi011 - phi1);
  p.varphi2_13 = wrap_pi(phi101 - phi1);
  p.varphi3 = wrap_pi(phi111 - phi011 - phi101 + phi1);
  return p;
}

std::array<double, 4> reconstruct_phases(const PhaseSet& p) {
  return {wrap_pi(p.varphi1), wrap_pi(p.varphi1 + p.varphi2),
          wrap_pi(p.varphi1 + p.varphi2_13),
          wrap_pi(p.varphi1 + p.varphi2 + p.varphi2_13 + p.varphi3)};
}

PhaseSet phases_from_block(const Eigen::MatrixXcd& block, double gate_phase) {
  if (block.rows() != kFullDim || block.cols() != kQubitStates) {
    throw std::invalid_argument("phases_from_block: expects a 27 x 8 block");
  }
  auto diag = [&](int b1, int b2) { return block(qubit_index(b1, b2, 1), 4 * b1 + 2 * b2 + 1); };
  const double phi1 = checked_arg(diag(0, 0), "001");
  const double phi011 = checked_arg(diag(0, 1), "011") - gate_phase;
  const double phi101 = checked_arg(diag(1, 0), "101") - gate_phase;
  const double phi111 = checked_arg(diag(1, 1), "111") - 2 * gate_phase + kPi;
  return solve_circuit_phases(phi1, phi011, phi101, phi111);
}

PhaseSet extract_phases(const SystemParams& params, const ProtocolSpec& spec,
                        const IntegratorConfig& cfg) {
  const double gate_phase = protocol_gate_phase(spec, params.v12, cfg);
  return phases_from_block(propagate_qubit_block(spec, params, cfg), gate_phase);
}

Eigen::VectorXcd correction_unitary(const PhaseSet& p) {
  Eigen::VectorXcd d = Eigen::VectorXcd::Ones(kQubitStates);
  for (int q = 0; q < kQubitStates; ++q) {
    if ((q & 1) == 0) continue;
    const int b1 = (q >> 2) & 1;
    const int b2 = (q >> 1) & 1;
    const double angle = p.varphi1 + p.varphi2_13 * b1 + p.varphi2 * b2 + p.varphi3 * b1 * b2;
    d(q) = std::polar(1.0, -angle);
  }
  return d;
}

void apply_correction(Eigen::Ref<Eigen::MatrixXcd> states, const PhaseSet& p) {
  if (states.rows() != kFullDim) throw std::invalid_argument("apply_correction: expects 27 rows");
  const Eigen::VectorXcd d = correction_unitary(p);
  for (int q = 0; q < kQubitStates; ++q) states.row(qubit_column_index(q)) *= d(q);
}

}  // namespace xtalk
