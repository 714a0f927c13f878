#include "xtalk/hilbert.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace xtalk {

std::string basis_label(int index) {
  static constexpr char kSymbols[] = {'0', '1', 'r'};
  std::string label(3, '?');
  for (int atom = 1; atom <= kAtoms; ++atom) {
    label[static_cast<std::size_t>(atom - 1)] = kSymbols[level_value(level_of(index, atom))];
  }
  return label;
}

void SystemParams::validate() const {
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) {
    throw std::invalid_argument("SystemParams: omega0 must be positive and finite");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("SystemParams: epsilon must lie in [0, 1]");
  }
  if (!std::isfinite(v12) || !std::isfinite(v13) || !std::isfinite(v23)) {
    throw std::invalid_argument("SystemParams: interactions must be finite");
  }
}

namespace ops {

Operator3 identity() { return Operator3::Identity(); }

Operator3 sigma_plus() {
  Operator3 m = Operator3::Zero();
  m(level_value(Level::ryd), level_value(Level::q1)) = 1.0;
  return m;
}

Operator3 sigma_minus() { return sigma_plus().adjoint(); }

Operator3 rydberg_projector() {
  Operator3 m = Operator3::Zero();
  m(level_value(Level::ryd), level_value(Level::ryd)) = 1.0;
  return m;
}

}  // namespace ops

Operator embed_single_atom_op(const Operator3& op, int atom) {
  if (atom < 1 || atom > kAtoms) {
    throw std::out_of_range("embed_single_atom_op: atom index must be 1, 2 or 3");
  }
  Operator out = Operator::Zero(kFullDim, kFullDim);
  for (int row = 0; row < kFullDim; ++row) {
    for (int col = 0; col < kFullDim; ++col) {
      bool spectators_match = true;
      for (int other = 1; other <= kAtoms; ++other) {
        if (other != atom && level_of(row, other) != level_of(col, other)) {
          spectators_match = false;
          break;
        }
      }
      if (spectators_match) {
        out(row, col) = op(level_value(level_of(row, atom)), level_value(level_of(col, atom)));
      }
    }
  }
  return out;
}

HamiltonianSnapshot build_hamiltonian(const SystemParams& params, Complex omega_t,
                                      double delta_t) {
  params.validate();
  if (!std::isfinite(omega_t.real()) || !std::isfinite(omega_t.imag()) ||
      !std::isfinite(delta_t)) {
    throw std::invalid_argument("build_hamiltonian: drive values must be finite");
  }
  const DriveHamiltonian h(params, Subsystem::Full);
  return {h.matrix(omega_t, delta_t)};
}

namespace {

// Levels of the atoms present in a subsystem basis state. Absent atoms are
// reported as |0> so that they never contribute.
std::array<Level, 3> subsystem_levels(Subsystem s, int index) {
  switch (s) {
    case Subsystem::Full:
      return {level_of(index, 1), level_of(index, 2), level_of(index, 3)};
    case Subsystem::GatePair:
      return {static_cast<Level>(index / 3), static_cast<Level>(index % 3), Level::q0};
    case Subsystem::ThirdAtom:
      return {Level::q0, Level::q0, static_cast<Level>(index)};
  }
  return {Level::q0, Level::q0, Level::q0};
}

int subsystem_dim(Subsystem s) {
  switch (s) {
    case Subsystem::Full: return kFullDim;
    case Subsystem::GatePair: return kPairDim;
    case Subsystem::ThirdAtom: return kLevels;
  }
  return 0;
}

}  // namespace

DriveHamiltonian::DriveHamiltonian(const SystemParams& params, Subsystem subsystem)
    : subsystem_(subsystem) {
  params.validate();
  const int dim = subsystem_dim(subsystem);
  interaction_ = Eigen::VectorXd::Zero(dim);
  rydberg_count_ = Eigen::VectorXd::Zero(dim);
  raising_ = Operator::Zero(dim, dim);

  const std::array<bool, 3> present{subsystem != Subsystem::ThirdAtom,
                                    subsystem != Subsystem::ThirdAtom,
                                    subsystem != Subsystem::GatePair};
  const std::array<double, 3> coupling{1.0, 1.0, std::sqrt(params.epsilon)};

  for (int idx = 0; idx < dim; ++idx) {
    const auto lv = subsystem_levels(subsystem, idx);
    const std::array<bool, 3> ryd{lv[0] == Level::ryd, lv[1] == Level::ryd, lv[2] == Level::ryd};
    interaction_(idx) = params.v12 * (ryd[0] && ryd[1]) + params.v13 * (ryd[0] && ryd[2]) +
                        params.v23 * (ryd[1] && ryd[2]);
    rydberg_count_(idx) = static_cast<double>(ryd[0] + ryd[1] + ryd[2]);

    // sigma_plus on each present atom: |..1..> -> |..r..>
    for (std::size_t a = 0; a < 3; ++a) {
      if (!present[a] || lv[a] != Level::q1) continue;
      auto target = lv;
      target[a] = Level::ryd;
      int to = 0;
      for (int cand = 0; cand < dim; ++cand) {
        if (subsystem_levels(subsystem, cand) == target) {
          to = cand;
          break;
        }
      }
      raising_(to, idx) += 0.5 * coupling[a];
    }
  }
}

Operator DriveHamiltonian::matrix(Complex omega, double delta) const {
  Operator h = omega * raising_ + std::conj(omega) * raising_.adjoint();
  h.diagonal().real() += interaction_ - delta * rydberg_count_;
  return h;
}

void DriveHamiltonian::apply(Complex omega, double delta, const Eigen::MatrixXcd& in,
                             Eigen::MatrixXcd& out) const {
  out.noalias() = omega * (raising_ * in);
  out.noalias() += std::conj(omega) * (raising_.adjoint() * in);
  out += (interaction_ - delta * rydberg_count_).cast<Complex>().asDiagonal() * in;
}

double DriveHamiltonian::norm_bound(double omega_abs, double delta_abs) const {
  const double diag = (interaction_.array().abs() + delta_abs * rydberg_count_.array()).maxCoeff();
  const double offdiag = 2.0 * omega_abs * raising_.cwiseAbs().colwise().sum().maxCoeff();
  return diag + offdiag;
}

StateVector kron(const StateVector& a, const StateVector& b) {
  StateVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

StateVector basis_state(int dim, int index) {
  if (index < 0 || index >= dim) throw std::out_of_range("basis_state: index out of range");
  StateVector v = StateVector::Zero(dim);
  v(index) = 1.0;
  return v;
}

StateVector plus_state() {
  StateVector v = StateVector::Zero(kLevels);
  v(level_value(Level::q0)) = (std::numbers::sqrt2 / 2);
  v(level_value(Level::q1)) = (std::numbers::sqrt2 / 2);
  return v;
}

}  // namespace xtalk
