#include "xtalk/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <ostream>

namespace xtalk {

namespace {

using Block = Eigen::MatrixXcd;
using SampleFn = std::function<void(double, const Block&)>;

// h * spectral radius kept below this for the explicit RK4 stages.
constexpr double kStabilityMargin = 0.5;

Drive pulse_drive(const ProtocolSpec& spec, int pulse_index, double s) {
  const double theta = pulse_index == 0 ? 0.0 : spec.theta;
  return {std::polar(rabi_envelope(spec.pulse, s), theta), detuning(spec.pulse, s)};
}

double max_abs_detuning(const PulseParams& p) {
  return std::abs(p.delta_offset) + std::abs(p.delta_amp);
}

struct Stepper {
  const DriveHamiltonian& h;
  double omega0;
  const ProtocolSpec& spec;

  void rhs(int pulse, double s, const Block& y, Block& out) const {
    const Drive d = pulse_drive(spec, pulse, s);
    h.apply(omega0 * d.omega, d.delta, y, out);
    out *= Complex(0.0, -1.0);
  }
};

double norm_drift(const Block& y, const Eigen::VectorXd& initial_norms) {
  return (y.colwise().squaredNorm().transpose() - initial_norms).cwiseAbs().maxCoeff();
}

void check_drift(double drift, const IntegratorConfig& cfg) {
  if (drift > cfg.norm_tolerance) {
    throw PropagationError("propagation norm drift " + std::to_string(drift) +
                           " exceeds tolerance " + std::to_string(cfg.norm_tolerance) +
                           "; reduce the step");
  }
}

struct RunStats {
  double max_drift = 0.0;
  std::size_t steps = 0;
};

RunStats run_fixed_rk4(const Stepper& st, Block& y, const IntegratorConfig& cfg,
                       std::size_t steps_per_pulse, const SampleFn& sample) {
  const double T = st.spec.pulse.duration;
  const double hstep = T / static_cast<double>(steps_per_pulse);
  const Eigen::VectorXd n0 = y.colwise().squaredNorm().transpose();
  const std::size_t stride =
      cfg.samples_per_pulse > 0 ? steps_per_pulse / static_cast<std::size_t>(cfg.samples_per_pulse)
                                : steps_per_pulse;
  Block k1(y.rows(), y.cols()), k2(y.rows(), y.cols()), k3(y.rows(), y.cols()),
      k4(y.rows(), y.cols()), tmp(y.rows(), y.cols());
  RunStats stats;
  if (sample) sample(0.0, y);
  for (int pulse = 0; pulse < st.spec.pulse_count(); ++pulse) {
    for (std::size_t i = 0; i < steps_per_pulse; ++i) {
      const double s = hstep * static_cast<double>(i);
      st.rhs(pulse, s, y, k1);
      tmp = y + (0.5 * hstep) * k1;
      st.rhs(pulse, s + 0.5 * hstep, tmp, k2);
      tmp = y + (0.5 * hstep) * k2;
      st.rhs(pulse, s + 0.5 * hstep, tmp, k3);
      tmp = y + hstep * k3;
      st.rhs(pulse, std::min(s + hstep, T), tmp, k4);
      y += (hstep / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      ++stats.steps;
      if ((i + 1) % stride == 0) {
        stats.max_drift = std::max(stats.max_drift, norm_drift(y, n0));
        if (sample && cfg.samples_per_pulse > 0) {
          sample(pulse * T + hstep * static_cast<double>(i + 1), y);
        }
      }
    }
  }
  if (sample && cfg.samples_per_pulse == 0) sample(st.spec.total_duration(), y);
  stats.max_drift = std::max(stats.max_drift, norm_drift(y, n0));
  return stats;
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

RunStats run_adaptive(const Stepper& st, Block& y, const IntegratorConfig& cfg,
                      const SampleFn& sample) {
  const double T = st.spec.pulse.duration;
  const Eigen::VectorXd n0 = y.colwise().squaredNorm().transpose();
  const int segments = std::max(1, cfg.samples_per_pulse);
  const auto r = y.rows();
  const auto c = y.cols();
  Block k1(r, c), k2(r, c), k3(r, c), k4(r, c), k5(r, c), k6(r, c), k7(r, c), tmp(r, c),
      y5(r, c);
  RunStats stats;
  if (sample) sample(0.0, y);
  double h = cfg.step;
  const double hmin = 1e-14 * T;
  for (int pulse = 0; pulse < st.spec.pulse_count(); ++pulse) {
    for (int seg = 0; seg < segments; ++seg) {
      const double s_end = T * (seg + 1) / segments;
      double s = T * seg / segments;
      st.rhs(pulse, s, y, k1);
      while (s < s_end) {
        const bool last = s + h >= s_end;
        const double hh = last ? s_end - s : h;
        tmp = y + hh * a21 * k1;
        st.rhs(pulse, s + c2 * hh, tmp, k2);
        tmp = y + hh * (a31 * k1 + a32 * k2);
        st.rhs(pulse, s + c3 * hh, tmp, k3);
        tmp = y + hh * (a41 * k1 + a42 * k2 + a43 * k3);
        st.rhs(pulse, s + c4 * hh, tmp, k4);
        tmp = y + hh * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        st.rhs(pulse, s + c5 * hh, tmp, k5);
        tmp = y + hh * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        st.rhs(pulse, std::min(s + hh, T), tmp, k6);
        y5 = y + hh * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        st.rhs(pulse, std::min(s + hh, T), y5, k7);
        const double err =
            (hh * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7)).cwiseAbs().maxCoeff();
        const double factor =
            err > 0.0 ? std::clamp(0.9 * std::pow(cfg.tolerance / err, 0.2), 0.2, 5.0) : 5.0;
        if (err <= cfg.tolerance) {
          y = y5;
          k1 = k7;  // first-same-as-last
          s = last ? s_end : s + hh;
          ++stats.steps;
          if (!last) h = hh * factor;
          else h = std::max(h, hh * factor);
        } else {
          h = hh * factor;
          if (h < hmin) {
            throw PropagationError("adaptive integrator step underflow at t = " +
                                   std::to_string(pulse * T + s));
          }
        }
      }
      stats.max_drift = std::max(stats.max_drift, norm_drift(y, n0));
      if (sample && cfg.samples_per_pulse > 0) sample(pulse * T + s_end, y);
    }
  }
  if (sample && cfg.samples_per_pulse == 0) sample(st.spec.total_duration(), y);
  return stats;
}

RunStats run(const DriveHamiltonian& h, double omega0, Block& y, const ProtocolSpec& spec,
             const IntegratorConfig& cfg, const SampleFn& sample) {
  spec.validate();
  cfg.validate();
  const Stepper st{h, omega0, spec};
  RunStats stats = cfg.method == IntegratorMethod::FixedRK4
                       ? run_fixed_rk4(st, y, cfg, rk4_steps_per_pulse(h, omega0, spec, cfg), sample)
                       : run_adaptive(st, y, cfg, sample);
  check_drift(stats.max_drift, cfg);
  return stats;
}

Trajectory propagate_on(const DriveHamiltonian& h, const StateVector& psi0,
                        const ProtocolSpec& spec, const SystemParams& params,
                        const IntegratorConfig& cfg) {
  if (psi0.size() != h.dim()) {
    throw std::invalid_argument("propagate: initial state has dimension " +
                                std::to_string(psi0.size()) + ", expected " +
                                std::to_string(h.dim()));
  }
  if (std::abs(psi0.squaredNorm() - 1.0) > 1e-12) {
    throw std::invalid_argument("propagate: initial state is not normalized");
  }
  Trajectory traj;
  Block y = psi0;
  const RunStats stats = run(h, params.omega0, y, spec, cfg, [&](double t, const Block& s) {
    traj.times.push_back(t);
    traj.states.emplace_back(s.col(0));
  });
  traj.max_norm_drift = stats.max_drift;
  traj.steps = stats.steps;
  return traj;
}

}  // namespace

void IntegratorConfig::validate() const {
  if (!(step > 0.0)) throw std::invalid_argument("IntegratorConfig: step must be positive");
  if (!(tolerance > 0.0 && tolerance <= 1e-6)) {
    throw std::invalid_argument("IntegratorConfig: tolerance must lie in (0, 1e-6]");
  }
  if (samples_per_pulse < 0) {
    throw std::invalid_argument("IntegratorConfig: samples_per_pulse must be >= 0");
  }
  if (!(norm_tolerance > 0.0)) {
    throw std::invalid_argument("IntegratorConfig: norm_tolerance must be positive");
  }
}

std::size_t rk4_steps_per_pulse(const DriveHamiltonian& hamiltonian, double omega0,
                                const ProtocolSpec& spec, const IntegratorConfig& cfg) {
  const double T = spec.pulse.duration;
  const double rho = hamiltonian.norm_bound(omega0, max_abs_detuning(spec.pulse));
  const double h = std::min(cfg.step, rho > 0.0 ? kStabilityMargin / rho : cfg.step);
  auto n = static_cast<std::size_t>(std::ceil(T / h - 1e-9));
  if (cfg.samples_per_pulse > 0) {
    const auto m = static_cast<std::size_t>(cfg.samples_per_pulse);
    n = ((n + m - 1) / m) * m;
  }
  return std::max<std::size_t>(n, 1);
}

Trajectory propagate(const StateVector& psi0, const ProtocolSpec& spec,
                     const SystemParams& params, const IntegratorConfig& cfg) {
  return propagate_on(DriveHamiltonian(params, Subsystem::Full), psi0, spec, params, cfg);
}

Trajectory propagate_gate_pair(const StateVector& psi0, const ProtocolSpec& spec,
                               const SystemParams& params, const IntegratorConfig& cfg) {
  return propagate_on(DriveHamiltonian(params, Subsystem::GatePair), psi0, spec, params, cfg);
}

Trajectory propagate_third_alone(const StateVector& psi0, const ProtocolSpec& spec,
                                 const SystemParams& params, const IntegratorConfig& cfg) {
  return propagate_on(DriveHamiltonian(params, Subsystem::ThirdAtom), psi0, spec, params, cfg);
}

Eigen::MatrixXcd propagate_block(const DriveHamiltonian& hamiltonian, double omega0,
                                 const Eigen::MatrixXcd& columns, const ProtocolSpec& spec,
                                 const IntegratorConfig& cfg) {
  if (columns.rows() != hamiltonian.dim()) {
    throw std::invalid_argument("propagate_block: row count does not match Hamiltonian");
  }
  IntegratorConfig quiet = cfg;
  quiet.samples_per_pulse = 0;
  Block y = columns;
  run(hamiltonian, omega0, y, spec, quiet, {});
  return y;
}

double step_halving_difference(const StateVector& psi0, const ProtocolSpec& spec,
                               const SystemParams& params, const IntegratorConfig& cfg) {
  IntegratorConfig coarse = cfg;
  coarse.samples_per_pulse = 0;
  IntegratorConfig fine = coarse;
  const DriveHamiltonian h(params, psi0.size() == kFullDim   ? Subsystem::Full
                                   : psi0.size() == kPairDim ? Subsystem::GatePair
                                                             : Subsystem::ThirdAtom);
  const auto n = rk4_steps_per_pulse(h, params.omega0, spec, coarse);
  coarse.step = spec.pulse.duration / static_cast<double>(n);
  fine.step = 0.5 * coarse.step;
  const Block a = propagate_block(h, params.omega0, psi0, spec, coarse);
  const Block b = propagate_block(h, params.omega0, psi0, spec, fine);
  return (a - b).cwiseAbs().maxCoeff();
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          std::span<const int> tracked, std::span<const std::string> labels) {
  if (labels.size() != tracked.size()) {
    throw std::invalid_argument("write_trajectory_csv: one label per tracked index required");
  }
  out << "t";
  for (const auto& l : labels) out << ",re_" << l << ",im_" << l;
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out << traj.times[i];
    for (int idx : tracked) {
      const Complex a = traj.states[i](idx);
      out << ',' << a.real() << ',' << a.imag();
    }
    out << '\n';
  }
}

}  // namespace xtalk
