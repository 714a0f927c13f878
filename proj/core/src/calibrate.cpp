#include "xtalk/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <string>

#include "xtalk/hilbert.hpp"
#include "xtalk/perturb.hpp"

namespace xtalk {

namespace {

constexpr double kPi = std::numbers::pi;

// Search box. Narrow widths only add stiffness; very large detunings blow up
// the step count without reaching new gates.
constexpr double kMinWidthFraction = 0.02;
constexpr double kMaxWidthFraction = 1.0;
constexpr double kMaxDetuning = 40.0;

// Distance outside the search box, 0 inside.
double box_violation(std::span<const double> x, double duration) {
  const double lo = kMinWidthFraction * duration;
  const double hi = kMaxWidthFraction * duration;
  return std::max(0.0, lo - x[1]) + std::max(0.0, x[1] - hi) +
         std::max(0.0, std::abs(x[0]) - kMaxDetuning) + std::max(0.0, std::abs(x[2]) - kMaxDetuning);
}

PulseParams with_free(const PulseParams& conventions, std::span<const double> x) {
  PulseParams p = conventions;
  p.delta_amp = x[0];
  p.delta_width = x[1];
  p.delta_offset = x[2];
  return p;
}

double crosstalk_coefficient(const PulseParams& pulse, const GateTarget& target) {
  if (target == GateTarget::cz()) return perturb_report(single_pulse(pulse)).linear_infid_coeff;
  const PerturbReport echo = perturb_report(echo_protocol(pulse));
  // Uncancelled first order would dominate; count it so such pulses lose.
  return echo.predicted_infid_coeff + echo.alpha;
}

}  // namespace

GateTarget GateTarget::cz() { return GateTarget{kPi}; }
GateTarget GateTarget::controlled_half_pi() { return GateTarget{kPi / 2}; }

void GateTarget::validate() const {
  if (!(conditional_phase > 0.0 && conditional_phase < 2 * kPi)) {
    throw std::invalid_argument("GateTarget: conditional phase must lie in (0, 2 pi)");
  }
}

std::string_view GateTarget::name() const {
  if (*this == cz()) return "cz";
  if (*this == controlled_half_pi()) return "half_pi";
  return "custom";
}

GateTarget gate_target_from_string(std::string_view name) {
  if (name == "cz") return GateTarget::cz();
  if (name == "half_pi" || name == "controlled_half_pi") return GateTarget::controlled_half_pi();
  throw std::invalid_argument("unknown gate target '" + std::string(name) + "'");
}

GateOverlaps gate_overlaps(const ProtocolSpec& spec, double v12, const IntegratorConfig& cfg) {
  SystemParams params;
  params.v12 = v12;
  params.validate();
  const DriveHamiltonian h(params, Subsystem::GatePair);
  Eigen::MatrixXcd cols = Eigen::MatrixXcd::Zero(kPairDim, 2);
  const int i01 = pair_index(Level::q0, Level::q1);
  const int i11 = pair_index(Level::q1, Level::q1);
  cols(i01, 0) = 1.0;
  cols(i11, 1) = 1.0;
  const Eigen::MatrixXcd out = propagate_block(h, params.omega0, cols, spec, cfg);
  return {out(i01, 0), out(i11, 1)};
}

GaugeFit fit_gauge(const GateOverlaps& c, double chi) {
  const std::complex<double> w(std::cos(chi), std::sin(chi));
  auto loss = [&](double phi) {
    const std::complex<double> e = std::polar(1.0, -phi);
    const double overlap = std::norm(1.0 + 2.0 * c.c01 * e + c.c11 * w * e * e);
    return -overlap / 16.0;
  };
  const ScalarMinimum m = minimize_scalar(loss, -kPi, kPi, 361, 1e-12);
  return {wrap_pi(m.x), std::max(0.0, 1.0 + m.value)};
}

IntegratorConfig calibration_search_integrator() {
  IntegratorConfig cfg;
  cfg.step = 4e-3;
  cfg.samples_per_pulse = 0;
  return cfg;
}

double gate_fidelity_objective(const PulseParams& pulse, const GateTarget& target, double v12,
                               const IntegratorConfig& cfg) {
  target.validate();
  if (!(v12 > 0.0)) throw std::invalid_argument("gate_fidelity_objective: v12 must be positive");
  return fit_gauge(gate_overlaps(single_pulse(pulse), v12, cfg), target.conditional_phase)
      .infidelity;
}

GaugeFit composed_gate_fit(const PulseParams& pulse, double v12, const IntegratorConfig& cfg) {
  return fit_gauge(gate_overlaps(double_pulse(pulse, 0.0), v12, cfg), kPi);
}

SeedGrid SeedGrid::defaults(const GateTarget& target, double duration) {
  SeedGrid grid;
  // Widths are fractions of T; the offset roughly balances the Gaussian
  // area so the mean detuning over the flat top stays small.
  const std::array<double, 4> amps = target == GateTarget::cz()
                                         ? std::array<double, 4>{1.5, -1.5, 5.0, -5.0}
                                         : std::array<double, 4>{-5.4, 5.4, -2.8, 2.8};
  const std::array<double, 2> widths{0.12, 0.3};
  for (double a : amps) {
    for (double wf : widths) {
      const double w = wf * duration;
      const double balance = -a * w * std::sqrt(2 * kPi) / duration;
      grid.seeds.push_back({a, w, 0.5 * balance});
    }
  }
  return grid;
}

CalibrationResult evaluate_pulse(const PulseParams& pulse, const GateTarget& target, double v12,
                                 const IntegratorConfig& cfg, double convergence_threshold) {
  const GaugeFit fit =
      fit_gauge(gate_overlaps(single_pulse(pulse), v12, cfg), target.conditional_phase);
  CalibrationResult r;
  r.pulse = pulse;
  r.target = target;
  r.v12 = v12;
  r.single_qubit_phase = fit.phi;
  r.gate_infidelity = fit.infidelity;
  r.converged = fit.infidelity <= convergence_threshold;
  r.crosstalk_coeff = crosstalk_coefficient(pulse, target);
  return r;
}

ProtocolSpec echo_protocol(const PulseParams& half_pulse) {
  return double_pulse(half_pulse, phase_jump_theta(half_pulse).theta);
}

CalibrationResult calibrate_pulse(const GateTarget& target, double v12, const SeedGrid& seeds,
                                  const PulseParams& conventions,
                                  const CalibrationOptions& options) {
  target.validate();
  conventions.validate();
  options.search.validate();
  options.verify.validate();
  if (!(v12 > 0.0)) throw std::invalid_argument("calibrate_pulse: v12 must be positive");
  if (seeds.seeds.empty()) throw std::invalid_argument("calibrate_pulse: empty seed grid");

  auto objective_with = [&](const IntegratorConfig& cfg) {
    return [&, cfg](std::span<const double> x) {
      if (const double v = box_violation(x, conventions.duration); v > 0.0) return 1.0 + v;
      try {
        return gate_fidelity_objective(with_free(conventions, x), target, v12, cfg);
      } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
      }
    };
  };

  auto run_start = [&](const std::array<double, 3>& seed) {
    NelderMeadOptions nm = options.optimizer;
    if (nm.initial_step.empty()) {
      nm.initial_step = {0.25 * std::max(1.0, std::abs(seed[0])), 0.1 * seed[1], 0.25};
    }
    NelderMeadResult coarse =
        nelder_mead(objective_with(options.search), {seed.begin(), seed.end()}, nm);
    CalibrationResult r;
    r.evaluations = coarse.evaluations;
    if (box_violation(coarse.x, conventions.duration) > 0.0 || !std::isfinite(coarse.value)) {
      r.pulse = with_free(conventions, coarse.x);
      r.target = target;
      r.v12 = v12;
      return r;
    }
    PulseParams pulse = with_free(conventions, coarse.x);
    GaugeFit fit =
        fit_gauge(gate_overlaps(single_pulse(pulse), v12, options.verify), target.conditional_phase);
    if (fit.infidelity > options.convergence_threshold &&
        coarse.value < 10 * options.convergence_threshold) {
      // Coarse-grid optimum slightly off at the fine step: polish there.
      NelderMeadOptions polish = options.optimizer;
      polish.max_evaluations = 300;
      polish.initial_step = {1e-3 * std::max(1.0, std::abs(coarse.x[0])), 1e-3 * coarse.x[1], 1e-3};
      const NelderMeadResult fine = nelder_mead(objective_with(options.verify), coarse.x, polish);
      r.evaluations += fine.evaluations;
      pulse = with_free(conventions, fine.x);
      fit = fit_gauge(gate_overlaps(single_pulse(pulse), v12, options.verify),
                      target.conditional_phase);
    }
    r.pulse = pulse;
    r.target = target;
    r.v12 = v12;
    r.single_qubit_phase = fit.phi;
    r.gate_infidelity = fit.infidelity;
    r.converged = fit.infidelity <= options.convergence_threshold;
    if (r.converged) r.crosstalk_coeff = crosstalk_coefficient(pulse, target);
    return r;
  };

  std::vector<CalibrationResult> results(seeds.seeds.size());
  const std::size_t threads = static_cast<std::size_t>(std::max(1, options.threads));
  for (std::size_t begin = 0; begin < seeds.seeds.size(); begin += threads) {
    const std::size_t end = std::min(seeds.seeds.size(), begin + threads);
    if (threads == 1) {
      results[begin] = run_start(seeds.seeds[begin]);
      continue;
    }
    std::vector<std::future<CalibrationResult>> batch;
    for (std::size_t i = begin; i < end; ++i) {
      batch.push_back(std::async(std::launch::async, run_start, seeds.seeds[i]));
    }
    for (std::size_t i = begin; i < end; ++i) results[i] = batch[i - begin].get();
  }

  int total_evals = 0;
  for (const auto& r : results) total_evals += r.evaluations;

  auto better = [&](const CalibrationResult& a, const CalibrationResult& b) {
    if (a.converged != b.converged) return a.converged;
    if (a.converged && options.selection == SeedSelection::LeastCrosstalk) {
      return a.crosstalk_coeff < b.crosstalk_coeff;
    }
    return a.gate_infidelity < b.gate_infidelity;
  };
  CalibrationResult best = results.front();
  for (const auto& r : results) {
    if (better(r, best)) best = r;
  }
  best.evaluations = total_evals;
  if (!best.converged) {
    throw CalibrationError("calibrate_pulse: no start reached objective " +
                               std::to_string(options.convergence_threshold) +
                               " (best " + std::to_string(best.gate_infidelity) + ")",
                           best);
  }
  return best;
}

}  // namespace xtalk
