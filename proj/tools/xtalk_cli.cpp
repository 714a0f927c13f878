#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "xtalk/xtalk.hpp"

namespace {

using namespace xtalk;
using nlohmann::json;

struct Globals {
  std::string config_path;
  std::string out_dir;
  std::optional<int> threads;
  std::string formats;
};

ExperimentConfig load(const Globals& g) {
  ExperimentConfig cfg = g.config_path.empty() ? default_config() : load_config(g.config_path);
  if (!g.out_dir.empty()) cfg.output.directory = g.out_dir;
  if (g.threads) cfg.threads = *g.threads;
  if (!g.formats.empty()) set_formats(cfg.output, g.formats);
  cfg.validate();
  return cfg;
}

void print_paths(const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths) std::cout << "wrote " << p.string() << '\n';
}

json phases_json(const PhaseSet& p) {
  return {{"phi1", p.phi1},       {"phi2", p.phi2},       {"phi2_101", p.phi2_101},
          {"phi3", p.phi3},       {"varphi1", p.varphi1}, {"varphi2", p.varphi2},
          {"varphi2_13", p.varphi2_13}, {"varphi3", p.varphi3}};
}

json report_json(const PerturbReport& r) {
  auto c = [](std::complex<double> z) { return json::array({z.real(), z.imag()}); };
  return {{"first_order_ryd_amp", c(r.first_order_ryd_amp)},
          {"coeff_11", c(r.second_order.coeff_11)},
          {"coeff_rr", c(r.second_order.coeff_rr)},
          {"alpha", r.alpha},
          {"beta", r.beta},
          {"ryd_phase", r.ryd_phase},
          {"first_order_cancelled", r.first_order_cancelled},
          {"linear_infid_coeff", r.linear_infid_coeff},
          {"predicted_infid_coeff", r.predicted_infid_coeff}};
}

int cmd_calibrate(const Globals& g, const std::string& which, const std::string& write_config) {
  ExperimentConfig cfg = load(g);
  CalibrationOptions opt;
  opt.verify = cfg.integrator;
  opt.verify.samples_per_pulse = 0;
  opt.convergence_threshold = cfg.calibration.threshold;
  opt.selection = cfg.calibration.selection;
  opt.optimizer.max_evaluations = cfg.calibration.max_evaluations;
  opt.threads = cfg.threads;

  auto run = [&](const GateTarget& target, const std::vector<std::array<double, 3>>& seeds) {
    SeedGrid grid{seeds};
    if (grid.seeds.empty()) grid = SeedGrid::defaults(target, cfg.conventions.duration);
    const auto t0 = std::chrono::steady_clock::now();
    CalibrationResult r = calibrate_pulse(target, cfg.system.v12, grid, cfg.conventions, opt);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%-8s objective %.3e  phi %+.6f  amp %+.6f width %.6f offset %+.6f  (%d evaluations, %.1f s)\n",
                std::string(target.name()).c_str(), r.gate_infidelity, r.single_qubit_phase,
                r.pulse.delta_amp, r.pulse.delta_width, r.pulse.delta_offset, r.evaluations, secs);
    return r;
  };
  if (which == "cz" || which == "both") cfg.cz = run(GateTarget::cz(), cfg.calibration.cz_seeds);
  if (which == "half_pi" || which == "both") {
    cfg.half_pi = run(GateTarget::controlled_half_pi(), cfg.calibration.half_seeds);
    const GaugeFit composed = composed_gate_fit(cfg.half_pi->pulse, cfg.system.v12, opt.verify);
    std::printf("composed half_pi x2 vs CZ: infidelity %.3e\n", composed.infidelity);
  }
  std::filesystem::create_directories(cfg.output.directory);
  for (const auto* r : {cfg.cz ? &*cfg.cz : nullptr, cfg.half_pi ? &*cfg.half_pi : nullptr}) {
    if (!r) continue;
    const auto path = cfg.output.directory / ("calibration_" + std::string(r->target.name()) + ".json");
    std::ofstream(path) << calibration_to_json(*r);
    std::cout << "wrote " << path.string() << '\n';
  }
  if (!write_config.empty()) {
    save_config(cfg, write_config);
    std::cout << "wrote " << write_config << '\n';
  }
  return 0;
}

int cmd_simulate(const Globals& g, const std::string& protocol, double epsilon,
                 const std::string& trajectory) {
  ExperimentConfig cfg = load(g);
  const PreparedProtocol pp = prepare_protocol(protocol_kind_from_string(protocol), cfg);
  SystemParams params = cfg.system;
  params.epsilon = epsilon;
  const Eigen::MatrixXcd block = propagate_qubit_block(pp.spec, params, cfg.integrator);
  const FidelityReport rep = fidelity_report(block, pp.gate_phase);
  std::printf("protocol %s  epsilon %.3e  theta %.6f  gate phase %+.6f\n", protocol.c_str(), epsilon,
              pp.spec.theta, pp.gate_phase);
  std::printf("  F3 %.12f\n  three-qubit fidelity %.12f\n", rep.f3, rep.f_three_qubit);
  for (const auto& [k, v] : rep.per_initial_state) std::printf("  1-F |%s> %.6e\n", k.c_str(), v);
  if (!trajectory.empty()) {
    const StateVector psi0 = qubit_basis_columns() * initial_qubit_coeffs(InitialState::superposition);
    const Trajectory traj = propagate(psi0, pp.spec, params, cfg.integrator);
    std::vector<int> tracked;
    std::vector<std::string> labels;
    for (int q = 0; q < kQubitStates; ++q) {
      tracked.push_back(qubit_column_index(q));
      labels.push_back(basis_label(qubit_column_index(q)));
    }
    for (int b1 = 0; b1 < 2; ++b1) {
      for (int b2 = 0; b2 < 2; ++b2) {
        const int idx = basis_index(static_cast<Level>(b1), static_cast<Level>(b2), Level::ryd);
        tracked.push_back(idx);
        labels.push_back(basis_label(idx));
      }
    }
    std::ofstream out(trajectory);
    if (!out) throw std::runtime_error("cannot write '" + trajectory + "'");
    write_trajectory_csv(out, traj, tracked, labels);
    std::printf("  trajectory (%zu samples, max norm drift %.2e) -> %s\n", traj.times.size(),
                traj.max_norm_drift, trajectory.c_str());
  }
  return 0;
}

int cmd_sweep(const Globals& g, SweepKind kind) {
  ExperimentConfig cfg = load(g);
  std::vector<SweepRecord> records;
  std::string stem;
  try {
    switch (kind) {
      case SweepKind::Epsilon:
        if (cfg.sweep.variable != SweepVariable::Epsilon) {
          cfg.sweep.variable = SweepVariable::Epsilon;
          cfg.sweep.grid = log_grid(1e-4, 1e-1, 25);
        }
        records = run_epsilon_sweep(cfg);
        stem = "sweep_eps";
        break;
      case SweepKind::Vdw:
        if (cfg.sweep.variable == SweepVariable::Epsilon) {
          cfg.sweep.variable = SweepVariable::VSym;
          cfg.sweep.grid = log_grid(1e-2, 1e2, 30);
        }
        records = run_vdw_sweep(cfg);
        stem = "sweep_vdw";
        break;
      case SweepKind::Correction:
        if (cfg.sweep.variable != SweepVariable::Epsilon) {
          cfg.sweep.variable = SweepVariable::Epsilon;
          cfg.sweep.grid = log_grid(1e-4, 1e-1, 25);
        }
        records = run_correction_comparison(cfg);
        stem = "correction";
        break;
    }
  } catch (const SweepAborted& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (!e.partial().empty()) print_paths(emit_outputs(e.partial(), cfg, kind, stem + "_partial"));
    return 2;
  }
  print_paths(emit_outputs(records, cfg, kind, stem));
  std::cout << summary_json(records, cfg, kind);
  return 0;
}

int cmd_perturb(const Globals& g, const std::string& protocol, double epsilon) {
  ExperimentConfig cfg = load(g);
  const ProtocolKind kind = protocol_kind_from_string(protocol);
  ProtocolSpec spec;
  if (kind == ProtocolKind::SinglePulse) {
    if (!cfg.cz) throw CalibrationMissing("no calibrated CZ pulse in the configuration");
    spec = single_pulse(cfg.cz->pulse);
  } else {
    if (!cfg.half_pi) throw CalibrationMissing("no calibrated controlled-pi/2 pulse in the configuration");
    spec = echo_protocol(cfg.half_pi->pulse);
  }
  const PerturbReport r = perturb_report(spec);
  json j = report_json(r);
  j["protocol"] = protocol;
  if (kind == ProtocolKind::DoublePulse) {
    const PhaseJump pj = phase_jump_theta(spec.pulse);
    j["phase_jump"] = {{"theta", pj.theta}, {"analytic", pj.analytic}, {"pi_offset", pj.pi_offset},
                       {"residual_analytic", pj.residual_analytic},
                       {"residual_shifted", pj.residual_shifted}};
  }
  std::cout << j.dump(2) << '\n';
  std::printf("\n%-26s %s\n", "quantity", "value");
  std::printf("%-26s %.6e\n", "alpha", r.alpha);
  std::printf("%-26s %.6e\n", "beta", r.beta);
  std::printf("%-26s %.6e\n", "2 Re(c11) + alpha", 2 * r.second_order.coeff_11.real() + r.alpha);
  std::printf("%-26s %s\n", "first order cancelled", r.first_order_cancelled ? "yes" : "no");
  std::printf("%-26s %.6e\n", "1-F3 predicted", predict_third_infidelity(r, epsilon));
  std::printf("%-26s %.3e\n", "  at epsilon", epsilon);
  return 0;
}

int cmd_phases(const Globals& g, double epsilon) {
  ExperimentConfig cfg = load(g);
  const PreparedProtocol pp = prepare_protocol(ProtocolKind::DoublePulse, cfg);
  SystemParams params = cfg.system;
  params.epsilon = epsilon;
  const PhaseSet p = phases_from_block(propagate_qubit_block(pp.spec, params, cfg.integrator), pp.gate_phase);
  json j = phases_json(p);
  j["epsilon"] = epsilon;
  j["beta_times_epsilon"] = pp.report.beta * epsilon;
  std::cout << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crosstalk simulator for locally addressed Rydberg CZ gates"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "Experiment configuration (JSON, comments allowed)");
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", g.formats, "Comma-separated subset of csv,json,svg");

  std::string target = "both";
  std::string write_config;
  auto* cal = app.add_subcommand("calibrate", "Calibrate CZ and/or controlled-pi/2 pulses");
  cal->add_option("--target", target, "cz, half_pi or both")
      ->check(CLI::IsMember({"cz", "half_pi", "both"}));
  cal->add_option("--write-config", write_config, "Store the calibrated pulses in this config file");

  std::string protocol = "double";
  double epsilon = 1e-2;
  std::string trajectory;
  auto* sim = app.add_subcommand("simulate", "Propagate one protocol at one epsilon");
  sim->add_option("--protocol", protocol)->check(CLI::IsMember({"single", "double"}));
  sim->add_option("--epsilon", epsilon)->check(CLI::Range(0.0, 1.0));
  sim->add_option("--trajectory", trajectory, "Write a CSV trajectory of the superposition input");

  auto* seps = app.add_subcommand("sweep-eps", "Infidelity versus epsilon");
  auto* svdw = app.add_subcommand("sweep-vdw", "Infidelity versus spectator interaction");
  auto* corr = app.add_subcommand("correct", "Double pulse with and without the phase circuit");

  auto* pert = app.add_subcommand("perturb", "Perturbative error coefficients");
  pert->add_option("--protocol", protocol)->check(CLI::IsMember({"single", "double"}));
  pert->add_option("--epsilon", epsilon)->check(CLI::Range(0.0, 0.1));

  auto* phs = app.add_subcommand("phases", "Spectator phases and circuit angles");
  phs->add_option("--epsilon", epsilon)->check(CLI::Range(0.0, 1.0));

  CLI11_PARSE(app, argc, argv);
  try {
    if (cal->parsed()) return cmd_calibrate(g, target, write_config);
    if (sim->parsed()) return cmd_simulate(g, protocol, epsilon, trajectory);
    if (seps->parsed()) return cmd_sweep(g, SweepKind::Epsilon);
    if (svdw->parsed()) return cmd_sweep(g, SweepKind::Vdw);
    if (corr->parsed()) return cmd_sweep(g, SweepKind::Correction);
    if (pert->parsed()) return cmd_perturb(g, protocol, epsilon);
    if (phs->parsed()) return cmd_phases(g, epsilon);
  } catch (const CalibrationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
