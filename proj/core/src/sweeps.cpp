#include "xtalk/sweeps.hpp"

#include <cmath>
#include <future>

#include "xtalk/calibrate.hpp"

namespace xtalk {

PreparedProtocol prepare_protocol(ProtocolKind kind, const ExperimentConfig& cfg) {
  PreparedProtocol p;
  if (kind == ProtocolKind::SinglePulse) {
    if (!cfg.cz) throw CalibrationMissing("no calibrated CZ pulse in the configuration");
    p.spec = single_pulse(cfg.cz->pulse);
  } else {
    if (!cfg.half_pi) throw CalibrationMissing("no calibrated controlled-pi/2 pulse in the configuration");
    p.spec = echo_protocol(cfg.half_pi->pulse);
  }
  p.gate_phase = protocol_gate_phase(p.spec, cfg.system.v12, cfg.integrator);
  p.report = perturb_report(p.spec);
  return p;
}

std::vector<SweepRecord> run_points(const ExperimentConfig& cfg, const std::vector<SweepPoint>& points,
                                    bool with_correction) {
  cfg.validate();
  std::vector<PreparedProtocol> prepared;
  for (ProtocolKind k : cfg.protocols) prepared.push_back(prepare_protocol(k, cfg));

  auto run_one = [&](const SweepPoint& pt) {
    std::vector<SweepRecord> out;
    SystemParams params = cfg.system;
    params.epsilon = pt.epsilon;
    params.v13 = pt.v13;
    params.v23 = pt.v23;
    for (const PreparedProtocol& pp : prepared) {
      const Eigen::MatrixXcd block = propagate_qubit_block(pp.spec, params, cfg.integrator);
      std::optional<PhaseSet> phases;
      Eigen::MatrixXcd corrected;
      if (with_correction) {
        phases = phases_from_block(block, pp.gate_phase);
        corrected = block;
        apply_correction(corrected, *phases);
      }
      for (InitialState s : cfg.initial_states) {
        SweepRecord r;
        r.epsilon = pt.epsilon;
        r.v12 = params.v12;
        r.v13 = pt.v13;
        r.v23 = pt.v23;
        r.protocol = pp.spec.kind;
        r.initial_state = s;
        r.infidelity = initial_state_infidelity(block, s, pp.gate_phase);
        if (with_correction) {
          r.infidelity_corrected = initial_state_infidelity(corrected, s, pp.gate_phase);
          r.phases = phases;
        }
        if (s == InitialState::g00 && pt.epsilon <= 0.1) {
          r.perturb_prediction = predict_third_infidelity(pp.report, pt.epsilon);
        }
        out.push_back(r);
      }
    }
    return out;
  };

  std::vector<SweepRecord> records;
  const std::size_t threads = static_cast<std::size_t>(cfg.threads);
  for (std::size_t begin = 0; begin < points.size(); begin += threads) {
    const std::size_t end = std::min(points.size(), begin + threads);
    std::vector<std::future<std::vector<SweepRecord>>> batch;
    for (std::size_t i = begin; i < end; ++i) {
      batch.push_back(std::async(threads == 1 ? std::launch::deferred : std::launch::async, run_one,
                                 points[i]));
    }
    for (std::size_t i = begin; i < end; ++i) {
      try {
        auto rs = batch[i - begin].get();
        records.insert(records.end(), rs.begin(), rs.end());
      } catch (const std::exception& e) {
        for (std::size_t k = i + 1; k < end; ++k) {
          try {
            batch[k - begin].wait();
          } catch (...) {
          }
        }
        throw SweepAborted("sweep point epsilon=" + std::to_string(points[i].epsilon) +
                               " v13=" + std::to_string(points[i].v13) +
                               " v23=" + std::to_string(points[i].v23) + ": " + e.what(),
                           records);
      }
    }
  }
  return records;
}

std::vector<SweepRecord> run_epsilon_sweep(const ExperimentConfig& cfg) {
  std::vector<SweepPoint> pts;
  for (double e : cfg.sweep.grid) pts.push_back({e, cfg.system.v13, cfg.system.v23});
  return run_points(cfg, pts, cfg.phase_correction);
}

std::vector<SweepRecord> run_vdw_sweep(const ExperimentConfig& cfg) {
  std::vector<SweepPoint> pts;
  const double eps = cfg.sweep.epsilon;
  switch (cfg.sweep.variable) {
    case SweepVariable::VSym:
      for (double v : cfg.sweep.grid) pts.push_back({eps, v, v});
      break;
    case SweepVariable::V13V23Pair:
      for (double v13 : cfg.sweep.grid) {
        for (double v23 : cfg.sweep.grid_v23) pts.push_back({eps, v13, v23});
      }
      break;
    case SweepVariable::Epsilon:
      throw std::invalid_argument("run_vdw_sweep: sweep variable must be v_sym or v13_v23_pair");
  }
  return run_points(cfg, pts, cfg.phase_correction);
}

std::vector<SweepRecord> run_correction_comparison(const ExperimentConfig& cfg) {
  ExperimentConfig c = cfg;
  c.protocols = {ProtocolKind::DoublePulse};
  std::vector<SweepPoint> pts;
  for (double e : c.sweep.grid) pts.push_back({e, c.system.v13, c.system.v23});
  return run_points(c, pts, true);
}

std::vector<SweepRecord> select(const std::vector<SweepRecord>& records, ProtocolKind protocol,
                                InitialState state) {
  std::vector<SweepRecord> out;
  for (const auto& r : records) {
    if (r.protocol == protocol && r.initial_state == state) out.push_back(r);
  }
  return out;
}

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y, double lo, double hi) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_loglog: size mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo * (1 - 1e-12) || x[i] > hi * (1 + 1e-12) || !(x[i] > 0) || !(y[i] > 0)) continue;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("fit_loglog: fewer than two points in the window");
  const double denom = n * sxx - sx * sx;
  LogLogFit f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  f.points = n;
  return f;
}

double fit_quadratic_coefficient(const std::vector<double>& x, const std::vector<double>& y,
                                 double lo, double hi) {
  double acc = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo * (1 - 1e-12) || x[i] > hi * (1 + 1e-12) || !(x[i] > 0) || !(y[i] > 0)) continue;
    acc += std::log(y[i] / (x[i] * x[i]));
    ++n;
  }
  if (n == 0) throw std::invalid_argument("fit_quadratic_coefficient: empty window");
  return std::exp(acc / n);
}

Crossover locate_crossover(const std::vector<double>& x, const std::vector<double>& y, double level,
                           double x_max) {
  Crossover c;
  std::vector<double> mid;
  std::vector<double> slope;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (!(x[i] > 0 && y[i] > 0 && y[i + 1] > 0)) continue;
    mid.push_back(0.5 * (std::log(x[i]) + std::log(x[i + 1])));
    slope.push_back((std::log(y[i + 1]) - std::log(y[i])) / (std::log(x[i + 1]) - std::log(x[i])));
  }
  for (std::size_t i = 0; i + 1 < slope.size(); ++i) {
    if (slope[i] < level && slope[i + 1] >= level) {
      const double f = (level - slope[i]) / (slope[i + 1] - slope[i]);
      c.found = true;
      c.location = std::exp(mid[i] + f * (mid[i + 1] - mid[i]));
      break;
    }
  }
  // Relative least squares for y = a x + b x^2: minimize sum ((a x + b x^2 - y) / y)^2.
  double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0 && x[i] <= x_max && y[i] > 0)) continue;
    const double u = x[i] / y[i];
    const double v = x[i] * x[i] / y[i];
    s11 += u * u;
    s12 += u * v;
    s22 += v * v;
    r1 += u;
    r2 += v;
  }
  const double det = s11 * s22 - s12 * s12;
  if (det != 0.0) {
    c.linear_coeff = (r1 * s22 - r2 * s12) / det;
    c.quadratic_coeff = (s11 * r2 - s12 * r1) / det;
  }
  return c;
}

}  // namespace xtalk
