#pragma once

// Sweep runners over epsilon and spectator interaction strengths, plus the
// small analysis helpers used to summarize them (log-log slopes, crossover).

#include <optional>
#include <stdexcept>
#include <vector>

#include "xtalk/config.hpp"
#include "xtalk/metrics.hpp"
#include "xtalk/perturb.hpp"

namespace xtalk {

struct SweepRecord {
  double epsilon = 0.0;
  double v12 = 0.0;
  double v13 = 0.0;
  double v23 = 0.0;
  ProtocolKind protocol = ProtocolKind::SinglePulse;
  InitialState initial_state = InitialState::g00;
  double infidelity = 0.0;
  std::optional<double> infidelity_corrected;
  std::optional<double> perturb_prediction;  // gate state |00> only
  std::optional<PhaseSet> phases;             // double pulse with correction
};

/// Thrown when a sweep needs a calibration the configuration does not carry.
class CalibrationMissing : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when one grid point fails; carries the records finished before it.
class SweepAborted : public std::runtime_error {
 public:
  SweepAborted(const std::string& what, std::vector<SweepRecord> partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const std::vector<SweepRecord>& partial() const { return partial_; }

 private:
  std::vector<SweepRecord> partial_;
};

/// A protocol ready for sweeping: spec, gate-atom phase and perturbative report.
struct PreparedProtocol {
  ProtocolSpec spec;
  double gate_phase = 0.0;
  PerturbReport report;
};

PreparedProtocol prepare_protocol(ProtocolKind kind, const ExperimentConfig& cfg);

struct SweepPoint {
  double epsilon;
  double v13;
  double v23;
};

/// Records for every (point, protocol, initial state), in that nesting order.
std::vector<SweepRecord> run_points(const ExperimentConfig& cfg, const std::vector<SweepPoint>& points,
                                    bool with_correction);

std::vector<SweepRecord> run_epsilon_sweep(const ExperimentConfig& cfg);
std::vector<SweepRecord> run_vdw_sweep(const ExperimentConfig& cfg);
std::vector<SweepRecord> run_correction_comparison(const ExperimentConfig& cfg);

/// Selects records by protocol and initial state, in sweep order.
std::vector<SweepRecord> select(const std::vector<SweepRecord>& records, ProtocolKind protocol,
                                InitialState state);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;  // log(y) = intercept + slope log(x)
  int points = 0;
};

/// Least-squares line through (log x, log y) for x in [lo, hi] (y > 0 only).
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y, double lo, double hi);

/// Geometric-mean estimate of c in y = c x^2 over [lo, hi].
double fit_quadratic_coefficient(const std::vector<double>& x, const std::vector<double>& y,
                                 double lo, double hi);

struct Crossover {
  bool found = false;
  double location = 0.0;     // first x where the local log-log slope reaches `level`
  double linear_coeff = 0.0;    // a in y ~ a x + b x^2, least squares on x <= x_max
  double quadratic_coeff = 0.0; // b
};

/// Locates where the local slope of y(x) rises through `level` (interpolated
/// in log x between grid points) and also fits y = a x + b x^2 below x_max.
Crossover locate_crossover(const std::vector<double>& x, const std::vector<double>& y,
                           double level = 1.5, double x_max = 1e-2);

}  // namespace xtalk
