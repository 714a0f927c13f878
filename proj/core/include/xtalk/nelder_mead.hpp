#pragma once

// Derivative-free simplex minimization (Nelder-Mead with the standard
// reflection/expansion/contraction/shrink coefficients 1, 2, 1/2, 1/2).

#include <functional>
#include <span>
#include <vector>

namespace xtalk {

struct NelderMeadOptions {
  int max_evaluations = 2000;
  double f_tolerance = 1e-14;  // spread of simplex values
  double x_tolerance = 1e-9;   // simplex diameter
  std::vector<double> initial_step;  // per coordinate; empty -> 10% of |x0| (or 0.05)
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;  // stopped on tolerance rather than budget
};

using Objective = std::function<double(std::span<const double>)>;

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const NelderMeadOptions& options = {});

/// Minimizes a scalar function on [lo, hi] by dense sampling followed by
/// golden-section refinement around the best sample.
struct ScalarMinimum {
  double x;
  double value;
};
ScalarMinimum minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                              int samples = 256, double x_tolerance = 1e-11);

}  // namespace xtalk
