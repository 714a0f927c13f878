#pragma once

// Composite Gauss-Legendre quadrature on a piecewise partition of an interval.

#include <functional>
#include <span>
#include <vector>

namespace xtalk::quad {

struct Rule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule, nodes by Newton iteration on P_n.
/// Rules are cached; the returned reference stays valid for the program lifetime.
const Rule& gauss_legendre(int n);

struct Panel {
  double a;
  double b;
};

/// Splits [a, b] at every breakpoint strictly inside it, then subdivides each
/// segment into pieces no longer than `max_panel`.
std::vector<Panel> make_panels(double a, double b, std::span<const double> breakpoints,
                               double max_panel);

/// Integral of f over [a, b] using the n-point rule on each panel.
double integrate(const std::function<double(double)>& f, std::span<const Panel> panels,
                 int order);

/// Nodes and weights of the composite rule, flattened in ascending order.
struct CompositeRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<Panel> panels;
  int order = 0;
};

CompositeRule composite(std::span<const Panel> panels, int order);

}  // namespace xtalk::quad
