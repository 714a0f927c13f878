#include "xtalk/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace xtalk::quad {

namespace {

Rule compute_rule(int n) {
  Rule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, refined by Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

}  // namespace

const Rule& gauss_legendre(int n) {
  if (n < 1 || n > 256) {
    throw std::invalid_argument("gauss_legendre: order must be in [1, 256]");
  }
  static std::mutex mutex;
  static std::map<int, Rule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
  return it->second;
}

std::vector<Panel> make_panels(double a, double b, std::span<const double> breakpoints,
                               double max_panel) {
  if (!(b >= a)) throw std::invalid_argument("make_panels: reversed interval");
  if (!(max_panel > 0.0)) throw std::invalid_argument("make_panels: max_panel must be positive");
  std::vector<double> cuts{a};
  for (double x : breakpoints) {
    if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Panel> panels;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double len = cuts[i + 1] - cuts[i];
    if (len <= 0.0) continue;
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / max_panel)));
    for (int k = 0; k < pieces; ++k) {
      const double lo = cuts[i] + len * k / pieces;
      const double hi = (k + 1 == pieces) ? cuts[i + 1] : cuts[i] + len * (k + 1) / pieces;
      panels.push_back({lo, hi});
    }
  }
  return panels;
}

double integrate(const std::function<double(double)>& f, std::span<const Panel> panels,
                 int order) {
  const Rule& rule = gauss_legendre(order);
  double total = 0.0;
  for (const Panel& p : panels) {
    const double mid = 0.5 * (p.a + p.b);
    const double half = 0.5 * (p.b - p.a);
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      sum += rule.weights[k] * f(mid + half * rule.nodes[k]);
    }
    total += half * sum;
  }
  return total;
}

CompositeRule composite(std::span<const Panel> panels, int order) {
  const Rule& rule = gauss_legendre(order);
  CompositeRule out;
  out.order = order;
  out.panels.assign(panels.begin(), panels.end());
  out.nodes.reserve(panels.size() * rule.nodes.size());
  out.weights.reserve(panels.size() * rule.nodes.size());
  for (const Panel& p : panels) {
    const double mid = 0.5 * (p.a + p.b);
    const double half = 0.5 * (p.b - p.a);
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      out.nodes.push_back(mid + half * rule.nodes[k]);
      out.weights.push_back(half * rule.weights[k]);
    }
  }
  return out;
}

}  // namespace xtalk::quad
