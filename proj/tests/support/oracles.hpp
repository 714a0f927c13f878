#pragma once

// Reference computations that share no code with the library: closed forms,
// brute-force quadrature, and a matrix-exponential propagator.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using cd = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

/// Integral of a * exp(-(t - c)^2 / (2 w^2)) over [lo, hi].
inline double gaussian_integral(double a, double w, double c, double lo, double hi) {
  const double s = w * std::numbers::sqrt2;
  return a * w * std::sqrt(pi / 2) * (std::erf((hi - c) / s) - std::erf((lo - c) / s));
}

/// sin^2 ramp envelope written out independently of the library.
inline double envelope(double t, double T, double rf) {
  const double r = rf * T;
  if (t <= 0 || t >= T) return 0.0;
  if (t < r) return std::pow(std::sin(pi * t / (2 * r)), 2);
  if (t > T - r) return std::pow(std::sin(pi * (T - t) / (2 * r)), 2);
  return 1.0;
}

struct Pulse {
  double amp, width, center, offset, T, rf;
  double detuning(double t) const {
    const double d = t - T / 2 - center;
    return offset + amp * std::exp(-d * d / (2 * width * width));
  }
};

/// Drive (Omega, Delta) of a single or double protocol at time t.
inline std::pair<cd, double> drive(const Pulse& p, bool dbl, double theta, double t) {
  if (dbl && t > p.T) {
    const double s = t - p.T;
    return {std::polar(envelope(s, p.T, p.rf), theta), p.detuning(s)};
  }
  return {envelope(t, p.T, p.rf), p.detuning(t)};
}

/// First and second order Dyson terms by the trapezoid rule on n intervals,
/// with the accumulated phase integrated by the same rule and the nested
/// integral done as an explicit double sum over the triangle. O(n^2).
struct Dyson {
  cd a1;    // (-i/2) int g
  cd c11;   // (-1/4) int dt1 conj(g(t1)) int_0^t1 g(t2) dt2
};

inline Dyson brute_force_dyson(const Pulse& p, bool dbl, double theta, int n) {
  const double tf = dbl ? 2 * p.T : p.T;
  const double h = tf / n;
  std::vector<cd> g(static_cast<std::size_t>(n + 1));
  double phi = 0.0;
  double prev_delta = drive(p, dbl, theta, 0.0).second;
  for (int k = 0; k <= n; ++k) {
    const double t = k * h;
    const auto [om, de] = drive(p, dbl, theta, t);
    if (k > 0) phi += 0.5 * h * (prev_delta + de);
    prev_delta = de;
    g[static_cast<std::size_t>(k)] = om * std::polar(1.0, -phi);
  }
  Dyson d{};
  cd sum = 0;
  for (int k = 0; k <= n; ++k) sum += (k == 0 || k == n ? 0.5 : 1.0) * g[static_cast<std::size_t>(k)];
  d.a1 = cd(0, -0.5) * h * sum;
  // Triangle: sum_k w_k conj(g_k) * sum_{j<=k} w_jk g_j, trapezoid in both variables.
  cd outer = 0;
  cd inner = 0;  // trapezoid integral of g from 0 to t_k
  for (int k = 0; k <= n; ++k) {
    if (k > 0) inner += 0.5 * h * (g[static_cast<std::size_t>(k - 1)] + g[static_cast<std::size_t>(k)]);
    outer += (k == 0 || k == n ? 0.5 : 1.0) * std::conj(g[static_cast<std::size_t>(k)]) * inner;
  }
  d.c11 = -0.25 * h * outer;
  return d;
}

/// Product of exact exponentials of H at segment midpoints (second order in
/// the segment length). `hamiltonian(t)` returns the dense H at time t.
inline Eigen::VectorXcd expm_propagate(const std::function<Eigen::MatrixXcd(double)>& hamiltonian,
                                       const Eigen::VectorXcd& psi0, double tf, int segments) {
  Eigen::VectorXcd psi = psi0;
  const double h = tf / segments;
  for (int k = 0; k < segments; ++k) {
    const Eigen::MatrixXcd H = hamiltonian((k + 0.5) * h);
    const Eigen::MatrixXcd U = (cd(0, -h) * H).exp();
    psi = U * psi;
  }
  return psi;
}

/// Resonant two-level Rabi oscillation from |1>: population in |r> after time t
/// with constant Rabi frequency Omega and detuning Delta.
inline double rabi_population(double omega, double delta, double t) {
  const double g = std::sqrt(omega * omega + delta * delta);
  const double s = std::sin(g * t / 2);
  return omega * omega / (g * g) * s * s;
}

}  // namespace oracle
