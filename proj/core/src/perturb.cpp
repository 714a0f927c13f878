#include "xtalk/perturb.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "xtalk/quadrature.hpp"

namespace xtalk {

namespace {

using cd = std::complex<double>;
constexpr int kOrder = 20;
constexpr double kCancelledRatio = 1e-10;

// g(t) = Omega(t) exp(-i phi(t)) sampled on a composite rule, together with its
// running primitive G(t) = int_0^t g. Values are given at the composite nodes.
struct Sampled {
  quad::CompositeRule rule;
  std::vector<cd> g;
  std::vector<cd> primitive;
  cd total{0.0, 0.0};
  double phase_end = 0.0;
  double envelope_area = 0.0;  // int |Omega|
};

Sampled sample(const ProtocolSpec& spec) {
  spec.validate();
  const double total = spec.total_duration();
  const auto panels = quad::make_panels(0.0, total, drive_breakpoints(spec),
                                        resolving_panel_length(spec.pulse));
  const quad::Rule& gl = quad::gauss_legendre(kOrder);

  auto delta = [&](double t) { return protocol_drive(spec, t).delta; };
  // phi(s) for s inside a panel starting at a with phi(a) known.
  auto phase_from = [&](double a, double phi_a, double s) {
    if (s == a) return phi_a;
    const double mid = 0.5 * (a + s);
    const double half = 0.5 * (s - a);
    double sum = 0.0;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) sum += gl.weights[k] * delta(mid + half * gl.nodes[k]);
    return phi_a + half * sum;
  };
  auto g_at = [&](double a, double phi_a, double s) {
    const cd omega = protocol_drive(spec, s).omega;
    return omega * std::polar(1.0, -phase_from(a, phi_a, s));
  };

  Sampled out;
  out.rule = quad::composite(panels, kOrder);
  out.g.reserve(out.rule.nodes.size());
  out.primitive.reserve(out.rule.nodes.size());

  double phi_a = 0.0;
  cd prim_a{0.0, 0.0};
  for (const quad::Panel& p : panels) {
    const double mid = 0.5 * (p.a + p.b);
    const double half = 0.5 * (p.b - p.a);
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      const double t = mid + half * gl.nodes[k];
      out.g.push_back(g_at(p.a, phi_a, t));
      // int_a^t g via a Gauss-Legendre rule mapped onto [a, t].
      const double m2 = 0.5 * (p.a + t);
      const double h2 = 0.5 * (t - p.a);
      cd partial{0.0, 0.0};
      for (std::size_t j = 0; j < gl.nodes.size(); ++j) {
        partial += gl.weights[j] * g_at(p.a, phi_a, m2 + h2 * gl.nodes[j]);
      }
      out.primitive.push_back(prim_a + h2 * partial);
      out.envelope_area += half * gl.weights[k] * std::abs(protocol_drive(spec, t).omega);
    }
    cd panel_sum{0.0, 0.0};
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      panel_sum += gl.weights[k] * out.g[out.g.size() - gl.nodes.size() + k];
    }
    prim_a += half * panel_sum;
    phi_a = phase_from(p.a, phi_a, p.b);
  }
  out.total = prim_a;
  out.phase_end = phi_a;
  return out;
}

PerturbReport report_from(const Sampled& s) {
  PerturbReport r;
  r.first_order_ryd_amp = cd(0.0, -0.5) * s.total;
  cd c11{0.0, 0.0};
  cd crr{0.0, 0.0};
  for (std::size_t i = 0; i < s.g.size(); ++i) {
    c11 += s.rule.weights[i] * std::conj(s.g[i]) * s.primitive[i];
    crr += s.rule.weights[i] * s.g[i] * std::conj(s.primitive[i]);
  }
  r.second_order = {-0.25 * crr, -0.25 * c11};
  r.alpha = std::norm(r.first_order_ryd_amp);
  r.beta = r.second_order.coeff_11.imag();
  r.ryd_phase = std::arg(r.first_order_ryd_amp * std::polar(1.0, s.phase_end));
  const double scale = 0.25 * s.envelope_area * s.envelope_area;
  r.first_order_cancelled = scale > 0.0 && r.alpha <= kCancelledRatio * scale;
  r.linear_infid_coeff = 0.5 * r.alpha;
  r.predicted_infid_coeff = 0.25 * r.beta * r.beta;
  return r;
}

}  // namespace

std::complex<double> first_order_amplitude(const ProtocolSpec& spec) {
  return cd(0.0, -0.5) * sample(spec).total;
}

SecondOrderElements second_order_elements(const ProtocolSpec& spec) {
  return report_from(sample(spec)).second_order;
}

PerturbReport perturb_report(const ProtocolSpec& spec) { return report_from(sample(spec)); }

double predict_third_infidelity(const PerturbReport& report, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 0.1)) {
    throw std::invalid_argument("predict_third_infidelity: epsilon must lie in [0, 0.1]");
  }
  if (report.first_order_cancelled) return report.predicted_infid_coeff * epsilon * epsilon;
  return report.linear_infid_coeff * epsilon;
}

double predict_third_infidelity(const ProtocolSpec& spec, double epsilon) {
  return predict_third_infidelity(perturb_report(spec), epsilon);
}

}  // namespace xtalk
