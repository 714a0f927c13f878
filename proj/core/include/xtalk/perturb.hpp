#pragma once

// Time-dependent perturbation theory for the spectator atom.
//
// The spectator evolves under H3 = (sqrt(eps)/2)(Omega sigma+ + Omega* sigma-) - Delta n.
// Treating -Delta n exactly (U0 = exp(i phi |r><r|), phi(t) = int_0^t Delta) and
// the drive as the perturbation, the Dyson series for the spectator starting
// in |1> reads, with g(t) = Omega(t) exp(-i phi(t)):
//
//   <r|U_I|1> = sqrt(eps) * (-i/2) int g                                 + O(eps^{3/2})
//   <1|U_I|1> = 1 + eps * (-1/4) int dt1 conj(g(t1)) int_{0}^{t1} g(t2) dt2 + O(eps^2)
//   <r|U_I|r> = 1 + eps * (-1/4) int dt1 g(t1) conj(int_{0}^{t1} g(t2) dt2) + O(eps^2)
//
// All integrals are evaluated on composite Gauss-Legendre panels; the nested
// integral is reduced to a single integral over the running primitive of g.

#include <complex>

#include "xtalk/pulses.hpp"

namespace xtalk {

struct SecondOrderElements {
  std::complex<double> coeff_rr;  // eps^1 coefficient of <r|U_I|r>
  std::complex<double> coeff_11;  // eps^1 coefficient of <1|U_I|1>
};

struct PerturbReport {
  std::complex<double> first_order_ryd_amp;  // per sqrt(eps)
  SecondOrderElements second_order;
  double alpha = 0.0;      // p(eps) = alpha eps + O(eps^2)
  double beta = 0.0;       // arg<1|U|1> = beta eps + O(eps^2)
  double ryd_phase = 0.0;  // arg<r|U|1> in the lab frame, leading order
  bool first_order_cancelled = false;
  double linear_infid_coeff = 0.0;     // alpha / 2
  double predicted_infid_coeff = 0.0;  // beta^2 / 4, the eps^2 coefficient once alpha = 0
};

/// (-i/2) int Omega(t) exp(-i phi(t)) dt over the whole protocol.
std::complex<double> first_order_amplitude(const ProtocolSpec& spec);

SecondOrderElements second_order_elements(const ProtocolSpec& spec);

PerturbReport perturb_report(const ProtocolSpec& spec);

/// 1 - F3 for the spectator prepared in (|0> + |1>)/sqrt(2): (alpha/2) eps
/// when the first order survives, (beta^2/4) eps^2 when it is cancelled.
/// Throws std::invalid_argument for epsilon outside [0, 0.1].
double predict_third_infidelity(const ProtocolSpec& spec, double epsilon);

/// Same, from an existing report.
double predict_third_infidelity(const PerturbReport& report, double epsilon);

}  // namespace xtalk
