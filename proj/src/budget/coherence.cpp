// Copyright 2026 The optoreadout Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include "optoreadout/budget.hpp"
#include "optoreadout/constants.hpp"
#include "optoreadout/error.hpp"

namespace optoreadout::budget {

double gamma_qp(double x_total, double gap, double omega_q) {
  return x_total * std::sqrt(2.0 * gap / (constants::pi * constants::hbar * omega_q)) * omega_q;
}

double gamma_purcell(const DeviceParams& p, double kappa_c_eff, double purcell_factor) {
  const double ratio = p.g_qc / (p.omega_c - p.omega_q);
  return purcell_factor * kappa_c_eff * ratio * ratio;
}

CoherenceBudget t1_budget(const DeviceParams& p, double t_qubit, double t_cavity,
                          const T1Model& model) {
  CoherenceBudget b;
  b.n_th_cavity = bose_occupation(t_cavity, p.omega_c);
  b.kappa_c_eff =
      p.kappa_c * (1.0 + model.purcell_slope * std::max(0.0, b.n_th_cavity - model.n_dark));
  b.x_qp = qp_density_equilibrium(t_qubit, p.delta_gap);
  b.gamma_qp = gamma_qp(b.x_qp + model.x_neq, p.delta_gap, p.omega_q);
  b.gamma_purcell = gamma_purcell(p, b.kappa_c_eff, model.purcell_factor);
  b.gamma_rad = model.rad_coefficient * b.n_th_cavity;
  const double total = b.gamma_qp + b.gamma_purcell + b.gamma_rad;
  b.t1 = total > 0.0 ? 1.0 / total : std::numeric_limits<double>::infinity();
  b.gamma_phi = shot_noise_dephasing(b.n_th_cavity, p.chi, b.kappa_c_eff);
  b.t2 = t2_limit(b.t1, b.gamma_phi);
  return b;
}

double shot_noise_dephasing(double n_th, double chi, double kappa_c) {
  if (n_th < 0.0) fail(ErrorKind::argument, "shot_noise_dephasing: n_th must be >= 0");
  if (!(kappa_c > 0.0)) fail(ErrorKind::argument, "shot_noise_dephasing: kappa must be > 0");
  using namespace std::complex_literals;
  const std::complex<double> a = 1.0 + 2.0i * chi / kappa_c;
  const std::complex<double> root = std::sqrt(a * a + 8.0i * chi * n_th / kappa_c);
  return 0.5 * kappa_c * (root - 1.0).real();
}

double t2_limit(double t1, double gamma_phi) {
  const double rate = (std::isfinite(t1) && t1 > 0.0 ? 0.5 / t1 : 0.0) + gamma_phi;
  return rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
}

double calibrate_radiation_coefficient(const DeviceParams& p, double t_qubit, double t_cavity,
                                       T1Model model, double t1_dark) {
  if (!(t1_dark > 0.0)) fail(ErrorKind::config, "budget: t1_dark must be > 0");
  model.rad_coefficient = 0.0;
  const CoherenceBudget b = t1_budget(p, t_qubit, t_cavity, model);
  const double residual = 1.0 / t1_dark - b.gamma_qp - b.gamma_purcell;
  if (residual < 0.0)
    fail(ErrorKind::config, "budget: quasiparticle and Purcell channels alone give T1 = " +
                                std::to_string(1.0 / (b.gamma_qp + b.gamma_purcell)) +
                                " s, shorter than t1_dark");
  if (residual == 0.0) return 0.0;
  if (!(b.n_th_cavity > 0.0))
    fail(ErrorKind::config, "budget: cannot calibrate radiation at zero cavity occupation");
  return residual / b.n_th_cavity;
}

double cooperativity(double g, const DeviceParams& p) {
  if (g < 0.0) fail(ErrorKind::argument, "cooperativity: g must be >= 0");
  return 4.0 * g * g / (p.kappa_e * p.kappa_o);
}

double conversion_efficiency(double c, double eta_e, double eta_o) {
  if (c < 0.0) fail(ErrorKind::argument, "conversion_efficiency: C must be >= 0");
  if (eta_e < 0.0 || eta_e > 1.0 || eta_o < 0.0 || eta_o > 1.0)
    fail(ErrorKind::argument, "conversion_efficiency: efficiencies must lie in [0, 1]");
  return eta_e * eta_o * 4.0 * c / ((1.0 + c) * (1.0 + c));
}

}  // namespace optoreadout::budget
