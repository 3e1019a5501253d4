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

#ifndef OPTOREADOUT_BUDGET_HPP
#define OPTOREADOUT_BUDGET_HPP

#include <span>
#include <string_view>
#include <vector>

#include "optoreadout/device.hpp"

namespace optoreadout::budget {

// Thermal occupation n = 1 / (exp(hbar w / k T) - 1). T <= 0 returns 0.
double bose_occupation(double temperature, double omega);

/// Temperature at which the mode holds occupation n. Throws
/// ErrorKind::argument for n <= 0.
double temperature_for_occupation(double n, double omega);

/// T = (T0^4 + (coeff * P^exponent)^4)^(1/4), P in microwatts.
double temp_power_law(double p_avg_watts, double t0, double coeff, double exponent);

struct PowerLaw {
  double t0 = 0.075;
  double coeff = 0.0;  // kelvin per microwatt^exponent
  double exponent = 0.54;

  double operator()(double p_avg_watts) const {
    return temp_power_law(p_avg_watts, t0, coeff, exponent);
  }
  bool operator==(const PowerLaw&) const = default;
};

struct ThermalModel {
  PowerLaw eo{0.075, 0.02, 0.54};
  PowerLaw mxc{0.007, 0.001, 0.54};
  PowerLaw qubit{0.0712, 0.004, 0.54};
  PowerLaw cavity{0.075, 0.006, 0.54};

  bool operator==(const ThermalModel&) const = default;
};

struct ThermalPoint {
  double p_avg = 0.0;  // W
  double t_mxc = 0.0, t_eo = 0.0, t_cavity = 0.0, t_qubit = 0.0;  // K
};

ThermalPoint thermal_point(const ThermalModel& model, double p_avg);

// x_qp = sqrt(2 pi k T / Delta) exp(-Delta / k T); gap in joules.
double qp_density_equilibrium(double temperature, double gap);

struct T1Model {
  double x_neq = 1e-7;
  double purcell_factor = 1.0;
  double purcell_slope = 0.0;  // relative linewidth increase per thermal photon above n_dark
  double n_dark = 0.0;         // cavity occupation of the dark reference point
  double rad_coefficient = 0.0;  // 1/s per thermal photon in the cQED cavity

  bool operator==(const T1Model&) const = default;
};

struct CoherenceBudget {
  double x_qp = 0.0;
  double gamma_qp = 0.0;
  double gamma_purcell = 0.0;
  double gamma_rad = 0.0;
  double t1 = 0.0;
  double n_th_cavity = 0.0;
  double kappa_c_eff = 0.0;
  double gamma_phi = 0.0;
  double t2 = 0.0;
};

double gamma_qp(double x_total, double gap, double omega_q);
double gamma_purcell(const DeviceParams& p, double kappa_c_eff, double purcell_factor);

/// Relaxation and dephasing budget at the given qubit and cQED cavity
/// temperatures. The dephasing part uses the cavity occupation with p.chi
/// and the broadened linewidth.
CoherenceBudget t1_budget(const DeviceParams& p, double t_qubit, double t_cavity,
                          const T1Model& model);

/// Gamma_phi = (kappa/2) Re[sqrt((1 + 2i chi/kappa)^2 + 8i chi n/kappa) - 1].
double shot_noise_dephasing(double n_th, double chi, double kappa_c);
/// 1/T2 = 1/(2 T1) + Gamma_phi.
double t2_limit(double t1, double gamma_phi);

/// Radiation coefficient giving T1 = t1_dark at the dark temperatures. Throws
/// ErrorKind::config when the other channels alone are already faster.
double calibrate_radiation_coefficient(const DeviceParams& p, double t_qubit, double t_cavity,
                                       T1Model model, double t1_dark);

double cooperativity(double g, const DeviceParams& p);
double conversion_efficiency(double c, double eta_e, double eta_o);

struct BudgetSettings {
  double pulse_power = 0.14;       // W, optical pump pulse
  double pulse_duration = 2e-6;    // s
  ThermalModel thermal;
  T1Model t1;
  double t1_dark = 33e-6;          // rad_coefficient is calibrated to this when 0
  double measurement_time = 1.8e-6;
  double qnd_delay = 2e-6;
  double fidelity_residual = 0.0;  // fitted residual error, <= 0.01
  double mode_matching = 1.0;      // extra optical mode-matching factor on eta_o
  double cooperativity = 0.0039;

  bool operator==(const BudgetSettings&) const = default;
};

struct Prediction {
  double rep_rate = 0.0;
  ThermalPoint thermal;
  CoherenceBudget budget;
  double p_thermal = 0.0;  // qubit excited population
  double eps_g = 0.0;
  double eps_e = 0.0;
  double fidelity = 0.0;
  double p_g2_given_g1 = 0.0;
  double p_e2_given_e1 = 0.0;
  double q = 0.0;
  double cooperativity = 0.0;
  double eta_eo = 0.0;
};

/// Budget with the radiation coefficient and the dark cavity occupation
/// resolved against the dark reference point.
T1Model resolved_t1_model(const DeviceParams& p, const BudgetSettings& s);

/// Prediction at a given average optical power with qubit/cavity
/// temperatures from the thermal model.
Prediction predict_at_power(const DeviceParams& p, const BudgetSettings& s, const T1Model& model,
                            double p_avg);
/// Prediction with the qubit and cavity held at `temperature`.
Prediction predict_at_temperature(const DeviceParams& p, const BudgetSettings& s,
                                  const T1Model& model, double temperature);

/// One prediction per repetition rate (P_avg = pulse_power * pulse_duration * rate).
std::vector<Prediction> predict_fidelity_vs_power(std::span<const double> rep_rates,
                                                  const DeviceParams& p, const BudgetSettings& s);

enum class SweepVariable { rep_rate, power, temperature, cooperativity };
SweepVariable parse_sweep_variable(std::string_view text);
std::string_view sweep_variable_name(SweepVariable v);

/// Evaluates every grid value on a bounded worker pool; rows come back in
/// input order. Throws ErrorKind::argument on an empty grid.
std::vector<Prediction> sweep(SweepVariable variable, std::span<const double> values,
                              const DeviceParams& p, const BudgetSettings& s,
                              unsigned threads = 0);

}  // namespace optoreadout::budget

#endif  // OPTOREADOUT_BUDGET_HPP
