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
#include <string>

#include "optoreadout/budget.hpp"
#include "optoreadout/constants.hpp"
#include "optoreadout/error.hpp"

namespace optoreadout::budget {

double bose_occupation(double temperature, double omega) {
  if (!(temperature > 0.0)) return 0.0;
  const double x = constants::hbar * omega / (constants::k_boltzmann * temperature);
  return 1.0 / std::expm1(x);
}

double temperature_for_occupation(double n, double omega) {
  if (!(n > 0.0)) fail(ErrorKind::argument, "temperature_for_occupation: n must be > 0");
  if (!(omega > 0.0)) fail(ErrorKind::argument, "temperature_for_occupation: omega must be > 0");
  return constants::hbar * omega / (constants::k_boltzmann * std::log1p(1.0 / n));
}

double temp_power_law(double p_avg_watts, double t0, double coeff, double exponent) {
  if (p_avg_watts < 0.0) fail(ErrorKind::argument, "temp_power_law: average power must be >= 0");
  const double p_uw = p_avg_watts * 1e6;
  const double excess = p_uw > 0.0 ? coeff * std::pow(p_uw, exponent) : 0.0;
  // q = 4 power mean as a smooth floor at t0.
  const double t0_4 = t0 * t0 * t0 * t0;
  const double ex_4 = excess * excess * excess * excess;
  return std::sqrt(std::sqrt(t0_4 + ex_4));
}

ThermalPoint thermal_point(const ThermalModel& model, double p_avg) {
  ThermalPoint tp;
  tp.p_avg = p_avg;
  tp.t_mxc = model.mxc(p_avg);
  tp.t_eo = model.eo(p_avg);
  tp.t_cavity = model.cavity(p_avg);
  tp.t_qubit = model.qubit(p_avg);
  return tp;
}

double qp_density_equilibrium(double temperature, double gap) {
  if (!(temperature > 0.0)) return 0.0;
  const double kt = constants::k_boltzmann * temperature;
  return std::sqrt(constants::two_pi * kt / gap) * std::exp(-gap / kt);
}

}  // namespace optoreadout::budget
