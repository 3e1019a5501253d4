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

#include "detail/parallel.hpp"
#include "optoreadout/budget.hpp"
#include "optoreadout/error.hpp"

namespace optoreadout::budget {

namespace {

Prediction predict(const DeviceParams& p, const BudgetSettings& s, const T1Model& model,
                   const ThermalPoint& tp) {
  Prediction r;
  r.thermal = tp;
  r.budget = t1_budget(p, tp.t_qubit, tp.t_cavity, model);
  r.p_thermal = bose_occupation(tp.t_qubit, p.omega_q);
  const double t1 = r.budget.t1;
  // Decay before the middle of the window flips the assignment.
  const double survive_half = std::isfinite(t1) ? std::exp(-0.5 * s.measurement_time / t1) : 1.0;
  r.eps_g = r.p_thermal * survive_half;
  r.eps_e = 1.0 - survive_half;
  r.fidelity = 1.0 - 0.5 * (r.eps_g + r.eps_e) - s.fidelity_residual;
  const double survive_delay = std::isfinite(t1) ? std::exp(-s.qnd_delay / t1) : 1.0;
  r.p_e2_given_e1 = survive_delay;
  r.p_g2_given_g1 = 1.0 - r.p_thermal * (1.0 - survive_delay);
  r.q = 0.5 * (r.p_e2_given_e1 + r.p_g2_given_g1);
  r.cooperativity = s.cooperativity;
  r.eta_eo = conversion_efficiency(s.cooperativity, p.eta_e(), p.eta_o() * s.mode_matching);
  return r;
}

void check(const BudgetSettings& s) {
  if (s.fidelity_residual < 0.0 || s.fidelity_residual > 0.01)
    fail(ErrorKind::config, "budget: fidelity_residual must lie in [0, 0.01]");
  if (s.measurement_time < 0.0 || s.qnd_delay < 0.0)
    fail(ErrorKind::config, "budget: times must be >= 0");
}

}  // namespace

T1Model resolved_t1_model(const DeviceParams& p, const BudgetSettings& s) {
  T1Model m = s.t1;
  const ThermalPoint dark = thermal_point(s.thermal, 0.0);
  if (m.n_dark == 0.0) m.n_dark = bose_occupation(dark.t_cavity, p.omega_c);
  if (m.rad_coefficient == 0.0 && s.t1_dark > 0.0)
    m.rad_coefficient = calibrate_radiation_coefficient(p, dark.t_qubit, dark.t_cavity, m, s.t1_dark);
  return m;
}

Prediction predict_at_power(const DeviceParams& p, const BudgetSettings& s, const T1Model& model,
                            double p_avg) {
  check(s);
  if (p_avg < 0.0 || !std::isfinite(p_avg))
    fail(ErrorKind::argument, "average power must be finite and >= 0");
  return predict(p, s, model, thermal_point(s.thermal, p_avg));
}

Prediction predict_at_temperature(const DeviceParams& p, const BudgetSettings& s,
                                  const T1Model& model, double temperature) {
  check(s);
  if (!(temperature > 0.0)) fail(ErrorKind::argument, "temperature must be > 0");
  ThermalPoint tp = thermal_point(s.thermal, 0.0);
  tp.t_qubit = temperature;
  tp.t_cavity = temperature;
  return predict(p, s, model, tp);
}

std::vector<Prediction> predict_fidelity_vs_power(std::span<const double> rep_rates,
                                                  const DeviceParams& p, const BudgetSettings& s) {
  return sweep(SweepVariable::rep_rate, rep_rates, p, s, 1);
}

SweepVariable parse_sweep_variable(std::string_view text) {
  if (text == "rep_rate") return SweepVariable::rep_rate;
  if (text == "power") return SweepVariable::power;
  if (text == "temperature") return SweepVariable::temperature;
  if (text == "cooperativity") return SweepVariable::cooperativity;
  fail(ErrorKind::argument, "unknown sweep variable '" + std::string(text) +
                                "' (expected rep_rate, power, temperature or cooperativity)");
}

std::string_view sweep_variable_name(SweepVariable v) {
  switch (v) {
    case SweepVariable::rep_rate: return "rep_rate";
    case SweepVariable::power: return "power";
    case SweepVariable::temperature: return "temperature";
    case SweepVariable::cooperativity: return "cooperativity";
  }
  return "?";
}

std::vector<Prediction> sweep(SweepVariable variable, std::span<const double> values,
                              const DeviceParams& p, const BudgetSettings& s, unsigned threads) {
  if (values.empty()) fail(ErrorKind::argument, "sweep: empty grid");
  check(s);
  const T1Model model = resolved_t1_model(p, s);
  std::vector<Prediction> rows(values.size());
  detail::parallel_for(values.size(), threads, [&](std::size_t k) {
    const double v = values[k];
    switch (variable) {
      case SweepVariable::rep_rate: {
        if (v < 0.0) fail(ErrorKind::argument, "sweep: repetition rate must be >= 0");
        rows[k] = predict_at_power(p, s, model, s.pulse_power * s.pulse_duration * v);
        rows[k].rep_rate = v;
        break;
      }
      case SweepVariable::power:
        rows[k] = predict_at_power(p, s, model, v);
        if (s.pulse_power > 0.0 && s.pulse_duration > 0.0)
          rows[k].rep_rate = v / (s.pulse_power * s.pulse_duration);
        break;
      case SweepVariable::temperature:
        rows[k] = predict_at_temperature(p, s, model, v);
        break;
      case SweepVariable::cooperativity: {
        BudgetSettings sc = s;
        sc.cooperativity = v;
        rows[k] = predict_at_power(p, sc, model, 0.0);
        break;
      }
    }
  });
  return rows;
}

}  // namespace optoreadout::budget
