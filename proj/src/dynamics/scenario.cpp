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

#include <algorithm>
#include <cmath>
#include <string>

#include "optoreadout/dynamics.hpp"
#include "optoreadout/error.hpp"

namespace optoreadout::dynamics {

ScenarioSettings ScenarioSettings::defaults() {
  ScenarioSettings s;
  s.readout_mw.shape = PulseShape::flat_top_gaussian;
  s.readout_mw.domain = PulseDomain::microwave;
  s.readout_mw.amplitude = 1.0;
  s.readout_mw.start = 0.1e-6;
  s.readout_mw.duration = 2.0e-6;
  s.readout_mw.rise = 20e-9;

  s.readout_opt = s.readout_mw;
  s.readout_opt.domain = PulseDomain::optical;

  s.pump.shape = PulseShape::flat_top_cosine;
  s.pump.domain = PulseDomain::optical;
  s.pump.amplitude = 1.0;
  s.pump.start = 0.1e-6;
  s.pump.duration = 2.0e-6;
  s.pump.rise = 100e-9;
  return s;
}

namespace {

Topology topology_for(Scheme scheme) {
  return scheme == Scheme::opt_opt ? Topology::bidirectional : Topology::cascade;
}

bool pump_used(Scheme scheme, const ScenarioSettings& s) {
  return scheme != Scheme::mw_mw || s.pump_in_mw_mw;
}

// Steady-state coupling reached on the pump plateau.
cdouble plateau_coupling(const DeviceParams& p, const PulseEnvelope& pump) {
  const double kin = std::sqrt(p.eta_p * p.kappa_p);
  return p.g0 * kin * pump.amplitude / cdouble{0.5 * p.kappa_p, -p.delta_p};
}

}  // namespace

ScenarioResult readout_scenario(Scheme scheme, const DeviceParams& p, QubitState state,
                                const PulseEnvelope& readout,
                                const std::optional<PulseEnvelope>& pump,
                                const ScenarioSettings& settings) {
  p.validate();
  readout.validate();
  const PulseDomain wanted = scheme == Scheme::opt_opt ? PulseDomain::optical : PulseDomain::microwave;
  if (readout.domain != wanted)
    fail(ErrorKind::argument, std::string("readout pulse domain does not match scheme ") +
                                  std::string(scheme_name(scheme)) +
                                  (wanted == PulseDomain::optical ? " (needs an optical signal)"
                                                                  : " (needs a microwave signal)"));
  if (!(settings.t_end > 0.0) || !(settings.output_dt > 0.0))
    fail(ErrorKind::argument, "scenario: t_end and output_dt must be positive");

  std::optional<PulseEnvelope> pump_pulse;
  if (pump && pump_used(scheme, settings)) {
    pump->validate();
    if (pump->domain != PulseDomain::optical)
      fail(ErrorKind::argument, "scenario: pump pulse must be optical");
    pump_pulse = *pump;
    if (settings.target_cooperativity > 0.0) {
      const double g = coupling_for_cooperativity(p, settings.target_cooperativity);
      pump_pulse->amplitude = pump_input_for_coupling(p, g);
    }
  }
  const cdouble g_plateau = pump_pulse ? plateau_coupling(p, *pump_pulse) : cdouble{};

  LinearSystem sys;
  sys.params = p;
  sys.topology = topology_for(scheme);
  sys.qubit = state;
  sys.stokes = settings.stokes;
  sys.coupling = CouplingSchedule::constant(g_plateau);

  // Readout drive, calibrated on the |g> branch at the pump plateau.
  PulseEnvelope drive = readout;
  const int port = scheme == Scheme::opt_opt ? port_o : port_c;
  const double n_sqrt = scheme == Scheme::opt_opt ? settings.n_meas_sqrt_opt : settings.n_meas_sqrt_mw;
  if (n_sqrt > 0.0) {
    LinearSystem cal = sys;
    cal.qubit = QubitState::ground;
    PortVector u = PortVector::Zero();
    const double mag = std::abs(readout.amplitude);
    u[port] = mag > 0.0 ? readout.amplitude / mag : cdouble{1.0};
    const double unit = std::abs(steady_state(cal, g_plateau, u).modes.a_c);
    if (unit > 1e-300) drive.amplitude = u[port] * (n_sqrt / unit);
  }
  if (scheme == Scheme::opt_opt) sys.drive_o = drive; else sys.drive_c = drive;

  // Internal step: an integer fraction of the output spacing meeting the
  // stability bound with margin.
  const double rate = sys.max_rate() * 1.05;
  const auto sub = static_cast<std::size_t>(
      std::max(1.0, std::ceil(settings.output_dt * 20.0 * rate / 0.95)));
  const double dt = settings.output_dt / static_cast<double>(sub);
  const auto n = static_cast<std::size_t>(std::llround(settings.t_end / dt));

  if (pump_pulse) {
    std::vector<double> times(2 * n + 3);
    const double h = 0.5 * dt;
    for (std::size_t k = 0; k < times.size(); ++k) times[k] = static_cast<double>(k) * h;
    PumpTrajectory pt = pump_trajectory(*pump_pulse, p, times);
    sys.coupling = CouplingSchedule::sampled(0.0, h, std::move(pt.g));
    sys.pump_amplitude = CouplingSchedule::sampled(0.0, h, std::move(pt.a_p_bar));
  } else {
    sys.coupling = CouplingSchedule::constant(0.0);
  }

  ScenarioResult r;
  r.scheme = scheme;
  r.state = state;
  r.drive_scale = std::abs(drive.amplitude);
  r.plateau_coupling = g_plateau;
  r.trajectory = integrate(sys, dt, settings.t_end, sub);
  r.integration_dt = r.trajectory.dt;
  r.time = r.trajectory.time;
  const auto& out = scheme == Scheme::mw_mw ? r.trajectory.a_e_out : r.trajectory.a_o_out;
  r.envelope = out;
  r.power.reserve(out.size());
  for (const auto& z : out) r.power.push_back(std::norm(z));

  PortVector u = PortVector::Zero();
  u[port] = drive.amplitude;
  const SteadyState ss = steady_state(sys, g_plateau, u);
  r.steady_envelope = scheme == Scheme::mw_mw ? ss.a_e_out : ss.a_o_out;
  r.steady_power = std::norm(r.steady_envelope);
  if (scheme == Scheme::opt_opt) r.background_power = std::norm(steady_state(sys, 0.0, u).a_o_out);
  return r;
}

ScenarioResult readout_scenario(Scheme scheme, const DeviceParams& p, QubitState state,
                                const ScenarioSettings& settings) {
  const PulseEnvelope& readout = scheme == Scheme::opt_opt ? settings.readout_opt : settings.readout_mw;
  return readout_scenario(scheme, p, state, readout, settings.pump, settings);
}

}  // namespace optoreadout::dynamics
