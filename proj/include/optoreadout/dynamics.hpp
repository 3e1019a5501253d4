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

#ifndef OPTOREADOUT_DYNAMICS_HPP
#define OPTOREADOUT_DYNAMICS_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "optoreadout/device.hpp"
#include "optoreadout/pulse.hpp"

namespace optoreadout::dynamics {

/// Readout configurations: microwave in/out, microwave in/optical out, and the
/// all-optical loop through the transceiver.
enum class Scheme { mw_mw, mw_opt, opt_opt };

Scheme parse_scheme(std::string_view text);
std::string_view scheme_name(Scheme scheme);

/// How the cQED port and the transceiver microwave port are wired.
///  - cascade: unidirectional cQED -> transceiver (circulator in between)
///  - bidirectional: direct connection, each port feeds the other
///  - transceiver_only: the transceiver driven directly at its microwave port
enum class Topology { cascade, bidirectional, transceiver_only };

inline constexpr int kModes = 5;
inline constexpr int kPorts = 3;

// State vector layout. The Stokes and TM amplitudes enter the equations
// through their conjugates, so the integrated variables are conj(a_s) and
// conj(a_tm); this keeps the system complex-linear.
enum StateIndex : int { idx_c = 0, idx_e = 1, idx_o = 2, idx_s_conj = 3, idx_tm_conj = 4 };
// Inputs and outputs share the port order c, e, o.
enum PortIndex : int { port_c = 0, port_e = 1, port_o = 2 };

using StateVector = Eigen::Matrix<cdouble, kModes, 1>;
using DriftMatrix = Eigen::Matrix<cdouble, kModes, kModes>;
using InputMatrix = Eigen::Matrix<cdouble, kModes, kPorts>;
using OutputMatrix = Eigen::Matrix<cdouble, kPorts, kModes>;
using FeedthroughMatrix = Eigen::Matrix<cdouble, kPorts, kPorts>;
using PortVector = Eigen::Matrix<cdouble, kPorts, 1>;

/// Mean-field amplitudes at one instant.
struct ModeVector {
  cdouble a_c, a_e, a_o, a_s, a_tm;
  cdouble a_p_bar;

  static ModeVector from_state(const StateVector& x, cdouble a_p_bar = 0.0);
  bool finite() const;
};

/// Pump-enhanced electro-optic coupling g(t) = g0 * a_p_bar(t).
class CouplingSchedule {
 public:
  CouplingSchedule() = default;
  static CouplingSchedule constant(cdouble g);
  /// Samples on a uniform grid t0 + k * spacing, linearly interpolated.
  static CouplingSchedule sampled(double t0, double spacing, std::vector<cdouble> values);

  cdouble operator()(double t) const;
  bool is_constant() const noexcept { return values_.size() <= 1; }
  double max_abs() const;
  cdouble last() const { return values_.empty() ? cdouble{} : values_.back(); }

 private:
  double t0_ = 0.0;
  double spacing_ = 0.0;
  std::vector<cdouble> values_;
};

/// Drift/coupling description of one readout configuration.
///
/// The rotating frame sits at the bare transceiver microwave frequency on the
/// microwave side and at pump + omega_e on the optical side (the transceiver
/// is assumed tuned to the optical free spectral range, so the optical signal
/// mode detuning equals the pump detuning).
struct LinearSystem {
  DeviceParams params;
  Topology topology = Topology::cascade;
  QubitState qubit = QubitState::ground;
  CouplingSchedule coupling = CouplingSchedule::constant(0.0);
  bool stokes = true;  // keep the -i g* a_s^dagger parametric term

  std::optional<PulseEnvelope> drive_c;  // microwave into the cQED readout port
  std::optional<PulseEnvelope> drive_e;  // microwave straight into the transceiver
  std::optional<PulseEnvelope> drive_o;  // optical signal input

  std::optional<CouplingSchedule> pump_amplitude;  // a_p_bar(t), recorded only

  PortVector inputs(double t) const;
  /// Largest |entry| of the drift matrix over the coupling schedule.
  double max_rate() const;
  /// Cable delay in whole integration steps (cascade only).
  std::size_t delay_steps(double dt) const;
};

/// x' = A x + B u,  y = C x + D u  for a fixed coupling g. `link_phase`
/// multiplies the cQED -> transceiver link (exp(i w tau) in the frequency
/// domain, 1 in steady state).
struct StateSpace {
  DriftMatrix A;
  InputMatrix B;
  OutputMatrix C;
  FeedthroughMatrix D;
};

StateSpace state_space(const LinearSystem& sys, cdouble g, cdouble link_phase = 1.0);

/// Same system with the cascade link removed and exposed separately, so a
/// delayed link signal l(t) = a_c,out(t - tau) can be injected:
///   x' = A x + B u + b_link l,  y = C x + D u + d_link l,
///   a_c,out = c_link x + e_link u.
struct SplitStateSpace {
  StateSpace open;
  Eigen::Matrix<cdouble, kModes, 1> b_link;
  Eigen::Matrix<cdouble, kPorts, 1> d_link;
  Eigen::Matrix<cdouble, 1, kModes> c_link;
  Eigen::Matrix<cdouble, 1, kPorts> e_link;
};

SplitStateSpace split_state_space(const LinearSystem& sys, cdouble g);

struct Trajectory {
  double dt = 0.0;  // spacing of the recorded grid
  std::vector<double> time;
  std::vector<ModeVector> modes;
  std::vector<cdouble> a_c_out;
  std::vector<cdouble> a_e_out;
  std::vector<cdouble> a_o_out;

  std::size_t size() const noexcept { return time.size(); }
};

/// Classical fixed-step RK4 from the zero state over [0, t_end] with step dt,
/// recording every `record_every`-th grid point. Throws ErrorKind::argument
/// when dt exceeds 1/(20 max_rate) and ErrorKind::numeric when an amplitude
/// stops being finite.
Trajectory integrate(const LinearSystem& sys, double dt, double t_end,
                     std::size_t record_every = 1);

struct SteadyState {
  ModeVector modes;
  cdouble a_c_out, a_e_out, a_o_out;
};

/// Exact fixed point of the constant-coupling system for constant inputs.
/// Throws ErrorKind::numeric on a singular drift matrix.
SteadyState steady_state(const LinearSystem& sys, cdouble g, const PortVector& inputs);

/// Port-to-port transfer matrix at angular offset `omega` from the frame
/// carrier (fields oscillating as exp(-i omega t)).
FeedthroughMatrix frequency_response(const LinearSystem& sys, cdouble g, double omega);

/// Amplitude reflection seen at the transceiver output for a microwave probe
/// at absolute angular frequencies `freqs`, pump off.
std::vector<cdouble> reflection_spectrum(const DeviceParams& p, QubitState state,
                                         std::span<const double> freqs);

struct ConversionTransfer {
  std::vector<double> offsets;  // angular offsets from omega_e
  std::vector<cdouble> s_oe;    // microwave in -> optical out
  std::vector<cdouble> s_ee;    // microwave in -> microwave out
  double peak_efficiency = 0.0;  // |s_oe|^2 at the maximum
  double peak_offset = 0.0;
  double fwhm = 0.0;  // angular full width of |s_oe|^2, 0 when g == 0
};

/// Microwave-to-optical transfer of the bare transceiver at constant g,
/// evaluated on `offsets`; the FWHM is located by bisection on the exact
/// response, independent of the grid resolution.
ConversionTransfer conversion_transfer(const DeviceParams& p, double g,
                                       std::span<const double> offsets, bool stokes = true);

struct PumpTrajectory {
  std::vector<double> time;
  std::vector<cdouble> a_p_bar;
  std::vector<cdouble> g;  // g0 * a_p_bar
};

/// Integrates the pump mode a_p' = (i Delta_p - kappa_p/2) a_p + sqrt(eta_p kappa_p) a_p,in
/// on a uniform grid that starts at 0. Throws ErrorKind::argument for a
/// non-uniform grid.
PumpTrajectory pump_trajectory(const PulseEnvelope& pulse, const DeviceParams& p,
                               std::span<const double> times);

/// Constant pump input amplitude whose steady intracavity field yields the
/// coupling g.
double pump_input_for_coupling(const DeviceParams& p, double g);
double coupling_for_cooperativity(const DeviceParams& p, double cooperativity);

struct ScenarioSettings {
  double t_end = 3.0e-6;
  double output_dt = 2.0e-9;
  PulseEnvelope readout_mw;
  PulseEnvelope readout_opt;
  PulseEnvelope pump;
  bool pump_in_mw_mw = false;
  double n_meas_sqrt_mw = 122.0;   // 0 keeps the configured drive amplitude
  double n_meas_sqrt_opt = 116.0;
  double target_cooperativity = 0.0039;  // 0 keeps the configured pump amplitude
  bool stokes = true;
  double integration_start = 0.2e-6;
  double integration_time = 1.8e-6;

  static ScenarioSettings defaults();
  bool operator==(const ScenarioSettings&) const = default;
};

struct ScenarioResult {
  Scheme scheme = Scheme::mw_mw;
  QubitState state = QubitState::ground;
  std::vector<double> time;
  std::vector<cdouble> envelope;  // detected output field
  std::vector<double> power;      // |envelope|^2
  cdouble steady_envelope;        // constant-drive fixed point at the pump plateau
  double steady_power = 0.0;
  double background_power = 0.0;  // optical reflection with the pump off (opt-opt)
  double drive_scale = 0.0;       // readout amplitude after n_meas calibration
  cdouble plateau_coupling;
  double integration_dt = 0.0;
  Trajectory trajectory;
};

/// Runs one readout configuration for one qubit branch. The readout pulse
/// domain must match the scheme (microwave for mw-*, optical for opt-opt).
ScenarioResult readout_scenario(Scheme scheme, const DeviceParams& p, QubitState state,
                                const PulseEnvelope& readout,
                                const std::optional<PulseEnvelope>& pump,
                                const ScenarioSettings& settings);

/// Convenience overload drawing pulses from the settings.
ScenarioResult readout_scenario(Scheme scheme, const DeviceParams& p, QubitState state,
                                const ScenarioSettings& settings);

}  // namespace optoreadout::dynamics

#endif  // OPTOREADOUT_DYNAMICS_HPP
