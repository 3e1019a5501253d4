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

#ifndef OPTOREADOUT_DEVICE_HPP
#define OPTOREADOUT_DEVICE_HPP

#include <string_view>

namespace optoreadout {

/// Qubit preparation label. The readout toy model maps |e> onto the bare cQED
/// cavity (no detuning) and |g> onto a cavity detuned by the Lamb shift chi0.
enum class QubitState { ground, excited };

constexpr int sigma_z(QubitState s) noexcept {
  return s == QubitState::ground ? +1 : -1;
}

constexpr char state_letter(QubitState s) noexcept {
  return s == QubitState::ground ? 'g' : 'e';
}

/// Parses "g" / "e" (also "ground" / "excited"). Throws ErrorKind::argument.
QubitState parse_qubit_state(std::string_view text);

/// Physical description of the cQED system and the electro-optic transceiver.
///
/// Every frequency, linewidth, detuning and coupling is an angular rate in
/// rad/s; times are in seconds and the superconducting gap is in joules.
/// Efficiencies are dimensionless amplitude or power ratios in [0, 1].
struct DeviceParams {
  // Transmon.
  double omega_q = 0;  // qubit transition frequency
  double nu = 0;       // anharmonicity
  double g_qc = 0;     // qubit-cavity coupling
  double chi = 0;      // dispersive shift
  double chi0 = 0;     // Lamb shift, detuning of the |g> branch

  // cQED cavity (strong port is the readout port).
  double omega_c = 0;
  double kappa_c = 0;
  double kappa_c_ext = 0;

  // Transceiver microwave mode.
  double omega_e = 0;
  double kappa_e = 0;
  double kappa_e_ext = 0;

  // Transceiver optical signal mode.
  double omega_o = 0;
  double kappa_o = 0;
  double kappa_o_ext = 0;

  // Optical Stokes mode and the TM mode it couples to.
  double kappa_s = 0;
  double delta_s = 0;
  double kappa_tm = 0;
  double delta_tm = 0;
  double J = 0;

  // Optical pump mode.
  double kappa_p = 0;
  double delta_p = 0;
  double eta_p = 0;

  double g0 = 0;  // electro-optic vacuum coupling

  // Cable link between cQED port and transceiver port (amplitude transmission).
  double eta_ec = 1;  // cQED -> transceiver
  double eta_ce = 1;  // transceiver -> cQED
  double tau = 0;     // transport delay of the cQED -> transceiver link

  double delta_gap = 0;  // superconducting gap
  double T1_ref = 0;     // reference coherence times, 0 when not given
  double T2_ref = 0;

  double eta_c() const noexcept { return kappa_c_ext / kappa_c; }
  double eta_e() const noexcept { return kappa_e_ext / kappa_e; }
  double eta_o() const noexcept { return kappa_o_ext / kappa_o; }

  /// Checks the physical invariants; throws ErrorKind::config naming the
  /// offending field.
  void validate() const;

  bool operator==(const DeviceParams&) const = default;
};

struct DerivedQuantities {
  double eta_c = 0;
  double eta_e = 0;
  double eta_o = 0;
  double microwave_reflectivity = 0;  // (1 - 2 eta_e)^2
  double cooperativity = 0;           // 4 g^2 / (kappa_e kappa_o) at the given g
};

/// Coupling efficiencies and the transceiver's resonant microwave power
/// reflectivity. `g` is the pump-enhanced electro-optic coupling used for the
/// cooperativity entry (zero when the pump is off).
DerivedQuantities derived_quantities(const DeviceParams& p, double g = 0.0);

/// Detuning of the cQED cavity from its bare frequency in the given branch.
inline double qubit_branch_detuning(const DeviceParams& p, QubitState s) noexcept {
  return 0.5 * p.chi0 * (sigma_z(s) + 1);
}

}  // namespace optoreadout

#endif  // OPTOREADOUT_DEVICE_HPP
