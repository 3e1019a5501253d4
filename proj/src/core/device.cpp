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

#include "optoreadout/device.hpp"

#include <cmath>
#include <string>

#include "optoreadout/error.hpp"

namespace optoreadout {

QubitState parse_qubit_state(std::string_view text) {
  if (text == "g" || text == "ground") return QubitState::ground;
  if (text == "e" || text == "excited") return QubitState::excited;
  fail(ErrorKind::argument, "unknown qubit state '" + std::string(text) + "' (expected g or e)");
}

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) fail(ErrorKind::config, std::string(field) + ": " + what);
}

void require_finite(double v, const char* field) {
  require(std::isfinite(v), field, "must be finite");
}

void require_positive(double v, const char* field) {
  require_finite(v, field);
  require(v > 0.0, field, "must be strictly positive");
}

void require_unit_interval(double v, const char* field) {
  require_finite(v, field);
  require(v >= 0.0 && v <= 1.0, field, "must lie in [0, 1]");
}

void require_external(double ext, double total, const char* field) {
  require_positive(ext, field);
  require(ext <= total, field, "external rate exceeds total linewidth");
}

}  // namespace

void DeviceParams::validate() const {
  require_positive(omega_q, "omega_q");
  require_positive(nu, "nu");
  require_positive(g_qc, "g_qc");
  require_positive(chi, "chi");
  require_positive(chi0, "chi0");

  require_positive(omega_c, "omega_c");
  require_positive(kappa_c, "kappa_c");
  require_external(kappa_c_ext, kappa_c, "kappa_c_ext");

  require_positive(omega_e, "omega_e");
  require_positive(kappa_e, "kappa_e");
  require_external(kappa_e_ext, kappa_e, "kappa_e_ext");

  require_positive(omega_o, "omega_o");
  require_positive(kappa_o, "kappa_o");
  require_external(kappa_o_ext, kappa_o, "kappa_o_ext");

  require_positive(kappa_s, "kappa_s");
  require_finite(delta_s, "delta_s");
  require_positive(kappa_tm, "kappa_tm");
  require_finite(delta_tm, "delta_tm");
  require_finite(J, "J");
  require(J >= 0.0, "J", "must be non-negative");

  require_positive(kappa_p, "kappa_p");
  require_finite(delta_p, "delta_p");
  require_unit_interval(eta_p, "eta_p");

  require_positive(g0, "g0");
  require_unit_interval(eta_ec, "eta_ec");
  require_unit_interval(eta_ce, "eta_ce");
  require_finite(tau, "tau");
  require(tau >= 0.0, "tau", "must be non-negative");

  require_positive(delta_gap, "delta_gap");
  require_finite(T1_ref, "T1_ref");
  require(T1_ref >= 0.0, "T1_ref", "must be non-negative");
  require_finite(T2_ref, "T2_ref");
  require(T2_ref >= 0.0, "T2_ref", "must be non-negative");
}

DerivedQuantities derived_quantities(const DeviceParams& p, double g) {
  DerivedQuantities d;
  d.eta_c = p.eta_c();
  d.eta_e = p.eta_e();
  d.eta_o = p.eta_o();
  const double r = 1.0 - 2.0 * d.eta_e;
  d.microwave_reflectivity = r * r;
  d.cooperativity = 4.0 * g * g / (p.kappa_e * p.kappa_o);
  return d;
}

}  // namespace optoreadout
