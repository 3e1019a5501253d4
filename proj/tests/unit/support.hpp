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


#ifndef OPTOREADOUT_TESTS_SUPPORT_HPP
#define OPTOREADOUT_TESTS_SUPPORT_HPP

#include <cmath>
#include <complex>
#include <filesystem>
#include <string>

#include "optoreadout/constants.hpp"
#include "optoreadout/device.hpp"

namespace orx_test {

inline double mhz(double f) { return optoreadout::constants::two_pi * 1e6 * f; }
inline double ghz(double f) { return optoreadout::constants::two_pi * 1e9 * f; }

/// Device table used throughout the tests (same numbers as configs/si_device.yaml).
inline optoreadout::DeviceParams si_device() {
  optoreadout::DeviceParams p;
  p.omega_q = ghz(6.251);
  p.nu = mhz(201);
  p.g_qc = mhz(326);
  p.chi = mhz(6.6);
  p.chi0 = mhz(26);
  p.omega_c = ghz(8.806);
  p.kappa_c = mhz(1.4);
  p.kappa_c_ext = mhz(1.0);
  p.omega_e = ghz(8.806);
  p.kappa_e = mhz(9.69);
  p.kappa_e_ext = mhz(3.42);
  p.omega_o = ghz(193400);
  p.kappa_o = mhz(81);
  p.kappa_o_ext = mhz(44);
  p.kappa_s = p.kappa_o;
  p.kappa_tm = p.kappa_o;
  p.kappa_p = p.kappa_o;
  p.eta_p = p.eta_o();
  p.g0 = optoreadout::constants::two_pi * 30.0;
  p.eta_ec = 0.9;
  p.eta_ce = 0.9;
  p.delta_gap = 205e-6 * optoreadout::constants::electron_volt;
  p.T1_ref = 40e-6;
  p.T2_ref = 1.5e-6;
  return p;
}

inline std::string config_path() { return std::string(ORX_SOURCE_DIR) + "/configs/si_device.yaml"; }

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace orx_test

#endif  // OPTOREADOUT_TESTS_SUPPORT_HPP
