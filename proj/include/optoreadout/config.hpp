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

#ifndef OPTOREADOUT_CONFIG_HPP
#define OPTOREADOUT_CONFIG_HPP

#include <string>
#include <string_view>

#include "optoreadout/budget.hpp"
#include "optoreadout/detection.hpp"
#include "optoreadout/device.hpp"
#include "optoreadout/dynamics.hpp"

namespace optoreadout {

// Config files are YAML with the tables qubit, cqed_cavity, transceiver,
// link, scenario, detection and budget. Every dimensional key carries its
// unit as a suffix, e.g. kappa_e_MHz or tau_ns. Frequency keys given in
// GHz/MHz/kHz/Hz are cyclic and converted with 2 pi; rad_per_s is taken
// as is.
//
//   frequency    GHz MHz kHz Hz rad_per_s
//   time         s ms us ns
//   energy       J eV meV ueV
//   power        W mW uW
//   temperature  K mK
//   rate         per_s

struct RunConfig {
  DeviceParams device;
  dynamics::ScenarioSettings scenario = dynamics::ScenarioSettings::defaults();
  detection::DetectionSettings detection;
  budget::BudgetSettings budget;

  bool operator==(const RunConfig&) const = default;
};

/// Parses and validates. `origin` names the source in error messages.
/// Throws ErrorKind::config naming the offending key.
RunConfig parse_run_config(std::string_view text, std::string_view origin = "<string>");

/// Reads a file; ErrorKind::io when it cannot be read.
RunConfig load_run_config(const std::string& path);
DeviceParams load_config(const std::string& path);

/// Canonical text in SI units with round-trip exact numbers.
std::string serialize(const RunConfig& config);

std::string sha256_hex(std::string_view bytes);

/// SHA-256 (hex) of the canonical serialization.
std::string config_hash(const RunConfig& config);

}  // namespace optoreadout

#endif  // OPTOREADOUT_CONFIG_HPP
