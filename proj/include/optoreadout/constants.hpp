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

#ifndef OPTOREADOUT_CONSTANTS_HPP
#define OPTOREADOUT_CONSTANTS_HPP

#include <numbers>

namespace optoreadout::constants {

// CODATA 2018 (exact SI definitions where applicable).
inline constexpr double hbar = 1.05457181765e-34;      // J s
inline constexpr double k_boltzmann = 1.380649e-23;    // J / K
inline constexpr double electron_volt = 1.602176634e-19;  // J

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace optoreadout::constants

#endif  // OPTOREADOUT_CONSTANTS_HPP
