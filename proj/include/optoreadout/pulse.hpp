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

#ifndef OPTOREADOUT_PULSE_HPP
#define OPTOREADOUT_PULSE_HPP

#include <complex>
#include <string_view>
#include <vector>

namespace optoreadout {

using cdouble = std::complex<double>;

enum class PulseShape {
  rectangular,        // hard edges
  flat_top_gaussian,  // erf edges of width `rise`, half-amplitude at start and start+duration
  flat_top_cosine,    // raised-cosine ramps of length `rise` inside [start, start+duration]
  tabulated,          // samples on a uniform grid, linearly interpolated
};

PulseShape parse_pulse_shape(std::string_view text);
std::string_view pulse_shape_name(PulseShape shape);

/// Which physical port the envelope drives.
enum class PulseDomain { microwave, optical };

/// Slowly varying complex drive envelope in sqrt(photons/s).
struct PulseEnvelope {
  PulseShape shape = PulseShape::rectangular;
  PulseDomain domain = PulseDomain::microwave;
  cdouble amplitude = 0.0;
  double start = 0.0;
  double duration = 0.0;
  double rise = 0.0;
  double carrier_detuning = 0.0;  // rad/s relative to the frame carrier

  // Tabulated shape only.
  double table_t0 = 0.0;
  double table_dt = 0.0;
  std::vector<cdouble> table;

  /// Throws ErrorKind::argument when duration <= 0, rise < 0 or the table is
  /// malformed.
  void validate() const;

  cdouble operator()(double t) const;

  /// Same pulse with amplitude multiplied by `factor`.
  PulseEnvelope scaled(cdouble factor) const;

  bool operator==(const PulseEnvelope&) const = default;
};

}  // namespace optoreadout

#endif  // OPTOREADOUT_PULSE_HPP
