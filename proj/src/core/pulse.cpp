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

#include "optoreadout/pulse.hpp"

#include <cmath>
#include <string>

#include "optoreadout/constants.hpp"
#include "optoreadout/error.hpp"

namespace optoreadout {

PulseShape parse_pulse_shape(std::string_view text) {
  if (text == "rectangular") return PulseShape::rectangular;
  if (text == "flat-top-gaussian") return PulseShape::flat_top_gaussian;
  if (text == "flat-top-cosine") return PulseShape::flat_top_cosine;
  if (text == "tabulated") return PulseShape::tabulated;
  fail(ErrorKind::config, "unknown pulse shape '" + std::string(text) + "'");
}

std::string_view pulse_shape_name(PulseShape shape) {
  switch (shape) {
    case PulseShape::rectangular: return "rectangular";
    case PulseShape::flat_top_gaussian: return "flat-top-gaussian";
    case PulseShape::flat_top_cosine: return "flat-top-cosine";
    case PulseShape::tabulated: return "tabulated";
  }
  return "unknown";
}

void PulseEnvelope::validate() const {
  if (!std::isfinite(amplitude.real()) || !std::isfinite(amplitude.imag()))
    fail(ErrorKind::argument, "pulse amplitude must be finite");
  if (shape == PulseShape::tabulated) {
    if (table.size() < 2) fail(ErrorKind::argument, "tabulated pulse needs at least two samples");
    if (!(table_dt > 0.0)) fail(ErrorKind::argument, "tabulated pulse needs a positive uniform spacing");
    return;
  }
  if (!(duration > 0.0)) fail(ErrorKind::argument, "pulse duration must be positive");
  if (!(rise >= 0.0)) fail(ErrorKind::argument, "pulse rise time must be non-negative");
  if (shape == PulseShape::flat_top_cosine && 2.0 * rise > duration)
    fail(ErrorKind::argument, "cosine ramps longer than the pulse");
}

namespace {

double shape_value(const PulseEnvelope& p, double t) {
  const double t_end = p.start + p.duration;
  switch (p.shape) {
    case PulseShape::rectangular:
      return (t >= p.start && t < t_end) ? 1.0 : 0.0;
    case PulseShape::flat_top_gaussian: {
      if (p.rise == 0.0) return (t >= p.start && t < t_end) ? 1.0 : 0.0;
      const double s = std::sqrt(2.0) * p.rise;
      return 0.5 * (std::erf((t - p.start) / s) - std::erf((t - t_end) / s));
    }
    case PulseShape::flat_top_cosine: {
      if (t < p.start || t >= t_end) return 0.0;
      if (p.rise == 0.0) return 1.0;
      if (t < p.start + p.rise)
        return 0.5 * (1.0 - std::cos(constants::pi * (t - p.start) / p.rise));
      if (t > t_end - p.rise)
        return 0.5 * (1.0 - std::cos(constants::pi * (t_end - t) / p.rise));
      return 1.0;
    }
    case PulseShape::tabulated:
      break;
  }
  return 0.0;
}

}  // namespace

cdouble PulseEnvelope::operator()(double t) const {
  cdouble value;
  if (shape == PulseShape::tabulated) {
    const double x = (t - table_t0) / table_dt;
    if (x < 0.0 || x > static_cast<double>(table.size() - 1)) return 0.0;
    const auto i = static_cast<std::size_t>(x);
    if (i + 1 >= table.size()) {
      value = table.back();
    } else {
      const double frac = x - static_cast<double>(i);
      value = table[i] * (1.0 - frac) + table[i + 1] * frac;
    }
  } else {
    value = shape_value(*this, t);
    if (value == 0.0) return 0.0;
  }
  value *= amplitude;
  if (carrier_detuning != 0.0) value *= std::polar(1.0, -carrier_detuning * t);
  return value;
}

PulseEnvelope PulseEnvelope::scaled(cdouble factor) const {
  PulseEnvelope out = *this;
  out.amplitude *= factor;
  return out;
}

}  // namespace optoreadout
