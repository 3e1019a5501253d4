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

namespace {

constexpr cdouble I{0.0, 1.0};
constexpr double kMaxCondition = 1e13;

StateVector solve_checked(const DriftMatrix& m, const StateVector& rhs, const char* what) {
  Eigen::JacobiSVD<DriftMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (!(smin > 0.0) || smax / smin > kMaxCondition)
    fail(ErrorKind::numeric, std::string(what) + ": singular drift matrix (condition number " +
                                 (smin > 0.0 ? std::to_string(smax / smin) : std::string("inf")) +
                                 ")");
  return svd.solve(rhs);
}

cdouble link_phase_at(const LinearSystem& sys, double omega) {
  if (sys.topology != Topology::cascade || sys.params.tau == 0.0) return 1.0;
  return std::exp(I * omega * sys.params.tau);
}

LinearSystem transceiver_system(const DeviceParams& p, bool stokes) {
  LinearSystem sys;
  sys.params = p;
  sys.topology = Topology::transceiver_only;
  sys.stokes = stokes;
  return sys;
}

}  // namespace

SteadyState steady_state(const LinearSystem& sys, cdouble g, const PortVector& inputs) {
  const StateSpace ss = state_space(sys, g);
  const StateVector x = solve_checked(ss.A, -(ss.B * inputs), "steady_state");
  const PortVector y = ss.C * x + ss.D * inputs;
  const cdouble ap = sys.params.g0 > 0.0 ? g / sys.params.g0 : cdouble{};
  return SteadyState{ModeVector::from_state(x, ap), y[port_c], y[port_e], y[port_o]};
}

FeedthroughMatrix frequency_response(const LinearSystem& sys, cdouble g, double omega) {
  const StateSpace ss = state_space(sys, g, link_phase_at(sys, omega));
  const DriftMatrix m = -ss.A - I * omega * DriftMatrix::Identity();
  Eigen::JacobiSVD<DriftMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  if (!(s(s.size() - 1) > 0.0) || s(0) / s(s.size() - 1) > kMaxCondition)
    fail(ErrorKind::numeric, "frequency_response: singular resolvent at omega = " +
                                 std::to_string(omega));
  const InputMatrix x = svd.solve(ss.B);
  return ss.C * x + ss.D;
}

std::vector<cdouble> reflection_spectrum(const DeviceParams& p, QubitState state,
                                         std::span<const double> freqs) {
  LinearSystem sys;
  sys.params = p;
  sys.topology = Topology::cascade;
  sys.qubit = state;
  std::vector<cdouble> out;
  out.reserve(freqs.size());
  for (double w : freqs) out.push_back(frequency_response(sys, 0.0, w - p.omega_e)(port_e, port_c));
  return out;
}

ConversionTransfer conversion_transfer(const DeviceParams& p, double g,
                                       std::span<const double> offsets, bool stokes) {
  if (g < 0.0) fail(ErrorKind::argument, "conversion_transfer: g must be >= 0");
  const LinearSystem sys = transceiver_system(p, stokes);
  auto power = [&](double w) { return std::norm(frequency_response(sys, g, w)(port_o, port_e)); };

  ConversionTransfer out;
  out.offsets.assign(offsets.begin(), offsets.end());
  out.s_oe.reserve(offsets.size());
  out.s_ee.reserve(offsets.size());
  std::size_t best = 0;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const FeedthroughMatrix h = frequency_response(sys, g, offsets[i]);
    out.s_oe.push_back(h(port_o, port_e));
    out.s_ee.push_back(h(port_e, port_e));
    if (std::norm(out.s_oe[i]) > std::norm(out.s_oe[best])) best = i;
  }
  if (g == 0.0 || offsets.empty()) return out;

  // Refine the maximum by golden-section search between grid neighbours.
  double lo = offsets[best > 0 ? best - 1 : best];
  double hi = offsets[best + 1 < offsets.size() ? best + 1 : best];
  if (lo > hi) std::swap(lo, hi);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  for (int it = 0; it < 200 && b - a > 1e-9 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    const double c = b - phi * (b - a);
    const double d = a + phi * (b - a);
    if (power(c) > power(d)) b = d; else a = c;
  }
  out.peak_offset = 0.5 * (a + b);
  out.peak_efficiency = power(out.peak_offset);
  if (std::norm(out.s_oe[best]) > out.peak_efficiency) {
    out.peak_offset = offsets[best];
    out.peak_efficiency = std::norm(out.s_oe[best]);
  }

  const double half = 0.5 * out.peak_efficiency;
  const double scale = std::max({p.kappa_e, p.kappa_o, 1.0});
  auto edge = [&](double direction) {
    double inner = out.peak_offset;
    double step = 1e-3 * scale;
    double outer = inner + direction * step;
    int guard = 0;
    while (power(outer) > half) {
      inner = outer;
      step *= 2.0;
      outer = inner + direction * step;
      if (++guard > 200) fail(ErrorKind::numeric, "conversion_transfer: no half-maximum edge");
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (inner + outer);
      if (power(mid) > half) inner = mid; else outer = mid;
      if (std::abs(outer - inner) < 1e-12 * scale) break;
    }
    return 0.5 * (inner + outer);
  };
  out.fwhm = edge(+1.0) - edge(-1.0);
  return out;
}

PumpTrajectory pump_trajectory(const PulseEnvelope& pulse, const DeviceParams& p,
                               std::span<const double> times) {
  PumpTrajectory out;
  if (times.empty()) return out;
  if (times[0] != 0.0) fail(ErrorKind::argument, "pump_trajectory: grid must start at t = 0");
  double h = 0.0;
  if (times.size() > 1) {
    h = times[1] - times[0];
    if (!(h > 0.0)) fail(ErrorKind::argument, "pump_trajectory: grid must be increasing");
    for (std::size_t k = 1; k < times.size(); ++k) {
      const double expected = static_cast<double>(k) * h;
      if (std::abs(times[k] - expected) > 1e-9 * h + 1e-12 * std::abs(expected))
        fail(ErrorKind::argument, "pump_trajectory: non-uniform grid at index " + std::to_string(k));
    }
  }
  const cdouble lambda = I * p.delta_p - 0.5 * p.kappa_p;
  const double kin = std::sqrt(p.eta_p * p.kappa_p);
  auto f = [&](double t, cdouble a) { return lambda * a + kin * pulse(t); };

  out.time.assign(times.begin(), times.end());
  out.a_p_bar.resize(times.size());
  out.g.resize(times.size());
  cdouble a = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (k > 0) {
      const double t = times[k - 1];
      const cdouble k1 = f(t, a);
      const cdouble k2 = f(t + 0.5 * h, a + 0.5 * h * k1);
      const cdouble k3 = f(t + 0.5 * h, a + 0.5 * h * k2);
      const cdouble k4 = f(t + h, a + h * k3);
      a += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
        fail(ErrorKind::numeric, "pump_trajectory: non-finite amplitude at index " + std::to_string(k));
    }
    out.a_p_bar[k] = a;
    out.g[k] = p.g0 * a;
  }
  return out;
}

double pump_input_for_coupling(const DeviceParams& p, double g) {
  const double detuned = std::abs(cdouble{0.5 * p.kappa_p, -p.delta_p});
  return g / p.g0 * detuned / std::sqrt(p.eta_p * p.kappa_p);
}

double coupling_for_cooperativity(const DeviceParams& p, double cooperativity) {
  if (cooperativity < 0.0) fail(ErrorKind::argument, "cooperativity must be >= 0");
  return 0.5 * std::sqrt(cooperativity * p.kappa_e * p.kappa_o);
}

}  // namespace optoreadout::dynamics
