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
}

Scheme parse_scheme(std::string_view text) {
  if (text == "mw-mw") return Scheme::mw_mw;
  if (text == "mw-opt") return Scheme::mw_opt;
  if (text == "opt-opt") return Scheme::opt_opt;
  fail(ErrorKind::argument,
       "unknown scheme '" + std::string(text) + "' (expected mw-mw, mw-opt or opt-opt)");
}

std::string_view scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::mw_mw: return "mw-mw";
    case Scheme::mw_opt: return "mw-opt";
    case Scheme::opt_opt: return "opt-opt";
  }
  return "unknown";
}

ModeVector ModeVector::from_state(const StateVector& x, cdouble a_p_bar) {
  return ModeVector{x[idx_c],
                    x[idx_e],
                    x[idx_o],
                    std::conj(x[idx_s_conj]),
                    std::conj(x[idx_tm_conj]),
                    a_p_bar};
}

bool ModeVector::finite() const {
  auto ok = [](cdouble z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
  return ok(a_c) && ok(a_e) && ok(a_o) && ok(a_s) && ok(a_tm) && ok(a_p_bar);
}

CouplingSchedule CouplingSchedule::constant(cdouble g) {
  CouplingSchedule s;
  s.values_ = {g};
  return s;
}

CouplingSchedule CouplingSchedule::sampled(double t0, double spacing, std::vector<cdouble> values) {
  if (values.empty()) fail(ErrorKind::argument, "empty coupling schedule");
  if (values.size() > 1 && !(spacing > 0.0))
    fail(ErrorKind::argument, "coupling schedule spacing must be positive");
  CouplingSchedule s;
  s.t0_ = t0;
  s.spacing_ = spacing;
  s.values_ = std::move(values);
  return s;
}

cdouble CouplingSchedule::operator()(double t) const {
  if (values_.empty()) return 0.0;
  if (values_.size() == 1) return values_.front();
  const double x = (t - t0_) / spacing_;
  if (x <= 0.0) return values_.front();
  const double last = static_cast<double>(values_.size() - 1);
  if (x >= last) return values_.back();
  // Grid-aligned lookups (the integrator's stage times) hit samples exactly.
  const double nearest = std::round(x);
  if (std::abs(x - nearest) < 1e-9) return values_[static_cast<std::size_t>(nearest)];
  const auto i = static_cast<std::size_t>(x);
  const double frac = x - static_cast<double>(i);
  return values_[i] * (1.0 - frac) + values_[i + 1] * frac;
}

double CouplingSchedule::max_abs() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

PortVector LinearSystem::inputs(double t) const {
  PortVector u = PortVector::Zero();
  if (drive_c) u[port_c] = (*drive_c)(t);
  if (drive_e) u[port_e] = (*drive_e)(t);
  if (drive_o) u[port_o] = (*drive_o)(t);
  return u;
}

double LinearSystem::max_rate() const {
  const StateSpace ss = state_space(*this, coupling.max_abs());
  double m = 0.0;
  for (int i = 0; i < kModes; ++i)
    for (int j = 0; j < kModes; ++j) m = std::max(m, std::abs(ss.A(i, j)));
  return m;
}

std::size_t LinearSystem::delay_steps(double dt) const {
  if (topology != Topology::cascade || params.tau <= 0.0) return 0;
  return static_cast<std::size_t>(std::llround(params.tau / dt));
}

SplitStateSpace split_state_space(const LinearSystem& sys, cdouble g) {
  const DeviceParams& p = sys.params;
  const double kc = std::sqrt(p.kappa_c_ext);  // sqrt(eta_c kappa_c)
  const double ke = std::sqrt(p.kappa_e_ext);
  const double ko = std::sqrt(p.kappa_o_ext);
  const double delta_c = (p.omega_e - p.omega_c) - qubit_branch_detuning(p, sys.qubit);
  const double delta_o = p.delta_p;
  const cdouble gs = sys.stokes ? std::conj(g) : 0.0;
  const cdouble gs_back = sys.stokes ? g : 0.0;

  SplitStateSpace s;
  StateSpace& ss = s.open;
  ss.A.setZero();
  ss.B.setZero();
  ss.C.setZero();
  ss.D.setZero();
  s.b_link.setZero();
  s.d_link.setZero();
  s.c_link.setZero();
  s.e_link.setZero();

  ss.A(idx_c, idx_c) = I * delta_c - 0.5 * p.kappa_c;
  ss.A(idx_e, idx_e) = -0.5 * p.kappa_e;
  ss.A(idx_e, idx_o) = -I * g;
  ss.A(idx_e, idx_s_conj) = -I * gs;
  ss.A(idx_o, idx_o) = I * delta_o - 0.5 * p.kappa_o;
  ss.A(idx_o, idx_e) = -I * g;
  ss.A(idx_s_conj, idx_s_conj) = -I * p.delta_s - 0.5 * p.kappa_s;
  ss.A(idx_s_conj, idx_e) = I * gs_back;
  ss.A(idx_s_conj, idx_tm_conj) = I * p.J;
  ss.A(idx_tm_conj, idx_tm_conj) = -I * p.delta_tm - 0.5 * p.kappa_tm;
  ss.A(idx_tm_conj, idx_s_conj) = I * p.J;

  ss.B(idx_o, port_o) = ko;
  ss.C(port_o, idx_o) = -ko;
  ss.D(port_o, port_o) = 1.0;

  switch (sys.topology) {
    case Topology::cascade:
      // a_c,in = u_c;  a_e,in = u_e + eta_ec * l,  l = a_c,out (delayed)
      ss.B(idx_c, port_c) = kc;
      ss.C(port_c, idx_c) = -kc;
      ss.D(port_c, port_c) = 1.0;
      ss.B(idx_e, port_e) = ke;
      ss.C(port_e, idx_e) = -ke;
      ss.D(port_e, port_e) = 1.0;
      s.b_link(idx_e) = ke * p.eta_ec;
      s.d_link(port_e) = p.eta_ec;
      s.c_link(idx_c) = -kc;
      s.e_link(port_c) = 1.0;
      break;
    case Topology::transceiver_only:
      ss.B(idx_e, port_e) = ke;
      ss.C(port_e, idx_e) = -ke;
      ss.D(port_e, port_e) = 1.0;
      ss.C(port_c, idx_c) = -kc;
      break;
    case Topology::bidirectional: {
      // a_c,in = eta_ce a_e,out and a_e,in = eta_ec a_c,out form an
      // instantaneous loop of gain L; resolved algebraically.
      const double loop = p.eta_ec * p.eta_ce;
      if (!(loop < 1.0))
        fail(ErrorKind::argument,
             "bidirectional link needs eta_ec * eta_ce < 1 (lossless loop is ill-posed)");
      const double inv = 1.0 / (1.0 - loop);
      // a_c,in = -(L kc a_c + eta_ce ke a_e) / (1 - L)
      const cdouble cin_c = -loop * kc * inv;
      const cdouble cin_e = -p.eta_ce * ke * inv;
      // a_e,in = -eta_ec (kc a_c + eta_ce ke a_e) / (1 - L)
      const cdouble ein_c = -p.eta_ec * kc * inv;
      const cdouble ein_e = -p.eta_ec * p.eta_ce * ke * inv;
      ss.A(idx_c, idx_c) += kc * cin_c;
      ss.A(idx_c, idx_e) += kc * cin_e;
      ss.A(idx_e, idx_c) += ke * ein_c;
      ss.A(idx_e, idx_e) += ke * ein_e;
      ss.C(port_c, idx_c) = cin_c - kc;
      ss.C(port_c, idx_e) = cin_e;
      ss.C(port_e, idx_c) = ein_c;
      ss.C(port_e, idx_e) = ein_e - ke;
      break;
    }
  }
  return s;
}

StateSpace state_space(const LinearSystem& sys, cdouble g, cdouble link_phase) {
  const SplitStateSpace s = split_state_space(sys, g);
  StateSpace ss = s.open;
  if (sys.topology == Topology::cascade) {
    const Eigen::Matrix<cdouble, kModes, 1> b = link_phase * s.b_link;
    const Eigen::Matrix<cdouble, kPorts, 1> d = link_phase * s.d_link;
    ss.A += b * s.c_link;
    ss.B += b * s.e_link;
    ss.C += d * s.c_link;
    ss.D += d * s.e_link;
  }
  return ss;
}

}  // namespace optoreadout::dynamics
