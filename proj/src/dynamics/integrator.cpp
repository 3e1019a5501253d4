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

#include <cmath>
#include <string>
#include <vector>

#include "optoreadout/dynamics.hpp"
#include "optoreadout/error.hpp"

namespace optoreadout::dynamics {

namespace {

// A(g) is affine in (Re g, Im g); the three matrices are built once.
struct AffineDrift {
  SplitStateSpace base;
  DriftMatrix d_re;
  DriftMatrix d_im;

  explicit AffineDrift(const LinearSystem& sys)
      : base(split_state_space(sys, 0.0)),
        d_re(split_state_space(sys, 1.0).open.A - base.open.A),
        d_im(split_state_space(sys, cdouble{0.0, 1.0}).open.A - base.open.A) {}

  DriftMatrix at(cdouble g) const {
    return base.open.A + g.real() * d_re + g.imag() * d_im;
  }
};

bool finite(const StateVector& x) {
  for (int i = 0; i < kModes; ++i)
    if (!std::isfinite(x[i].real()) || !std::isfinite(x[i].imag())) return false;
  return true;
}

}  // namespace

Trajectory integrate(const LinearSystem& sys, double dt, double t_end, std::size_t record_every) {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorKind::argument, "integrate: dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end))
    fail(ErrorKind::argument, "integrate: t_end must be positive");
  if (record_every == 0) fail(ErrorKind::argument, "integrate: record_every must be >= 1");
  const double rate = sys.max_rate();
  if (dt * 20.0 * rate > 1.0 + 1e-12)
    fail(ErrorKind::argument, "integrate: dt = " + std::to_string(dt) +
                                  " s exceeds 1/(20 max rate) = " + std::to_string(1.0 / (20.0 * rate)) +
                                  " s");

  const auto n = static_cast<std::size_t>(std::llround(t_end / dt));
  if (n == 0) fail(ErrorKind::argument, "integrate: t_end shorter than one step");

  const AffineDrift drift(sys);
  const SplitStateSpace& split = drift.base;
  const std::size_t m = sys.delay_steps(dt);
  const bool delayed = m > 0;
  // Without delay the link is folded into the closed system.
  StateSpace closed = state_space(sys, 0.0);
  const DriftMatrix link_a = closed.A - split.open.A;

  const InputMatrix& B = delayed ? split.open.B : closed.B;
  const OutputMatrix& C = delayed ? split.open.C : closed.C;
  const FeedthroughMatrix& D = delayed ? split.open.D : closed.D;
  const cdouble kc_out = split.c_link(idx_c);

  auto drift_at = [&](double t) {
    DriftMatrix a = drift.at(sys.coupling(t));
    if (!delayed) a += link_a;
    return a;
  };

  // History of a_c and its derivative on the step grid for the delayed link.
  std::vector<cdouble> hist_ac, hist_dac;
  if (delayed) {
    hist_ac.reserve(n + 1);
    hist_dac.reserve(n + 1);
  }
  auto link_at = [&](double t_delayed, std::ptrdiff_t j, bool midpoint) -> cdouble {
    if (j < 0) return 0.0;
    const auto uj = static_cast<std::size_t>(j);
    cdouble ac;
    if (!midpoint) {
      ac = hist_ac[uj];
    } else {
      // Cubic Hermite midpoint between grid points j and j+1.
      ac = 0.5 * (hist_ac[uj] + hist_ac[uj + 1]) + dt / 8.0 * (hist_dac[uj] - hist_dac[uj + 1]);
    }
    const cdouble uc = sys.drive_c ? (*sys.drive_c)(t_delayed) : cdouble{};
    return split.e_link(port_c) * uc + kc_out * ac;
  };

  Trajectory traj;
  traj.dt = dt * static_cast<double>(record_every);
  const std::size_t n_rec = n / record_every + 1;
  traj.time.reserve(n_rec);
  traj.modes.reserve(n_rec);
  traj.a_c_out.reserve(n_rec);
  traj.a_e_out.reserve(n_rec);
  traj.a_o_out.reserve(n_rec);

  StateVector x = StateVector::Zero();
  auto record = [&](std::size_t k, const StateVector& state) {
    const double t = static_cast<double>(k) * dt;
    const PortVector u = sys.inputs(t);
    PortVector y = C * state + D * u;
    if (delayed) {
      const auto j = static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(m);
      y += split.d_link * link_at(t - sys.params.tau, j, false);
    }
    const cdouble ap = sys.pump_amplitude ? (*sys.pump_amplitude)(t) : cdouble{};
    traj.time.push_back(t);
    traj.modes.push_back(ModeVector::from_state(state, ap));
    traj.a_c_out.push_back(y[port_c]);
    traj.a_e_out.push_back(y[port_e]);
    traj.a_o_out.push_back(y[port_o]);
  };

  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double th = t + 0.5 * dt;
    const double t1 = t + dt;
    const DriftMatrix a0 = drift_at(t);
    const DriftMatrix ah = drift_at(th);
    const DriftMatrix a1 = drift_at(t1);
    StateVector f0 = B * sys.inputs(t);
    StateVector fh = B * sys.inputs(th);
    StateVector f1 = B * sys.inputs(t1);

    const StateVector k1_free = a0 * x + f0;
    if (delayed) {
      hist_ac.push_back(x[idx_c]);
      hist_dac.push_back(k1_free[idx_c]);
      const auto j = static_cast<std::ptrdiff_t>(k) - static_cast<std::ptrdiff_t>(m);
      const double tau = sys.params.tau;
      f0 += split.b_link * link_at(t - tau, j, false);
      fh += split.b_link * link_at(th - tau, j, true);
      f1 += split.b_link * link_at(t1 - tau, j + 1, false);
    }

    if (k % record_every == 0) record(k, x);

    const StateVector k1 = delayed ? StateVector(a0 * x + f0) : k1_free;
    const StateVector k2 = ah * (x + 0.5 * dt * k1) + fh;
    const StateVector k3 = ah * (x + 0.5 * dt * k2) + fh;
    const StateVector k4 = a1 * (x + dt * k3) + f1;
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!finite(x))
      fail(ErrorKind::numeric, "integrate: non-finite amplitude at step " + std::to_string(k + 1) +
                                   " (t = " + std::to_string(t1) + " s)");
  }
  if (n % record_every == 0) record(n, x);
  return traj;
}

}  // namespace optoreadout::dynamics
