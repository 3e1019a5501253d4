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

#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <random>
#include <vector>

#include "optoreadout/constants.hpp"
#include "optoreadout/dynamics.hpp"
#include "optoreadout/error.hpp"
#include "support.hpp"

using namespace optoreadout;
using namespace optoreadout::dynamics;
using orx_test::mhz;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return static_cast<ErrorKind>(0);
}

PulseEnvelope constant_drive(cdouble amplitude, PulseDomain domain = PulseDomain::microwave,
                             double detuning = 0.0) {
  PulseEnvelope p;
  p.shape = PulseShape::rectangular;
  p.domain = domain;
  p.amplitude = amplitude;
  p.start = -1.0;  // already on at t = 0
  p.duration = 10.0;
  p.carrier_detuning = detuning;
  return p;
}

double stable_dt(const LinearSystem& sys) { return 1.0 / (20.0 * sys.max_rate()); }

StateVector to_state(const ModeVector& m) {
  StateVector x;
  x << m.a_c, m.a_e, m.a_o, std::conj(m.a_s), std::conj(m.a_tm);
  return x;
}

double slowest_decay(const DriftMatrix& a) {
  Eigen::ComplexEigenSolver<DriftMatrix> es(a);
  double worst = -1e300;
  for (int i = 0; i < kModes; ++i) worst = std::max(worst, es.eigenvalues()[i].real());
  return -2.0 * worst;
}

LinearSystem cascade_with_drives(const DeviceParams& p, QubitState s, double g) {
  LinearSystem sys;
  sys.params = p;
  sys.topology = Topology::cascade;
  sys.qubit = s;
  sys.coupling = CouplingSchedule::constant(g);
  sys.drive_c = constant_drive({1.0, 0.3});
  sys.drive_o = constant_drive({-0.2, 0.5}, PulseDomain::optical);
  return sys;
}

}  // namespace

TEST_CASE("zero input keeps the zero state") {
  LinearSystem sys;
  sys.params = orx_test::si_device();
  sys.coupling = CouplingSchedule::constant(coupling_for_cooperativity(sys.params, 0.0039));
  const Trajectory tr = integrate(sys, stable_dt(sys), 2e-7);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    CHECK(std::abs(tr.modes[k].a_c) == 0.0);
    CHECK(std::abs(tr.a_o_out[k]) == 0.0);
  }
}

TEST_CASE("critically coupled cavity absorbs a resonant drive") {
  DeviceParams p = orx_test::si_device();
  p.kappa_c_ext = 0.5 * p.kappa_c;
  LinearSystem sys;
  sys.params = p;
  sys.qubit = QubitState::excited;  // resonant branch
  PortVector u = PortVector::Zero();
  u[port_c] = 1.0;
  const SteadyState ss = steady_state(sys, 0.0, u);
  CHECK(std::abs(ss.a_c_out) < 1e-12);

  sys.drive_c = constant_drive(1.0);
  const double t_end = 20.0 * constants::pi / p.kappa_c;
  const Trajectory tr = integrate(sys, stable_dt(sys), t_end, 1000);
  CHECK(std::abs(tr.a_c_out.back()) < 1e-6);
}

TEST_CASE("integration converges to the steady-state solve") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> jitter(0.8, 1.2);
  std::uniform_real_distribution<double> coop(0.0, 0.01);
  for (int draw = 0; draw < 5; ++draw) {
    DeviceParams p = orx_test::si_device();
    p.kappa_c *= jitter(rng);
    p.kappa_c_ext = std::min(p.kappa_c_ext * jitter(rng), p.kappa_c);
    p.kappa_e *= jitter(rng);
    p.kappa_o *= jitter(rng);
    p.chi0 *= jitter(rng);
    const QubitState s = draw % 2 == 0 ? QubitState::ground : QubitState::excited;
    const LinearSystem sys = cascade_with_drives(p, s, coupling_for_cooperativity(p, coop(rng)));
    const double kappa_min = slowest_decay(state_space(sys, sys.coupling(0.0)).A);
    const Trajectory tr = integrate(sys, stable_dt(sys), 20.0 * constants::pi / kappa_min, 1);
    const SteadyState ss = steady_state(sys, sys.coupling(0.0), sys.inputs(0.0));
    const StateVector want = to_state(ss.modes);
    const StateVector got = to_state(tr.modes.back());
    CHECK((got - want).norm() / want.norm() < 1e-6);
    CHECK(std::abs(tr.a_e_out.back() - ss.a_e_out) < 1e-6 * std::abs(ss.a_e_out) + 1e-12);
  }
}

TEST_CASE("RK4 error shrinks at fourth order") {
  const DeviceParams p = orx_test::si_device();
  const LinearSystem sys = cascade_with_drives(p, QubitState::ground, coupling_for_cooperativity(p, 0.0039));
  const StateSpace ss = state_space(sys, sys.coupling(0.0));
  const StateVector x_inf = ss.A.partialPivLu().solve(-(ss.B * sys.inputs(0.0)));
  const double dt0 = stable_dt(sys);
  const double t = 400 * dt0;
  const DriftMatrix prop = (ss.A * t).exp();
  const StateVector exact = x_inf - prop * x_inf;
  std::vector<double> err;
  for (int h = 0; h < 3; ++h) {
    const double dt = dt0 / std::pow(2.0, h);
    const Trajectory tr = integrate(sys, dt, t, 1);
    err.push_back((to_state(tr.modes.back()) - exact).norm() / exact.norm());
  }
  CHECK(err[0] / err[1] >= 8.0);
  CHECK(err[1] / err[2] >= 8.0);
}

TEST_CASE("outputs are linear in the drive amplitude") {
  const DeviceParams p = orx_test::si_device();
  ScenarioSettings st = ScenarioSettings::defaults();
  st.t_end = 0.6e-6;
  st.n_meas_sqrt_mw = 0.0;
  st.n_meas_sqrt_opt = 0.0;
  PulseEnvelope a = st.readout_opt;
  const PulseEnvelope b = a.scaled({-2.5, 1.5});
  const auto ra = readout_scenario(Scheme::opt_opt, p, QubitState::ground, a, st.pump, st);
  const auto rb = readout_scenario(Scheme::opt_opt, p, QubitState::ground, b, st.pump, st);
  REQUIRE(ra.envelope.size() == rb.envelope.size());
  double worst = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < ra.envelope.size(); ++k) {
    worst = std::max(worst, std::abs(rb.envelope[k] - cdouble{-2.5, 1.5} * ra.envelope[k]));
    scale = std::max(scale, std::abs(rb.envelope[k]));
  }
  CHECK(worst <= 1e-12 * scale);
}

TEST_CASE("time-domain tone matches the frequency response, with delay") {
  DeviceParams p = orx_test::si_device();
  LinearSystem sys;
  sys.params = p;
  const double dt = stable_dt(sys);
  sys.params.tau = 200 * dt;
  CHECK(sys.delay_steps(dt) == 200);
  const double w = mhz(0.7);
  sys.drive_c = constant_drive(1.0, PulseDomain::microwave, w);
  const double t_end = 20.0 * constants::pi / p.kappa_c + sys.params.tau;
  const Trajectory tr = integrate(sys, dt, t_end, 1);
  const cdouble h = frequency_response(sys, 0.0, w)(port_e, port_c);
  const cdouble got = tr.a_e_out.back() / sys.drive_c->operator()(tr.time.back());
  CHECK(std::abs(got - h) < 1e-5 * std::abs(h));
  // Delay only shifts the phase.
  LinearSystem prompt = sys;
  prompt.params.tau = 0.0;
  const cdouble h0 = frequency_response(prompt, 0.0, w)(port_e, port_c);
  CHECK(std::abs(h - h0 * std::exp(cdouble{0.0, w * sys.params.tau})) < 1e-12);
}

TEST_CASE("reflection spectrum limits") {
  DeviceParams p = orx_test::si_device();
  const std::vector<double> at_resonance{p.omega_e};
  const auto rg = reflection_spectrum(p, QubitState::ground, at_resonance);
  const auto re = reflection_spectrum(p, QubitState::excited, at_resonance);
  CHECK(std::abs(re[0]) < std::abs(rg[0]));
  // Transceiver reflection times the cable on the detuned |g> branch.
  CHECK(std::norm(rg[0]) >= std::pow(p.eta_ec * (1.0 - 2.0 * p.eta_e()), 2) * 0.95);

  DeviceParams lossless = p;
  lossless.eta_ec = 1.0;
  const std::vector<double> far{p.omega_e + orx_test::ghz(5.0)};
  CHECK(std::abs(reflection_spectrum(lossless, QubitState::ground, far)[0]) ==
        doctest::Approx(1.0).epsilon(1e-3));

  // An uncoupled transceiver port reflects everything at every frequency.
  lossless.kappa_e_ext = 0.0;
  lossless.kappa_c_ext = 0.0;
  const std::vector<double> grid{p.omega_e - mhz(10), p.omega_e, p.omega_e + mhz(3)};
  for (cdouble s : reflection_spectrum(lossless, QubitState::excited, grid))
    CHECK(std::abs(s) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("|g> branch reflects the detuned drive") {
  const DeviceParams p = orx_test::si_device();
  LinearSystem sys;
  sys.params = p;
  sys.qubit = QubitState::ground;
  PortVector u = PortVector::Zero();
  u[port_c] = 1.0;
  const SteadyState ss = steady_state(sys, 0.0, u);
  CHECK(std::norm(ss.a_c_out) >= std::pow(1.0 - 2.0 * p.eta_c(), 2));
}

TEST_CASE("conversion bandwidth and peak efficiency") {
  const DeviceParams p = orx_test::si_device();
  const double c = 0.0039;
  const double g = coupling_for_cooperativity(p, c);
  CHECK(g / constants::two_pi == doctest::Approx(874795.8333).epsilon(1e-8));
  std::vector<double> offsets;
  for (int k = -200; k <= 200; ++k) offsets.push_back(mhz(0.25) * k);

  const ConversionTransfer off = conversion_transfer(p, g, offsets, false);
  CHECK(off.fwhm / constants::two_pi == doctest::Approx(9.597121523e6).epsilon(1e-8));
  const double closed = p.eta_e() * p.eta_o() * 4.0 * c / ((1.0 + c) * (1.0 + c));
  CHECK(off.peak_efficiency == doctest::Approx(closed).epsilon(1e-9));
  CHECK(std::abs(off.peak_offset) < mhz(1e-6));

  const ConversionTransfer on = conversion_transfer(p, g, offsets, true);
  CHECK(std::abs(on.fwhm - p.kappa_e) / constants::two_pi <= 2e6);

  // Passive without the parametric term.
  for (double gg : {0.0, g, 0.3 * p.kappa_e, p.kappa_e}) {
    const ConversionTransfer t = conversion_transfer(p, gg, offsets, false);
    for (std::size_t k = 0; k < offsets.size(); ++k)
      CHECK(std::norm(t.s_oe[k]) + std::norm(t.s_ee[k]) <= 1.0 + 1e-12);
  }

  const ConversionTransfer none = conversion_transfer(p, 0.0, offsets);
  for (cdouble s : none.s_oe) CHECK(s == cdouble{});
  CHECK(none.fwhm == 0.0);
  CHECK(kind_of([&] { conversion_transfer(p, -1.0, offsets); }) == ErrorKind::argument);
}

TEST_CASE("pump mode settles at the closed form") {
  const DeviceParams p = orx_test::si_device();
  const double g = coupling_for_cooperativity(p, 0.0039);
  const double a_in = pump_input_for_coupling(p, g);
  const PulseEnvelope pulse = constant_drive(a_in, PulseDomain::optical);
  std::vector<double> t;
  for (int k = 0; k <= 4000; ++k) t.push_back(k * 1e-10);
  const PumpTrajectory tr = pump_trajectory(pulse, p, t);
  const double want = 2.0 * std::sqrt(p.eta_p / p.kappa_p) * a_in;
  CHECK(std::abs(tr.a_p_bar.back()) == doctest::Approx(want).epsilon(1e-6));
  CHECK(std::abs(tr.g.back()) == doctest::Approx(g).epsilon(1e-6));

  const PumpTrajectory idle = pump_trajectory(constant_drive(0.0, PulseDomain::optical), p, t);
  for (cdouble a : idle.a_p_bar) CHECK(a == cdouble{});

  t[3] += 1e-12;
  CHECK(kind_of([&] { pump_trajectory(pulse, p, t); }) == ErrorKind::argument);
}

TEST_CASE("integrator rejects bad inputs") {
  LinearSystem sys;
  sys.params = orx_test::si_device();
  sys.drive_c = constant_drive(1.0);
  const double dt = stable_dt(sys);
  CHECK(kind_of([&] { integrate(sys, 2.0 * dt, 1e-7); }) == ErrorKind::argument);
  CHECK(kind_of([&] { integrate(sys, dt, -1.0); }) == ErrorKind::argument);
  CHECK(kind_of([&] { integrate(sys, dt, 1e-7, 0); }) == ErrorKind::argument);
  sys.drive_c = constant_drive(1e308);
  CHECK(kind_of([&] { integrate(sys, dt, 1e-6); }) == ErrorKind::numeric);
}

TEST_CASE("direct connection needs loop gain below one") {
  LinearSystem sys;
  sys.params = orx_test::si_device();
  sys.topology = Topology::bidirectional;
  sys.params.eta_ec = 1.0;
  sys.params.eta_ce = 1.0;
  CHECK(kind_of([&] { state_space(sys, 0.0); }) == ErrorKind::argument);
  sys.params.eta_ce = 0.9;
  CHECK_NOTHROW(state_space(sys, 0.0));
}

TEST_CASE("readout scenarios") {
  const DeviceParams p = orx_test::si_device();
  const ScenarioSettings st = ScenarioSettings::defaults();

  SUBCASE("mw-mw plateau reaches the steady value and the calibrated photon number") {
    const auto r = readout_scenario(Scheme::mw_mw, p, QubitState::ground, st);
    std::size_t k = 0;
    while (r.time[k] < 2.0e-6) ++k;
    CHECK(r.power[k] == doctest::Approx(r.steady_power).epsilon(1e-3));
    CHECK(std::abs(r.trajectory.modes[k].a_c) == doctest::Approx(st.n_meas_sqrt_mw).epsilon(1e-3));
    CHECK(r.background_power == 0.0);
  }
  SUBCASE("|e> reflects less power than |g>") {
    const auto g = readout_scenario(Scheme::mw_mw, p, QubitState::ground, st);
    const auto e = readout_scenario(Scheme::mw_mw, p, QubitState::excited, st);
    CHECK(e.steady_power < g.steady_power);
  }
  SUBCASE("mw-opt without pump gives no optical output") {
    const auto r = readout_scenario(Scheme::mw_opt, p, QubitState::ground, st.readout_mw,
                                    std::nullopt, st);
    for (double v : r.power) CHECK(v == 0.0);
  }
  SUBCASE("opt-opt separates the branches on top of the optical background") {
    const auto g = readout_scenario(Scheme::opt_opt, p, QubitState::ground, st);
    const auto e = readout_scenario(Scheme::opt_opt, p, QubitState::excited, st);
    CHECK(g.background_power > 0.0);
    CHECK(std::abs(g.steady_envelope - e.steady_envelope) > 0.0);
    // Off-resonant optical reflection: (1 - 2 eta_o)^2 of the input power.
    const double input = std::norm(g.drive_scale * st.readout_opt.amplitude);
    CHECK(g.background_power == doctest::Approx(input * std::pow(1.0 - 2.0 * p.eta_o(), 2)).epsilon(1e-9));
  }
  SUBCASE("pulse domain must match the scheme") {
    CHECK(kind_of([&] {
            readout_scenario(Scheme::mw_mw, p, QubitState::ground, st.readout_opt, std::nullopt, st);
          }) == ErrorKind::argument);
    CHECK(kind_of([&] {
            readout_scenario(Scheme::opt_opt, p, QubitState::ground, st.readout_mw, st.pump, st);
          }) == ErrorKind::argument);
  }
}

TEST_CASE("scheme names round trip") {
  for (Scheme s : {Scheme::mw_mw, Scheme::mw_opt, Scheme::opt_opt})
    CHECK(parse_scheme(scheme_name(s)) == s);
  CHECK(kind_of([] { parse_scheme("mw-xx"); }) == ErrorKind::argument);
}
