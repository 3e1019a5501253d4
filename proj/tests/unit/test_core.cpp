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

#include <cmath>
#include <fstream>
#include <string>

#include "optoreadout/config.hpp"
#include "optoreadout/device.hpp"
#include "optoreadout/error.hpp"
#include "optoreadout/pulse.hpp"
#include "support.hpp"

using namespace optoreadout;
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

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("coupling efficiencies and reflectivity") {
  const DeviceParams p = orx_test::si_device();
  const DerivedQuantities d = derived_quantities(p);
  CHECK(d.eta_e == doctest::Approx(0.353).epsilon(0.001 / 0.353));
  CHECK(d.eta_e == p.kappa_e_ext / p.kappa_e);
  CHECK(d.eta_c == p.kappa_c_ext / p.kappa_c);
  CHECK(d.eta_o == p.kappa_o_ext / p.kappa_o);
  // (1 - 2 * 3.42 / 9.69)^2
  CHECK(d.microwave_reflectivity == doctest::Approx(0.086505190311418685).epsilon(1e-14));
  CHECK(d.cooperativity == 0.0);
}

TEST_CASE("reflectivity limits and symmetry") {
  DeviceParams p = orx_test::si_device();
  p.kappa_e_ext = 0.5 * p.kappa_e;
  CHECK(derived_quantities(p).microwave_reflectivity == doctest::Approx(0.0).epsilon(1e-15));
  p.kappa_e_ext = p.kappa_e;
  CHECK(derived_quantities(p).eta_e == 1.0);
  CHECK(derived_quantities(p).microwave_reflectivity == doctest::Approx(1.0));
  for (double eta : {0.05, 0.2, 0.353, 0.47}) {
    p.kappa_e_ext = eta * p.kappa_e;
    const double a = derived_quantities(p).microwave_reflectivity;
    p.kappa_e_ext = (1.0 - eta) * p.kappa_e;
    CHECK(derived_quantities(p).microwave_reflectivity == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("device invariants name the offending field") {
  DeviceParams p = orx_test::si_device();
  CHECK_NOTHROW(p.validate());
  p.kappa_o_ext = 1.01 * p.kappa_o;
  try {
    p.validate();
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
    CHECK(std::string(e.what()).find("kappa_o_ext") != std::string::npos);
  }
  p = orx_test::si_device();
  p.kappa_c = -1.0;
  CHECK(kind_of([&] { p.validate(); }) == ErrorKind::config);
  p = orx_test::si_device();
  p.eta_ec = 1.2;
  CHECK(kind_of([&] { p.validate(); }) == ErrorKind::config);
}

TEST_CASE("qubit state convention") {
  const DeviceParams p = orx_test::si_device();
  CHECK(sigma_z(QubitState::ground) == 1);
  CHECK(sigma_z(QubitState::excited) == -1);
  CHECK(qubit_branch_detuning(p, QubitState::excited) == 0.0);
  CHECK(qubit_branch_detuning(p, QubitState::ground) == p.chi0);
  CHECK(parse_qubit_state("g") == QubitState::ground);
  CHECK(parse_qubit_state("excited") == QubitState::excited);
  CHECK(kind_of([] { parse_qubit_state("f"); }) == ErrorKind::argument);
}

TEST_CASE("pulse shapes") {
  PulseEnvelope r;
  r.shape = PulseShape::rectangular;
  r.amplitude = {2.0, -1.0};
  r.start = 1e-6;
  r.duration = 2e-6;
  CHECK(r(0.5e-6) == cdouble{});
  CHECK(r(1.5e-6) == cdouble(2.0, -1.0));
  CHECK(r(3.5e-6) == cdouble{});

  PulseEnvelope g = r;
  g.shape = PulseShape::flat_top_gaussian;
  g.amplitude = 1.0;
  g.rise = 20e-9;
  CHECK(g(g.start).real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g(g.start + g.duration).real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g(2e-6).real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(g(0.0)) < 1e-12);

  PulseEnvelope c = g;
  c.shape = PulseShape::flat_top_cosine;
  c.rise = 100e-9;
  CHECK(std::abs(c(c.start)) < 1e-15);
  CHECK(c(c.start + 50e-9).real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(c(c.start + 100e-9).real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c(c.start + c.duration - 50e-9).real() == doctest::Approx(0.5).epsilon(1e-12));

  PulseEnvelope t;
  t.shape = PulseShape::tabulated;
  t.table_t0 = 0.0;
  t.table_dt = 1.0;
  t.table = {0.0, 2.0, cdouble(2.0, 2.0)};
  t.duration = 2.0;
  t.amplitude = 1.0;
  CHECK(t(0.5) == cdouble(1.0, 0.0));
  CHECK(t(1.5) == cdouble(2.0, 1.0));

  PulseEnvelope bad = r;
  bad.duration = 0.0;
  CHECK(kind_of([&] { bad.validate(); }) == ErrorKind::argument);
  bad = g;
  bad.rise = -1.0;
  CHECK(kind_of([&] { bad.validate(); }) == ErrorKind::argument);
}

TEST_CASE("scaled pulse is linear") {
  PulseEnvelope g;
  g.shape = PulseShape::flat_top_gaussian;
  g.amplitude = {0.3, 0.4};
  g.start = 0.1e-6;
  g.duration = 1e-6;
  g.rise = 30e-9;
  const cdouble lambda{-1.5, 2.0};
  const PulseEnvelope s = g.scaled(lambda);
  for (double t : {0.05e-6, 0.1e-6, 0.5e-6, 1.09e-6})
    CHECK(std::abs(s(t) - lambda * g(t)) <= 1e-15 * std::abs(lambda * g(t)) + 1e-300);
}

TEST_CASE("config file loads with unit conversion") {
  const RunConfig c = load_run_config(orx_test::config_path());
  const DeviceParams& p = c.device;
  CHECK(p.omega_q == doctest::Approx(orx_test::ghz(6.251)).epsilon(1e-15));
  CHECK(p.kappa_e == doctest::Approx(mhz(9.69)).epsilon(1e-15));
  CHECK(p.kappa_e_ext / p.kappa_e == doctest::Approx(0.353).epsilon(0.001 / 0.353));
  CHECK(p.g0 == doctest::Approx(constants::two_pi * 30.0).epsilon(1e-15));
  CHECK(p.delta_gap == doctest::Approx(205e-6 * constants::electron_volt).epsilon(1e-15));
  CHECK(p.tau == 0.0);
  CHECK(p.kappa_s == p.kappa_o);
  CHECK(c.scenario.integration_time == doctest::Approx(1.8e-6).epsilon(1e-15));
  CHECK(c.detection.shots_per_state == 15000);
  CHECK(c.detection.t1 == doctest::Approx(33e-6).epsilon(1e-15));
  CHECK(c.budget.thermal.qubit.t0 == doctest::Approx(0.0712).epsilon(1e-15));
  CHECK(load_config(orx_test::config_path()) == p);
}

TEST_CASE("serialize round trip is exact") {
  const RunConfig c = load_run_config(orx_test::config_path());
  const std::string text = serialize(c);
  const RunConfig again = parse_run_config(text);
  CHECK(again == c);
  CHECK(serialize(again) == text);
  CHECK(config_hash(again) == config_hash(c));
  CHECK(config_hash(c).size() == 64);
}

TEST_CASE("config hash tracks model changes") {
  const std::string base = read_file(orx_test::config_path());
  const RunConfig c = parse_run_config(base);
  std::string edited = base;
  edited.replace(edited.find("kappa_e_MHz: 9.69"), 17, "kappa_e_MHz: 9.70");
  CHECK(config_hash(parse_run_config(edited)) != config_hash(c));
  // Comments and formatting do not change the model.
  CHECK(config_hash(parse_run_config("# note\n" + base)) == config_hash(c));
}

TEST_CASE("sha256 of known vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("config errors") {
  const std::string base = read_file(orx_test::config_path());
  auto err = [](const std::string& text) -> std::string {
    try {
      parse_run_config(text);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::config);
      return e.what();
    }
    return "";
  };
  std::string t = base;
  t.replace(t.find("  chi_MHz: 6.6\n"), 14, "");
  CHECK(err(t).find("chi") != std::string::npos);

  t = base;
  t.replace(t.find("kappa_MHz: 1.4"), 14, "kappa_furlongs: 1.4");
  CHECK(err(t).find("kappa_furlongs") != std::string::npos);

  t = base;
  t.replace(t.find("kappa_ext_MHz: 1.0"), 18, "kappa_ext_MHz: 2.0");
  CHECK(err(t).find("kappa_c_ext") != std::string::npos);

  t = base + "\nbogus_table:\n  x: 1\n";
  CHECK(err(t).find("bogus_table") != std::string::npos);

  t = base;
  t.replace(t.find("  nu_MHz: 201\n"), 14, "  nu_MHz: 201\n  nu_GHz: 0.201\n");
  CHECK(!err(t).empty());

  CHECK(!err("qubit: [unbalanced").empty());
  CHECK(kind_of([] { load_run_config("/nonexistent/config.yaml"); }) == ErrorKind::io);
}

TEST_CASE("frequency keys accept every unit") {
  const std::string base = read_file(orx_test::config_path());
  const RunConfig ref = parse_run_config(base);
  for (const auto& [key, value] :
       {std::pair{"kappa_MHz: 1.4", "kappa_kHz: 1400"}, std::pair{"kappa_MHz: 1.4", "kappa_Hz: 1.4e6"},
        std::pair{"kappa_MHz: 1.4", "kappa_GHz: 0.0014"}}) {
    std::string t = base;
    t.replace(t.find(key), std::string(key).size(), value);
    CHECK(parse_run_config(t).device.kappa_c == doctest::Approx(ref.device.kappa_c).epsilon(1e-14));
  }
  std::string t = base;
  t.replace(t.find("tau_ns: 0"), 9, "tau_us: 0.005");
  CHECK(parse_run_config(t).device.tau == doctest::Approx(5e-9).epsilon(1e-15));
  t = base;
  t.replace(t.find("kappa_MHz: 1.4"), 14, "kappa_rad_per_s: 8796459.43");
  CHECK(parse_run_config(t).device.kappa_c == 8796459.43);
}
