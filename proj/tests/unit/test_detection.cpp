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
#include <random>
#include <vector>

#include "optoreadout/constants.hpp"
#include "optoreadout/detection.hpp"
#include "optoreadout/error.hpp"
#include "support.hpp"

using namespace optoreadout;
using namespace optoreadout::detection;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return static_cast<ErrorKind>(0);
}

constexpr double kDt = 2e-9;

// Readout-like envelopes: exponential rise towards two different points.
void toy_envelopes(std::vector<cdouble>& g, std::vector<cdouble>& e, std::size_t n = 400) {
  g.resize(n);
  e.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double rise = 1.0 - std::exp(-static_cast<double>(k) / 60.0);
    g[k] = rise * cdouble{3.0, 1.0};
    e[k] = rise * cdouble{1.0, -0.5};
  }
}

std::vector<double> scores_of(const std::vector<ShotRecord>& shots, QubitState s) {
  std::vector<double> out;
  for (const auto& r : shots)
    if (r.label == s) out.push_back(r.score);
  return out;
}

std::vector<double> all_scores(const std::vector<ShotRecord>& shots) {
  std::vector<double> out;
  for (const auto& r : shots) out.push_back(r.score);
  return out;
}

std::vector<QubitState> all_labels(const std::vector<ShotRecord>& shots) {
  std::vector<QubitState> out;
  for (const auto& r : shots) out.push_back(r.label);
  return out;
}

double variance(const std::vector<double>& x) {
  double m = 0.0, v = 0.0;
  for (double a : x) m += a;
  m /= static_cast<double>(x.size());
  for (double a : x) v += (a - m) * (a - m);
  return v / static_cast<double>(x.size() - 1);
}

}  // namespace

TEST_CASE("weight function") {
  std::vector<cdouble> g, e;
  toy_envelopes(g, e);
  CHECK(kind_of([&] { weight_function(g, g); }) == ErrorKind::numeric);
  std::vector<cdouble> shorter(g.begin(), g.end() - 1);
  CHECK(kind_of([&] { weight_function(shorter, e); }) == ErrorKind::argument);

  std::vector<cdouble> a(50, cdouble{1.0, 1.0}), b(50, cdouble{1.0, 3.0});
  const WeightFunction w = weight_function(a, b);
  CHECK(std::remainder(w.theta - constants::pi / 2, constants::pi) == doctest::Approx(0.0).epsilon(1e-14));
  for (double f : w.f) CHECK(f == doctest::Approx(1.0));

  const WeightFunction wt = weight_function(g, e);
  double peak = 0.0;
  for (double f : wt.f) peak = std::max(peak, std::abs(f));
  CHECK(peak == doctest::Approx(1.0));
  // Supported where the traces differ.
  CHECK(wt.f.front() == 0.0);
  CHECK(std::abs(wt.f.back()) > 0.9);
}

TEST_CASE("noiseless shots equal the envelopes") {
  std::vector<cdouble> g, e;
  toy_envelopes(g, e);
  ShotOptions o;
  o.sigma_score = 0.0;
  o.shots_per_state = 3;
  const WeightFunction w = weight_function(g, e);
  const auto shots = simulate_shots(g, e, kDt, w, o);
  REQUIRE(shots.size() == 6);
  for (const auto& s : shots) {
    const auto& want = s.label == QubitState::ground ? g : e;
    for (std::size_t k = 0; k < want.size(); ++k) {
      CHECK(s.i[k] == want[k].real());
      CHECK(s.q[k] == want[k].imag());
    }
    CHECK(integrate_shot(s, w, kDt) == doctest::Approx(s.score).epsilon(1e-12));
  }
  CHECK(shots[0].label == QubitState::ground);
  CHECK(shots[1].label == QubitState::excited);
  // e minus g separation is positive along the weight.
  CHECK(shots[1].score > shots[0].score);

  WeightFunction zero = w;
  std::fill(zero.f.begin(), zero.f.end(), 0.0);
  CHECK(integrate_shot(shots[0], zero, kDt) == 0.0);

  // Doubling the record doubles the score.
  std::vector<double> i2(shots[1].i), q2(shots[1].q);
  for (auto& v : i2) v *= 2.0;
  for (auto& v : q2) v *= 2.0;
  CHECK(integrate_shot(i2, q2, w, kDt) == doctest::Approx(2.0 * shots[1].score));
}

TEST_CASE("score variance matches the configured sigma") {
  std::vector<cdouble> g, e;
  toy_envelopes(g, e, 200);
  ShotOptions o;
  o.sigma_score = std::sqrt(0.5);
  o.shots_per_state = 15000;
  o.keep_iq = false;
  o.seed = 11;
  const auto shots = simulate_shots(g, e, kDt, o);
  CHECK(variance(scores_of(shots, QubitState::ground)) == doctest::Approx(0.5).epsilon(0.03));
  CHECK(variance(scores_of(shots, QubitState::excited)) == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("shots are deterministic and thread-count independent") {
  std::vector<cdouble> g, e;
  toy_envelopes(g, e, 100);
  ShotOptions o;
  o.sigma_score = 0.3;
  o.shots_per_state = 500;
  o.flips.t1 = 33e-6;
  o.flips.thermal_excitation = 0.1;
  o.threads = 1;
  const auto a = simulate_shots(g, e, kDt, o);
  o.threads = 4;
  const auto b = simulate_shots(g, e, kDt, o);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].score == b[k].score);
    CHECK(a[k].i == b[k].i);
    CHECK(a[k].seed == shot_seed(o.seed, k));
  }
  o.seed = 2;
  const auto c = simulate_shots(g, e, kDt, o);
  CHECK(c[0].score != a[0].score);
}

TEST_CASE("global phase and amplitude scale leave the assignment unchanged") {
  std::vector<cdouble> g, e;
  toy_envelopes(g, e, 150);
  ShotOptions o;
  const WeightFunction w0 = weight_function(g, e);
  double sep = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k)
    sep += w0.f[k] * (std::polar(1.0, -w0.theta) * (e[k] - g[k])).real() * kDt;
  o.sigma_score = 0.3 * sep;
  o.shots_per_state = 400;
  o.keep_iq = false;
  o.flips.t1 = 5e-7;
  const auto s0 = simulate_shots(g, e, kDt, w0, o);
  const FidelityReport r0 = assignment_fidelity(scores_of(s0, QubitState::ground),
                                                scores_of(s0, QubitState::excited),
                                                fit_double_gaussian(all_scores(s0), all_labels(s0)).threshold);

  const double phi = 2.1;
  std::vector<cdouble> gr(g), er(e);
  for (auto& v : gr) v *= std::polar(1.0, phi);
  for (auto& v : er) v *= std::polar(1.0, phi);
  const WeightFunction w1 = weight_function(gr, er);
  CHECK(std::remainder(w1.theta - w0.theta - phi, constants::two_pi) == doctest::Approx(0.0).epsilon(1e-12));
  const auto s1 = simulate_shots(gr, er, kDt, w1, o);
  for (std::size_t k = 0; k < s0.size(); ++k)
    CHECK(s1[k].score == doctest::Approx(s0[k].score).epsilon(1e-9));

  std::vector<cdouble> gs(g), es(e);
  for (auto& v : gs) v *= 2.0;
  for (auto& v : es) v *= 2.0;
  ShotOptions o2 = o;
  o2.sigma_score *= 2.0;
  const auto s2 = simulate_shots(gs, es, kDt, o2);
  const FidelityReport r2 = assignment_fidelity(scores_of(s2, QubitState::ground),
                                                scores_of(s2, QubitState::excited),
                                                fit_double_gaussian(all_scores(s2), all_labels(s2)).threshold);
  CHECK(r2.fidelity == r0.fidelity);
  CHECK(r2.eps_g == r0.eps_g);
  CHECK(r2.eps_e == r0.eps_e);
}

TEST_CASE("EM recovers a synthetic mixture") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<double> x(20000);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = n01(rng) + (k % 2 == 0 ? 0.0 : 5.0);
  const DoubleGaussianFit f = fit_double_gaussian(x);
  CHECK(std::abs(f.mu_g - 0.0) < 0.05);
  CHECK(std::abs(f.mu_e - 5.0) < 0.05);
  CHECK(std::abs(f.sigma_g - 1.0) < 0.05);
  CHECK(std::abs(f.sigma_e - 1.0) < 0.05);
  CHECK(f.w_g + f.w_e == doctest::Approx(1.0));
  CHECK(f.threshold == doctest::Approx(2.5).epsilon(0.02));
  CHECK_FALSE(f.degenerate);
  CHECK(f.meaningful);
  CHECK(f.log_likelihood_trace.size() == static_cast<std::size_t>(f.iterations));

  std::vector<double> one(20000);
  for (double& v : one) v = n01(rng);
  const DoubleGaussianFit d = fit_double_gaussian(one);
  CHECK(d.degenerate);

  const DoubleGaussianFit few = fit_double_gaussian(std::vector<double>{0.0, 1.0, 4.0, 5.0});
  CHECK_FALSE(few.meaningful);
  CHECK(kind_of([] { fit_double_gaussian(std::vector<double>{1.0}); }) == ErrorKind::argument);
}

TEST_CASE("labels fix the component order") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<double> x;
  std::vector<QubitState> lab;
  for (int k = 0; k < 4000; ++k) {
    const bool e = k % 2 == 1;
    x.push_back(n01(rng) + (e ? -6.0 : 0.0));
    lab.push_back(e ? QubitState::excited : QubitState::ground);
  }
  const DoubleGaussianFit f = fit_double_gaussian(x, lab);
  CHECK(f.mu_g == doctest::Approx(0.0).epsilon(0.1));
  CHECK(f.mu_e == doctest::Approx(-6.0).epsilon(0.02));
  REQUIRE(f.class_g.has_value());
  CHECK(f.class_e->mean == doctest::Approx(-6.0).epsilon(0.02));
}

TEST_CASE("assignment fidelity limits") {
  const std::vector<double> g{0.0, 0.1, -0.2}, e{5.0, 5.2, 4.9};
  FidelityReport r = assignment_fidelity(g, e, 2.5);
  CHECK(r.fidelity == 1.0);
  r = assignment_fidelity(g, g, 0.0);
  CHECK(r.fidelity == 0.5);
  // A score on the threshold counts as |g>.
  r = assignment_fidelity(std::vector<double>{1.0}, std::vector<double>{1.0, 3.0}, 1.0);
  CHECK(r.p_e_given_g == 0.0);
  CHECK(r.p_g_given_e == 0.5);
  CHECK(r.fidelity == 1.0 - 0.5 * (r.p_e_given_g + r.p_g_given_e));
  // |e> has the larger mean but more |g> shots lie above the threshold:
  // the counting side wins, so F never drops below one half.
  r = assignment_fidelity(std::vector<double>{0.5, 0.6, -0.1}, std::vector<double>{-0.5, 0.4, 3.0}, 0.45);
  CHECK(r.p_e_given_g == doctest::Approx(1.0 / 3.0));
  CHECK(r.p_g_given_e == doctest::Approx(1.0 / 3.0));
  CHECK(r.fidelity >= 0.5);
  CHECK(kind_of([&] { assignment_fidelity({}, e, 0.0); }) == ErrorKind::argument);
}

TEST_CASE("QND metric") {
  const std::vector<QubitState> a{QubitState::ground, QubitState::excited, QubitState::ground,
                                  QubitState::excited};
  CHECK(qnd_metric(a, a).q == 1.0);
  std::vector<QubitState> flipped(a);
  flipped[1] = QubitState::ground;
  const QNDReport r = qnd_metric(a, flipped);
  CHECK(r.p_e2_given_e1 == 0.5);
  CHECK(r.q == 0.75);
  CHECK(kind_of([&] { qnd_metric({}, {}); }) == ErrorKind::argument);
  CHECK(kind_of([&] { qnd_metric(a, std::vector<QubitState>(3)); }) == ErrorKind::argument);

  std::mt19937_64 rng(3);
  std::vector<QubitState> first(20000), second(20000);
  for (std::size_t k = 0; k < first.size(); ++k) {
    first[k] = k % 2 ? QubitState::excited : QubitState::ground;
    second[k] = rng() & 1 ? QubitState::excited : QubitState::ground;
  }
  CHECK(qnd_metric(first, second).q == doctest::Approx(0.5).epsilon(0.03));

  const ConsecutiveOutcomes c = simulate_consecutive(15000, 2e-6, 33e-6, 0.015, 9);
  const QNDReport q = qnd_metric(c.first, c.second);
  const double p = std::exp(-2.0 / 33.0);
  CHECK(std::abs(q.p_e2_given_e1 - p) < 3.0 * std::sqrt(p * (1 - p) / 15000));
  CHECK(q.p_g2_given_g1 > 0.99);
  CHECK(q.q == doctest::Approx(0.97).epsilon(0.01));
}

TEST_CASE("quantum efficiency") {
  DoubleGaussianFit f;
  f.mu_g = 0.0;
  f.mu_e = 2.0;
  f.sigma_g = f.sigma_e = std::sqrt(0.5);
  // sigma_det = sigma * 2 n / separation = sigma when n = 1.
  CHECK(quantum_efficiency(f, 1.0) == doctest::Approx(1.0));
  CHECK(quantum_efficiency(f, 10.0) == doctest::Approx(0.01));
  f.sigma_g = f.sigma_e = 0.0;
  CHECK(kind_of([&] { quantum_efficiency(f, 1.0); }) == ErrorKind::numeric);
}

TEST_CASE("T1 fit") {
  std::vector<double> t, y;
  for (int k = 0; k < 40; ++k) {
    t.push_back(k * 3e-6);
    y.push_back(0.8 * std::exp(-t.back() / 33e-6) + 0.05);
  }
  const T1Fit f = fit_t1(t, y);
  CHECK(f.t1.value == doctest::Approx(33e-6).epsilon(0.01));
  CHECK(f.t1.ci_low <= 33e-6);
  CHECK(f.t1.ci_high >= 33e-6);
  CHECK_FALSE(f.unbounded);

  std::vector<double> flat(t.size(), 0.3);
  bool handled = false;
  try {
    handled = fit_t1(t, flat).unbounded;
  } catch (const Error& e) {
    handled = e.kind() == ErrorKind::numeric;
  }
  CHECK(handled);
  CHECK(kind_of([] {
          fit_t1(std::vector<double>{0, 1, 2, 3}, std::vector<double>{1, 0.5, 0.25, 0.1});
        }) != static_cast<ErrorKind>(0));
}

TEST_CASE("T1 interval coverage") {
  std::vector<double> t, p;
  for (int k = 0; k < 30; ++k) {
    t.push_back(k * 5e-6);
    p.push_back(std::exp(-t.back() / 33e-6));
  }
  const int trials = 400;
  int hits = 0;
  for (int trial = 0; trial < trials; ++trial) {
    const auto y = sample_populations(p, 1000, 0.02, 0.05, 1000 + trial);
    const T1Fit f = fit_t1(t, y);
    hits += (f.t1.ci_low <= 33e-6 && 33e-6 <= f.t1.ci_high) ? 1 : 0;
  }
  const double cover = static_cast<double>(hits) / trials;
  CHECK(cover >= 0.95 - 3.0 * std::sqrt(0.95 * 0.05 / trials));
}

TEST_CASE("Ramsey fit") {
  std::vector<double> t, y;
  for (int k = 0; k < 120; ++k) {
    t.push_back(k * 25e-9);
    y.push_back(0.45 * std::exp(-t.back() / 1.5e-6) * std::cos(constants::two_pi * 2e6 * t.back() + 0.3) + 0.5);
  }
  const RamseyFit f = fit_ramsey(t, y);
  CHECK(f.t2.value == doctest::Approx(1.5e-6).epsilon(0.02));
  CHECK(f.detuning.value == doctest::Approx(2e6).epsilon(0.02));
  CHECK_FALSE(f.aliased);

  std::vector<double> flat(t.size(), 0.5);
  CHECK(kind_of([&] { fit_ramsey(t, flat); }) == ErrorKind::numeric);

  std::vector<double> coarse_t, coarse_y;
  for (int k = 0; k < 40; ++k) {
    coarse_t.push_back(k * 150e-9);
    coarse_y.push_back(0.45 * std::exp(-coarse_t.back() / 1.5e-6) *
                           std::cos(constants::two_pi * 2e6 * coarse_t.back()) + 0.5);
  }
  bool aliased = false;
  try {
    aliased = fit_ramsey(coarse_t, coarse_y).aliased;
  } catch (const Error&) {
    aliased = true;
  }
  CHECK(aliased);
}

TEST_CASE("empirical overlap error follows erfc") {
  // Pure Gaussian classes, no flips: misassignment is overlap only.
  std::vector<cdouble> g(20, cdouble{0.0, 0.0}), e(20, cdouble{1.0, 0.0});
  const double dt = 1e-3;
  const double sep = 20 * dt;  // score separation with f = 1
  ShotOptions o;
  o.shots_per_state = 100000;
  o.sigma_score = sep / 3.0;
  o.keep_iq = false;
  o.seed = 99;
  const auto shots = simulate_shots(g, e, dt, o);
  const FidelityReport r = assignment_fidelity(scores_of(shots, QubitState::ground),
                                               scores_of(shots, QubitState::excited), 0.5 * sep);
  const double want = 0.5 * std::erfc(3.0 / (2.0 * std::sqrt(2.0)));
  const double got = 0.5 * (r.eps_g + r.eps_e);
  CHECK(std::abs(got - want) < 3.0 * std::sqrt(want * (1 - want) / (2.0 * o.shots_per_state)));
}

TEST_CASE("pipeline at the microwave operating point") {
  const DetectionSettings s;
  CHECK(scheme_snr(s, dynamics::Scheme::mw_mw, 122.0) == 13.0);
  DetectionSettings eta = s;
  eta.eta_det_mw_mw = 1.3e-3;
  CHECK(scheme_snr(eta, dynamics::Scheme::mw_mw, 122.0) ==
        doctest::Approx(2.0 * 122.0 / std::sqrt(0.5 / 1.3e-3)));

  DoubleGaussianFit f;
  f.mu_g = 0.0;
  f.mu_e = 13.0;
  f.sigma_g = f.sigma_e = 1.0;
  CHECK(f.overlap_error() < 1e-10);
  CHECK(f.overlap_error() == doctest::Approx(0.5 * std::erfc(13.0 / (2.0 * std::sqrt(2.0)))).epsilon(1e-9));
}

TEST_CASE("population sampling") {
  const std::vector<double> p{0.0, 0.5, 1.0};
  const auto a = sample_populations(p, 2000, 0.0, 0.0, 4);
  CHECK(a[0] == 0.0);
  CHECK(a[2] == 1.0);
  CHECK(a[1] == doctest::Approx(0.5).epsilon(0.1));
  CHECK(sample_populations(p, 2000, 0.0, 0.0, 4) == a);
  const auto b = sample_populations(p, 100000, 0.1, 0.2, 5);
  CHECK(b[0] == doctest::Approx(0.1).epsilon(0.05));
  CHECK(b[2] == doctest::Approx(0.8).epsilon(0.02));
}

TEST_CASE("Ramsey T2 across the three readout SNRs") {
  std::vector<double> t, p;
  for (int k = 0; k < 100; ++k) {
    t.push_back(k * 40e-9);
    p.push_back(0.5 + 0.5 * std::exp(-t.back() / 1.5e-6) * std::cos(constants::two_pi * 2e6 * t.back()));
  }
  std::uint64_t seed = 21;
  for (double snr : {13.0, 4.11, 2.96}) {
    const double err = 0.5 * std::erfc(snr / (2.0 * std::sqrt(2.0)));
    const auto y = sample_populations(p, 2000, err, err, seed++);
    const RamseyFit f = fit_ramsey(t, y);
    CHECK(f.t2.value >= 1.16e-6);
    CHECK(f.t2.value <= 1.73e-6);
  }
}

TEST_CASE("full shot pipeline on simulated traces") {
  const DeviceParams dev = orx_test::si_device();
  const auto st = dynamics::ScenarioSettings::defaults();
  const auto g = dynamics::readout_scenario(dynamics::Scheme::mw_mw, dev, QubitState::ground, st);
  const auto e = dynamics::readout_scenario(dynamics::Scheme::mw_mw, dev, QubitState::excited, st);
  DetectionSettings s;
  s.shots_per_state = 3000;
  s.seed = 4;
  const ShotRunResult r = run_shots(g, e, st.integration_start, st.integration_time, 122.0, s);
  CHECK(r.shots.size() == 6000);
  CHECK(r.avg_g.size() == 900);
  CHECK(r.snr == 13.0);
  CHECK(r.sigma_score == doctest::Approx(r.separation / 13.0));
  CHECK(r.report.eps_ol < 1e-10);
  CHECK(r.report.fidelity > 0.5);
  CHECK(r.report.fidelity <= 1.0);
  CHECK(r.eta_det == doctest::Approx(1.4e-3).epsilon(0.1));
  CHECK(kind_of([&] { window(g, 2.9e-6, 1e-6); }) == ErrorKind::argument);

  const ShotRunResult again = run_shots(g, e, st.integration_start, st.integration_time, 122.0, s);
  CHECK(again.report.fidelity == r.report.fidelity);
  CHECK(again.shots.back().score == r.shots.back().score);
}
