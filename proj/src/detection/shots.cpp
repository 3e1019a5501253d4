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
#include <limits>
#include <random>
#include <string>
#include <thread>

#include "detail/parallel.hpp"
#include "optoreadout/constants.hpp"
#include "optoreadout/detection.hpp"
#include "optoreadout/error.hpp"

namespace optoreadout::detection {

namespace {

void require_same_grid(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    fail(ErrorKind::argument, std::string(what) + ": grid mismatch (" + std::to_string(a) + " vs " +
                                  std::to_string(b) + " samples)");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Interval [on, off) of window time during which the qubit is excited.
struct ExcitedInterval {
  double on = 0.0;
  double off = 0.0;
  bool started_excited = false;
  bool flipped = false;
};

ExcitedInterval draw_events(std::mt19937_64& rng, QubitState label, const FlipModel& m,
                            double duration) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  ExcitedInterval iv;
  bool excited = label == QubitState::excited;
  if (!excited && m.thermal_excitation > 0.0 && uni(rng) < m.thermal_excitation) {
    excited = true;
    iv.started_excited = true;
  }
  double t_up = 0.0;
  if (!excited && m.readout_flip_probability > 0.0 && uni(rng) < m.readout_flip_probability) {
    t_up = uni(rng) * duration;
    excited = true;
    iv.flipped = true;
  }
  if (!excited) return iv;
  iv.on = t_up;
  iv.off = std::numeric_limits<double>::infinity();
  if (m.t1 > 0.0) {
    std::exponential_distribution<double> decay(1.0 / m.t1);
    const double t_down = t_up + decay(rng);
    if (t_down < duration) {
      iv.off = t_down;
      iv.flipped = true;
    }
  }
  return iv;
}

}  // namespace

WeightFunction weight_function(std::span<const cdouble> avg_g, std::span<const cdouble> avg_e) {
  require_same_grid(avg_g.size(), avg_e.size(), "weight_function");
  cdouble sum_sq = 0.0;
  double power = 0.0;
  for (std::size_t k = 0; k < avg_g.size(); ++k) {
    const cdouble d = avg_e[k] - avg_g[k];
    sum_sq += d * d;
    power += std::norm(d);
  }
  if (!(power > 0.0)) fail(ErrorKind::numeric, "weight_function: identical envelopes (zero separation)");
  WeightFunction w;
  w.theta = 0.5 * std::arg(sum_sq);
  // Fix the pi ambiguity by the largest difference sample, so a global phase
  // e^{i phi} on both envelopes moves theta by exactly phi (mod 2 pi).
  std::size_t k_peak = 0;
  for (std::size_t k = 1; k < avg_g.size(); ++k)
    if (std::norm(avg_e[k] - avg_g[k]) > std::norm(avg_e[k_peak] - avg_g[k_peak])) k_peak = k;
  if ((std::polar(1.0, -w.theta) * (avg_e[k_peak] - avg_g[k_peak])).real() < 0.0)
    w.theta = std::remainder(w.theta + constants::pi, constants::two_pi);
  const cdouble rot = std::polar(1.0, -w.theta);
  w.f.resize(avg_g.size());
  double peak = 0.0;
  for (std::size_t k = 0; k < avg_g.size(); ++k) {
    w.f[k] = (rot * (avg_e[k] - avg_g[k])).real();
    peak = std::max(peak, std::abs(w.f[k]));
  }
  if (!(peak > 0.0)) fail(ErrorKind::numeric, "weight_function: separation vanishes after rotation");
  for (double& v : w.f) v /= peak;
  return w;
}

std::uint64_t shot_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ (index * 0xD1B54A32D192ED03ULL + 1));
}

double integrate_shot(std::span<const double> i, std::span<const double> q, const WeightFunction& w,
                      double dt) {
  require_same_grid(i.size(), w.f.size(), "integrate_shot");
  require_same_grid(q.size(), w.f.size(), "integrate_shot");
  const double c = std::cos(w.theta);
  const double s = std::sin(w.theta);
  double acc = 0.0;
  for (std::size_t k = 0; k < i.size(); ++k) acc += w.f[k] * (c * i[k] + s * q[k]);
  return acc * dt;
}

double integrate_shot(const ShotRecord& shot, const WeightFunction& w, double dt) {
  return integrate_shot(shot.i, shot.q, w, dt);
}

std::vector<ShotRecord> simulate_shots(std::span<const cdouble> avg_g, std::span<const cdouble> avg_e,
                                       double dt, const WeightFunction& weight,
                                       const ShotOptions& options) {
  require_same_grid(avg_g.size(), avg_e.size(), "simulate_shots");
  require_same_grid(avg_g.size(), weight.f.size(), "simulate_shots");
  if (!(dt > 0.0)) fail(ErrorKind::argument, "simulate_shots: dt must be positive");
  if (options.sigma_score < 0.0 || !std::isfinite(options.sigma_score))
    fail(ErrorKind::argument, "simulate_shots: sigma must be >= 0");
  const std::size_t n = avg_g.size();
  double f2 = 0.0;
  for (double v : weight.f) f2 += v * v;
  // Per-quadrature noise so that the weighted score has variance sigma^2.
  const double s = f2 > 0.0 ? options.sigma_score / (dt * std::sqrt(f2)) : 0.0;
  const cdouble frame = std::polar(1.0, weight.theta);
  const double duration = static_cast<double>(n) * dt;

  std::vector<ShotRecord> shots(2 * options.shots_per_state);
  auto make = [&](std::size_t k) {
    ShotRecord& r = shots[k];
    r.label = k % 2 == 0 ? QubitState::ground : QubitState::excited;
    r.seed = shot_seed(options.seed, k);
    std::mt19937_64 rng(r.seed);
    const ExcitedInterval iv = draw_events(rng, r.label, options.flips, duration);
    r.started_excited = iv.started_excited;
    r.flipped = iv.flipped;
    std::normal_distribution<double> normal(0.0, 1.0);
    if (options.keep_iq) {
      r.i.resize(n);
      r.q.resize(n);
    }
    const double c = std::cos(weight.theta);
    const double sn = std::sin(weight.theta);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double t = static_cast<double>(j) * dt;
      const bool excited = t >= iv.on && t < iv.off;
      cdouble v = excited ? avg_e[j] : avg_g[j];
      if (s > 0.0) {
        const double ni = normal(rng);
        const double nq = normal(rng);
        v += frame * cdouble{s * ni, s * nq};
      }
      if (options.keep_iq) {
        r.i[j] = v.real();
        r.q[j] = v.imag();
      }
      acc += weight.f[j] * (c * v.real() + sn * v.imag());
    }
    r.score = acc * dt;
  };
  detail::parallel_for(shots.size(), options.threads, make);
  return shots;
}

std::vector<ShotRecord> simulate_shots(std::span<const cdouble> avg_g, std::span<const cdouble> avg_e,
                                       double dt, const ShotOptions& options) {
  return simulate_shots(avg_g, avg_e, dt, weight_function(avg_g, avg_e), options);
}

}  // namespace optoreadout::detection
