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

#include "optoreadout/detection.hpp"
#include "optoreadout/error.hpp"

namespace optoreadout::detection {

std::vector<cdouble> window(const dynamics::ScenarioResult& r, double start, double duration) {
  if (r.time.size() < 2) fail(ErrorKind::argument, "window: trace has fewer than 2 samples");
  if (duration <= 0.0) fail(ErrorKind::argument, "window: duration must be positive");
  const double dt = r.time[1] - r.time[0];
  const double k0 = std::round((start - r.time.front()) / dt);
  const double count = std::round(duration / dt);
  if (k0 < 0.0 || k0 + count > static_cast<double>(r.time.size()))
    fail(ErrorKind::argument, "window: [" + std::to_string(start) + ", " +
                                  std::to_string(start + duration) + ") lies outside the trace");
  const auto first = r.envelope.begin() + static_cast<std::ptrdiff_t>(k0);
  return {first, first + static_cast<std::ptrdiff_t>(count)};
}

double scheme_snr(const DetectionSettings& s, dynamics::Scheme scheme, double n_meas_sqrt) {
  double snr = 0.0, eta = 0.0;
  switch (scheme) {
    case dynamics::Scheme::mw_mw:
      snr = s.snr_mw_mw;
      eta = s.eta_det_mw_mw;
      break;
    case dynamics::Scheme::mw_opt:
      snr = s.snr_mw_opt;
      eta = s.eta_det_mw_opt;
      break;
    case dynamics::Scheme::opt_opt:
      snr = s.snr_opt_opt;
      eta = s.eta_det_opt_opt;
      break;
  }
  if (eta > 0.0) {
    if (!(n_meas_sqrt > 0.0))
      fail(ErrorKind::argument, "eta_det override needs a positive readout amplitude");
    snr = 2.0 * n_meas_sqrt / std::sqrt(0.5 / eta);
  }
  if (!(snr > 0.0) || !std::isfinite(snr))
    fail(ErrorKind::argument, "score SNR must be positive and finite");
  return snr;
}

ShotRunResult run_shots(const dynamics::ScenarioResult& g, const dynamics::ScenarioResult& e,
                        double window_start, double window_duration, double n_meas_sqrt,
                        const DetectionSettings& settings) {
  if (g.scheme != e.scheme) fail(ErrorKind::argument, "run_shots: g and e traces use different schemes");
  if (g.time.size() != e.time.size())
    fail(ErrorKind::argument, "run_shots: g and e traces are on different grids");
  ShotRunResult out;
  out.scheme = g.scheme;
  out.dt = g.time[1] - g.time[0];
  out.window_start = window_start;
  out.n_meas_sqrt = n_meas_sqrt;
  out.avg_g = window(g, window_start, window_duration);
  out.avg_e = window(e, window_start, window_duration);
  out.weight = weight_function(out.avg_g, out.avg_e);

  const cdouble rot = std::polar(1.0, -out.weight.theta);
  for (std::size_t k = 0; k < out.avg_g.size(); ++k)
    out.separation += out.weight.f[k] * (rot * (out.avg_e[k] - out.avg_g[k])).real();
  out.separation *= out.dt;
  out.snr = scheme_snr(settings, g.scheme, n_meas_sqrt);
  out.sigma_score = out.separation / out.snr;

  ShotOptions opt;
  opt.sigma_score = out.sigma_score;
  opt.shots_per_state = settings.shots_per_state;
  opt.seed = settings.seed;
  opt.flips = {settings.t1, settings.thermal_excitation, settings.readout_flip_probability};
  opt.keep_iq = settings.keep_iq;
  opt.threads = settings.threads;
  out.shots = simulate_shots(out.avg_g, out.avg_e, out.dt, out.weight, opt);

  std::vector<double> scores, sg, se;
  std::vector<QubitState> labels;
  scores.reserve(out.shots.size());
  labels.reserve(out.shots.size());
  for (const ShotRecord& s : out.shots) {
    scores.push_back(s.score);
    labels.push_back(s.label);
    (s.label == QubitState::ground ? sg : se).push_back(s.score);
  }
  out.fit = fit_double_gaussian(scores, labels);
  const double t_int = static_cast<double>(out.avg_g.size()) * out.dt;
  out.report = assignment_fidelity(sg, se, out.fit.threshold, out.fit.overlap_error(), t_int);

  const bool e_above = out.fit.mu_e >= out.fit.mu_g;
  for (const ShotRecord& s : out.shots) {
    if (s.flipped || s.started_excited) continue;
    ++out.empirical_overlap_shots;
    const bool as_e = e_above ? s.score > out.fit.threshold : s.score < out.fit.threshold;
    if (as_e != (s.label == QubitState::excited)) ++out.empirical_overlap_errors;
  }
  if (n_meas_sqrt > 0.0) {
    out.sigma_det = sigma_det_from_fit(out.fit, n_meas_sqrt);
    out.eta_det = 0.5 / (out.sigma_det * out.sigma_det);
  }
  return out;
}

}  // namespace optoreadout::detection
