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
#include <random>
#include <string>

#include "optoreadout/detection.hpp"
#include "optoreadout/error.hpp"

namespace optoreadout::detection {

namespace {

double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

}  // namespace

FidelityReport assignment_fidelity(std::span<const double> scores_g, std::span<const double> scores_e,
                                   double threshold, double eps_ol, double integration_time) {
  if (scores_g.empty() || scores_e.empty())
    fail(ErrorKind::argument, "assignment_fidelity: both score lists must be non-empty");
  const double ng = static_cast<double>(scores_g.size()), ne = static_cast<double>(scores_e.size());
  std::size_t g_above = 0, e_above_n = 0, g_below = 0, e_below = 0;
  for (double s : scores_g) {
    g_above += s > threshold ? 1 : 0;
    g_below += s < threshold ? 1 : 0;
  }
  for (double s : scores_e) {
    e_above_n += s > threshold ? 1 : 0;
    e_below += s < threshold ? 1 : 0;
  }
  // Upper side as |e>: F_up = 1 - (g_above/ng + (ne - e_above)/ne) / 2.
  const double f_up = 1.0 - 0.5 * (g_above / ng + (ne - e_above_n) / ne);
  const double f_down = 1.0 - 0.5 * (g_below / ng + (ne - e_below) / ne);
  const bool e_above = f_up != f_down ? f_up > f_down : mean(scores_e) >= mean(scores_g);
  FidelityReport r;
  r.p_e_given_g = (e_above ? g_above : g_below) / ng;
  r.p_g_given_e = (ne - (e_above ? e_above_n : e_below)) / ne;
  r.eps_g = r.p_e_given_g;
  r.eps_e = r.p_g_given_e;
  r.fidelity = 1.0 - 0.5 * (r.p_e_given_g + r.p_g_given_e);
  r.eps_ol = eps_ol;
  r.integration_time = integration_time;
  return r;
}

QNDReport qnd_metric(std::span<const QubitState> first, std::span<const QubitState> second) {
  if (first.empty()) fail(ErrorKind::argument, "qnd_metric: empty input");
  if (first.size() != second.size())
    fail(ErrorKind::argument, "qnd_metric: length mismatch (" + std::to_string(first.size()) +
                                  " vs " + std::to_string(second.size()) + ")");
  std::size_t ng = 0, ne = 0, gg = 0, ee = 0;
  for (std::size_t k = 0; k < first.size(); ++k) {
    if (first[k] == QubitState::ground) {
      ++ng;
      gg += second[k] == QubitState::ground ? 1 : 0;
    } else {
      ++ne;
      ee += second[k] == QubitState::excited ? 1 : 0;
    }
  }
  if (ng == 0 || ne == 0)
    fail(ErrorKind::argument, "qnd_metric: first measurement never yields both g and e");
  QNDReport r;
  r.p_g2_given_g1 = static_cast<double>(gg) / static_cast<double>(ng);
  r.p_e2_given_e1 = static_cast<double>(ee) / static_cast<double>(ne);
  r.q = 0.5 * (r.p_g2_given_g1 + r.p_e2_given_e1);
  return r;
}

ConsecutiveOutcomes simulate_consecutive(std::size_t shots_per_state, double delay, double t1,
                                         double thermal_excitation, std::uint64_t seed) {
  if (delay < 0.0 || t1 < 0.0) fail(ErrorKind::argument, "simulate_consecutive: times must be >= 0");
  const double decay = t1 > 0.0 ? 1.0 - std::exp(-delay / t1) : 0.0;
  const double excite = thermal_excitation * decay;
  ConsecutiveOutcomes out;
  out.first.resize(2 * shots_per_state);
  out.second.resize(2 * shots_per_state);
  for (std::size_t k = 0; k < out.first.size(); ++k) {
    std::mt19937_64 rng(shot_seed(seed, k));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const QubitState s = k % 2 == 0 ? QubitState::ground : QubitState::excited;
    out.first[k] = s;
    const double u = uni(rng);
    if (s == QubitState::excited)
      out.second[k] = u < decay ? QubitState::ground : QubitState::excited;
    else
      out.second[k] = u < excite ? QubitState::excited : QubitState::ground;
  }
  return out;
}

double sigma_det_from_fit(const DoubleGaussianFit& fit, double n_meas_sqrt) {
  double mg = fit.mu_g, me = fit.mu_e, sbar = fit.sigma_mean();
  if (fit.core_g && fit.core_e) {
    mg = fit.core_g->mean;
    me = fit.core_e->mean;
    sbar = 0.5 * (fit.core_g->sigma + fit.core_e->sigma);
  }
  const double sep = std::abs(me - mg);
  const double sigma_det = sbar * 2.0 * n_meas_sqrt / sep;
  if (!(sigma_det > 0.0) || !std::isfinite(sigma_det))
    fail(ErrorKind::numeric, "quantum_efficiency: sigma_det must be positive and finite");
  return sigma_det;
}

double quantum_efficiency(const DoubleGaussianFit& fit, double n_meas_sqrt) {
  const double s = sigma_det_from_fit(fit, n_meas_sqrt);
  return 0.5 / (s * s);
}

}  // namespace optoreadout::detection
