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

#ifndef OPTOREADOUT_DETECTION_HPP
#define OPTOREADOUT_DETECTION_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "optoreadout/device.hpp"
#include "optoreadout/dynamics.hpp"
#include "optoreadout/pulse.hpp"

namespace optoreadout::detection {

/// Integration weight: scores are sum_k f_k Re(exp(-i theta) s_k) dt.
struct WeightFunction {
  std::vector<double> f;
  double theta = 0.0;
};

/// Rotation angle maximizing the separation along I (sign fixed so the
/// largest difference sample projects positively), f proportional to the
/// rotated envelope difference and normalized to max|f| = 1. Throws
/// ErrorKind::argument on a grid mismatch and ErrorKind::numeric when the
/// envelopes coincide.
WeightFunction weight_function(std::span<const cdouble> avg_g, std::span<const cdouble> avg_e);

/// Event model for state changes during a shot. Flip times are measured from
/// the first sample of the integration window.
struct FlipModel {
  double t1 = 0.0;                        // e -> g decay time constant, 0 disables
  double thermal_excitation = 0.0;        // probability a |g> preparation starts in |e>
  double readout_flip_probability = 0.0;  // probability of a g -> e jump during the window
};

struct ShotOptions {
  double sigma_score = 0.0;  // standard deviation of the integrated score
  std::size_t shots_per_state = 15000;
  std::uint64_t seed = 1;
  FlipModel flips;
  bool keep_iq = true;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// One heterodyne record. `i`/`q` are empty when I/Q retention is off.
struct ShotRecord {
  QubitState label = QubitState::ground;  // prepared state
  std::uint64_t seed = 0;                 // per-shot substream seed
  bool started_excited = false;           // after thermal excitation
  bool flipped = false;                   // any state change inside the window
  double score = 0.0;
  std::vector<double> i;
  std::vector<double> q;
};

/// Per-shot substream seed derived from (seed, index).
std::uint64_t shot_seed(std::uint64_t seed, std::uint64_t index);

/// Synthesizes 2 * shots_per_state records, alternating g, e, g, e, ...
/// Noise is white complex Gaussian with per-sample variance chosen so the
/// score under `weight` has standard deviation sigma_score. Deterministic for
/// a given seed, independent of the thread count.
std::vector<ShotRecord> simulate_shots(std::span<const cdouble> avg_g,
                                       std::span<const cdouble> avg_e, double dt,
                                       const WeightFunction& weight, const ShotOptions& options);

/// Convenience overload computing the weight from the envelopes.
std::vector<ShotRecord> simulate_shots(std::span<const cdouble> avg_g,
                                       std::span<const cdouble> avg_e, double dt,
                                       const ShotOptions& options);

double integrate_shot(std::span<const double> i, std::span<const double> q,
                      const WeightFunction& w, double dt);
double integrate_shot(const ShotRecord& shot, const WeightFunction& w, double dt);

struct GaussianComponent {
  double mean = 0.0;
  double sigma = 0.0;
  double weight = 1.0;
};

struct DoubleGaussianFit {
  double mu_g = 0.0, mu_e = 0.0;
  double sigma_g = 0.0, sigma_e = 0.0;
  double w_g = 0.5, w_e = 0.5;
  double threshold = 0.0;
  double log_likelihood = 0.0;  // mean per sample
  int iterations = 0;
  bool degenerate = false;  // |mu_e - mu_g| < mean sigma
  bool meaningful = true;   // false below 100 scores
  std::vector<double> log_likelihood_trace;

  // Labeled data only: single-Gaussian moments of each class, and the main
  // component of a two-component fit to each class (robust to decay and
  // thermal tails).
  std::optional<GaussianComponent> class_g, class_e;
  std::optional<GaussianComponent> core_g, core_e;

  double sigma_mean() const { return 0.5 * (sigma_g + sigma_e); }
  /// 0.5 erfc(|mu_e - mu_g| / (2 sqrt(2) sigma_mean)), taken from the class
  /// cores when available.
  double overlap_error() const;
};

struct EmOptions {
  int max_iterations = 500;
  double tolerance = 1e-9;  // change of the mean log-likelihood per sample
};

/// Two-component Gaussian mixture by expectation-maximization from a median
/// split. `labels` (same length) enables the per-class results and fixes the
/// g/e assignment; otherwise components are ordered mu_g < mu_e. Fewer than
/// 100 scores mark the fit as not meaningful and use the midpoint threshold.
/// Throws ErrorKind::numeric after max_iterations without convergence, except
/// when the components overlap; that fit comes back flagged degenerate.
DoubleGaussianFit fit_double_gaussian(std::span<const double> scores,
                                      std::span<const QubitState> labels = {},
                                      const EmOptions& options = {});

/// Two-component fit with fixed initial means (used for the per-class cores).
DoubleGaussianFit fit_mixture_from(std::span<const double> scores, double mu_a, double mu_b,
                                   double sigma0, const EmOptions& options = {});

/// Equal-likelihood point of the weighted components between the means.
double equal_likelihood_threshold(const GaussianComponent& g, const GaussianComponent& e);

struct FidelityReport {
  double fidelity = 0.0;
  double p_e_given_g = 0.0;
  double p_g_given_e = 0.0;
  double eps_g = 0.0;  // ground-state assignment error, = P(e|g)
  double eps_e = 0.0;  // excited-state assignment error, = P(g|e)
  double eps_ol = 0.0;
  double integration_time = 0.0;
};

/// Threshold counting. A score is assigned |e> iff it lies strictly on the
/// |e> side of the threshold. The |e> side is the one where the |e> class
/// has the larger share of its shots, so F >= 0.5; on an exact tie it is the
/// side of the larger class mean.
FidelityReport assignment_fidelity(std::span<const double> scores_g,
                                   std::span<const double> scores_e, double threshold,
                                   double eps_ol = 0.0, double integration_time = 0.0);

struct QNDReport {
  double q = 0.0;
  double p_g2_given_g1 = 0.0;
  double p_e2_given_e1 = 0.0;
};

QNDReport qnd_metric(std::span<const QubitState> first, std::span<const QubitState> second);

/// Consecutive-measurement Monte Carlo: alternating preparations, ideal first
/// outcome, second outcome after `delay` with decay e -> g at rate 1/t1 and
/// re-thermalization g -> e with probability p_th (1 - exp(-delay/t1)).
struct ConsecutiveOutcomes {
  std::vector<QubitState> first;
  std::vector<QubitState> second;
};
ConsecutiveOutcomes simulate_consecutive(std::size_t shots_per_state, double delay, double t1,
                                         double thermal_excitation, std::uint64_t seed);

/// sigma_det = sigma_mean * 2 n_meas_sqrt / |mu_e - mu_g| and
/// eta_det = 0.5 / sigma_det^2. Throws ErrorKind::numeric when sigma_det is
/// not positive and finite.
double quantum_efficiency(const DoubleGaussianFit& fit, double n_meas_sqrt);
double sigma_det_from_fit(const DoubleGaussianFit& fit, double n_meas_sqrt);

// ---------------------------------------------------------------- fitters

struct ParameterEstimate {
  double value = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;   // 95 % Student-t interval
  double ci_high = 0.0;
};

struct T1Fit {
  ParameterEstimate amplitude, t1, offset;
  double rss = 0.0;
  int iterations = 0;
  bool unbounded = false;  // decay too slow to resolve (T1 effectively infinite)
};

struct RamseyFit {
  ParameterEstimate amplitude, t2, detuning, phase, offset;  // detuning in Hz
  double rss = 0.0;
  int iterations = 0;
  bool aliased = false;  // fewer than 4 samples per oscillation period
};

/// Least squares A exp(-t/T1) + B. Needs >= 5 points; throws
/// ErrorKind::numeric for flat data or non-convergence.
T1Fit fit_t1(std::span<const double> delays, std::span<const double> populations);

/// Least squares A exp(-t/T2) cos(2 pi delta t + phi) + B with DFT-seeded
/// starts. Throws ErrorKind::numeric for a vanishing oscillation or
/// non-convergence.
RamseyFit fit_ramsey(std::span<const double> delays, std::span<const double> populations);

/// Measured populations of `probability` per delay: binomial sampling of
/// `shots` single-shot outcomes with assignment errors applied.
std::vector<double> sample_populations(std::span<const double> probability, std::size_t shots,
                                       double p_e_given_g, double p_g_given_e, std::uint64_t seed);

// --------------------------------------------------------------- pipeline

struct DetectionSettings {
  std::size_t shots_per_state = 15000;
  std::uint64_t seed = 1;
  // Score SNR |mu_e - mu_g| / sigma per scheme; a positive eta_det overrides
  // it through sigma_det = sqrt(0.5 / eta_det).
  double snr_mw_mw = 13.0;
  double snr_mw_opt = 4.11;
  double snr_opt_opt = 2.96;
  double eta_det_mw_mw = 0.0;
  double eta_det_mw_opt = 0.0;
  double eta_det_opt_opt = 0.0;
  double t1 = 33e-6;
  double thermal_excitation = 0.015;
  double readout_flip_probability = 0.0;
  double qnd_delay = 2e-6;
  bool keep_iq = false;
  unsigned threads = 0;

  bool operator==(const DetectionSettings&) const = default;
};

struct ShotRunResult {
  dynamics::Scheme scheme = dynamics::Scheme::mw_mw;
  double dt = 0.0;
  double window_start = 0.0;
  std::vector<cdouble> avg_g, avg_e;  // envelopes inside the integration window
  WeightFunction weight;
  double separation = 0.0;   // noiseless score difference
  double snr = 0.0;
  double sigma_score = 0.0;
  double n_meas_sqrt = 0.0;
  std::vector<ShotRecord> shots;
  DoubleGaussianFit fit;
  FidelityReport report;
  double sigma_det = 0.0;
  double eta_det = 0.0;
  std::size_t empirical_overlap_errors = 0;  // misassigned shots without flip events
  std::size_t empirical_overlap_shots = 0;
};

/// Window [start, start + duration) of a scenario trace.
std::vector<cdouble> window(const dynamics::ScenarioResult& r, double start, double duration);

/// Full chain: windowed envelopes -> weight -> shots -> scores -> fit ->
/// report. `n_meas_sqrt` is the readout amplitude for the efficiency scaling.
ShotRunResult run_shots(const dynamics::ScenarioResult& g, const dynamics::ScenarioResult& e,
                        double window_start, double window_duration, double n_meas_sqrt,
                        const DetectionSettings& settings);

/// SNR of the scheme after applying an eta_det override.
double scheme_snr(const DetectionSettings& s, dynamics::Scheme scheme, double n_meas_sqrt);

}  // namespace optoreadout::detection

#endif  // OPTOREADOUT_DETECTION_HPP
