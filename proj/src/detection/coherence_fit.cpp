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

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "optoreadout/constants.hpp"
#include "optoreadout/detection.hpp"
#include "optoreadout/error.hpp"

namespace optoreadout::detection {

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Fills residuals r = model - y and the Jacobian d model / d p.
using ModelFn = std::function<void(const Vec& p, Vec& r, Mat& jac)>;

struct LmResult {
  Vec p;
  double rss = 0.0;
  int iterations = 0;
  Mat jac;
};

LmResult levenberg_marquardt(const ModelFn& model, Vec p, std::size_t n, int max_iter = 500) {
  const auto k = p.size();
  Vec r(n);
  Mat jac(n, k);
  model(p, r, jac);
  double rss = r.squaredNorm();
  double lambda = 1e-3;
  int it = 0;
  for (; it < max_iter; ++it) {
    const Mat jtj = jac.transpose() * jac;
    const Vec g = jac.transpose() * r;
    bool improved = false;
    Vec step;
    while (lambda < 1e16) {
      Mat a = jtj;
      for (Eigen::Index i = 0; i < k; ++i) a(i, i) += lambda * std::max(jtj(i, i), 1e-300);
      step = a.ldlt().solve(-g);
      if (!step.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      const Vec trial = p + step;
      Vec rt(n);
      Mat jt(n, k);
      model(trial, rt, jt);
      const double rss_t = rt.allFinite() ? rt.squaredNorm() : std::numeric_limits<double>::infinity();
      if (rss_t <= rss) {
        const double drop = rss - rss_t;
        p = trial;
        r = rt;
        jac = jt;
        rss = rss_t;
        lambda = std::max(lambda / 10.0, 1e-12);
        improved = true;
        bool small = true;
        for (Eigen::Index i = 0; i < k; ++i)
          if (std::abs(step(i)) > 1e-10 * (std::abs(p(i)) + 1e-30)) small = false;
        if (small || drop <= 1e-14 * (rss + 1e-300)) return {p, rss, it + 1, jac};
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) return {p, rss, it + 1, jac};  // at a minimum to machine precision
  }
  fail(ErrorKind::numeric, "least-squares fit did not converge in " + std::to_string(max_iter) +
                               " iterations");
}

struct Uncertainty {
  Vec se;
  double t_quantile = 0.0;
};

Uncertainty uncertainty(const LmResult& fit, std::size_t n) {
  const auto k = fit.p.size();
  Uncertainty u;
  u.se = Vec::Constant(k, std::numeric_limits<double>::infinity());
  const auto dof = static_cast<double>(n) - static_cast<double>(k);
  if (dof <= 0) return u;
  boost::math::students_t dist(dof);
  u.t_quantile = boost::math::quantile(dist, 0.975);
  const double s2 = fit.rss / dof;
  const Mat jtj = fit.jac.transpose() * fit.jac;
  Eigen::FullPivLU<Mat> lu(jtj);
  if (!lu.isInvertible()) return u;
  const Mat cov = s2 * lu.inverse();
  for (Eigen::Index i = 0; i < k; ++i) u.se(i) = std::sqrt(std::max(cov(i, i), 0.0));
  return u;
}

ParameterEstimate estimate(double value, double se, double t) {
  return {value, se, value - t * se, value + t * se};
}

void check_inputs(std::span<const double> t, std::span<const double> y, std::size_t min_points,
                  const char* what) {
  if (t.size() != y.size())
    fail(ErrorKind::argument, std::string(what) + ": delays and populations differ in length");
  if (t.size() < min_points)
    fail(ErrorKind::argument, std::string(what) + ": need at least " + std::to_string(min_points) +
                                  " points");
  for (std::size_t i = 0; i < t.size(); ++i)
    if (!std::isfinite(t[i]) || !std::isfinite(y[i]))
      fail(ErrorKind::argument, std::string(what) + ": non-finite input");
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  if (*hi - *lo <= 1e-12 * (1.0 + std::abs(*hi)))
    fail(ErrorKind::numeric, std::string(what) + ": flat data, degenerate fit");
}

}  // namespace

T1Fit fit_t1(std::span<const double> delays, std::span<const double> populations) {
  check_inputs(delays, populations, 5, "fit_t1");
  const std::size_t n = delays.size();
  const auto [tmin, tmax] = std::minmax_element(delays.begin(), delays.end());
  const double span = *tmax - *tmin;
  if (!(span > 0.0)) fail(ErrorKind::argument, "fit_t1: delays must not all coincide");

  // p = (A, gamma, B) with model A exp(-gamma t) + B.
  const ModelFn model = [&](const Vec& p, Vec& r, Mat& jac) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double e = std::exp(-p(1) * delays[i]);
      r(ii) = p(0) * e + p(2) - populations[i];
      jac(ii, 0) = e;
      jac(ii, 1) = -p(0) * delays[i] * e;
      jac(ii, 2) = 1.0;
    }
  };
  std::size_t i_first = 0, i_last = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (delays[i] < delays[i_first]) i_first = i;
    if (delays[i] > delays[i_last]) i_last = i;
  }
  LmResult best;
  best.rss = std::numeric_limits<double>::infinity();
  for (double frac : {0.1, 0.3, 1.0, 3.0}) {
    const double gamma = 1.0 / (frac * span);
    const double decay = std::exp(-gamma * (delays[i_last] - delays[i_first]));
    // Two-point start through the first and last sample.
    const double a0 = (populations[i_first] - populations[i_last]) / (1.0 - decay) *
                      std::exp(gamma * delays[i_first]);
    const double b0 = populations[i_last] - a0 * std::exp(-gamma * delays[i_last]);
    Vec p0(3);
    p0 << a0, gamma, b0;
    try {
      LmResult r = levenberg_marquardt(model, p0, n);
      if (r.rss < best.rss) best = r;
    } catch (const Error&) {
    }
  }
  if (!std::isfinite(best.rss)) fail(ErrorKind::numeric, "fit_t1: did not converge");
  const Uncertainty u = uncertainty(best, n);
  T1Fit f;
  f.rss = best.rss;
  f.iterations = best.iterations;
  f.amplitude = estimate(best.p(0), u.se(0), u.t_quantile);
  f.offset = estimate(best.p(2), u.se(2), u.t_quantile);
  const double gamma = best.p(1);
  const double g_lo = gamma - u.t_quantile * u.se(1);
  const double g_hi = gamma + u.t_quantile * u.se(1);
  f.unbounded = !(gamma > 0.0) || gamma * span < 1e-6;
  f.t1.value = gamma > 0.0 ? 1.0 / gamma : std::numeric_limits<double>::infinity();
  f.t1.std_error = gamma > 0.0 ? u.se(1) / (gamma * gamma) : std::numeric_limits<double>::infinity();
  f.t1.ci_low = g_hi > 0.0 ? 1.0 / g_hi : 0.0;
  f.t1.ci_high = g_lo > 0.0 ? 1.0 / g_lo : std::numeric_limits<double>::infinity();
  return f;
}

RamseyFit fit_ramsey(std::span<const double> delays, std::span<const double> populations) {
  check_inputs(delays, populations, 6, "fit_ramsey");
  const std::size_t n = delays.size();
  const auto [tmin, tmax] = std::minmax_element(delays.begin(), delays.end());
  const double span = *tmax - *tmin;
  if (!(span > 0.0)) fail(ErrorKind::argument, "fit_ramsey: delays must not all coincide");
  std::vector<double> sorted(delays.begin(), delays.end());
  std::sort(sorted.begin(), sorted.end());
  double max_step = 0.0;
  for (std::size_t i = 1; i < n; ++i) max_step = std::max(max_step, sorted[i] - sorted[i - 1]);
  double mean = 0.0;
  for (double v : populations) mean += v;
  mean /= static_cast<double>(n);

  // DFT peak of the mean-free data up to the sampling limit.
  const double f_max = 0.5 / max_step;
  const double df = 0.25 / span;
  double best_f = df, best_mag = -1.0;
  cdouble best_c = 0.0;
  for (double fr = df; fr <= f_max; fr += df) {
    cdouble c = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      c += (populations[i] - mean) * std::polar(1.0, -constants::two_pi * fr * delays[i]);
    if (std::abs(c) > best_mag) {
      best_mag = std::abs(c);
      best_f = fr;
      best_c = c;
    }
  }

  // p = (A, gamma, delta, phi, B), model A exp(-gamma t) cos(2 pi delta t + phi) + B.
  const ModelFn model = [&](const Vec& p, Vec& r, Mat& jac) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double t = delays[i];
      const double e = std::exp(-p(1) * t);
      const double arg = constants::two_pi * p(2) * t + p(3);
      const double c = std::cos(arg), s = std::sin(arg);
      r(ii) = p(0) * e * c + p(4) - populations[i];
      jac(ii, 0) = e * c;
      jac(ii, 1) = -t * p(0) * e * c;
      jac(ii, 2) = -p(0) * e * s * constants::two_pi * t;
      jac(ii, 3) = -p(0) * e * s;
      jac(ii, 4) = 1.0;
    }
  };
  LmResult best;
  best.rss = std::numeric_limits<double>::infinity();
  for (double frac : {0.2, 0.5, 1.0, 3.0}) {
    const double gamma = 1.0 / (frac * span);
    // Amplitude of a decaying cosine seen through the DFT sum.
    double weight = 0.0;
    for (std::size_t i = 0; i < n; ++i) weight += std::exp(-gamma * delays[i]);
    Vec p0(5);
    p0 << 2.0 * best_mag / std::max(weight, 1.0), gamma, best_f, std::arg(best_c), mean;
    try {
      LmResult r = levenberg_marquardt(model, p0, n);
      if (r.rss < best.rss) best = r;
    } catch (const Error&) {
    }
  }
  if (!std::isfinite(best.rss)) fail(ErrorKind::numeric, "fit_ramsey: did not converge");
  Vec p = best.p;
  if (p(0) < 0.0) {
    p(0) = -p(0);
    p(3) += constants::pi;
  }
  if (p(2) < 0.0) {
    p(2) = -p(2);
    p(3) = -p(3);
  }
  p(3) = std::remainder(p(3), constants::two_pi);
  const Uncertainty u = uncertainty(best, n);
  if (!(p(0) > 0.0) || (std::isfinite(u.se(0)) && p(0) < 2.0 * u.se(0)))
    fail(ErrorKind::numeric, "fit_ramsey: oscillation amplitude not resolved, degenerate fit");

  RamseyFit f;
  f.rss = best.rss;
  f.iterations = best.iterations;
  const double t = u.t_quantile;
  f.amplitude = estimate(p(0), u.se(0), t);
  f.detuning = estimate(p(2), u.se(2), t);
  f.phase = estimate(p(3), u.se(3), t);
  f.offset = estimate(p(4), u.se(4), t);
  const double gamma = p(1);
  const double g_lo = gamma - t * u.se(1);
  const double g_hi = gamma + t * u.se(1);
  f.t2.value = gamma > 0.0 ? 1.0 / gamma : std::numeric_limits<double>::infinity();
  f.t2.std_error = gamma > 0.0 ? u.se(1) / (gamma * gamma) : std::numeric_limits<double>::infinity();
  f.t2.ci_low = g_hi > 0.0 ? 1.0 / g_hi : 0.0;
  f.t2.ci_high = g_lo > 0.0 ? 1.0 / g_lo : std::numeric_limits<double>::infinity();
  f.aliased = p(2) * max_step > 0.25;
  return f;
}

std::vector<double> sample_populations(std::span<const double> probability, std::size_t shots,
                                       double p_e_given_g, double p_g_given_e, std::uint64_t seed) {
  if (shots == 0) fail(ErrorKind::argument, "sample_populations: shots must be positive");
  std::vector<double> out(probability.size());
  for (std::size_t i = 0; i < probability.size(); ++i) {
    const double p = std::clamp(probability[i], 0.0, 1.0);
    const double measured = p * (1.0 - p_g_given_e) + (1.0 - p) * p_e_given_g;
    std::mt19937_64 rng(shot_seed(seed, i));
    std::binomial_distribution<std::size_t> bin(shots, std::clamp(measured, 0.0, 1.0));
    out[i] = static_cast<double>(bin(rng)) / static_cast<double>(shots);
  }
  return out;
}

}  // namespace optoreadout::detection
